#pragma once

#include <functional>
#include <string>
#include <vector>

#include "czw/wavelet.hpp"

namespace czw {

// <f, phi_z> over the cells of an affine grid, indexed [j * spatial_count() + i].
struct CwtCoefficients {
    AffineGrid affine_grid;
    std::vector<cplx> values;
    std::string wavelet_id;

    cplx at(std::size_t i, int j) const { return values[std::size_t(j) * affine_grid.spatial_count() + i]; }
};

// phi^(t xi) on the FFT frequencies of g (d = 1, or d = 2 for a radial phi).
std::vector<cplx> wavelet_symbol(const MotherWavelet& phi, double t, const Grid& g);

CwtCoefficients cwt(const SampledFunction& f, const MotherWavelet& phi, const AffineGrid& ag);

struct Reconstruction {
    SampledFunction f;
    double residual = -1;  // relative L2 error against the analyzed input, -1 when not supplied
};

// Quadrature of the integral of <f, phi_z> phi_z over the affine grid. Scales
// below r_min are skipped, which gives the r >= s half of the formula.
Reconstruction calderon_reconstruct(const CwtCoefficients& c, const MotherWavelet& phi, double r_min = 0.0);
Reconstruction calderon_reconstruct(const CwtCoefficients& c, const MotherWavelet& phi, const SampledFunction& analyzed,
                                    double r_min = 0.0);

// Quadrature of the integral of |<f, phi_z>|^2 over the affine grid; approximates ||f||_2^2.
double coefficient_energy(const CwtCoefficients& c);

double relative_l2(const SampledFunction& approx, const SampledFunction& exact);

void write_binary(const CwtCoefficients& c, const std::string& path);
CwtCoefficients read_cwt_binary(const std::string& path);

// Phi = psi1~ * psi2 + psi3~ * psi4, where ~ is reflection x -> -x.
//   psi1 = reflected F with F = H (1 - chi), H(x) = x_+^(m+1) / (m+1)!
//   psi2 = D^(m+2) Phi
//   psi3 = Phi, the integral over r >= 1 of phi*phi(w/r) dr/r^2
//   psi4 = G = D^(m+2)(H chi)
// chi is a smooth step, 0 on |x| <= 1/4 and 1 on |x| >= 1/2.
struct HighLowSystem {
    SampledFunction phi;  // mother wavelet base on the fine grid
    SampledFunction psi1, psi2, psi3, psi4;
    SampledFunction Phi;
    int m = 1;
    // Worst relative defect of delta = D^(m+2) F + G over the probe set.
    double probe_residual = 0;
    // Relative L2 defect of the convolution identity for Phi.
    double factorization_residual = 0;
};

// Fine grid used for the system (L = 2, N = 4096).
Grid highlow_grid();

HighLowSystem highlow_decompose(const MotherWavelet& phi, int m, double tolerance = 1e-4);

// Unit-L2 Hermite functions h_n(x / scale) on g, n < count.
std::vector<SampledFunction> hermite_probes(const Grid& g, int count, double scale);

// <f, Phi_{x,s}> for every node x.
SampledFunction single_scale_projection(const SampledFunction& f, double s, const HighLowSystem& sys);

// Right side of the single-scale identity: the two psi convolution terms at scale s.
SampledFunction highlow_right_side(const SampledFunction& f, double s, const HighLowSystem& sys);

// Relative L2(R^2) residual of the four-term single-scale expansion of f (x) g
// over the scales of ag; the absolute residual when f (x) g vanishes.
double tensor_reproducing_check(const SampledFunction& f, const SampledFunction& g, const HighLowSystem& sys,
                                const AffineGrid& ag);

using AveragingSymbol = std::function<double(double u, double v, double w, double s, double t)>;

enum class AveragingRegion {
    Upper,  // s >= t over all (u, v)
    Local   // s <= 3t with |u - w|, |v - w| <= 9t
};

// The hypothesis bound t^delta / max{s, |u - w|, |v - w|}^(2 + delta) (d = 1).
AveragingSymbol hypothesis_bound(double delta);

struct AveragingOptions {
    AveragingRegion region = AveragingRegion::Upper;
    // Largest s / t used for the upper region.
    double scale_span = 64.0;
    // Bound checked on sampled points when delta_check > 0.
    double delta_check = 0.0;
};

// nu_{w,t}(x, y) = integral of H psi_{u,s}(x) phi_{v,s}(y) du dv ds/s over the chosen
// region, sampled on ag.grid. The s-quadrature uses t rho^(j + 1/2) with the rho of ag.
// Messages about sampled points where |H| exceeds its bound are appended to warnings.
SampledFunction2D averaged_wavelet(const AveragingSymbol& H, const SampledFunction& psi, const SampledFunction& phi,
                                   const AffinePoint& z, const AffineGrid& ag, const AveragingOptions& opt = {},
                                   std::vector<std::string>* warnings = nullptr);

// t^-kappa d_y^-kappa along the second variable (symbol xi_y^-kappa per row, d = 1).
SampledFunction2D partial_antiderivative_y(const SampledFunction2D& nu, int kappa, double t);

}  // namespace czw
