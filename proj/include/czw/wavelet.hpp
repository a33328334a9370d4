#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "czw/grid.hpp"

namespace czw {

struct MotherWavelet {
    SampledFunction base;
    int D = 1;
    double admissibility_constant = 1.0;

    const Grid& grid() const { return base.grid; }
    // Continuous Fourier transform of the base at u0 + m du (d = 1).
    std::vector<cplx> spectrum(double u0, double du, std::size_t M) const;
    // phi^(t xi_k) at the FFT frequencies of g, in FFT order.
    std::vector<cplx> scaled_spectrum(double t, const Grid& g) const;
};

// Continuous Fourier transform of a compactly supported d = 1 sample at
// t * xi_k for the FFT frequencies of g, in FFT order. Frequencies beyond the
// sample's own Nyquist limit carry no information and are returned as 0.
std::vector<cplx> scaled_spectrum(const SampledFunction& ref, double t, const Grid& g);

// c * Laplacian^(D+1) of the even (d = 1) or symmetrized (d = 2) part of bump,
// with even moments through 2D projected out and c fixed by admissibility.
MotherWavelet make_mother_wavelet(int D, const SampledFunction& bump);

// Default bump exp(1/(|x|^2 - 1/4)) on [-1, 1)^d with 2048 (d = 1) or 256 (d = 2) nodes.
SampledFunction default_bump(int d = 1);

// Log-spaced quadrature of the integral of |phi^(u)|^2 du/u over (0, Nyquist];
// d = 1 averages u and -u, d = 2 averages 8 equispaced directions.
double admissibility_constant(const SampledFunction& phi);

// Relative spread of the 8 directional integrals (d = 2); 0 in d = 1.
double admissibility_direction_spread(const SampledFunction& phi);

// L1-normalized translate-dilate t^-d f((x - w)/t). Samples are read from the
// trigonometric interpolant of f inside the hull of its non-negligible nodes
// and set to 0 outside it.
SampledFunction sy(const AffinePoint& z, const SampledFunction& f);
SampledFunction sy(const AffinePoint& z, const SampledFunction& f, const Grid& target);
// (Sy_z)^{-1} f(x) = t^d f(w + t x); mass mapped outside the grid is dropped.
SampledFunction sy_inverse(const AffinePoint& z, const SampledFunction& f);
SampledFunction2D sy_inverse(const AffinePoint& z, const SampledFunction2D& f);
SampledFunction2D sy(const AffinePoint& z, const SampledFunction2D& f);

// Symbol xi^order for order >= 0, xi^|order| / |xi|^(2|order|) for order < 0
// (the latter needs enough vanishing moments of f).
SampledFunction symbol_derivative(const SampledFunction& f, int order, int axis = 0);

// Integral of ((x - c)/s)^a f(x) along one axis (d = 1) or of x^a y^b (d = 2).
cplx moment(const SampledFunction& f, int a, double center = 0.0, double scale = 1.0);
cplx moment2(const SampledFunction& f, int a, int b);

struct NormParts {
    double size = 0;
    double holder = 0;
    double total() const { return size + holder; }
};

double star_norm(const SampledFunction& f, double eta, double delta);
NormParts star_norm_parts(const SampledFunction& f, double eta, double delta);
double star_norm(const SampledFunction2D& f, double eta, double delta);
// Asymmetric bracket <x>^(1+sigma) (1+|x2|)^(1+eta-sigma); star_norm when sigma > 1 + eta.
double sigma_norm(const SampledFunction2D& f, double sigma, double eta, double delta);

enum class ClassKind {
    Standard,    // surplus eta + |gamma|
    RapidDecay,  // S_0 variant: surplus 2d + 1 in the star norm
    Sigma        // asymmetric sigma norm with surplus k + delta (2D only)
};

struct WaveletClassSpec {
    int k = 0;
    double delta = 1.0;
    double eta = 0.5;
    std::optional<double> sigma;
    // One entry per tensor slot; true means the slot must be cancellative.
    std::vector<bool> cancellative{false};
    ClassKind kind = ClassKind::Standard;

    int slots() const { return int(cancellative.size()); }
    void validate() const;
    std::string describe() const;

    static WaveletClassSpec noncancellative(double delta = 1.0, double eta = 0.5);
    static WaveletClassSpec rapid_decay(double delta = 1.0);
    static WaveletClassSpec tensor(bool cancel_x, bool cancel_y, double delta = 1.0, double eta = 0.5);
    static WaveletClassSpec sigma_class(double sigma, int k, double delta = 1.0);
};

// max over |gamma| <= k of t^|gamma| star_norm((Sy_z)^-1 d^gamma f, surplus, delta);
// +infinity when a cancellative slot has a nonvanishing moment of order <= k.
double class_membership(const SampledFunction& f, const AffinePoint& z, const WaveletClassSpec& spec);
double class_membership(const SampledFunction2D& f, const AffinePoint& z, const WaveletClassSpec& spec);

struct GammaFamily {
    int gamma = 0;
    double support_radius = 0.5;
    SampledFunction base;
};

// Gram matrix of the bump against monomials: entry (i, j) = integral bump x^(i+j).
std::vector<std::vector<double>> moment_matrix(const SampledFunction& bump, int order);

GammaFamily make_gamma_family(int gamma, double support_radius, const Grid& g = Grid(1, 2.0, 2048));

// Rank-r tensor member sum_r a_r(x) b_r(y), stored at the reference point (0, 1).
struct TensorMember {
    std::vector<std::pair<SampledFunction, SampledFunction>> terms;
    SampledFunction2D assemble() const;
};

struct WaveletDictionary {
    WaveletClassSpec spec;
    AffinePoint z;
    std::uint64_t seed = 0;
    Grid reference_grid;
    std::vector<SampledFunction> members;     // one-slot classes
    std::vector<TensorMember> tensor_members;  // two-slot classes
    std::vector<std::string> labels;

    std::size_t size() const { return spec.slots() == 1 ? members.size() : tensor_members.size(); }
    // Member i carried to z on the given grid.
    SampledFunction member_at(std::size_t i, const Grid& g) const;
    SampledFunction2D tensor_member_at(std::size_t i, const Grid& g) const;
};

inline Grid default_reference_grid() { return Grid(1, 8.0, 512); }

// Seeded family of class representatives; a dictionary of size n is the first
// n members of one of size n + 1 with the same seed.
WaveletDictionary build_dictionary(const WaveletClassSpec& spec, const AffinePoint& z, int size,
                                   std::uint64_t seed = 7, const Grid& reference = default_reference_grid());

}  // namespace czw
