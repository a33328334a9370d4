#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "czw/transform.hpp"
#include "czw/wavelet.hpp"

namespace czw {

// Trilinear rule Lambda(f, g, h) on d = 1 samples. Rules are pure and may be
// called from parallel workers.
struct FormEvaluator {
    std::string tag;
    std::function<cplx(const SampledFunction&, const SampledFunction&, const SampledFunction&)> rule;

    cplx operator()(const SampledFunction& f, const SampledFunction& g, const SampledFunction& h) const {
        return rule(f, g, h);
    }
};

// Lambda(f, g, h) = integral f g h.
FormEvaluator pointwise_product();

// Lambda(f, g, h) = integral T(f, g) h with T(f, g)^ given by the bilinear
// symbol m(xi1, xi2) f^(xi1) g^(xi2), evaluated as an O(N^2) frequency sum.
FormEvaluator smooth_multiplier(std::function<cplx(double, double)> m, std::string label = "m");

// Pairing <f, theta_z> = integral f conj(theta_z) at every cell of ag, where
// theta_z = t^-1 profile((x - w)/t). Layout [j * K + i] as in CwtCoefficients.
std::vector<cplx> profile_coefficients(const SampledFunction& f, const SampledFunction& profile, const AffineGrid& ag);

// Band-limited samples of t^-1 profile((x - w)/t) on g; the spectral
// counterpart of the pairings above.
SampledFunction place(const SampledFunction& profile, const AffinePoint& z, const Grid& g);

using NuFamily = std::function<SampledFunction2D(const AffinePoint&)>;

// Sum over cells of <f (x) g, nu_z> <h, phi_z> with the affine-grid weights.
cplx wavelet_form(const NuFamily& nu, const MotherWavelet& phi, const SampledFunction& f, const SampledFunction& g,
                  const SampledFunction& h, const AffineGrid& ag);
// Same with an arbitrary third-slot profile in place of the mother wavelet.
cplx wavelet_form(const NuFamily& nu, const SampledFunction& third, const SampledFunction& f, const SampledFunction& g,
                  const SampledFunction& h, const AffineGrid& ag);
FormEvaluator wavelet_form_evaluator(NuFamily nu, MotherWavelet phi, AffineGrid ag);

// nu_z = phi_z (x) phi_z, placed spectrally (periodic, so edge cells wrap).
NuFamily mother_tensor_family(const MotherWavelet& phi, const Grid& g);

struct GammaPair {
    int first = 0;
    int second = 0;
    int total() const { return first + second; }
};

// Sum over cells of <b, (d^-(g1+g2) phi)_z> <f, theta^g1_z> <g, theta^g2_z> <h, phi_z>.
cplx paraproduct_form(const SampledFunction& b, GammaPair gamma, const std::pair<GammaFamily, GammaFamily>& fams,
                      const MotherWavelet& phi, const SampledFunction& f, const SampledFunction& g,
                      const SampledFunction& h, const AffineGrid& ag);
FormEvaluator paraproduct(SampledFunction b, GammaPair gamma, std::pair<GammaFamily, GammaFamily> fams,
                          MotherWavelet phi, AffineGrid ag);
// Pi^{1*}(f, g, h) = Pi(h, g, f) and Pi^{2*}(f, g, h) = Pi(f, h, g).
FormEvaluator adjoint(const FormEvaluator& form, int which);

// Smooth window: 1 on |x| <= inner, 0 beyond outer.
double smooth_window(double x, double inner, double outer);
// Monomial x^k times smooth_window(x, inner, outer) on g.
SampledFunction windowed_monomial(const Grid& g, int k, double inner, double outer);

// Largest mean oscillation of b over dyadic intervals of the grid with at
// least 8 nodes (diagnostic BMO size).
double bmo_oscillation(const SampledFunction& b);

// Fractional derivative through the symbol |xi|^sigma.
SampledFunction fractional_derivative(const SampledFunction& f, double sigma);

// ---- intrinsic forms ----

// max over members of |<f, member_z>|.
double intrinsic_coefficient(const SampledFunction& f, const AffinePoint& z, const WaveletDictionary& dict);
// max over tensor members of |<f (x) g, member_z>|.
double intrinsic_coefficient(const SampledFunction& f, const SampledFunction& g, const AffinePoint& z,
                             const WaveletDictionary& dict);

// Same maxima at every cell of ag, computed through per-scale correlations.
std::vector<double> intrinsic_field(const SampledFunction& f, const WaveletDictionary& dict, const AffineGrid& ag);
std::vector<double> intrinsic_field(const SampledFunction& f, const SampledFunction& g, const WaveletDictionary& dict,
                                    const AffineGrid& ag);

struct IntrinsicDictionaries {
    WaveletDictionary rapid;   // cancellative S_0 class, one slot
    WaveletDictionary plain;   // noncancellative class, one slot (maximal functions)
    WaveletDictionary pair10;  // two slots, cancellation in the second
    WaveletDictionary pair11;  // two slots, both cancellative
    std::optional<WaveletDictionary> sigma10;
    std::optional<WaveletDictionary> sigma11;

    static IntrinsicDictionaries standard(int size, std::uint64_t seed = 7, double delta = 1.0, double eta = 0.5);
    // Adds the sigma classes (k = 0) to a standard set.
    IntrinsicDictionaries with_sigma(double sigma, int size, std::uint64_t seed = 7) const;
    double sigma() const;
};

double mss_form(const SampledFunction& f, const SampledFunction& g, const SampledFunction& h,
                const IntrinsicDictionaries& dicts, const AffineGrid& ag);
double pi_b_form(const SampledFunction& b, const SampledFunction& f, const SampledFunction& g,
                 const SampledFunction& h, const IntrinsicDictionaries& dicts, const AffineGrid& ag);
// Integral of sup |<h (x) g, nu^sigma_z>| times the S_0 coefficient of D^sigma f.
double msssig_form(const SampledFunction& h, const SampledFunction& g, const SampledFunction& f, double sigma,
                   const IntrinsicDictionaries& dicts, const AffineGrid& ag);
// S_0 coefficients of b and h with the sigma class (both slots cancellative) on (f, g).
double pi_b_sigma_form(const SampledFunction& b, const SampledFunction& f, const SampledFunction& g,
                       const SampledFunction& h, double sigma, const IntrinsicDictionaries& dicts,
                       const AffineGrid& ag);

// ---- the symbol Upsilon ----

enum class UpsilonRegion { Far, Near, HighLow };
const char* region_name(UpsilonRegion r);
// F: max{|u-w|, |v-w|} >= 3s; otherwise S when s <= 3t, A when s >= 3t.
UpsilonRegion classify_region(double u, double v, double w, double s, double t);

struct UpsilonInputs {
    FormEvaluator lambda;
    SampledFunction psi;   // first-slot profile (reference point (0, 1))
    SampledFunction phi;   // second-slot profile
    MotherWavelet mother;  // third slot
    std::vector<GammaFamily> fams;  // fams[g] is the gamma = g family
    Grid grid;
    int k1 = 0;
    int k2 = 0;
};

// Lambda(psi_us, phi_vs, phi_wt) minus the region-A polynomial corrections
// with P_{-1} = 0. Polynomials are cut off smoothly far from w so that they
// fit on the periodic grid.
cplx upsilon(const UpsilonInputs& in, double u, double v, double w, double s, double t);

struct UpsilonSample {
    double u = 0, v = 0, w = 0, s = 0, t = 0;
    cplx value;
    UpsilonRegion region = UpsilonRegion::Far;
    bool disjoint = false;  // the three supports share no point
};

struct UpsilonSampling {
    int count = 500;
    std::uint64_t seed = 11;
    double ratio_max = 64.0;   // s / t in [1, ratio_max]
    double offset_min = 0.125;  // |u - w| / t, |v - w| / t in [offset_min, offset_max]
    double offset_max = 64.0;
};

struct UpsilonField {
    std::vector<UpsilonSample> samples;
    int k1 = 0;
    int k2 = 0;
    double w = 0;
    double t = 1;
    std::uint64_t seed = 0;
};

// Latin hypercube over log-spaced (s/t, |u-w|/t, |v-w|/t) with random signs.
UpsilonField sample_upsilon(const UpsilonInputs& in, double w, double t, const UpsilonSampling& opt);

struct DecayCertificate {
    double slope = 0;
    double intercept = 0;
    double target = 0;
    double constant = 0;  // max |Upsilon| max{s,|u-w|,|v-w|}^(2+k+eta) / t^(k+eta)
    double eta = 0;
    int far = 0, near = 0, highlow = 0;
    int nonzero = 0;             // samples above the resolution floor
    int below_floor = 0;         // nonzero samples under the floor
    double floor = 0;            // absolute floor used
    int disjoint = 0;            // disjoint-support samples outside A
    int disjoint_nonzero = 0;    // of those, samples with a nonzero value
    bool degenerate = false;
    std::uint64_t seed = 0;
};

// Least-squares fit of log|Upsilon| on log max{s,|u-w|,|v-w|} over samples
// above relative_floor * max|Upsilon|; smaller values are quadrature noise
// (tails of compactly supported profiles, spectral roundoff). Throws when a
// region holds fewer than 8 samples.
DecayCertificate upsilon_decay_certificate(const UpsilonField& field, double eta, double relative_floor = 1e-12);

void write_csv(const UpsilonField& field, const std::string& path);

// ---- checks ----

// Largest and smallest t^2 |Lambda(a_z, b_z, c_z)| over the cells of ag.
struct WbpReport {
    double max = 0;
    double min = 0;
};
WbpReport wbp_constant(const FormEvaluator& lambda, const SampledFunction& a, const SampledFunction& b,
                       const SampledFunction& c, const AffineGrid& ag);

// Both sides of <f (x) g, nu_z><d h, phi_z> = <f (x) d g, t^-1 d_y^-1 nu_z><h, t d phi_z>
// summed over the grid.
struct ShiftReport {
    cplx lhs;
    cplx rhs;
    double relative = 0;
};
ShiftReport derivative_shift_check(const NuFamily& nu, const MotherWavelet& phi, const SampledFunction& f,
                                   const SampledFunction& g, const SampledFunction& h, const AffineGrid& ag);

}  // namespace czw
