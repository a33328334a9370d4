#include <algorithm>
#include <cmath>

#include "czw/forms.hpp"

namespace czw {
namespace {

const WaveletDictionary& need(const std::optional<WaveletDictionary>& d, const char* what) {
    if (!d) throw Error(std::string(what) + ": sigma dictionaries missing (use with_sigma)");
    return *d;
}

void check_sigma(const WaveletDictionary& d, double sigma, const char* what) {
    if (!d.spec.sigma || std::abs(*d.spec.sigma - sigma) > 1e-12)
        throw Error(std::string(what) + ": dictionary built for a different sigma");
}

double integrate_product(const AffineGrid& ag, std::initializer_list<const std::vector<double>*> parts) {
    std::vector<double> cells(ag.cell_count(), 1.0);
    for (const auto* p : parts)
        for (std::size_t i = 0; i < cells.size(); ++i) cells[i] *= (*p)[i];
    return mu_integrate(ag, cells);
}

}  // namespace

double intrinsic_coefficient(const SampledFunction& f, const AffinePoint& z, const WaveletDictionary& dict) {
    if (dict.spec.slots() != 1) throw Error("intrinsic_coefficient: one-slot dictionary required");
    double best = 0;
    for (const auto& m : dict.members) best = std::max(best, std::abs(inner(f, place(m, z, f.grid))));
    return best;
}

double intrinsic_coefficient(const SampledFunction& f, const SampledFunction& g, const AffinePoint& z,
                             const WaveletDictionary& dict) {
    if (dict.spec.slots() != 2) throw Error("intrinsic_coefficient: tensor dictionary required");
    double best = 0;
    for (const auto& m : dict.tensor_members) {
        cplx s = 0;
        for (const auto& [a, b] : m.terms) s += inner(f, place(a, z, f.grid)) * inner(g, place(b, z, g.grid));
        best = std::max(best, std::abs(s));
    }
    return best;
}

std::vector<double> intrinsic_field(const SampledFunction& f, const WaveletDictionary& dict, const AffineGrid& ag) {
    if (dict.spec.slots() != 1) throw Error("intrinsic_field: one-slot dictionary required");
    std::vector<double> best(ag.cell_count(), 0.0);
    for (const auto& m : dict.members) {
        auto c = profile_coefficients(f, m, ag);
        for (std::size_t i = 0; i < best.size(); ++i) best[i] = std::max(best[i], std::abs(c[i]));
    }
    return best;
}

std::vector<double> intrinsic_field(const SampledFunction& f, const SampledFunction& g, const WaveletDictionary& dict,
                                    const AffineGrid& ag) {
    if (dict.spec.slots() != 2) throw Error("intrinsic_field: tensor dictionary required");
    std::vector<double> best(ag.cell_count(), 0.0);
    for (const auto& m : dict.tensor_members) {
        std::vector<cplx> sum(best.size(), 0.0);
        for (const auto& [a, b] : m.terms) {
            auto ca = profile_coefficients(f, a, ag), cb = profile_coefficients(g, b, ag);
            for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += ca[i] * cb[i];
        }
        for (std::size_t i = 0; i < best.size(); ++i) best[i] = std::max(best[i], std::abs(sum[i]));
    }
    return best;
}

IntrinsicDictionaries IntrinsicDictionaries::standard(int size, std::uint64_t seed, double delta, double eta) {
    AffinePoint origin(0.0, 1.0);
    IntrinsicDictionaries d;
    d.rapid = build_dictionary(WaveletClassSpec::rapid_decay(delta), origin, size, seed);
    d.pair10 = build_dictionary(WaveletClassSpec::tensor(false, true, delta, eta), origin, size, seed + 1);
    d.pair11 = build_dictionary(WaveletClassSpec::tensor(true, true, delta, eta), origin, size, seed + 2);
    d.plain = build_dictionary(WaveletClassSpec::noncancellative(delta, eta), origin, size, seed + 5);
    return d;
}

IntrinsicDictionaries IntrinsicDictionaries::with_sigma(double sigma, int size, std::uint64_t seed) const {
    IntrinsicDictionaries d = *this;
    AffinePoint origin(0.0, 1.0);
    WaveletClassSpec s10 = WaveletClassSpec::sigma_class(sigma, 0, rapid.spec.delta);
    WaveletClassSpec s11 = s10;
    s11.cancellative = {true, true};
    d.sigma10 = build_dictionary(s10, origin, size, seed + 3);
    d.sigma11 = build_dictionary(s11, origin, size, seed + 4);
    return d;
}

double IntrinsicDictionaries::sigma() const {
    return sigma10 && sigma10->spec.sigma ? *sigma10->spec.sigma : 0.0;
}

double mss_form(const SampledFunction& f, const SampledFunction& g, const SampledFunction& h,
                const IntrinsicDictionaries& dicts, const AffineGrid& ag) {
    auto a = intrinsic_field(f, g, dicts.pair10, ag);
    auto c = intrinsic_field(h, dicts.rapid, ag);
    return integrate_product(ag, {&a, &c});
}

double pi_b_form(const SampledFunction& b, const SampledFunction& f, const SampledFunction& g,
                 const SampledFunction& h, const IntrinsicDictionaries& dicts, const AffineGrid& ag) {
    auto cb = intrinsic_field(b, dicts.rapid, ag);
    auto a = intrinsic_field(f, g, dicts.pair11, ag);
    auto c = intrinsic_field(h, dicts.rapid, ag);
    return integrate_product(ag, {&cb, &a, &c});
}

double msssig_form(const SampledFunction& h, const SampledFunction& g, const SampledFunction& f, double sigma,
                   const IntrinsicDictionaries& dicts, const AffineGrid& ag) {
    const auto& d = need(dicts.sigma10, "msssig_form");
    check_sigma(d, sigma, "msssig_form");
    auto a = intrinsic_field(h, g, d, ag);
    auto c = intrinsic_field(fractional_derivative(f, sigma), dicts.rapid, ag);
    return integrate_product(ag, {&a, &c});
}

double pi_b_sigma_form(const SampledFunction& b, const SampledFunction& f, const SampledFunction& g,
                       const SampledFunction& h, double sigma, const IntrinsicDictionaries& dicts,
                       const AffineGrid& ag) {
    const auto& d = need(dicts.sigma11, "pi_b_sigma_form");
    check_sigma(d, sigma, "pi_b_sigma_form");
    auto cb = intrinsic_field(b, dicts.rapid, ag);
    auto a = intrinsic_field(f, g, d, ag);
    auto c = intrinsic_field(h, dicts.rapid, ag);
    return integrate_product(ag, {&cb, &a, &c});
}

}  // namespace czw
