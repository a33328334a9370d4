#include <cmath>
#include <random>

#include "czw/expression.hpp"
#include "czw/wavelet.hpp"

namespace czw {
namespace {

// Smooth cutoff: 1 on |x| <= 5, 0 beyond 7 (reference grids have L >= 8).
double window(double x, double L) {
    double a = 5.0 * L / 8.0, b = 7.0 * L / 8.0, r = std::abs(x);
    if (r <= a) return 1.0;
    if (r >= b) return 0.0;
    double s = (r - a) / (b - a);
    auto f = [](double u) { return u > 0 ? std::exp(-1.0 / u) : 0.0; };
    return f(1 - s) / (f(1 - s) + f(s));
}

class Shapes {
public:
    Shapes(const Grid& g, std::uint64_t seed) : g_(g), rng_(seed) {}

    double uni(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

    SampledFunction make(const std::function<double(double)>& fn) const {
        double L = g_.L;
        return sample([&](double x, double) { return cplx(fn(x) * window(x, L)); }, g_);
    }

    SampledFunction bump(double a, double r) const {
        return make([=](double x) { return bump_profile((x - a) / (2 * r)); });
    }

    // Noncancellative shape number n; n = 0 is the centered bump.
    SampledFunction plain(int n, double decay) {
        if (n == 0) return bump(0.0, 1.0);
        switch (n % 4) {
            case 1: {
                double a = uni(-1.5, 1.5), r = uni(0.6, 1.5);
                return bump(a, r);
            }
            case 2: {
                double r = uni(0.8, 1.5), om = uni(1.0, 5.0), p = uni(0.0, 2 * kPi);
                return make([=](double x) { return bump_profile(x / (2 * r)) * std::cos(om * x + p); });
            }
            case 3: {
                double a = uni(-2.0, 2.0);
                return make([=](double x) { return std::pow(1 + (x - a) * (x - a), -decay / 2); });
            }
            default: {
                double a = uni(-1.5, 1.5), s = uni(0.3, 1.0);
                return make([=](double x) { return std::exp(-(x - a) * (x - a) / (2 * s * s)); });
            }
        }
    }

    // Mean-zero, rapidly decaying shape number n.
    SampledFunction cancellative(int n) {
        SampledFunction f(g_);
        double a = 0, s = 0.5;
        if (n == 0) {
            f = make([](double x) { return -x * std::exp(-x * x / 0.5); });
        } else {
            a = uni(-1.5, 1.5);
            s = uni(0.35, 0.9);
            switch (n % 3) {
                case 1:
                    f = make([=](double x) { double u = (x - a) / s; return -u * std::exp(-u * u / 2); });
                    break;
                case 2:
                    f = make([=](double x) { double u = (x - a) / s; return (1 - u * u) * std::exp(-u * u / 2); });
                    break;
                default: {
                    double om = uni(2.0, 6.0) / s, p = uni(0.0, 2 * kPi);
                    f = make([=](double x) { double u = (x - a) / s; return std::exp(-u * u / 2) * std::cos(om * (x - a) + p); });
                }
            }
        }
        // Remove the remaining mean with a Gaussian at the same center.
        SampledFunction g0 = make([=](double x) { double u = (x - a) / s; return std::exp(-u * u / 2); });
        f -= (integrate(f) / integrate(g0)) * g0;
        return f;
    }

private:
    Grid g_;
    std::mt19937_64 rng_;
};

}  // namespace

SampledFunction2D TensorMember::assemble() const {
    if (terms.empty()) throw Error("tensor member: no terms");
    SampledFunction2D out(terms.front().first.grid);
    for (const auto& [a, b] : terms) {
        auto t = SampledFunction2D::tensor(a, b);
        for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] += t.values[i];
    }
    return out;
}

SampledFunction WaveletDictionary::member_at(std::size_t i, const Grid& g) const {
    if (spec.slots() != 1) throw Error("dictionary: one-slot member requested from a tensor class");
    return sy(z, members.at(i), g);
}

SampledFunction2D WaveletDictionary::tensor_member_at(std::size_t i, const Grid& g) const {
    if (spec.slots() != 2) throw Error("dictionary: tensor member requested from a one-slot class");
    SampledFunction2D out(g);
    for (const auto& [a, b] : tensor_members.at(i).terms) {
        auto t = SampledFunction2D::tensor(sy(z, a, g), sy(z, b, g));
        for (std::size_t k = 0; k < out.values.size(); ++k) out.values[k] += t.values[k];
    }
    return out;
}

WaveletDictionary build_dictionary(const WaveletClassSpec& spec, const AffinePoint& z, int size, std::uint64_t seed,
                                   const Grid& reference) {
    spec.validate();
    if (size < 1) throw Error("dictionary: size must be at least 1");
    if (spec.k > 0) throw Error("dictionary: only k = 0 classes have generated representatives");
    WaveletDictionary dict;
    dict.spec = spec;
    dict.z = z;
    dict.seed = seed;
    dict.reference_grid = reference;
    Shapes shapes(reference, seed);
    AffinePoint origin(0.0, 1.0);

    if (spec.slots() == 1) {
        double decay = 1 + spec.eta;
        for (int n = 0; n < size; ++n) {
            SampledFunction f = spec.cancellative[0] ? shapes.cancellative(n) : shapes.plain(n, decay);
            double norm = class_membership(f, origin, spec);
            if (!(norm > 0) || !std::isfinite(norm)) throw Error("dictionary: representative failed class checks");
            f *= cplx(1.0 / norm);
            dict.members.push_back(std::move(f));
            dict.labels.push_back(spec.cancellative[0] ? "cancellative-" + std::to_string(n % 3)
                                                       : "plain-" + std::to_string(n == 0 ? 0 : 1 + (n - 1) % 4));
        }
        return dict;
    }

    // Tensor classes: the 2D star norm needs decay beyond 2 + eta in each variable.
    double decay = 2 + spec.eta + 0.5;
    auto slot = [&](bool canc, int n) { return canc ? shapes.cancellative(n) : shapes.plain(n, decay); };
    for (int n = 0; n < size; ++n) {
        TensorMember m;
        m.terms.push_back({slot(spec.cancellative[0], n), slot(spec.cancellative[1], n)});
        if (n % 3 == 2) {
            auto a = slot(spec.cancellative[0], n + 1), b = slot(spec.cancellative[1], n + 1);
            m.terms.push_back({cplx(shapes.uni(-1.0, 1.0)) * a, b});
        }
        double norm = class_membership(m.assemble(), origin, spec);
        if (!(norm > 0) || !std::isfinite(norm)) throw Error("dictionary: representative failed class checks");
        double s = 1.0 / std::sqrt(norm);
        for (auto& [a, b] : m.terms) a *= cplx(s), b *= cplx(s);
        dict.labels.push_back(m.terms.size() > 1 ? "tensor-mixture" : "tensor");
        dict.tensor_members.push_back(std::move(m));
    }
    return dict;
}

}  // namespace czw
