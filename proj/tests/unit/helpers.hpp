#pragma once

#include <cmath>
#include <random>

#include "czw/expression.hpp"
#include "czw/grid.hpp"

namespace czw::test {

inline SampledFunction sample_expr(const char* text, const Grid& g) {
    return sample(parse_expression(text, g.d).field(), g);
}

inline double max_diff(const SampledFunction& a, const SampledFunction& b) {
    double m = 0;
    for (std::size_t i = 0; i < a.values.size(); ++i) m = std::max(m, std::abs(a.values[i] - b.values[i]));
    return m;
}

inline double rel_l2(const SampledFunction& a, const SampledFunction& ref) {
    return l2_norm(a - ref) / l2_norm(ref);
}

// Gaussian-windowed random trigonometric sum with frequencies in [lo, hi].
inline SampledFunction random_band_limited(const Grid& g, unsigned seed, double lo = 11.0, double hi = 37.0,
                                           double width = 1.5, double center = 0.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> fr(lo + 4.0 / width, hi - 4.0 / width), ph(0, 2 * kPi);
    std::normal_distribution<double> amp(0, 1);
    double f1 = fr(rng), f2 = fr(rng), p1 = ph(rng), p2 = ph(rng), a1 = amp(rng), a2 = amp(rng);
    return sample([=](double x, double) {
        double env = std::exp(-(x - center) * (x - center) / (2 * width * width));
        return cplx(env * (a1 * std::cos(f1 * x + p1) + a2 * std::cos(f2 * x + p2)), 0.0);
    }, g);
}

}  // namespace czw::test
