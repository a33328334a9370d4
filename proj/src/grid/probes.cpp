#include "czw/probes.hpp"

#include <algorithm>
#include <random>
#include <vector>

namespace czw {

SampledFunction band_limited_probe(const Grid& g, std::uint64_t seed, double lo, double hi, double width,
                                   double center) {
    if (!(width > 0) || !(hi - lo > 8.0 / width)) throw Error("band_limited_probe: band too narrow for the envelope");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> fr(lo + 4.0 / width, hi - 4.0 / width), ph(0, 2 * kPi);
    std::normal_distribution<double> amp(0, 1);
    double f1 = fr(rng), f2 = fr(rng), p1 = ph(rng), p2 = ph(rng), a1 = amp(rng), a2 = amp(rng);
    return sample([=](double x, double y) {
        double r2 = (x - center) * (x - center) + (g.d == 2 ? y * y : 0.0);
        double env = std::exp(-r2 / (2 * width * width));
        return cplx(env * (a1 * std::cos(f1 * x + p1) + a2 * std::cos(f2 * x + p2)), 0.0);
    }, g);
}

SampledFunction bump_cluster(const Grid& g, std::uint64_t seed, double lo, double hi, int count) {
    if (g.d != 1) throw Error("bump_cluster: one-dimensional grid required");
    if (!(hi > lo) || count < 1) throw Error("bump_cluster: need lo < hi and count >= 1");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double span = hi - lo;
    std::vector<double> c(count), r(count), a(count);
    for (int i = 0; i < count; ++i) {
        r[i] = span * (0.05 + 0.15 * u(rng));
        c[i] = lo + r[i] + (span - 2 * r[i]) * u(rng);
        a[i] = 0.5 + u(rng);
    }
    return sample([=](double x, double) {
        double s = 0;
        for (int i = 0; i < count; ++i) {
            double y = (x - c[i]) / r[i];
            if (std::abs(y) < 1) s += a[i] * std::exp(-1.0 / (1.0 - y * y));
        }
        return cplx(s);
    }, g);
}

}  // namespace czw
