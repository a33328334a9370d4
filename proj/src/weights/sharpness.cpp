#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "czw/expression.hpp"
#include "czw/parallel.hpp"
#include "czw/weights.hpp"

namespace czw {

SharpnessReport sharpness_experiment(double sigma, const std::vector<int>& ks, double r1, double r2,
                                     const SharpnessOptions& opt) {
    if (!(sigma >= 0) || !std::isfinite(sigma)) throw Error("sharpness_experiment: sigma must be finite and nonnegative");
    if (!(r1 >= 1) || !(r2 >= 1)) throw Error("sharpness_experiment: r1, r2 must be at least 1");
    if (std::set<int>(ks.begin(), ks.end()).size() < 4 || ks.size() != std::set<int>(ks.begin(), ks.end()).size())
        throw Error("sharpness_experiment: need at least 4 distinct k values");
    int kmax = *std::max_element(ks.begin(), ks.end()), kmin = *std::min_element(ks.begin(), ks.end());
    if (kmin < 0) throw Error("sharpness_experiment: k must be nonnegative");
    if (std::ldexp(1.0, kmax + 1) > opt.L / 2)
        throw Error("sharpness_experiment: grid too small, need 2^(k_max + 1) <= L/2");
    Grid g(1, opt.L, opt.N);
    if (std::fmod(1.0, g.h()) != 0) throw Error("sharpness_experiment: the annulus radii must be grid nodes");
    if (!(opt.center + opt.radius < M_PI / g.h())) throw Error("sharpness_experiment: spectral window above Nyquist");

    // f^ is a smooth bump supported in |xi - center| < radius.
    std::vector<cplx> F(g.N);
    for (int k = 0; k < g.N; ++k) F[k] = bump_profile((g.freq(k) - opt.center) / (2 * opt.radius));
    SampledFunction f = from_spectrum(g, std::move(F));
    SampledFunction u(g);
    for (std::size_t i = 0; i < u.values.size(); ++i) u.values[i] = std::norm(f.values[i]);
    SampledFunction du = fractional_derivative(u, sigma);

    SharpnessReport r;
    r.sigma = sigma;
    r.r1 = r1;
    r.r2 = r2;
    r.ks = ks;
    std::sort(r.ks.begin(), r.ks.end());
    r.pairings.assign(r.ks.size(), 0.0);
    parallel_for(r.ks.size(), [&](std::size_t j) {
        double a = std::ldexp(1.0, r.ks[j]), b = 2 * a;
        // Trapezoid rule on each half of the annulus; the endpoints are nodes.
        cplx s = 0;
        for (int i = 0; i < g.N; ++i) {
            double x = std::abs(g.node(i));
            if (x > a && x < b) s += du.values[i];
            else if (x == a || x == b) s += 0.5 * du.values[i];
        }
        r.pairings[j] = std::abs(s) * g.h();
    });

    std::size_t n = r.ks.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t j = 0; j < n; ++j) {
        double x = r.ks[j], y = std::log2(std::max(r.pairings[j], 1e-300));
        sx += x, sy += y, sxx += x * x, sxy += x * y;
    }
    r.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    r.intercept = (sy - r.slope * sx) / n;

    const double d = 1;
    r.target_slope = d - (d + sigma);
    r.sparse_slope = d - d / r1 - d / r2;
    r.constraint_holds = d * (1 / r1 + 1 / r2) <= d + sigma;
    r.sparse_consistent = r.slope <= r.sparse_slope + 0.1;
    return r;
}

void SharpnessReport::write_csv(const std::string& path) const {
    std::ofstream os(path);
    if (!os) throw Error("SharpnessReport::write_csv: cannot open " + path);
    os << "k,pairing,log2_pairing,fitted\n";
    char buf[160];
    for (std::size_t j = 0; j < ks.size(); ++j) {
        std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g\n", ks[j], pairings[j],
                      std::log2(std::max(pairings[j], 1e-300)), intercept + slope * ks[j]);
        os << buf;
    }
}

}  // namespace czw
