#include <algorithm>
#include <cmath>
#include <random>

#include "czw/parallel.hpp"
#include "czw/sparse.hpp"

namespace czw {
namespace {

double periodic_distance(double a, double b, double L) {
    double d = std::fmod(std::abs(a - b), 2 * L);
    return std::min(d, 2 * L - d);
}

LocalizationFit summarize(std::string label, const std::vector<std::vector<double>>& ratios) {
    LocalizationFit fit;
    fit.label = std::move(label);
    for (const auto& sweep : ratios) {
        double c = 0;
        for (double r : sweep) {
            c = std::max(c, r);
            if (r > 0) ++fit.nonzero;
        }
        fit.constants.push_back(c);
        fit.constant = std::max(fit.constant, c);
    }
    double lo = *std::min_element(fit.constants.begin(), fit.constants.end());
    fit.spread = lo > 0 ? fit.constant / lo - 1.0 : INFINITY;
    return fit;
}

// Node i lies in the factor-dilate of q (wrapped).
bool in_dilate(const Grid& g, const DyadicCube& q, int i, int factor) {
    long w = q.width(g), len = long(factor) * w;
    if (len >= g.N) return true;
    long start = long(q.k[0]) * w - long(factor - 1) / 2 * w;
    long off = ((long(i) - start) % g.N + g.N) % g.N;
    return off < len;
}

}  // namespace

LocalizationReport localization_fits(const SampledFunction& f, const DyadicCube& q, const WaveletDictionary& plain,
                                     const LocalizationSweep& sw) {
    const Grid& g = f.grid;
    if (g.d != 1) throw Error("localization_fits: one-dimensional input required");
    if (plain.spec.slots() != 1 || plain.spec.cancellative[0])
        throw Error("localization_fits: noncancellative one-slot dictionary required");
    if (sw.points < 1 || sw.sweeps < 2 || !(sw.t_lo > 0 && sw.t_hi > sw.t_lo))
        throw Error("localization_fits: invalid sweep");
    double ell = q.side(g), c = q.center(g), eta = plain.spec.eta, delta = plain.spec.delta;
    if (1.5 * ell + g.h() >= g.L) throw Error("localization_fits: cube too large for a sweep outside 3Q");

    auto nodes = q.nodes(g);
    auto halo = q.dilate_nodes(g, 3);
    SampledFunction inside(g), centered(g), outside = f;
    cplx mean = 0;
    for (auto i : nodes) mean += f.values[i];
    mean /= double(nodes.size());
    double avg = 0, avg0 = 0;
    for (auto i : nodes) {
        inside.values[i] = f.values[i];
        centered.values[i] = f.values[i] - mean;
        avg += std::abs(f.values[i]);
        avg0 += std::abs(f.values[i] - mean);
    }
    avg /= double(nodes.size());
    avg0 /= double(nodes.size());
    for (auto i : halo) outside.values[i] = 0;
    SampledFunction mf = maximal_function(f);
    double inf_m = INFINITY;
    for (auto i : nodes) inf_m = std::min(inf_m, mf.values[i].real());
    if (!(avg > 0) || !(avg0 > 0) || !(inf_m > 0)) throw Error("localization_fits: f vanishes on the cube");

    std::vector<char> far(g.N, 0);
    for (int i = 0; i < g.N; ++i) far[i] = !in_dilate(g, q, i, 3);
    auto F_in = to_spectrum(inside), F_cen = to_spectrum(centered), F_out = to_spectrum(outside);
    auto correlate = [&](const std::vector<cplx>& F, const std::vector<cplx>& S) {
        std::vector<cplx> spec(F.size());
        for (std::size_t k = 0; k < F.size(); ++k) spec[k] = F[k] * S[k];
        return from_spectrum(g, std::move(spec));
    };

    std::vector<std::vector<double>> r1(sw.sweeps), r2(sw.sweeps), r3(sw.sweeps);
    for (int k = 0; k < sw.sweeps; ++k) {
        // Stratified log-uniform scales; every grid position w is visited at each scale.
        std::mt19937_64 rng(sw.seed + std::uint64_t(k));
        std::uniform_real_distribution<double> u(0.0, 1.0);
        int n = sw.points;
        std::vector<double> ts(n);
        for (int i = 0; i < n; ++i)
            ts[i] = ell * std::exp(std::log(sw.t_lo) + (i + u(rng)) / n * std::log(sw.t_hi / sw.t_lo));
        r1[k].assign(n, 0.0);
        r2[k].assign(n, 0.0);
        r3[k].assign(n, 0.0);
        parallel_for(std::size_t(n), [&](std::size_t j) {
            double t = ts[j];
            for (const auto& m : plain.members) {
                auto S = scaled_spectrum(m, t, g);
                for (auto& v : S) v = std::conj(v);
                SampledFunction a = correlate(F_in, S), b = correlate(F_cen, S), o = correlate(F_out, S);
                for (int i = 0; i < g.N; ++i) {
                    if (far[i]) {
                        double dist = std::max(t, periodic_distance(g.node(i), c, g.L));
                        double s1 = avg * ell * std::pow(t, eta) / std::pow(dist, 1 + eta);
                        double s2 = avg0 * std::pow(ell, 1 + delta) * std::pow(t, eta - delta) / std::pow(dist, 1 + eta);
                        r1[k][j] = std::max(r1[k][j], std::abs(a.values[i]) / s1);
                        r2[k][j] = std::max(r2[k][j], std::abs(b.values[i]) / s2);
                    } else if (q.contains_node(g, std::size_t(i))) {
                        r3[k][j] = std::max(r3[k][j], std::abs(o.values[i]) / (std::pow(t / ell, eta) * inf_m));
                    }
                }
            }
        });
    }
    return {summarize("large_far", r1), summarize("cancel", r2), summarize("outside", r3)};
}

double cube_sum_bound(const Grid& grid, double delta) {
    if (!(delta > 0)) throw Error("cube_sum_bound: delta must be positive");
    // zeta = sum_{m >= 1} (m + 1/2)^{-1-delta}, with an integral tail.
    const int M = 100000;
    double zeta = 0;
    for (int m = M; m >= 1; --m) zeta += std::pow(m + 0.5, -1 - delta);
    zeta += std::pow(M + 1.0, -delta) / delta;
    return 2.0 * zeta * (finest_generation(grid) + 1);
}

CubeSumReport cube_family_sums(const Grid& grid, int configs, double delta, std::uint64_t seed) {
    if (grid.d != 1) throw Error("cube_family_sums: one-dimensional grid required");
    if (configs < 1) throw Error("cube_family_sums: configs must be positive");
    CubeSumReport rep;
    rep.bound = cube_sum_bound(grid, delta);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int N = grid.N;
    double h = grid.h(), L = grid.L;
    while (int(rep.sums.size()) < configs) {
        std::vector<char> mask(N, 0);
        int pieces = 1 + int(u(rng) * 6);
        for (int p = 0; p < pieces; ++p) {
            double center = -L + 2 * L * u(rng);
            double half = std::exp(std::log(16 * h) + u(rng) * std::log(L / 4 / (16 * h)));
            long a = long(std::floor((center - half + L) / h)), len = long(2 * half / h);
            for (long i = 0; i < len; ++i) mask[((a + i) % N + N) % N] = 1;
        }
        std::vector<DyadicCube> fam;
        for (const auto& top : cubes_of_generation(grid, 0)) {
            auto sel = select_maximal_cubes(grid, top, mask);
            fam.insert(fam.end(), sel.begin(), sel.end());
        }
        if (fam.empty()) continue;

        int wi = -1;
        double t = 0;
        for (int tries = 0; tries < 100 && wi < 0; ++tries) {
            int cand = int(u(rng) * N) % N;
            double tc = std::exp(std::log(h) + u(rng) * std::log(L / h));
            bool boxed = std::any_of(fam.begin(), fam.end(), [&](const DyadicCube& q) {
                return q.contains_node(grid, std::size_t(cand)) && tc <= q.side(grid);
            });
            if (!boxed) wi = cand, t = tc;
        }
        if (wi < 0) continue;
        double w = grid.node(wi), s = 0;
        for (const auto& q : fam) {
            if (in_dilate(grid, q, wi, 3)) continue;
            double ell = q.side(grid);
            s += ell * std::pow(std::min(ell, t), delta) / std::pow(periodic_distance(w, q.center(grid), L), 1 + delta);
        }
        rep.sums.push_back(s);
        rep.cubes_max = std::max(rep.cubes_max, int(fam.size()));
    }
    for (double s : rep.sums) {
        rep.max = std::max(rep.max, s);
        rep.mean += s;
    }
    rep.mean /= double(rep.sums.size());
    return rep;
}

}  // namespace czw
