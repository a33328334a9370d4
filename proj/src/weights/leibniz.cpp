#include <algorithm>
#include <cmath>
#include <cstdio>

#include "czw/parallel.hpp"
#include "czw/weights.hpp"

namespace czw {
namespace {

[[noreturn]] void reject(const char* inequality, const char* detail) {
    throw Error(std::string("leibniz_check: regime violates ") + inequality + " (" + detail + ")");
}

double dual(double p) { return std::isinf(p) ? 1.0 : p / (p - 1); }

bool integer_sigma(double sigma, int d) {
    if (sigma >= d) return true;
    return sigma == std::floor(sigma) && sigma <= d - 1;
}

}  // namespace

BilinearOperator pointwise_bilinear() {
    return {"pointwise", [](const SampledFunction& f, const SampledFunction& g) {
                if (f.grid != g.grid) throw Error("pointwise product: inputs live on different grids");
                return f * g;
            }};
}

BilinearOperator bilinear_multiplier(std::function<cplx(double, double)> m, std::string label) {
    return {"multiplier(" + label + ")", [m = std::move(m)](const SampledFunction& f, const SampledFunction& g) {
                if (f.grid != g.grid) throw Error("bilinear multiplier: inputs live on different grids");
                const Grid& gr = f.grid;
                if (gr.d != 1) throw Error("bilinear multiplier: one-dimensional input required");
                int N = gr.N;
                auto F = to_spectrum(f), G = to_spectrum(g);
                std::vector<double> xi(N);
                for (int k = 0; k < N; ++k) xi[k] = gr.freq(k);
                std::vector<cplx> T(N);
                double inv = 1.0 / (N * gr.h());
                parallel_for(std::size_t(N), [&](std::size_t k) {
                    cplx s = 0;
                    for (int a = 0; a < N; ++a) {
                        if (F[a] == cplx(0.0)) continue;
                        int b = int((k + N - a) % N);
                        s += m(xi[a], xi[b]) * F[a] * G[b];
                    }
                    T[k] = s * inv;
                });
                return from_spectrum(gr, std::move(T));
            }};
}

void check_leibniz_regime(double sigma, const ExponentTuple& e, int d) {
    char buf[200];
    if (!(sigma >= 0) || !std::isfinite(sigma)) reject("0 <= sigma < inf", "sigma is negative or not finite");
    e.validate();
    if (!e.in_p_circ()) {
        std::snprintf(buf, sizeof buf, "p1 = %g, p2 = %g", e.p[0], e.p[1]);
        reject("1 < min{p1, p2} < inf", buf);
    }
    double p = e.p_target();
    if (!(p > 0.5 && std::isfinite(p))) {
        std::snprintf(buf, sizeof buf, "p = %g", p);
        reject("1/2 < p < inf", buf);
    }
    bool unit_r = e.r[0] == 1 && e.r[1] == 1 && e.r[2] == 1;
    if (unit_r && integer_sigma(sigma, d)) return;
    double lo = double(d) / p - d;
    if (!(sigma > lo && sigma < d)) {
        std::snprintf(buf, sizeof buf, "sigma = %g, d/p - d = %g, d = %d", sigma, lo, d);
        reject(unit_r ? "sigma in {0, ..., d-1} or [d, inf), or d/p - d < sigma < d" : "d/p - d < sigma < d", buf);
    }
    for (int i = 0; i < 2; ++i)
        if (!(e.r[i] >= 1 && e.r[i] < e.p[i])) {
            std::snprintf(buf, sizeof buf, "r%d = %g, p%d = %g", i + 1, e.r[i], i + 1, e.p[i]);
            reject("1 <= r_i < p_i", buf);
        }
    if (e.r[2] != 1) {
        std::snprintf(buf, sizeof buf, "r3 = %g", e.r[2]);
        reject("r3 = 1", buf);
    }
    double s = 1 / e.r[0] + 1 / e.r[1];
    if (!(s < (sigma + d) / d)) {
        std::snprintf(buf, sizeof buf, "1/r1 + 1/r2 = %g, (sigma + d)/d = %g", s, (sigma + d) / double(d));
        reject("1/r1 + 1/r2 < (sigma + d)/d", buf);
    }
}

LeibnizReport leibniz_check(const SampledFunction& f, const SampledFunction& g, double sigma, const ExponentTuple& e,
                            const WeightVector& v, const BilinearOperator& T) {
    if (f.grid != g.grid || v.v1.grid != f.grid) throw Error("leibniz_check: inputs live on different grids");
    int d = f.grid.d;
    check_leibniz_regime(sigma, e, d);
    v.validate();

    LeibnizReport r;
    r.op = T.tag;
    bool unit_r = e.r[0] == 1 && e.r[1] == 1 && e.r[2] == 1;
    r.regime = unit_r && integer_sigma(sigma, d) ? "integer" : "fractional";
    r.sigma = sigma;
    r.p = e.p;
    r.r = e.r;
    r.p_target = e.p_target();
    r.sharp_power = std::max({dual(e.p[0]), dual(e.p[1]), r.p_target});
    r.characteristic = ap_characteristic(v, e);

    r.lhs = weighted_lq(fractional_derivative(T.apply(f, g), sigma), r.p_target, &v.v3, true);
    r.norm_f = weighted_sobolev_norm(f, sigma, e.p[0], v.v1);
    r.norm_g = weighted_sobolev_norm(g, sigma, e.p[1], v.v2);
    double rhs = r.norm_f.value * r.norm_g.value;
    r.degenerate = !(rhs > 0) || !std::isfinite(rhs) || !std::isfinite(r.lhs);
    r.ratio = r.degenerate ? 0.0 : r.lhs / rhs;
    return r;
}

}  // namespace czw
