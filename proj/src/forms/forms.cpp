#include <algorithm>
#include <cmath>

#include "czw/forms.hpp"
#include "czw/parallel.hpp"

namespace czw {
namespace {

void require_1d(const Grid& g, const char* what) {
    if (g.d != 1) throw Error(std::string(what) + ": one-dimensional input required");
}

void require_same(const SampledFunction& a, const SampledFunction& b, const SampledFunction& c, const char* what) {
    require_1d(a.grid, what);
    if (b.grid != a.grid || c.grid != a.grid) throw Error(std::string(what) + ": arguments live on different grids");
}

double step(double u) {
    if (u <= 0) return 0.0;
    if (u >= 1) return 1.0;
    double a = std::exp(-1.0 / u), b = std::exp(-1.0 / (1 - u));
    return a / (a + b);
}

}  // namespace

FormEvaluator pointwise_product() {
    return {"pointwise-product", [](const SampledFunction& f, const SampledFunction& g, const SampledFunction& h) {
                require_same(f, g, h, "pointwise product");
                cplx s = 0;
                for (std::size_t i = 0; i < f.values.size(); ++i) s += f.values[i] * g.values[i] * h.values[i];
                return s * f.grid.h();
            }};
}

FormEvaluator smooth_multiplier(std::function<cplx(double, double)> m, std::string label) {
    return {"smooth-multiplier(" + label + ")",
            [m = std::move(m)](const SampledFunction& f, const SampledFunction& g, const SampledFunction& h) {
                require_same(f, g, h, "smooth multiplier");
                const Grid& gr = f.grid;
                int N = gr.N;
                auto F = to_spectrum(f), G = to_spectrum(g), H = to_spectrum(h);
                std::vector<double> xi(N);
                for (int k = 0; k < N; ++k) xi[k] = gr.freq(k);
                cplx s = 0;
                for (int a = 0; a < N; ++a) {
                    if (F[a] == cplx(0.0)) continue;
                    cplx row = 0;
                    for (int b = 0; b < N; ++b) {
                        int c = (2 * N - a - b) % N;
                        row += m(xi[a], xi[b]) * G[b] * H[c];
                    }
                    s += F[a] * row;
                }
                double nh = N * gr.h();
                return s / (nh * nh);
            }};
}

std::vector<cplx> profile_coefficients(const SampledFunction& f, const SampledFunction& profile, const AffineGrid& ag) {
    const Grid& g = f.grid;
    require_1d(g, "profile_coefficients");
    if (ag.grid != g) throw Error("profile_coefficients: affine grid is built over a different spatial grid");
    int K = ag.K(), stride = ag.stride;
    std::vector<cplx> out(std::size_t(K) * ag.M);
    auto F = to_spectrum(f);
    parallel_for(std::size_t(ag.M), [&](std::size_t j) {
        auto S = scaled_spectrum(profile, ag.scale(int(j)), g);
        std::vector<cplx> spec(F.size());
        for (std::size_t k = 0; k < F.size(); ++k) spec[k] = F[k] * std::conj(S[k]);
        SampledFunction full = from_spectrum(g, std::move(spec));
        for (int i = 0; i < K; ++i) out[j * K + i] = full.values[std::size_t(i) * stride];
    });
    return out;
}

SampledFunction place(const SampledFunction& profile, const AffinePoint& z, const Grid& g) {
    require_1d(g, "place");
    auto S = scaled_spectrum(profile, z.t, g);
    double w = z.w[0];
    for (int k = 0; k < g.N; ++k) S[k] *= std::polar(1.0, -w * g.freq(k));
    return from_spectrum(g, std::move(S));
}

cplx wavelet_form(const NuFamily& nu, const SampledFunction& third, const SampledFunction& f, const SampledFunction& g,
                  const SampledFunction& h, const AffineGrid& ag) {
    require_same(f, g, h, "wavelet_form");
    const Grid& gr = f.grid;
    int N = gr.N, K = ag.K();
    auto ch = profile_coefficients(h, third, ag);
    std::vector<cplx> cells(ch.size(), 0.0);
    double area = gr.h() * gr.h();
    parallel_for(cells.size(), [&](std::size_t idx) {
        if (ch[idx] == cplx(0.0)) return;
        int j = int(idx / K), i = int(idx % K);
        SampledFunction2D n = nu(AffinePoint(ag.position(i), ag.scale(j)));
        if (n.grid.N != N || n.grid.L != gr.L) throw Error("wavelet_form: nu_z on a mismatched grid");
        cplx pair = 0;
        for (int a = 0; a < N; ++a) {
            cplx row = 0;
            for (int b = 0; b < N; ++b) row += g.values[b] * std::conj(n.at(a, b));
            pair += f.values[a] * row;
        }
        cells[idx] = pair * area * ch[idx];
    });
    return mu_integrate(ag, cells);
}

cplx wavelet_form(const NuFamily& nu, const MotherWavelet& phi, const SampledFunction& f, const SampledFunction& g,
                  const SampledFunction& h, const AffineGrid& ag) {
    return wavelet_form(nu, phi.base, f, g, h, ag);
}

FormEvaluator wavelet_form_evaluator(NuFamily nu, MotherWavelet phi, AffineGrid ag) {
    return {"wavelet-form", [nu = std::move(nu), phi = std::move(phi), ag = std::move(ag)](
                                const SampledFunction& f, const SampledFunction& g, const SampledFunction& h) {
                return wavelet_form(nu, phi, f, g, h, ag);
            }};
}

NuFamily mother_tensor_family(const MotherWavelet& phi, const Grid& g) {
    SampledFunction base = phi.base;
    return [base, g](const AffinePoint& z) {
        SampledFunction p = place(base, z, g);
        return SampledFunction2D::tensor(p, p);
    };
}

cplx paraproduct_form(const SampledFunction& b, GammaPair gamma, const std::pair<GammaFamily, GammaFamily>& fams,
                      const MotherWavelet& phi, const SampledFunction& f, const SampledFunction& g,
                      const SampledFunction& h, const AffineGrid& ag) {
    require_same(f, g, h, "paraproduct_form");
    if (b.grid != f.grid) throw Error("paraproduct_form: b lives on a different grid");
    if (gamma.first < 0 || gamma.second < 0) throw Error("paraproduct_form: gamma must be nonnegative");
    if (fams.first.gamma != gamma.first || fams.second.gamma != gamma.second)
        throw Error("paraproduct_form: gamma families do not match gamma");
    SampledFunction anti = symbol_derivative(phi.base, -gamma.total());
    auto cb = profile_coefficients(b, anti, ag);
    auto cf = profile_coefficients(f, fams.first.base, ag);
    auto cg = profile_coefficients(g, fams.second.base, ag);
    auto ch = profile_coefficients(h, phi.base, ag);
    std::vector<cplx> cells(cb.size());
    for (std::size_t i = 0; i < cells.size(); ++i) cells[i] = cb[i] * cf[i] * cg[i] * ch[i];
    return mu_integrate(ag, cells);
}

FormEvaluator paraproduct(SampledFunction b, GammaPair gamma, std::pair<GammaFamily, GammaFamily> fams,
                          MotherWavelet phi, AffineGrid ag) {
    std::string tag = "paraproduct(" + std::to_string(gamma.first) + "," + std::to_string(gamma.second) + ")";
    return {tag, [b = std::move(b), gamma, fams = std::move(fams), phi = std::move(phi), ag = std::move(ag)](
                     const SampledFunction& f, const SampledFunction& g, const SampledFunction& h) {
                return paraproduct_form(b, gamma, fams, phi, f, g, h, ag);
            }};
}

FormEvaluator adjoint(const FormEvaluator& form, int which) {
    auto rule = form.rule;
    if (which == 1)
        return {form.tag + "^1*", [rule](const SampledFunction& f, const SampledFunction& g,
                                         const SampledFunction& h) { return rule(h, g, f); }};
    if (which == 2)
        return {form.tag + "^2*", [rule](const SampledFunction& f, const SampledFunction& g,
                                         const SampledFunction& h) { return rule(f, h, g); }};
    throw Error("adjoint: which must be 1 or 2");
}

double smooth_window(double x, double inner, double outer) {
    double r = std::abs(x);
    if (r <= inner) return 1.0;
    if (r >= outer) return 0.0;
    return 1.0 - step((r - inner) / (outer - inner));
}

SampledFunction windowed_monomial(const Grid& g, int k, double inner, double outer) {
    require_1d(g, "windowed_monomial");
    if (k < 0) throw Error("windowed_monomial: degree must be nonnegative");
    if (!(inner > 0 && outer > inner)) throw Error("windowed_monomial: need 0 < inner < outer");
    return sample([=](double x, double) { return cplx(std::pow(x, k) * smooth_window(x, inner, outer)); }, g);
}

double bmo_oscillation(const SampledFunction& b) {
    require_1d(b.grid, "bmo_oscillation");
    int N = b.grid.N;
    double worst = 0;
    for (int n = N; n >= 8; n /= 2) {
        for (int start = 0; start + n <= N; start += n) {
            cplx mean = 0;
            for (int i = start; i < start + n; ++i) mean += b.values[i];
            mean /= double(n);
            double osc = 0;
            for (int i = start; i < start + n; ++i) osc += std::abs(b.values[i] - mean);
            worst = std::max(worst, osc / n);
        }
    }
    return worst;
}

SampledFunction fractional_derivative(const SampledFunction& f, double sigma) {
    if (sigma < 0) throw Error("fractional_derivative: sigma must be nonnegative");
    if (sigma == 0) return f;
    return spectral_multiplier(f, Multiplier::of([sigma](double a, double b) {
        return cplx(std::pow(a * a + b * b, sigma / 2));
    }));
}

WbpReport wbp_constant(const FormEvaluator& lambda, const SampledFunction& a, const SampledFunction& b,
                       const SampledFunction& c, const AffineGrid& ag) {
    const Grid& g = ag.grid;
    require_1d(g, "wbp_constant");
    double radius = 0;
    for (const SampledFunction* p : {&a, &b, &c})
        for (int i = 0; i < p->grid.N; ++i)
            if (p->values[i] != cplx(0.0)) radius = std::max(radius, std::abs(p->grid.node(i)));
    std::vector<double> vals(ag.cell_count(), -1.0);
    int K = ag.K();
    parallel_for(vals.size(), [&](std::size_t idx) {
        int j = int(idx / K), i = int(idx % K);
        AffinePoint z(ag.position(i), ag.scale(j));
        if (std::abs(z.w[0]) + radius * z.t > g.L - g.h()) return;
        cplx v = lambda(sy(z, a, g), sy(z, b, g), sy(z, c, g));
        vals[idx] = z.t * z.t * std::abs(v);
    });
    WbpReport r;
    r.min = INFINITY;
    bool any = false;
    for (double v : vals) {
        if (v < 0) continue;
        any = true;
        r.max = std::max(r.max, v);
        r.min = std::min(r.min, v);
    }
    if (!any) throw Error("wbp_constant: no affine cell keeps the supports inside the domain");
    return r;
}

ShiftReport derivative_shift_check(const NuFamily& nu, const MotherWavelet& phi, const SampledFunction& f,
                                   const SampledFunction& g, const SampledFunction& h, const AffineGrid& ag) {
    ShiftReport r;
    r.lhs = wavelet_form(nu, phi.base, f, g, symbol_derivative(h, 1), ag);
    NuFamily shifted = [&nu](const AffinePoint& z) { return partial_antiderivative_y(nu(z), 1, z.t); };
    r.rhs = wavelet_form(shifted, symbol_derivative(phi.base, 1), f, symbol_derivative(g, 1), h, ag);
    double scale = std::max(std::abs(r.lhs), std::abs(r.rhs));
    r.relative = scale > 0 ? std::abs(r.lhs - r.rhs) / scale : 0.0;
    return r;
}

}  // namespace czw
