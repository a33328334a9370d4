#include <Eigen/Dense>
#include <cmath>

#include "czw/parallel.hpp"
#include "czw/transform.hpp"

namespace czw {
namespace {

// C-infinity step: 0 for u <= 0, 1 for u >= 1.
double smooth_step(double u) {
    if (u <= 0) return 0.0;
    if (u >= 1) return 1.0;
    double a = std::exp(-1.0 / u), b = std::exp(-1.0 / (1 - u));
    return a / (a + b);
}

double chi(double x) { return smooth_step((std::abs(x) - 0.25) / 0.25); }

double heaviside_power(double x, int m) {
    if (x <= 0) return 0.0;
    return std::pow(x, m + 1) / std::tgamma(m + 2.0);
}

// Periodic antiderivative of a mean-zero f, normalized to vanish at x = 0.
SampledFunction antiderivative_at_origin(const SampledFunction& f) {
    const Grid& g = f.grid;
    auto spec = to_spectrum(f);
    for (int k = 0; k < g.N; ++k) {
        double xi = g.freq(k);
        spec[k] = (k == 0 || k == g.N / 2) ? cplx(0.0) : spec[k] / cplx(0.0, xi);
    }
    SampledFunction P = from_spectrum(g, std::move(spec));
    cplx origin = P.values[g.N / 2];
    for (auto& v : P.values) v -= origin;
    return P;
}

SampledFunction reflect(const SampledFunction& f) {
    const Grid& g = f.grid;
    SampledFunction r(g);
    // node(i) = -node(N - i); node 0 = -L has no mirror and is set to 0.
    for (int i = 1; i < g.N; ++i) r.values[i] = f.values[g.N - i];
    return r;
}

void zero_outside(SampledFunction& f, double radius) {
    for (int i = 0; i < f.grid.N; ++i)
        if (std::abs(f.grid.node(i)) >= radius) f.values[i] = 0.0;
}

std::vector<cplx> spectrum_at_scale(const SampledFunction& ref, double s, const Grid& g) {
    return scaled_spectrum(ref, s, g);
}

// D^order through the symbol (i xi)^order with the low-pass used for the mother
// wavelet, which keeps roundoff at high frequencies from being amplified.
SampledFunction filtered_derivative(const SampledFunction& f, int order) {
    const Grid& g = f.grid;
    double cutoff = kPi / g.h() / 3;
    SampledFunction d = spectral_multiplier(f, Multiplier::of1([order, cutoff](double xi) {
        return std::pow(cplx(0.0, xi), order) * std::exp(-std::pow(std::abs(xi) / cutoff, 8));
    }));
    for (auto& v : d.values) v = v.real();
    return d;
}

void require_scale(double s, const Grid& g, const char* what) {
    if (g.d != 1) throw Error(std::string(what) + ": one-dimensional input required");
    if (s < 2 * g.h() * (1 - 1e-12)) throw Error(std::string(what) + ": scale below resolution (s < 2h)");
}

}  // namespace

Grid highlow_grid() { return Grid(1, 2.0, 4096); }

std::vector<SampledFunction> hermite_probes(const Grid& g, int count, double scale) {
    std::vector<SampledFunction> out;
    std::vector<double> prev(g.N, 0.0), cur(g.N);
    for (int i = 0; i < g.N; ++i) {
        double x = g.node(i) / scale;
        cur[i] = std::pow(kPi, -0.25) * std::exp(-x * x / 2);
    }
    double norm = 1.0 / std::sqrt(scale);
    for (int n = 0; n < count; ++n) {
        SampledFunction p(g);
        for (int i = 0; i < g.N; ++i) p.values[i] = cur[i] * norm;
        out.push_back(std::move(p));
        std::vector<double> next(g.N);
        for (int i = 0; i < g.N; ++i) {
            double x = g.node(i) / scale;
            next[i] = std::sqrt(2.0 / (n + 1)) * x * cur[i] - std::sqrt(double(n) / (n + 1)) * prev[i];
        }
        prev = std::move(cur);
        cur = std::move(next);
    }
    return out;
}

HighLowSystem highlow_decompose(const MotherWavelet& phi, int m, double tolerance) {
    if (phi.grid().d != 1) throw Error("highlow_decompose: d = 1 only");
    if (m < 0 || m > 6) throw Error("highlow_decompose: m must lie in [0, 6]");
    Grid g = highlow_grid();
    HighLowSystem sys;
    sys.m = m;
    sys.phi = sy(AffinePoint(0.0, 1.0), phi.base, g);

    // Phi(w) = P(|w|)/|w| with P the antiderivative of phi*phi from 0.
    SampledFunction p = convolve(sys.phi, sys.phi);
    SampledFunction P = antiderivative_at_origin(p);
    sys.Phi = SampledFunction(g);
    for (int i = 0; i < g.N; ++i) {
        double x = g.node(i);
        sys.Phi.values[i] = i == g.N / 2 ? p.values[i].real() : P.values[i].real() / x;
    }
    zero_outside(sys.Phi, 1.0);

    int order = m + 2;
    sys.psi2 = filtered_derivative(sys.Phi, order);
    zero_outside(sys.psi2, 1.0);
    sys.psi3 = sys.Phi;

    SampledFunction F(g), gt(g);
    for (int i = 0; i < g.N; ++i) {
        double x = g.node(i);
        double H = heaviside_power(x, m);
        F.values[i] = H * (1 - chi(x));
        // H chi cut off smoothly beyond |x| = 1 so that it is periodic on the grid.
        double far = 1 - smooth_step((std::abs(x) - 1.0) / 0.6);
        gt.values[i] = H * chi(x) * far;
    }
    sys.psi1 = reflect(F);
    sys.psi4 = filtered_derivative(gt, order);
    zero_outside(sys.psi4, 1.0);

    // delta = D^(m+2) F + G against smooth probes:
    // q(0) = (-1)^(m+2) <F, q^(m+2)> + <G, q>.
    double worst = 0;
    double sign = order % 2 == 0 ? 1.0 : -1.0;
    for (const auto& q : hermite_probes(g, 10, 0.25)) {
        SampledFunction dq = derivative(q, order);
        cplx lhs = q.values[g.N / 2];
        cplx rhs = sign * integrate(F * dq) + integrate(sys.psi4 * q);
        worst = std::max(worst, std::abs(lhs - rhs) / max_abs(q));
    }
    sys.probe_residual = worst;
    if (!(worst <= tolerance))
        throw Error("highlow_decompose: probe residual " + std::to_string(worst) + " exceeds tolerance");

    SampledFunction rebuilt = convolve(F, sys.psi2) + convolve(sys.Phi, sys.psi4);
    sys.factorization_residual = relative_l2(rebuilt, sys.Phi);
    return sys;
}

SampledFunction single_scale_projection(const SampledFunction& f, double s, const HighLowSystem& sys) {
    require_scale(s, f.grid, "single_scale_projection");
    auto F = to_spectrum(f);
    auto S = spectrum_at_scale(sys.Phi, s, f.grid);
    for (std::size_t k = 0; k < F.size(); ++k) F[k] *= std::conj(S[k]);
    return from_spectrum(f.grid, std::move(F));
}

SampledFunction highlow_right_side(const SampledFunction& f, double s, const HighLowSystem& sys) {
    require_scale(s, f.grid, "highlow_right_side");
    auto F = to_spectrum(f);
    auto a1 = spectrum_at_scale(sys.psi1, s, f.grid), a2 = spectrum_at_scale(sys.psi2, s, f.grid);
    auto a3 = spectrum_at_scale(sys.psi3, s, f.grid), a4 = spectrum_at_scale(sys.psi4, s, f.grid);
    for (std::size_t k = 0; k < F.size(); ++k) F[k] *= std::conj(a1[k]) * a2[k] + std::conj(a3[k]) * a4[k];
    return from_spectrum(f.grid, std::move(F));
}

double tensor_reproducing_check(const SampledFunction& f, const SampledFunction& g, const HighLowSystem& sys,
                                const AffineGrid& ag) {
    const Grid& gr = f.grid;
    if (gr.d != 1 || g.grid != gr) throw Error("tensor_reproducing_check: f and g need the same 1D grid");
    if (ag.grid != gr) throw Error("tensor_reproducing_check: affine grid is built over a different spatial grid");
    int N = gr.N, M = ag.M;
    auto Ff = to_spectrum(f), Fg = to_spectrum(g);
    // Columns: P_s f, Q_s f against Q_s g, P_s g, where P is the psi part and Q = phi~ * phi.
    Eigen::MatrixXcd A(N, 2 * M), B(N, 2 * M);
    parallel_for(std::size_t(M), [&](std::size_t j) {
        double s = ag.scale(int(j));
        auto a1 = spectrum_at_scale(sys.psi1, s, gr), a2 = spectrum_at_scale(sys.psi2, s, gr);
        auto a3 = spectrum_at_scale(sys.psi3, s, gr), a4 = spectrum_at_scale(sys.psi4, s, gr);
        auto ph = spectrum_at_scale(sys.phi, s, gr);
        std::vector<cplx> pf(N), qf(N), pg(N), qg(N);
        for (int k = 0; k < N; ++k) {
            cplx P = std::conj(a1[k]) * a2[k] + std::conj(a3[k]) * a4[k];
            cplx Q = std::norm(ph[k]);
            pf[k] = Ff[k] * P;
            qf[k] = Ff[k] * Q;
            pg[k] = Fg[k] * P;
            qg[k] = Fg[k] * Q;
        }
        auto Pf = from_spectrum(gr, std::move(pf)), Qf = from_spectrum(gr, std::move(qf));
        auto Pg = from_spectrum(gr, std::move(pg)), Qg = from_spectrum(gr, std::move(qg));
        for (int i = 0; i < N; ++i) {
            A(i, 2 * j) = Pf.values[i];
            B(i, 2 * j) = Qg.values[i];
            A(i, 2 * j + 1) = Qf.values[i];
            B(i, 2 * j + 1) = Pg.values[i];
        }
    });
    Eigen::Map<const Eigen::VectorXcd> fv(f.values.data(), N), gv(g.values.data(), N);
    Eigen::MatrixXcd R = ag.log_rho() * (A * B.transpose()) - fv * gv.transpose();
    double area = gr.h() * gr.h();
    double diff = std::sqrt(R.squaredNorm() * area);
    double ref = std::sqrt(fv.squaredNorm() * gv.squaredNorm() * area);
    return ref > 0 ? diff / ref : diff;
}

}  // namespace czw
