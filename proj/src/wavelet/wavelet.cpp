#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "czw/expression.hpp"
#include "czw/wavelet.hpp"

namespace czw {
namespace {

constexpr double kNegligible = 1e-15;  // relative magnitude treated as outside the support

struct Hull {
    bool empty = true;
    int first = 0, last = 0;
};

Hull nonnegligible_hull(const std::vector<cplx>& v, std::size_t offset, std::size_t stride, int n, double thr) {
    Hull h;
    for (int i = 0; i < n; ++i) {
        if (std::abs(v[offset + std::size_t(i) * stride]) > thr) {
            if (h.empty) h.first = i;
            h.last = i;
            h.empty = false;
        }
    }
    return h;
}

// Values of the 1D interpolant of line (length N on grid g) at y0 + m dy, zero outside [a, b].
std::vector<cplx> resample_line(const std::vector<cplx>& line, const Grid& g, double a, double b, double y0,
                                double dy, std::size_t M) {
    SampledFunction f(g, line);
    auto out = interpolate(f, y0, dy, M);
    for (std::size_t m = 0; m < M; ++m) {
        double y = y0 + dy * double(m);
        if (y < a || y > b) out[m] = 0.0;
    }
    return out;
}

SampledFunction sy_impl(const AffinePoint& z, const SampledFunction& f, const Grid& target, bool checked) {
    const Grid& src = f.grid;
    if (src.d != target.d) throw Error("sy: source and target dimension differ");
    double t = z.t;
    if (!(t > 0)) throw Error("sy: scale must be positive");
    if (checked && t < 2 * target.h() * (1 - 1e-12)) throw Error("sy: scale below resolution (t < 2h)");
    double thr = kNegligible * max_abs(f);
    SampledFunction out(target);
    if (thr == 0) return out;
    double hs = src.h();
    if (src.d == 1) {
        Hull hull = nonnegligible_hull(f.values, 0, 1, src.N, thr);
        double a = src.node(hull.first) - hs, b = src.node(hull.last) + hs;
        double w = z.w[0];
        if (checked && (w + t * a < -target.L - 1e-9 || w + t * b > target.L + 1e-9))
            throw Error("sy: rescaled support escapes the grid domain");
        auto v = resample_line(f.values, src, a, b, (-target.L - w) / t, target.h() / t, target.N);
        for (int i = 0; i < target.N; ++i) out.values[i] = v[i] / t;
        return out;
    }
    // d = 2: separable passes, first along y then along x.
    int Ns = src.N, Nt = target.N;
    int ilo = Ns, ihi = -1, jlo = Ns, jhi = -1;
    for (int i = 0; i < Ns; ++i)
        for (int j = 0; j < Ns; ++j)
            if (std::abs(f.at(i, j)) > thr) {
                ilo = std::min(ilo, i), ihi = std::max(ihi, i);
                jlo = std::min(jlo, j), jhi = std::max(jhi, j);
            }
    double ax = src.node(ilo) - hs, bx = src.node(ihi) + hs;
    double ay = src.node(jlo) - hs, by = src.node(jhi) + hs;
    double w1 = z.w[0], w2 = z.w[1];
    if (checked && (w1 + t * ax < -target.L - 1e-9 || w1 + t * bx > target.L + 1e-9 ||
                    w2 + t * ay < -target.L - 1e-9 || w2 + t * by > target.L + 1e-9))
        throw Error("sy: rescaled support escapes the grid domain");
    Grid line_grid(1, src.L, src.N);
    std::vector<cplx> stage(std::size_t(Ns) * Nt);
    for (int i = 0; i < Ns; ++i) {
        std::vector<cplx> row(f.values.begin() + std::size_t(i) * Ns, f.values.begin() + std::size_t(i + 1) * Ns);
        auto v = resample_line(row, line_grid, ay, by, (-target.L - w2) / t, target.h() / t, Nt);
        std::copy(v.begin(), v.end(), stage.begin() + std::size_t(i) * Nt);
    }
    for (int j = 0; j < Nt; ++j) {
        std::vector<cplx> col(Ns);
        for (int i = 0; i < Ns; ++i) col[i] = stage[std::size_t(i) * Nt + j];
        auto v = resample_line(col, line_grid, ax, bx, (-target.L - w1) / t, target.h() / t, Nt);
        for (int i = 0; i < Nt; ++i) out.at(i, j) = v[i] / (t * t);
    }
    return out;
}

SampledFunction symmetrize(const SampledFunction& f) {
    const Grid& g = f.grid;
    int N = g.N;
    auto mirror = [N](int i) { return (N - i) % N; };
    SampledFunction out(g);
    if (g.d == 1) {
        for (int i = 0; i < N; ++i) out.values[i] = 0.5 * (f.values[i] + f.values[mirror(i)]);
        return out;
    }
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
            int mi = mirror(i), mj = mirror(j);
            cplx s = f.at(i, j) + f.at(mi, j) + f.at(i, mj) + f.at(mi, mj) + f.at(j, i) + f.at(mj, i) +
                     f.at(j, mi) + f.at(mj, mi);
            out.at(i, j) = s / 8.0;
        }
    return out;
}

double radius_at(const Grid& g, std::size_t idx) {
    if (g.d == 1) return std::abs(g.node(int(idx)));
    int i = int(idx / g.N), j = int(idx % g.N);
    return std::hypot(g.node(i), g.node(j));
}

// Log-spaced trapezoid of |F(u)|^2 du/u for F along a direction.
template <class Fn>
double log_quadrature(Fn&& F, double u_lo, double u_hi, int n) {
    double s_lo = std::log(u_lo), s_hi = std::log(u_hi);
    double ds = (s_hi - s_lo) / (n - 1);
    double acc = 0;
    for (int m = 0; m < n; ++m) {
        double wgt = (m == 0 || m == n - 1) ? 0.5 : 1.0;
        acc += wgt * std::norm(F(std::exp(s_lo + ds * m)));
    }
    return acc * ds;
}

std::vector<double> directional_integrals(const SampledFunction& phi) {
    const Grid& g = phi.grid;
    double thr = kNegligible * max_abs(phi);
    double mass = l1_norm(phi);
    if (mass == 0) throw Error("admissibility: zero function");
    if (std::abs(integrate(phi)) > 1e-10 * mass)
        throw Error("admissibility: input is not mean zero (divergent integrand at the origin)");
    double u_hi = kPi / g.h(), u_lo = 1e-3;
    if (g.d == 1) {
        std::vector<double> xs;
        std::vector<cplx> vs;
        for (int i = 0; i < g.N; ++i)
            if (std::abs(phi.values[i]) > thr) xs.push_back(g.node(i)), vs.push_back(phi.values[i]);
        auto ft = [&](double u) {
            cplx s = 0;
            for (std::size_t n = 0; n < xs.size(); ++n) s += vs[n] * std::polar(1.0, -u * xs[n]);
            return s * g.h();
        };
        double plus = log_quadrature(ft, u_lo, u_hi, 4000);
        double minus = log_quadrature([&](double u) { return ft(-u); }, u_lo, u_hi, 4000);
        return {plus, minus};
    }
    int N = g.N;
    int ilo = N, ihi = -1;
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j)
            if (std::abs(phi.at(i, j)) > thr) ilo = std::min({ilo, i, j}), ihi = std::max({ihi, i, j});
    int n = ihi - ilo + 1;
    std::vector<double> out;
    for (int dir = 0; dir < 8; ++dir) {
        double c = std::cos(2 * kPi * dir / 8), s = std::sin(2 * kPi * dir / 8);
        auto ft = [&](double u) {
            std::vector<cplx> ex(n), ey(n);
            for (int a = 0; a < n; ++a) {
                double x = g.node(ilo + a);
                ex[a] = std::polar(1.0, -u * c * x);
                ey[a] = std::polar(1.0, -u * s * x);
            }
            cplx total = 0;
            for (int a = 0; a < n; ++a) {
                cplx row = 0;
                for (int b = 0; b < n; ++b) row += phi.at(ilo + a, ilo + b) * ey[b];
                total += ex[a] * row;
            }
            return total * g.h() * g.h();
        };
        out.push_back(log_quadrature(ft, u_lo, u_hi, 1500));
    }
    return out;
}

}  // namespace

std::vector<cplx> scaled_spectrum(const SampledFunction& ref, double t, const Grid& g) {
    if (ref.grid.d != 1 || g.d != 1) throw Error("scaled_spectrum: one-dimensional input required");
    int N = g.N, half = N / 2;
    double dxi = kPi / g.L;
    auto raw = dtft(ref, -half * t * dxi, t * dxi, std::size_t(N));
    double limit = kPi / ref.grid.h();
    std::vector<cplx> out(N);
    for (int k = 0; k < N; ++k) {
        int idx = k < half ? k + half : k - half;
        double u = std::abs(t * g.freq(k));
        out[k] = u <= limit ? raw[idx] : cplx(0.0);
    }
    return out;
}

std::vector<cplx> MotherWavelet::spectrum(double u0, double du, std::size_t M) const {
    return dtft(base, u0, du, M);
}

std::vector<cplx> MotherWavelet::scaled_spectrum(double t, const Grid& g) const {
    return czw::scaled_spectrum(base, t, g);
}

SampledFunction default_bump(int d) {
    Grid g = d == 1 ? Grid(1, 1.0, 2048) : Grid(2, 1.0, 256);
    return sample([](double x, double y) { return cplx(bump_profile(std::hypot(x, y))); }, g);
}

double admissibility_constant(const SampledFunction& phi) {
    auto v = directional_integrals(phi);
    double s = 0;
    for (double x : v) s += x;
    return s / double(v.size());
}

double admissibility_direction_spread(const SampledFunction& phi) {
    if (phi.grid.d == 1) return 0.0;
    auto v = directional_integrals(phi);
    auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return (*hi - *lo) / *hi;
}

MotherWavelet make_mother_wavelet(int D, const SampledFunction& bump) {
    if (D < 0) throw Error("mother wavelet: D must be nonnegative");
    const Grid& g = bump.grid;
    double peak = max_abs(bump);
    if (peak == 0) throw Error("mother wavelet: degenerate bump (identically zero)");
    for (std::size_t i = 0; i < bump.values.size(); ++i)
        if (radius_at(g, i) > 0.5 + 1e-12 && std::abs(bump.values[i]) > 1e-14 * peak)
            throw Error("mother wavelet: bump support exceeds B(0,1/2)");
    SampledFunction b = symmetrize(bump);
    for (auto& v : b.values) v = v.real();
    if (max_abs(b) <= 1e-12 * peak) throw Error("mother wavelet: degenerate bump (even part vanishes)");

    // Laplacian^(D+1) with a smooth low-pass far below Nyquist: roundoff times
    // |xi|^(2D+2) would otherwise leak outside the support.
    double cutoff = kPi / g.h() / 3;
    SampledFunction phi = spectral_multiplier(b, Multiplier::of([D, cutoff](double a, double c) {
        double r2 = a * a + c * c;
        double filt = std::exp(-std::pow(std::sqrt(r2) / cutoff, 8));
        return cplx(std::pow(-r2, D + 1) * filt);
    }));
    for (std::size_t i = 0; i < phi.values.size(); ++i) {
        phi.values[i] = phi.values[i].real();
        if (radius_at(g, i) >= 0.5) phi.values[i] = 0.0;
    }
    phi = symmetrize(phi);

    // Project out even moments through 2D using bump * monomials.
    std::vector<std::pair<int, int>> powers;
    if (g.d == 1) {
        for (int a = 0; a <= D; ++a) powers.push_back({2 * a, 0});
    } else {
        for (int a = 0; a <= D; ++a)
            for (int c = 0; a + c <= D; ++c) powers.push_back({2 * a, 2 * c});
    }
    auto mom = [&](const SampledFunction& f, std::pair<int, int> p) {
        return g.d == 1 ? moment(f, p.first).real() : moment2(f, p.first, p.second).real();
    };
    std::vector<SampledFunction> basis;
    for (auto p : powers) {
        SampledFunction e(g);
        for (std::size_t i = 0; i < e.values.size(); ++i) {
            double x = g.d == 1 ? g.node(int(i)) : g.node(int(i / g.N));
            double y = g.d == 1 ? 1.0 : g.node(int(i % g.N));
            e.values[i] = b.values[i] * std::pow(x, p.first) * std::pow(y, p.second);
        }
        basis.push_back(std::move(e));
    }
    int n = int(powers.size());
    Eigen::MatrixXd A(n, n);
    Eigen::VectorXd rhs(n);
    for (int r = 0; r < n; ++r) {
        rhs(r) = mom(phi, powers[r]);
        for (int c = 0; c < n; ++c) A(r, c) = mom(basis[c], powers[r]);
    }
    Eigen::VectorXd coef = A.colPivHouseholderQr().solve(rhs);
    for (int c = 0; c < n; ++c) phi -= cplx(coef(c)) * basis[c];

    double adm = admissibility_constant(phi);
    if (!(adm > 1e-14)) throw Error("mother wavelet: admissibility integral below 1e-14 (degenerate bump)");
    phi *= cplx(1.0 / std::sqrt(adm));
    MotherWavelet mw;
    mw.base = std::move(phi);
    mw.D = D;
    mw.admissibility_constant = admissibility_constant(mw.base);
    return mw;
}

SampledFunction sy(const AffinePoint& z, const SampledFunction& f) { return sy_impl(z, f, f.grid, true); }

SampledFunction sy(const AffinePoint& z, const SampledFunction& f, const Grid& target) {
    return sy_impl(z, f, target, true);
}

SampledFunction sy_inverse(const AffinePoint& z, const SampledFunction& f) {
    AffinePoint inv(-z.w[0] / z.t, -z.w[1] / z.t, 1.0 / z.t);
    return sy_impl(inv, f, f.grid, false);
}

SampledFunction2D sy_inverse(const AffinePoint& z, const SampledFunction2D& f) {
    AffinePoint inv(-z.w[0] / z.t, -z.w[0] / z.t, 1.0 / z.t);
    return SampledFunction2D::from_plane(sy_impl(inv, f.as_plane(), Grid(2, f.grid.L, f.grid.N), false));
}

SampledFunction2D sy(const AffinePoint& z, const SampledFunction2D& f) {
    AffinePoint zz(z.w[0], z.w[0], z.t);
    return SampledFunction2D::from_plane(sy_impl(zz, f.as_plane(), Grid(2, f.grid.L, f.grid.N), true));
}

SampledFunction symbol_derivative(const SampledFunction& f, int order, int axis) {
    if (order == 0) return f;
    int n = std::abs(order);
    Multiplier m = Multiplier::of([order, n, axis](double a, double b) {
        double xi = axis == 0 ? a : b;
        double r2 = a * a + b * b;
        double num = std::pow(xi, n);
        return cplx(order > 0 ? num : num / std::pow(r2, n));
    });
    if (order < 0) {
        m.singular_at_zero = true;
        m.at_zero = 0.0;
    }
    return spectral_multiplier(f, m);
}

cplx moment(const SampledFunction& f, int a, double center, double scale) {
    if (f.grid.d != 1) throw Error("moment: one-dimensional input required");
    cplx s = 0;
    for (int i = 0; i < f.grid.N; ++i) s += f.values[i] * std::pow((f.grid.node(i) - center) / scale, a);
    return s * f.grid.h();
}

cplx moment2(const SampledFunction& f, int a, int b) {
    if (f.grid.d != 2) throw Error("moment2: two-dimensional input required");
    const Grid& g = f.grid;
    cplx s = 0;
    for (int i = 0; i < g.N; ++i)
        for (int j = 0; j < g.N; ++j) s += f.at(i, j) * std::pow(g.node(i), a) * std::pow(g.node(j), b);
    return s * g.h() * g.h();
}

std::vector<std::vector<double>> moment_matrix(const SampledFunction& bump, int order) {
    std::vector<std::vector<double>> m(order + 1, std::vector<double>(order + 1));
    for (int i = 0; i <= order; ++i)
        for (int j = 0; j <= order; ++j) m[i][j] = moment(bump, i + j).real();
    return m;
}

GammaFamily make_gamma_family(int gamma, double support_radius, const Grid& g) {
    if (gamma < 0 || gamma > 6) throw Error("gamma family: order must lie in [0, 6]");
    if (!(support_radius > 0) || support_radius >= g.L) throw Error("gamma family: bad support radius");
    double r = support_radius;
    SampledFunction bump =
        sample([r](double x, double) { return cplx(bump_profile(x / (2 * r))); }, g);
    int unknowns = gamma + 2, eqs = gamma + 1;
    // Rescaled monomials (x/r)^j keep the system well conditioned.
    std::vector<SampledFunction> basis;
    for (int j = 0; j < unknowns; ++j) {
        SampledFunction e(g);
        for (int i = 0; i < g.N; ++i) e.values[i] = bump.values[i] * std::pow(g.node(i) / r, j);
        basis.push_back(std::move(e));
    }
    Eigen::MatrixXd A(eqs, unknowns);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(eqs);
    rhs(gamma) = 1.0;
    for (int beta = 0; beta < eqs; ++beta)
        for (int j = 0; j < unknowns; ++j) A(beta, j) = moment(basis[j], beta).real();
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(A);
    if (cod.rank() < eqs) throw Error("gamma family: singular moment matrix (degenerate bump)");
    Eigen::VectorXd c = cod.solve(rhs);
    SampledFunction theta(g);
    for (int j = 0; j < unknowns; ++j) theta += cplx(c(j)) * basis[j];
    for (int beta = 0; beta <= gamma; ++beta) {
        double target = beta == gamma ? 1.0 : 0.0;
        if (std::abs(moment(theta, beta) - target) > 1e-8)
            throw Error("gamma family: moment conditions not met (ill-conditioned system)");
    }
    return GammaFamily{gamma, support_radius, std::move(theta)};
}

}  // namespace czw
