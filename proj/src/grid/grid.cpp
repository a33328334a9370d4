#include "czw/grid.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "czw/fft.hpp"

namespace czw {
namespace {

bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

void require_same_grid(const Grid& a, const Grid& b, const char* what) {
    if (a != b) throw Error(std::string(what) + ": grid mismatch");
}

// e^{i phase} with the phase reduced in extended precision first.
cplx unit_phase(long double phase) {
    constexpr long double two_pi = 6.283185307179586476925286766559L;
    long double r = std::fmod(phase, two_pi);
    return {double(std::cos(r)), double(std::sin(r))};
}

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

}  // namespace

Grid::Grid(int dim, double half_width, int n) : d(dim), L(half_width), N(n) {
    if (d != 1 && d != 2) throw Error("grid: dimension must be 1 or 2");
    if (!(L > 0)) throw Error("grid: half-width must be positive");
    if (!is_pow2(N) || N < 2) throw Error("grid: N must be a power of two");
}

double Grid::freq(int k) const {
    int kk = k < N / 2 ? k : k - N;
    return kPi * kk / L;
}

SampledFunction::SampledFunction(const Grid& g, std::vector<cplx> v) : grid(g), values(std::move(v)) {
    if (values.size() != grid.size()) throw Error("sampled function: value count does not match grid");
}

SampledFunction& SampledFunction::operator+=(const SampledFunction& o) {
    require_same_grid(grid, o.grid, "add");
    for (std::size_t i = 0; i < values.size(); ++i) values[i] += o.values[i];
    return *this;
}

SampledFunction& SampledFunction::operator-=(const SampledFunction& o) {
    require_same_grid(grid, o.grid, "subtract");
    for (std::size_t i = 0; i < values.size(); ++i) values[i] -= o.values[i];
    return *this;
}

SampledFunction& SampledFunction::operator*=(cplx c) {
    for (auto& v : values) v *= c;
    return *this;
}

SampledFunction operator+(SampledFunction a, const SampledFunction& b) { return a += b; }
SampledFunction operator-(SampledFunction a, const SampledFunction& b) { return a -= b; }
SampledFunction operator*(cplx c, SampledFunction a) { return a *= c; }

SampledFunction operator*(const SampledFunction& a, const SampledFunction& b) {
    require_same_grid(a.grid, b.grid, "product");
    SampledFunction out(a.grid);
    for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] = a.values[i] * b.values[i];
    return out;
}

SampledFunction2D::SampledFunction2D(const Grid& g) : grid(g), values(std::size_t(g.N) * g.N) {
    if (g.d != 1) throw Error("2D function: carrier grid must be one-dimensional");
}

SampledFunction2D::SampledFunction2D(const Grid& g, std::vector<cplx> v) : grid(g), values(std::move(v)) {
    if (g.d != 1) throw Error("2D function: carrier grid must be one-dimensional");
    if (values.size() != std::size_t(g.N) * g.N) throw Error("2D function: value count must be N^2");
}

SampledFunction SampledFunction2D::as_plane() const {
    return SampledFunction(Grid(2, grid.L, grid.N), values);
}

SampledFunction2D SampledFunction2D::from_plane(const SampledFunction& f) {
    if (f.grid.d != 2) throw Error("2D function: expected a d = 2 sample");
    return SampledFunction2D(Grid(1, f.grid.L, f.grid.N), f.values);
}

SampledFunction2D SampledFunction2D::tensor(const SampledFunction& a, const SampledFunction& b) {
    require_same_grid(a.grid, b.grid, "tensor");
    if (a.grid.d != 1) throw Error("tensor: factors must be one-dimensional");
    SampledFunction2D out(a.grid);
    int N = a.grid.N;
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) out.at(i, j) = a.values[i] * b.values[j];
    return out;
}

AffineGrid::AffineGrid(const Grid& g, int stride_, double t_min_, double rho_, int M_)
    : grid(g), stride(stride_), t_min(t_min_), rho(rho_), M(M_) {
    if (stride < 1 || g.N % stride != 0) throw Error("affine grid: stride must divide N");
    if (!(rho > 1)) throw Error("affine grid: ratio rho must exceed 1");
    if (M < 1) throw Error("affine grid: need at least one scale");
    if (t_min < 2 * g.h() * (1 - 1e-12))
        throw Error("affine grid: t_min below resolution (t_min < 2h)");
}

AffineGrid AffineGrid::from_range(const Grid& g, int stride, double t_min, double t_max, int M) {
    if (!(t_max > t_min) || !(t_min > 0)) throw Error("affine grid: need 0 < t_min < t_max");
    if (M < 1) throw Error("affine grid: need at least one scale");
    return AffineGrid(g, stride, t_min, std::pow(t_max / t_min, 1.0 / M), M);
}

double AffineGrid::scale(int j) const { return t_min * std::pow(rho, j); }

std::size_t AffineGrid::spatial_count() const {
    std::size_t k = std::size_t(K());
    return grid.d == 1 ? k : k * k;
}

double AffineGrid::cell_weight() const {
    double dw = stride * grid.h();
    return (grid.d == 1 ? dw : dw * dw) * log_rho();
}

AffineGrid AffineGrid::refined() const { return AffineGrid(grid, stride, t_min, std::sqrt(rho), 2 * M); }

cplx mu_integrate(const AffineGrid& ag, const std::vector<cplx>& values) {
    if (values.size() != ag.cell_count()) throw Error("mu_integrate: value count does not match affine grid");
    cplx s = 0;
    for (const auto& v : values) s += v;
    return s * ag.cell_weight();
}

double mu_integrate(const AffineGrid& ag, const std::vector<double>& values) {
    if (values.size() != ag.cell_count()) throw Error("mu_integrate: value count does not match affine grid");
    double s = 0;
    for (double v : values) s += v;
    return s * ag.cell_weight();
}

SampledFunction sample(const ScalarField& rule, const Grid& g) {
    SampledFunction f(g);
    auto check = [&](cplx v, int i, int j) {
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
            std::ostringstream os;
            os << std::setprecision(17) << "sample: non-finite value at node " << i;
            if (g.d == 2) os << "," << j << " (x=" << g.node(i) << ", y=" << g.node(j) << ")";
            else os << " (x=" << g.node(i) << ")";
            throw Error(os.str());
        }
        return v;
    };
    if (g.d == 1) {
        for (int i = 0; i < g.N; ++i) f.values[i] = check(rule(g.node(i), 0.0), i, 0);
    } else {
        for (int i = 0; i < g.N; ++i)
            for (int j = 0; j < g.N; ++j) f.at(i, j) = check(rule(g.node(i), g.node(j)), i, j);
    }
    return f;
}

cplx integrate(const SampledFunction& f) {
    cplx s = 0;
    for (const auto& v : f.values) s += v;
    return s * f.grid.cell_volume();
}

double l1_norm(const SampledFunction& f) {
    double s = 0;
    for (const auto& v : f.values) s += std::abs(v);
    return s * f.grid.cell_volume();
}

double l2_norm(const SampledFunction& f) {
    double s = 0;
    for (const auto& v : f.values) s += std::norm(v);
    return std::sqrt(s * f.grid.cell_volume());
}

double lp_norm(const SampledFunction& f, double p) {
    if (std::isinf(p)) return max_abs(f);
    if (!(p > 0)) throw Error("lp_norm: exponent must be positive");
    double s = 0;
    for (const auto& v : f.values) s += std::pow(std::abs(v), p);
    return std::pow(s * f.grid.cell_volume(), 1.0 / p);
}

double max_abs(const SampledFunction& f) {
    double m = 0;
    for (const auto& v : f.values) m = std::max(m, std::abs(v));
    return m;
}

cplx inner(const SampledFunction& f, const SampledFunction& g) {
    require_same_grid(f.grid, g.grid, "inner");
    cplx s = 0;
    for (std::size_t i = 0; i < f.values.size(); ++i) s += f.values[i] * std::conj(g.values[i]);
    return s * f.grid.cell_volume();
}

Multiplier Multiplier::of(std::function<cplx(double, double)> fn) {
    Multiplier m;
    m.m = std::move(fn);
    return m;
}

Multiplier Multiplier::of1(std::function<cplx(double)> fn) {
    Multiplier m;
    m.m = [fn = std::move(fn)](double xi, double) { return fn(xi); };
    return m;
}

std::vector<cplx> to_spectrum(const SampledFunction& f) {
    const Grid& g = f.grid;
    std::vector<cplx> s = f.values;
    fft_forward(s, g.N, g.d);
    double scale = g.cell_volume();
    if (g.d == 1) {
        for (int k = 0; k < g.N; ++k) s[k] *= (k % 2 ? -scale : scale);
    } else {
        for (int k1 = 0; k1 < g.N; ++k1)
            for (int k2 = 0; k2 < g.N; ++k2)
                s[std::size_t(k1) * g.N + k2] *= ((k1 + k2) % 2 ? -scale : scale);
    }
    return s;
}

SampledFunction from_spectrum(const Grid& g, std::vector<cplx> s) {
    if (s.size() != g.size()) throw Error("from_spectrum: length mismatch");
    double scale = 1.0 / (2 * g.L);
    if (g.d == 2) scale *= scale;
    if (g.d == 1) {
        for (int k = 0; k < g.N; ++k) s[k] *= (k % 2 ? -scale : scale);
    } else {
        for (int k1 = 0; k1 < g.N; ++k1)
            for (int k2 = 0; k2 < g.N; ++k2)
                s[std::size_t(k1) * g.N + k2] *= ((k1 + k2) % 2 ? -scale : scale);
    }
    fft_backward(s, g.N, g.d);
    return SampledFunction(g, std::move(s));
}

SampledFunction spectral_multiplier(const SampledFunction& f, const Multiplier& m) {
    const Grid& g = f.grid;
    std::vector<cplx> s = f.values;
    fft_forward(s, g.N, g.d);
    if (m.singular_at_zero) {
        // s[0] / N^d is the mean; compare the zero mode against the L1 mass.
        double mass = 0;
        for (const auto& v : f.values) mass += std::abs(v);
        if (std::abs(s[0]) > m.zero_tolerance * std::max(mass, 1e-300) && std::abs(s[0]) > 0)
            throw Error("spectral_multiplier: singular symbol applied to input with nonzero mean "
                        "(anti-derivative of a non-cancellative function)");
    }
    if (g.d == 1) {
        for (int k = 0; k < g.N; ++k)
            s[k] *= (k == 0 && m.singular_at_zero) ? m.at_zero : m.m(g.freq(k), 0.0);
    } else {
        for (int k1 = 0; k1 < g.N; ++k1)
            for (int k2 = 0; k2 < g.N; ++k2) {
                bool zero = k1 == 0 && k2 == 0;
                s[std::size_t(k1) * g.N + k2] *=
                    (zero && m.singular_at_zero) ? m.at_zero : m.m(g.freq(k1), g.freq(k2));
            }
    }
    fft_backward(s, g.N, g.d);
    double inv = 1.0 / double(g.size());
    for (auto& v : s) v *= inv;
    return SampledFunction(g, std::move(s));
}

SampledFunction convolve(const SampledFunction& f, const SampledFunction& g) {
    require_same_grid(f.grid, g.grid, "convolve");
    const Grid& gr = f.grid;
    std::vector<cplx> a = f.values, b = g.values;
    fft_forward(a, gr.N, gr.d);
    fft_forward(b, gr.N, gr.d);
    for (std::size_t i = 0; i < a.size(); ++i) a[i] *= b[i];
    fft_backward(a, gr.N, gr.d);
    // Node 0 sits at -L, so the cyclic index sum is offset by N/2 per axis.
    double scale = gr.cell_volume() / double(gr.size());
    SampledFunction out(gr);
    int N = gr.N, half = N / 2;
    if (gr.d == 1) {
        for (int i = 0; i < N; ++i) out.values[i] = a[(i + half) % N] * scale;
    } else {
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < N; ++j)
                out.at(i, j) = a[std::size_t((i + half) % N) * N + (j + half) % N] * scale;
    }
    return out;
}

std::vector<cplx> chirp_sum(const std::vector<cplx>& a, long double theta, std::size_t M) {
    std::size_t K = a.size();
    std::vector<cplx> out(M);
    if (K == 0 || M == 0) return out;
    std::size_t P = next_pow2(K + M - 1);
    std::vector<cplx> B(P), C(P);
    for (std::size_t k = 0; k < K; ++k) {
        long double kk = (long double)k * k;
        B[k] = a[k] * unit_phase(theta * kk / 2);
    }
    for (std::size_t n = 0; n < M; ++n) C[n] = unit_phase(-theta * ((long double)n * n) / 2);
    for (std::size_t n = 1; n < K; ++n) C[P - n] = unit_phase(-theta * ((long double)n * n) / 2);
    fft_forward(B, int(P));
    fft_forward(C, int(P));
    for (std::size_t i = 0; i < P; ++i) B[i] *= C[i];
    fft_backward(B, int(P));
    double inv = 1.0 / double(P);
    for (std::size_t m = 0; m < M; ++m)
        out[m] = B[m] * inv * unit_phase(theta * ((long double)m * m) / 2);
    return out;
}

std::vector<cplx> dtft(const SampledFunction& f, double u0, double du, std::size_t M) {
    const Grid& g = f.grid;
    if (g.d != 1) throw Error("dtft: one-dimensional input required");
    long double h = g.h();
    std::vector<cplx> a(g.N);
    for (int n = 0; n < g.N; ++n) a[n] = f.values[n] * unit_phase(-(long double)u0 * h * n);
    auto out = chirp_sum(a, -(long double)du * h, M);
    for (std::size_t m = 0; m < M; ++m) {
        long double u = (long double)u0 + (long double)du * m;
        out[m] *= double(h) * unit_phase(u * g.L);
    }
    return out;
}

cplx dtft_at(const SampledFunction& f, double u) {
    const Grid& g = f.grid;
    if (g.d != 1) throw Error("dtft: one-dimensional input required");
    cplx s = 0;
    for (int n = 0; n < g.N; ++n) s += f.values[n] * unit_phase(-(long double)u * g.node(n));
    return s * g.h();
}

std::vector<cplx> interpolate(const SampledFunction& f, double y0, double dy, std::size_t M) {
    const Grid& g = f.grid;
    if (g.d != 1) throw Error("interpolate: one-dimensional input required");
    int N = g.N, half = N / 2;
    auto F = to_spectrum(f);
    long double dxi = kPi / (long double)g.L;
    std::vector<cplx> a(N + 1);
    for (int kk = 0; kk <= N; ++kk) {
        int k = kk - half;
        cplx Fk = F[(k + N) % N];
        double c = (kk == 0 || kk == N) ? 0.5 : 1.0;
        a[kk] = c * Fk * unit_phase(dxi * k * (long double)y0);
    }
    auto out = chirp_sum(a, dxi * (long double)dy, M);
    double scale = 1.0 / (2 * g.L);
    for (std::size_t m = 0; m < M; ++m) out[m] *= scale * unit_phase(-dxi * half * (long double)dy * m);
    return out;
}

SampledFunction derivative(const SampledFunction& f, int order, int axis) {
    if (order < 0) throw Error("derivative: negative order");
    if (order == 0) return f;
    return spectral_multiplier(f, Multiplier::of([order, axis](double a, double b) {
        return std::pow(cplx(0.0, axis == 0 ? a : b), order);
    }));
}

void write_csv(const SampledFunction& f, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw Error("write_csv: cannot open " + path);
    os << std::setprecision(17);
    const Grid& g = f.grid;
    if (g.d == 1) {
        os << "x,re,im\n";
        for (int i = 0; i < g.N; ++i) os << g.node(i) << ',' << f.values[i].real() << ',' << f.values[i].imag() << '\n';
    } else {
        os << "x,y,re,im\n";
        for (int i = 0; i < g.N; ++i)
            for (int j = 0; j < g.N; ++j)
                os << g.node(i) << ',' << g.node(j) << ',' << f.at(i, j).real() << ',' << f.at(i, j).imag() << '\n';
    }
}

namespace {

template <class T>
void put_le(std::ostream& os, T v) {
    unsigned char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(T));
    os.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <class T>
T get_le(std::istream& is) {
    unsigned char buf[sizeof(T)];
    if (!is.read(reinterpret_cast<char*>(buf), sizeof(T))) throw Error("read_binary: truncated file");
    if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(T));
    T v;
    std::memcpy(&v, buf, sizeof(T));
    return v;
}

}  // namespace

// Layout: "CZW1", u32 d, u32 N, f64 L, then N^d (re, im) f64 pairs.
void write_binary(const SampledFunction& f, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("write_binary: cannot open " + path);
    os.write("CZW1", 4);
    put_le<std::uint32_t>(os, std::uint32_t(f.grid.d));
    put_le<std::uint32_t>(os, std::uint32_t(f.grid.N));
    put_le<double>(os, f.grid.L);
    for (const auto& v : f.values) {
        put_le<double>(os, v.real());
        put_le<double>(os, v.imag());
    }
}

SampledFunction read_binary(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error("read_binary: cannot open " + path);
    char magic[4];
    if (!is.read(magic, 4) || std::memcmp(magic, "CZW1", 4) != 0) throw Error("read_binary: bad magic");
    int d = int(get_le<std::uint32_t>(is));
    int N = int(get_le<std::uint32_t>(is));
    double L = get_le<double>(is);
    Grid g(d, L, N);
    SampledFunction f(g);
    for (auto& v : f.values) {
        double re = get_le<double>(is);
        double im = get_le<double>(is);
        v = {re, im};
    }
    return f;
}

}  // namespace czw
