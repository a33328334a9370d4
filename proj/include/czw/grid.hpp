#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "czw/common.hpp"

namespace czw {

// Uniform periodic grid on [-L, L)^d with N nodes per axis.
struct Grid {
    int d = 1;
    double L = 16.0;
    int N = 1024;

    Grid() = default;
    Grid(int dim, double half_width, int n);

    double h() const { return 2.0 * L / N; }
    std::size_t size() const { return d == 1 ? std::size_t(N) : std::size_t(N) * N; }
    double node(int i) const { return -L + i * h(); }
    // Angular frequency of FFT bin k (standard ordering, Nyquist bin negative).
    double freq(int k) const;
    double cell_volume() const { return d == 1 ? h() : h() * h(); }

    bool operator==(const Grid& o) const { return d == o.d && L == o.L && N == o.N; }
    bool operator!=(const Grid& o) const { return !(*this == o); }
};

struct SampledFunction {
    Grid grid;
    std::vector<cplx> values;

    SampledFunction() = default;
    explicit SampledFunction(const Grid& g) : grid(g), values(g.size()) {}
    SampledFunction(const Grid& g, std::vector<cplx> v);

    cplx& operator[](std::size_t i) { return values[i]; }
    const cplx& operator[](std::size_t i) const { return values[i]; }
    // d = 2 layout: index i runs along x, j along y.
    cplx& at(int i, int j) { return values[std::size_t(i) * grid.N + j]; }
    const cplx& at(int i, int j) const { return values[std::size_t(i) * grid.N + j]; }

    SampledFunction& operator+=(const SampledFunction& o);
    SampledFunction& operator-=(const SampledFunction& o);
    SampledFunction& operator*=(cplx c);
};

SampledFunction operator+(SampledFunction a, const SampledFunction& b);
SampledFunction operator-(SampledFunction a, const SampledFunction& b);
SampledFunction operator*(cplx c, SampledFunction a);
// Pointwise product.
SampledFunction operator*(const SampledFunction& a, const SampledFunction& b);

// Function of (x, y) where both variables live on the same 1D grid.
struct SampledFunction2D {
    Grid grid;  // d == 1
    std::vector<cplx> values;

    SampledFunction2D() = default;
    explicit SampledFunction2D(const Grid& g);
    SampledFunction2D(const Grid& g, std::vector<cplx> v);

    cplx& at(int i, int j) { return values[std::size_t(i) * grid.N + j]; }
    const cplx& at(int i, int j) const { return values[std::size_t(i) * grid.N + j]; }

    // The same samples viewed as a d = 2 SampledFunction.
    SampledFunction as_plane() const;
    static SampledFunction2D from_plane(const SampledFunction& f);
    static SampledFunction2D tensor(const SampledFunction& a, const SampledFunction& b);
};

struct AffinePoint {
    std::array<double, 2> w{0.0, 0.0};
    double t = 1.0;

    AffinePoint() = default;
    AffinePoint(double w1, double t_) : w{w1, 0.0}, t(t_) {}
    AffinePoint(double w1, double w2, double t_) : w{w1, w2}, t(t_) {}
};

// Truncated log-spaced discretization of the affine group over a spatial grid.
struct AffineGrid {
    Grid grid;
    int stride = 1;
    double t_min = 0.125;
    double rho = 1.1;
    int M = 48;

    AffineGrid() = default;
    AffineGrid(const Grid& g, int stride, double t_min, double rho, int M);
    // Scales t_min * rho^j for j < M with rho = (t_max / t_min)^(1/M).
    static AffineGrid from_range(const Grid& g, int stride, double t_min, double t_max, int M);

    double scale(int j) const;
    double t_max() const { return t_min * std::pow(rho, M); }
    double log_rho() const { return std::log(rho); }
    // Spatial nodes per axis of the sub-lattice.
    int K() const { return grid.N / stride; }
    std::size_t spatial_count() const;
    std::size_t cell_count() const { return spatial_count() * std::size_t(M); }
    double cell_weight() const;
    double position(int i) const { return grid.node(i * stride); }
    // rho -> sqrt(rho), M -> 2M: same scale range, twice as many scales.
    AffineGrid refined() const;
};

// Sum of values * (stride h)^d * ln(rho); values indexed [j * spatial_count() + i].
cplx mu_integrate(const AffineGrid& ag, const std::vector<cplx>& values);
double mu_integrate(const AffineGrid& ag, const std::vector<double>& values);

using ScalarField = std::function<cplx(double x, double y)>;

// Evaluates rule at every node; throws naming the node on non-finite output.
SampledFunction sample(const ScalarField& rule, const Grid& g);

cplx integrate(const SampledFunction& f);
double l2_norm(const SampledFunction& f);
double l1_norm(const SampledFunction& f);
double lp_norm(const SampledFunction& f, double p);
double max_abs(const SampledFunction& f);
cplx inner(const SampledFunction& f, const SampledFunction& g);  // integral of f * conj(g)

// Fourier symbol m(xi_1, xi_2); the second argument is 0 in d = 1.
struct Multiplier {
    std::function<cplx(double, double)> m;
    bool singular_at_zero = false;
    cplx at_zero = 0.0;
    // Allowed |f^(0)| relative to the L1 norm of f when the symbol is singular.
    double zero_tolerance = 1e-8;

    static Multiplier of(std::function<cplx(double, double)> fn);
    static Multiplier of1(std::function<cplx(double)> fn);
};

SampledFunction spectral_multiplier(const SampledFunction& f, const Multiplier& m);
SampledFunction convolve(const SampledFunction& f, const SampledFunction& g);

// Continuous Fourier transform F(xi) = integral f(x) e^{-i x xi} dx at the FFT
// frequencies, approximated by the node sum; from_spectrum inverts it exactly.
std::vector<cplx> to_spectrum(const SampledFunction& f);
SampledFunction from_spectrum(const Grid& g, std::vector<cplx> spec);

// X_m = sum_k a_k e^{i theta k m}, m < M, via Bluestein's algorithm.
std::vector<cplx> chirp_sum(const std::vector<cplx>& a, long double theta, std::size_t M);

// F(u0 + m du) for m < M, where F is the node-sum Fourier transform of a d = 1 f.
std::vector<cplx> dtft(const SampledFunction& f, double u0, double du, std::size_t M);
cplx dtft_at(const SampledFunction& f, double u);

// Trigonometric interpolant of a d = 1 f evaluated at y0 + m dy, m < M.
std::vector<cplx> interpolate(const SampledFunction& f, double y0, double dy, std::size_t M);

// Derivative through the symbol (i xi)^order along axis 0 or 1.
SampledFunction derivative(const SampledFunction& f, int order, int axis = 0);

void write_csv(const SampledFunction& f, const std::string& path);
void write_binary(const SampledFunction& f, const std::string& path);
SampledFunction read_binary(const std::string& path);

}  // namespace czw
