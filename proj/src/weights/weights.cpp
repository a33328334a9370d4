#include <algorithm>
#include <cmath>
#include <cstdio>

#include "czw/weights.hpp"

namespace czw {
namespace {

constexpr double kTol = 1e-12;

double recip(double p) { return std::isinf(p) ? 0.0 : 1.0 / p; }

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

// Reciprocal weight 1 / v at every node; throws on nonpositive values.
std::vector<double> reciprocal(const SampledFunction& v, int j) {
    std::vector<double> out(v.values.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        double x = v.values[i].real();
        if (!(x > 0) || !std::isfinite(x) || std::abs(v.values[i].imag()) > 1e-12 * x)
            throw Error("weight v" + std::to_string(j + 1) + " is not positive at node " + std::to_string(i));
        out[i] = 1.0 / x;
    }
    return out;
}

}  // namespace

std::array<double, 3> ExponentTuple::alphas() const { return {recip(p[0]), recip(p[1]), recip(p[2])}; }

double ExponentTuple::p_target() const {
    double s = recip(p[0]) + recip(p[1]);
    return s > 0 ? 1.0 / s : INFINITY;
}

bool ExponentTuple::in_p_circ() const {
    double m = std::min(p[0], p[1]);
    return m > 1 && std::isfinite(m);
}

std::array<double, 3> ExponentTuple::eps() const {
    std::array<double, 3> e{};
    for (int j = 0; j < 3; ++j) {
        if (std::isinf(p[j]))
            e[j] = r[j];
        else if (p[j] == r[j])
            e[j] = INFINITY;
        else
            e[j] = p[j] * r[j] / (p[j] - r[j]);
    }
    return e;
}

bool ExponentTuple::r_precedes_p() const {
    for (double x : eps())
        if (!(x > 0)) return false;
    return true;
}

void ExponentTuple::validate() const {
    double sum = 0;
    for (int j = 0; j < 3; ++j) {
        if (p[j] == 0 || std::isnan(p[j]) || p[j] == -INFINITY)
            throw Error(fmt("exponent p%.0f must lie in (-inf, 0) or (0, inf]", j + 1));
        double a = recip(p[j]);
        if (a < -0.5 - kTol || a > 1 + kTol)
            throw Error(fmt("1/p%.0f = %.6g lies outside [-1/2, 1]", j + 1, a));
        sum += a;
    }
    if (std::abs(sum - 1) > kTol) throw Error(fmt("1/p1 + 1/p2 + 1/p3 = %.12g, expected 1", sum));
    for (int j = 0; j < 3; ++j)
        if (!(r[j] >= 1) || !std::isfinite(r[j])) throw Error(fmt("r%.0f must lie in [1, inf)", j + 1));
    auto e = eps();
    for (int j = 0; j < 3; ++j)
        if (!(e[j] > 0))
            throw Error(fmt("r does not precede p: eps%.0f = p r / (p - r) = %.6g is not positive", j + 1, e[j]));
}

void ExponentTuple::require_p_circ() const {
    if (!in_p_circ()) throw Error(fmt("exponents violate 1 < min{p1, p2} < inf (p1 = %g, p2 = %g)", p[0], p[1]));
}

ExponentTuple holder_tuple(double p1, double p2, std::array<double, 3> r) {
    ExponentTuple e;
    double a3 = 1.0 - recip(p1) - recip(p2);
    e.p = {p1, p2, std::abs(a3) < kTol ? INFINITY : 1.0 / a3};
    e.r = r;
    e.validate();
    return e;
}

void WeightVector::validate(double tol) const {
    if (v1.grid != v2.grid || v1.grid != v3.grid) throw Error("WeightVector: weights live on different grids");
    auto a = reciprocal(v1, 0), b = reciprocal(v2, 1), c = reciprocal(v3, 2);
    for (std::size_t i = 0; i < a.size(); ++i) {
        double prod = v1.values[i].real() * v2.values[i].real() * v3.values[i].real();
        if (std::abs(prod - 1) > tol)
            throw Error(fmt("WeightVector: v1 v2 v3 = %.12g at node %.0f, expected 1", prod, double(i)));
    }
}

WeightVector WeightVector::unit(const Grid& g) {
    SampledFunction one(g);
    for (auto& x : one.values) x = 1.0;
    return {one, one, one};
}

WeightVector WeightVector::power(const Grid& g, double a) {
    if (g.d != 1) throw Error("WeightVector::power: one-dimensional grid required");
    WeightVector w = unit(g);
    double h = g.h();
    for (int i = 0; i < g.N; ++i) {
        double r = std::max(std::abs(g.node(i)), h);
        w.v1.values[i] = std::pow(r, a);
        w.v2.values[i] = std::pow(r, -a);
    }
    return w;
}

WeightVector WeightVector::from_pair(SampledFunction v1, SampledFunction v2) {
    if (v1.grid != v2.grid) throw Error("WeightVector: weights live on different grids");
    SampledFunction v3(v1.grid);
    for (std::size_t i = 0; i < v3.values.size(); ++i)
        v3.values[i] = 1.0 / (v1.values[i].real() * v2.values[i].real());
    return {std::move(v1), std::move(v2), std::move(v3)};
}

ApCharacteristic ap_characteristic_detail(const WeightVector& v, const ExponentTuple& e, const DyadicFamily& fam) {
    e.validate();
    const Grid& g = v.v1.grid;
    if (v.v2.grid != g || v.v3.grid != g) throw Error("ap_characteristic: weights live on different grids");
    int top = finest_generation(g);
    int finest = fam.finest < 0 ? top : fam.finest;
    if (fam.coarsest < 0 || finest < fam.coarsest || finest > top)
        throw Error("ap_characteristic: generation range outside the grid");
    auto eps = e.eps();
    const SampledFunction* vs[3] = {&v.v1, &v.v2, &v.v3};

    // Per-cube sums of (1/v_j)^eps_j (or maxima for eps_j = inf) at the finest
    // generation, merged upward one generation at a time.
    int c = 1 << (finest + 1), w = g.N / c, d = g.d;
    std::size_t cells = d == 1 ? std::size_t(c) : std::size_t(c) * c;
    std::array<std::vector<double>, 3> acc;
    for (int j = 0; j < 3; ++j) {
        auto u = reciprocal(*vs[j], j);
        acc[j].assign(cells, 0.0);
        bool sup = std::isinf(eps[j]);
        for (std::size_t i = 0; i < u.size(); ++i) {
            std::size_t cell = d == 1 ? i / w : (i / g.N / w) * c + (i % g.N) / w;
            double x = sup ? u[i] : std::pow(u[i], eps[j]);
            acc[j][cell] = sup ? std::max(acc[j][cell], x) : acc[j][cell] + x;
        }
    }

    ApCharacteristic out;
    double count = std::pow(double(w), d);
    for (int gen = finest;; --gen) {
        for (std::size_t cell = 0; cell < cells; ++cell) {
            double prod = 1;
            for (int j = 0; j < 3; ++j)
                prod *= std::isinf(eps[j]) ? acc[j][cell] : std::pow(acc[j][cell] / count, 1.0 / eps[j]);
            int k0 = d == 1 ? int(cell) : int(cell / c), k1 = d == 1 ? 0 : int(cell % c);
            if (gen >= fam.coarsest && prod > out.value) {
                out.value = prod;
                out.argmax = d == 1 ? DyadicCube(gen, {k0}) : DyadicCube(gen, {k0, k1});
            }
            bool origin = (k0 == c / 2 || k0 == c / 2 - 1) && (d == 1 || k1 == c / 2 || k1 == c / 2 - 1);
            if (gen >= fam.coarsest && !origin) out.without_origin = std::max(out.without_origin, prod);
        }
        if (gen == fam.coarsest) break;
        int pc = c / 2;
        std::size_t pcells = d == 1 ? std::size_t(pc) : std::size_t(pc) * pc;
        for (int j = 0; j < 3; ++j) {
            bool sup = std::isinf(eps[j]);
            std::vector<double> next(pcells, 0.0);
            for (std::size_t cell = 0; cell < cells; ++cell) {
                std::size_t parent = d == 1 ? cell / 2 : (cell / c / 2) * pc + (cell % c) / 2;
                next[parent] = sup ? std::max(next[parent], acc[j][cell]) : next[parent] + acc[j][cell];
            }
            acc[j] = std::move(next);
        }
        c = pc;
        cells = pcells;
        count *= std::pow(2.0, d);
    }
    return out;
}

double ap_characteristic(const WeightVector& v, const ExponentTuple& e, const DyadicFamily& fam) {
    return ap_characteristic_detail(v, e, fam).value;
}

double weighted_lq(const SampledFunction& f, double q, const SampledFunction* v, bool divide) {
    if (!(q > 0)) throw Error("weighted_lq: exponent must be positive");
    if (v && v->grid != f.grid) throw Error("weighted_lq: weight lives on a different grid");
    double s = 0;
    for (std::size_t i = 0; i < f.values.size(); ++i) {
        double x = std::abs(f.values[i]);
        if (v) x = divide ? x / v->values[i].real() : x * v->values[i].real();
        s = std::isinf(q) ? std::max(s, x) : s + std::pow(x, q);
    }
    return std::isinf(q) ? s : std::pow(s * f.grid.cell_volume(), 1.0 / q);
}

SobolevNorm weighted_sobolev_norm(const SampledFunction& f, double sigma, double q, const SampledFunction& v) {
    if (!(sigma >= 0) || !std::isfinite(sigma)) throw Error("weighted_sobolev_norm: sigma must be finite and nonnegative");
    SobolevNorm n;
    n.homogeneous = weighted_lq(fractional_derivative(f, sigma), q, &v);
    n.value = n.homogeneous;
    for (int k = 0; k <= int(std::floor(sigma)); ++k) {
        double t = double(k) == sigma ? n.homogeneous : weighted_lq(fractional_derivative(f, k), q, &v);
        n.terms.push_back(t);
        n.value += t;
    }
    return n;
}

}  // namespace czw
