#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "czw/sparse.hpp"

namespace czw {

// Generalized Hoelder tuple p = (p1, p2, p3), entries in (-inf, inf], with
// reciprocals summing to 1 and each reciprocal in [-1/2, 1]. r defaults to (1, 1, 1).
struct ExponentTuple {
    std::array<double, 3> p{2.0, 2.0, INFINITY};
    std::array<double, 3> r{1.0, 1.0, 1.0};

    std::array<double, 3> alphas() const;
    // p3 / (p3 - 1) = p1 p2 / (p1 + p2); 1 when p3 is infinite.
    double p_target() const;
    // 1 < min{p1, p2} < inf
    bool in_p_circ() const;
    // eps_j = p_j r_j / (p_j - r_j), r_j for p_j = inf, inf for p_j = r_j.
    std::array<double, 3> eps() const;
    bool r_precedes_p() const;

    // Throws when the reciprocals leave S or r does not precede p.
    void validate() const;
    void require_p_circ() const;
};

// p3 from 1/p1 + 1/p2 + 1/p3 = 1. Throws outside S or when r fails r < p.
ExponentTuple holder_tuple(double p1, double p2, std::array<double, 3> r = {1.0, 1.0, 1.0});

struct WeightVector {
    SampledFunction v1, v2, v3;

    // Positivity and prod v_j = 1 at every node within tol.
    void validate(double tol = 1e-10) const;

    static WeightVector unit(const Grid& g);
    // v1 = max(|x|, h)^a, v2 = max(|x|, h)^-a, v3 = 1.
    static WeightVector power(const Grid& g, double a);
    // v3 = 1 / (v1 v2).
    static WeightVector from_pair(SampledFunction v1, SampledFunction v2);
};

struct ApCharacteristic {
    double value = 0;           // over the whole family
    double without_origin = 0;  // cubes whose closure contains 0 left out
    DyadicCube argmax;
};

// sup over the dyadic family of prod_j <1 / v_j>_{eps_j, Q}.
ApCharacteristic ap_characteristic_detail(const WeightVector& v, const ExponentTuple& e,
                                          const DyadicFamily& fam = {});
double ap_characteristic(const WeightVector& v, const ExponentTuple& e, const DyadicFamily& fam = {});

struct SobolevNorm {
    double value = 0;        // ||[D^sigma f] v||_q + sum_{k <= floor(sigma)} ||[D^k f] v||_q
    double homogeneous = 0;  // ||[D^sigma f] v||_q
    std::vector<double> terms;  // D^k terms, k = 0..floor(sigma)
};

// L^q quasi-norm by grid quadrature, any q in (0, inf].
double weighted_lq(const SampledFunction& f, double q, const SampledFunction* v = nullptr, bool divide = false);

SobolevNorm weighted_sobolev_norm(const SampledFunction& f, double sigma, double q, const SampledFunction& v);

// Bilinear operator producing a function.
struct BilinearOperator {
    std::string tag;
    std::function<SampledFunction(const SampledFunction&, const SampledFunction&)> apply;
};

BilinearOperator pointwise_bilinear();
// T(f, g)^(xi) = sum over xi1 + xi2 = xi of m(xi1, xi2) f^(xi1) g^(xi2), d = 1.
BilinearOperator bilinear_multiplier(std::function<cplx(double, double)> m, std::string label = "m");

struct LeibnizReport {
    std::string op;
    std::string regime;  // "integer" or "fractional"
    double sigma = 0;
    std::array<double, 3> p{};
    std::array<double, 3> r{};
    double p_target = 0;
    double lhs = 0;    // ||D^sigma T(f, g) / v3||_p
    SobolevNorm norm_f, norm_g;
    double ratio = 0;  // lhs / (||f||_W ||g||_W), 0 when degenerate
    bool degenerate = false;
    double characteristic = 0;  // [v]_{A_{p,r}} over the grid's dyadic cubes
    double sharp_power = 0;     // max{p1', p2', p}
};

// Throws when (sigma, e) leaves the admissible regime, naming the inequality.
void check_leibniz_regime(double sigma, const ExponentTuple& e, int d = 1);

LeibnizReport leibniz_check(const SampledFunction& f, const SampledFunction& g, double sigma, const ExponentTuple& e,
                            const WeightVector& v, const BilinearOperator& T = pointwise_bilinear());

struct SharpnessOptions {
    double L = 8192.0;
    int N = 65536;
    double center = 10.0;  // frequency of the wave
    double radius = 1.0;   // half-width of its spectral window
};

struct SharpnessReport {
    double sigma = 0;
    double r1 = 1, r2 = 1;
    std::vector<int> ks;
    std::vector<double> pairings;  // |<D^sigma(f conj f), g_k>|
    double slope = 0;              // least-squares slope of log2 pairing against k
    double intercept = 0;
    double target_slope = 0;       // d - (d + sigma)
    double sparse_slope = 0;       // d - d/r1 - d/r2
    bool constraint_holds = false; // d (1/r1 + 1/r2) <= d + sigma
    bool sparse_consistent = false;  // fitted slope <= sparse slope + 0.1

    void write_csv(const std::string& path) const;
};

SharpnessReport sharpness_experiment(double sigma, const std::vector<int>& ks, double r1, double r2,
                                     const SharpnessOptions& opt = {});

}  // namespace czw
