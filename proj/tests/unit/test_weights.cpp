#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <random>
#include <string>

#include "czw/probes.hpp"
#include "czw/weights.hpp"
#include "helpers.hpp"

using namespace czw;

namespace {

// Every dyadic cube of every generation, averaged by a direct loop.
struct Scan {
    double all = 0, without_origin = 0;
};

Scan brute_characteristic(const WeightVector& v, const ExponentTuple& e, int coarsest = 0, int finest = -1) {
    const Grid& g = v.v1.grid;
    if (finest < 0) finest = finest_generation(g);
    auto eps = e.eps();
    const SampledFunction* vs[3] = {&v.v1, &v.v2, &v.v3};
    Scan s;
    for (int gen = coarsest; gen <= finest; ++gen)
        for (const auto& q : cubes_of_generation(g, gen)) {
            auto idx = q.nodes(g);
            double prod = 1;
            for (int j = 0; j < 3; ++j) {
                double acc = 0;
                for (auto i : idx) {
                    double u = 1.0 / vs[j]->values[i].real();
                    acc = std::isinf(eps[j]) ? std::max(acc, u) : acc + std::pow(u, eps[j]);
                }
                prod *= std::isinf(eps[j]) ? acc : std::pow(acc / double(idx.size()), 1.0 / eps[j]);
            }
            s.all = std::max(s.all, prod);
            bool origin = true;
            for (int a = 0; a < g.d; ++a) {
                double lo = q.corner(g, a), hi = lo + q.side(g);
                origin = origin && lo <= 0 && 0 <= hi;
            }
            if (!origin) s.without_origin = std::max(s.without_origin, prod);
        }
    return s;
}

SampledFunction smooth_random_log(const Grid& g, std::mt19937_64& rng, double amp) {
    std::uniform_real_distribution<double> u(-1, 1);
    double a1 = amp * u(rng), a2 = amp * u(rng), f1 = 1 + 2 * std::abs(u(rng)), f2 = 3 * std::abs(u(rng));
    double p1 = 3 * u(rng), p2 = 3 * u(rng);
    SampledFunction out(g);
    for (std::size_t i = 0; i < out.values.size(); ++i) {
        double x = g.d == 1 ? g.node(int(i)) : g.node(int(i / g.N)) + 0.5 * g.node(int(i % g.N));
        out.values[i] = std::exp(a1 * std::sin(f1 * x + p1) + a2 * std::cos(f2 * x + p2));
    }
    return out;
}

bool throws_with(const std::function<void()>& fn, const std::string& text) {
    try {
        fn();
    } catch (const Error& e) {
        return std::string(e.what()).find(text) != std::string::npos;
    }
    return false;
}

}  // namespace

TEST_CASE("exponent tuples") {
    auto e = holder_tuple(4, 4);
    CHECK(e.p[2] == doctest::Approx(2.0));
    CHECK(e.p_target() == doctest::Approx(2.0));
    CHECK(e.in_p_circ());
    auto eps = e.eps();
    CHECK(eps[0] == doctest::Approx(4.0 / 3));
    CHECK(eps[2] == doctest::Approx(2.0));

    auto h = holder_tuple(2, 2);
    CHECK(std::isinf(h.p[2]));
    CHECK(h.p_target() == doctest::Approx(1.0));
    CHECK(h.eps()[2] == 1.0);  // p3 = inf gives eps3 = r3

    SUBCASE("negative third exponent") {
        auto n = holder_tuple(1.5, 1.5);
        CHECK(n.p[2] == doctest::Approx(-3.0));
        CHECK(n.p_target() == doctest::Approx(0.75));
        CHECK(n.eps()[2] == doctest::Approx(0.75));
    }
    SUBCASE("p1 = 1 is in S but outside P circ") {
        auto t = holder_tuple(1, 4);
        CHECK_FALSE(t.in_p_circ());
        CHECK(std::isinf(t.eps()[0]));
        CHECK(throws_with([&] { t.require_p_circ(); }, "1 < min{p1, p2} < inf"));
        CHECK_FALSE(holder_tuple(INFINITY, INFINITY).in_p_circ());
    }
    SUBCASE("tuples outside S and r not preceding p") {
        CHECK(throws_with([] { holder_tuple(1, 1); }, "outside [-1/2, 1]"));
        CHECK(throws_with([] { holder_tuple(4, 4, {5, 1, 1}); }, "r does not precede p"));
        ExponentTuple bad;
        bad.p = {2, 2, 2};
        CHECK(throws_with([&] { bad.validate(); }, "expected 1"));
    }
}

TEST_CASE("weight vectors") {
    Grid g(1, 16.0, 512);
    auto w = WeightVector::power(g, 0.3);
    CHECK_NOTHROW(w.validate());
    CHECK(w.v1.values[256].real() == doctest::Approx(std::pow(g.h(), 0.3)));
    w.v3.values[10] *= 1.0 + 1e-8;
    CHECK_THROWS_AS(w.validate(), Error);
    auto z = WeightVector::unit(g);
    z.v2.values[3] = 0.0;
    CHECK(throws_with([&] { z.validate(); }, "not positive"));
    CHECK_THROWS_AS(ap_characteristic(z, holder_tuple(4, 4)), Error);
}

TEST_CASE("multilinear Muckenhoupt characteristic") {
    Grid g(1, 16.0, 512);
    auto unit = WeightVector::unit(g);
    for (auto e : {holder_tuple(4, 4), holder_tuple(2, 2), holder_tuple(1.5, 1.5), holder_tuple(4, 4, {1.5, 2, 1})})
        CHECK(ap_characteristic(unit, e) == doctest::Approx(1.0).epsilon(1e-12));

    SUBCASE("power weights match a scan over all cubes") {
        double prev = 1.0, prev_wo = 1.0;
        for (double a : {0.1, 0.2, 0.4}) {
            auto w = WeightVector::power(g, a);
            for (auto e : {holder_tuple(4, 4), holder_tuple(4, 4, {1.5, 1.5, 1}), holder_tuple(2, 2)}) {
                auto got = ap_characteristic_detail(w, e);
                auto ref = brute_characteristic(w, e);
                CHECK(got.value == doctest::Approx(ref.all).epsilon(1e-10));
                CHECK(got.without_origin == doctest::Approx(ref.without_origin).epsilon(1e-10));
                CHECK(got.without_origin <= got.value);
            }
            auto c = ap_characteristic_detail(w, holder_tuple(4, 4));
            CHECK(c.value > prev);
            CHECK(c.without_origin >= prev_wo);
            prev = c.value;
            prev_wo = c.without_origin;
        }
        // Negative exponent: v1 = |x|^-a gives the same A_p value by symmetry of (4, 4).
        auto lhs = ap_characteristic(WeightVector::power(g, -0.2), holder_tuple(4, 4));
        CHECK(lhs == doctest::Approx(ap_characteristic(WeightVector::power(g, 0.2), holder_tuple(4, 4))));
    }
    SUBCASE("infinite eps is the supremum") {
        auto w = WeightVector::power(g, 0.3);
        auto e = holder_tuple(1, 4);
        CHECK(ap_characteristic(w, e) == doctest::Approx(brute_characteristic(w, e).all).epsilon(1e-10));
    }
    SUBCASE("two-dimensional weights") {
        Grid g2(2, 4.0, 32);
        std::mt19937_64 rng(7);
        auto w = WeightVector::from_pair(smooth_random_log(g2, rng, 0.8), smooth_random_log(g2, rng, 0.8));
        CHECK_NOTHROW(w.validate());
        for (auto e : {holder_tuple(4, 4), holder_tuple(3, 6, {1.5, 2, 1})})
            CHECK(ap_characteristic(w, e) == doctest::Approx(brute_characteristic(w, e).all).epsilon(1e-10));
    }
    SUBCASE("at least 1 for product-one weights with r = 1") {
        std::mt19937_64 rng(2024);
        std::vector<ExponentTuple> tuples{holder_tuple(4, 4), holder_tuple(2, 3), holder_tuple(1.5, 1.5),
                                          holder_tuple(3, INFINITY)};
        for (int s = 0; s < 30; ++s) {
            auto w = WeightVector::from_pair(smooth_random_log(g, rng, 1.5), smooth_random_log(g, rng, 1.5));
            double c = ap_characteristic(w, tuples[s % tuples.size()]);
            CHECK(c >= 1.0 - 1e-12);
        }
    }
    SUBCASE("monotone under family enlargement") {
        std::mt19937_64 rng(11);
        auto w = WeightVector::from_pair(smooth_random_log(g, rng, 1.0), smooth_random_log(g, rng, 1.0));
        auto e = holder_tuple(3, 3);
        double small = ap_characteristic(w, e, {2, 4});
        double mid = ap_characteristic(w, e, {1, 6});
        double full = ap_characteristic(w, e);
        CHECK(small <= mid * (1 + 1e-12));
        CHECK(mid <= full * (1 + 1e-12));  // summation order differs
        CHECK(small == doctest::Approx(brute_characteristic(w, e, 2, 4).all).epsilon(1e-10));
        CHECK_THROWS_AS(ap_characteristic(w, e, {3, 2}), Error);
        CHECK_THROWS_AS(ap_characteristic(w, e, {0, 40}), Error);
    }
}

TEST_CASE("weighted Sobolev norms") {
    Grid g(1, 16.0, 512);
    auto f = test::random_band_limited(g, 5, 2.0, 9.0);
    SampledFunction one = WeightVector::unit(g).v1;

    SUBCASE("sigma = 0 doubles the plain norm") {
        for (double q : {0.7, 1.0, 2.0, 3.5}) {
            auto n = weighted_sobolev_norm(f, 0, q, one);
            double s = 0;
            for (auto& x : f.values) s += std::pow(std::abs(x), q);
            double ref = std::pow(s * g.h(), 1 / q);
            CHECK(n.homogeneous == doctest::Approx(ref).epsilon(1e-12));
            CHECK(n.value == doctest::Approx(2 * ref).epsilon(1e-12));
        }
        CHECK(weighted_sobolev_norm(f, 0, INFINITY, one).value == doctest::Approx(2 * max_abs(f)));
    }
    SUBCASE("sin is an eigenfunction of every D^sigma") {
        Grid c(1, 8 * kPi, 512);
        auto s = test::sample_expr("sin(x)", c);
        std::mt19937_64 rng(3);
        auto v = smooth_random_log(c, rng, 0.5);
        for (double sigma : {0.0, 0.5, 1.0, 2.0, 2.5}) {
            for (double q : {1.0, 2.0}) {
                double base = 0;
                for (std::size_t i = 0; i < s.values.size(); ++i)
                    base += std::pow(std::abs(s.values[i]) * v.values[i].real(), q);
                base = std::pow(base * c.h(), 1 / q);
                auto n = weighted_sobolev_norm(s, sigma, q, v);
                CHECK(n.homogeneous == doctest::Approx(base).epsilon(1e-9));
                CHECK(n.terms.size() == std::size_t(std::floor(sigma)) + 1);
                CHECK(n.value == doctest::Approx((std::floor(sigma) + 2) * base).epsilon(1e-9));
            }
        }
        CHECK(weighted_sobolev_norm(s, 2, 2, WeightVector::unit(c).v1).homogeneous ==
              doctest::Approx(std::sqrt(c.L)).epsilon(1e-10));
    }
    SUBCASE("homogeneous of degree one") {
        auto a = weighted_sobolev_norm(f, 1.5, 2, one);
        auto b = weighted_sobolev_norm(cplx(-3.0, 4.0) * f, 1.5, 2, one);
        CHECK(b.value == doctest::Approx(5 * a.value).epsilon(1e-12));
    }
    CHECK_THROWS_AS(weighted_sobolev_norm(f, -1, 2, one), Error);
    CHECK_THROWS_AS(weighted_lq(f, 0, nullptr), Error);
}

TEST_CASE("bilinear operators") {
    Grid g(1, 16.0, 256);
    auto f = test::random_band_limited(g, 1, 1.0, 4.0), h = test::random_band_limited(g, 2, 1.0, 4.0);
    SUBCASE("unit symbol is the pointwise product") {
        auto a = bilinear_multiplier([](double, double) { return cplx(1.0); }).apply(f, h);
        CHECK(test::max_diff(a, f * h) < 1e-10 * max_abs(f * h));
    }
    SUBCASE("pairing against a third function matches the trilinear form") {
        auto m = [](double a, double b) { return cplx(1.0 / (1 + a * a + 0.5 * b * b), 0.1 * a); };
        auto k = test::random_band_limited(g, 3, 1.0, 4.0);
        cplx direct = integrate(bilinear_multiplier(m).apply(f, h) * k);
        cplx form = smooth_multiplier(m).rule(f, h, k);
        CHECK(std::abs(direct - form) < 1e-10 * std::abs(form));
    }
}

TEST_CASE("Leibniz rule checks") {
    Grid g(1, 16.0, 1024);
    auto unit = WeightVector::unit(g);

    SUBCASE("zero inputs are degenerate") {
        auto r = leibniz_check(SampledFunction(g), SampledFunction(g), 0.5, holder_tuple(4, 4, {1.5, 1.5, 1}), unit);
        CHECK(r.degenerate);
        CHECK(r.ratio == 0.0);
    }
    SUBCASE("sigma = 0 reduces to Hoelder") {
        for (std::uint64_t s = 1; s <= 5; ++s) {
            auto f = band_limited_probe(g, 2 * s), h = band_limited_probe(g, 2 * s + 1);
            auto r = leibniz_check(f, h, 0, holder_tuple(4, 4), unit);
            double fg = 0, f4 = 0, h4 = 0;
            for (std::size_t i = 0; i < f.values.size(); ++i) {
                fg += std::norm(f.values[i] * h.values[i]);
                f4 += std::pow(std::abs(f.values[i]), 4);
                h4 += std::pow(std::abs(h.values[i]), 4);
            }
            double ref = std::sqrt(fg * g.h()) / (4 * std::pow(f4 * g.h(), 0.25) * std::pow(h4 * g.h(), 0.25));
            CHECK(r.ratio == doctest::Approx(ref).epsilon(1e-10));
            CHECK(r.ratio <= 0.25);
            CHECK(r.regime == "integer");
            CHECK(r.characteristic == doctest::Approx(1.0));
            CHECK(r.sharp_power == doctest::Approx(2.0));
        }
    }
    SUBCASE("ensemble ratio at sigma = 0.5") {
        auto e = holder_tuple(4, 4, {1.5, 1.5, 1});
        double lo = INFINITY, hi = 0;
        for (std::uint64_t s = 0; s < 20; ++s) {
            auto r = leibniz_check(band_limited_probe(g, 100 + 2 * s), band_limited_probe(g, 101 + 2 * s), 0.5, e, unit);
            CHECK_FALSE(r.degenerate);
            CHECK(r.regime == "fractional");
            lo = std::min(lo, r.ratio);
            hi = std::max(hi, r.ratio);
        }
        CHECK(hi / lo < 20);
    }
    SUBCASE("ratio invariant under rescaling") {
        auto f = band_limited_probe(g, 40), h = band_limited_probe(g, 41);
        auto w = WeightVector::power(g, 0.2);
        auto e = holder_tuple(3, 6, {1.5, 2, 1});
        auto a = leibniz_check(f, h, 0.7, e, w);
        auto b = leibniz_check(cplx(2.5) * f, cplx(0.0, -0.3) * h, 0.7, e, w);
        CHECK(b.ratio == doctest::Approx(a.ratio).epsilon(1e-12));
        CHECK(a.characteristic > 1.0);
    }
    SUBCASE("regime violations name the inequality") {
        auto f = band_limited_probe(g, 1), h = band_limited_probe(g, 2);
        auto run = [&](double sigma, ExponentTuple e) { return [=] { leibniz_check(f, h, sigma, e, unit); }; };
        CHECK(throws_with(run(0.5, holder_tuple(4, 4)), "1/r1 + 1/r2 < (sigma + d)/d"));
        CHECK(throws_with(run(0.5, holder_tuple(1, 4, {1, 1.5, 1})), "1 < min{p1, p2} < inf"));
        CHECK(throws_with(run(0.3, holder_tuple(1.4, 1.4, {1.1, 1.1, 1})), "d/p - d < sigma < d"));
        CHECK(throws_with(run(0.5, holder_tuple(4, 4, {4, 1.5, 1})), "1 <= r_i < p_i"));
        CHECK(throws_with(run(0.5, holder_tuple(4, 4, {1.5, 1.5, 1.5})), "r3 = 1"));
        CHECK(throws_with(run(-0.5, holder_tuple(4, 4)), "0 <= sigma"));
        CHECK_NOTHROW(run(1.0, holder_tuple(4, 4))());
        CHECK_NOTHROW(run(2.5, holder_tuple(3, 3))());
    }
}

TEST_CASE("sharpness of the exponent constraint") {
    SUBCASE("slope at sigma = 0.5 over k = 2..6") {
        auto r = sharpness_experiment(0.5, {2, 3, 4, 5, 6}, 1.5, 1.5);
        CHECK(std::abs(r.slope + 0.5) < 0.1);
        CHECK(r.target_slope == doctest::Approx(-0.5));
    }
    SUBCASE("decay law for several sigma, stable under refinement") {
        for (double sigma : {0.25, 0.5, 1.0}) {
            auto r = sharpness_experiment(sigma, {3, 4, 5, 6, 7}, 1.5, 1.5);
            CHECK(std::abs(r.slope + sigma) < 0.1);
            SharpnessOptions fine;
            fine.N *= 2;
            auto f = sharpness_experiment(sigma, {3, 4, 5, 6, 7}, 1.5, 1.5, fine);
            CHECK(std::abs(f.slope - r.slope) < 0.02);
        }
    }
    SUBCASE("conclusion agrees with the exponent constraint") {
        auto ok = sharpness_experiment(0.5, {3, 4, 5, 6, 7}, 1.5, 1.5);
        CHECK(ok.sparse_slope == doctest::Approx(1 - 2 / 1.5));
        CHECK(ok.constraint_holds);
        CHECK(ok.sparse_consistent);
        auto bad = sharpness_experiment(0.5, {3, 4, 5, 6, 7}, 1.1, 1.1);
        CHECK_FALSE(bad.constraint_holds);
        CHECK_FALSE(bad.sparse_consistent);
    }
    SUBCASE("sigma = 0") {
        auto r = sharpness_experiment(0.0, {3, 4, 5, 6}, 2, 2);
        CHECK(r.target_slope == 0.0);
        CHECK(r.constraint_holds);  // 1/r1 + 1/r2 <= 1
        CHECK_FALSE(sharpness_experiment(0.0, {3, 4, 5, 6}, 1.5, 2).constraint_holds);
    }
    SUBCASE("preconditions and csv") {
        CHECK_THROWS_AS(sharpness_experiment(0.5, {2, 3, 4}, 1.5, 1.5), Error);
        CHECK_THROWS_AS(sharpness_experiment(0.5, {2, 3, 3, 4}, 1.5, 1.5), Error);
        SharpnessOptions small;
        small.L = 64;
        small.N = 512;
        CHECK_THROWS_AS(sharpness_experiment(0.5, {2, 3, 4, 5}, 1.5, 1.5, small), Error);
        auto r = sharpness_experiment(0.5, {2, 3, 4, 5}, 1.5, 1.5);
        std::string path = "/tmp/czw_sharpness_test.csv";
        r.write_csv(path);
        std::ifstream is(path);
        std::string line;
        std::getline(is, line);
        CHECK(line == "k,pairing,log2_pairing,fitted");
        int rows = 0;
        while (std::getline(is, line)) ++rows;
        CHECK(rows == 4);
        std::remove(path.c_str());
    }
}
