#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <random>

#include "czw/forms.hpp"
#include "helpers.hpp"

using namespace czw;
using czw::test::random_band_limited;

namespace {

const MotherWavelet& mother() {
    static const MotherWavelet mw = make_mother_wavelet(1, default_bump(1));
    return mw;
}

const IntrinsicDictionaries& dicts() {
    static const IntrinsicDictionaries d = IntrinsicDictionaries::standard(4, 21).with_sigma(0.5, 4, 21);
    return d;
}

Grid small_grid() { return Grid(1, 8.0, 256); }
AffineGrid small_affine() { return AffineGrid::from_range(small_grid(), 4, 0.25, 2.0, 6); }

SampledFunction rnd(const Grid& g, unsigned seed) { return random_band_limited(g, seed, 1.0, 9.0, 1.0); }

double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// Naive pairing: explicit node sum of f conj(theta).
cplx naive_pair(const SampledFunction& f, const SampledFunction& theta) {
    cplx s = 0;
    for (int i = 0; i < f.grid.N; ++i) s += f.values[i] * std::conj(theta.values[i]);
    return s * f.grid.h();
}

double naive_one(const SampledFunction& f, const AffinePoint& z, const WaveletDictionary& d) {
    double best = 0;
    for (const auto& m : d.members) best = std::max(best, std::abs(naive_pair(f, place(m, z, f.grid))));
    return best;
}

double naive_two(const SampledFunction& f, const SampledFunction& g, const AffinePoint& z, const WaveletDictionary& d) {
    double best = 0;
    for (const auto& m : d.tensor_members) {
        cplx s = 0;
        for (const auto& [a, b] : m.terms) s += naive_pair(f, place(a, z, f.grid)) * naive_pair(g, place(b, z, g.grid));
        best = std::max(best, std::abs(s));
    }
    return best;
}

// Loop over cells with the explicit measure weight (stride h) ln(rho).
template <class Cell>
double naive_integral(const AffineGrid& ag, Cell cell) {
    double sum = 0;
    for (int j = 0; j < ag.M; ++j)
        for (int i = 0; i < ag.K(); ++i) sum += cell(AffinePoint(ag.position(i), ag.scale(j)));
    return sum * ag.stride * ag.grid.h() * ag.log_rho();
}

UpsilonInputs upsilon_inputs(const Grid& g, FormEvaluator lambda, int k1 = 0, int k2 = 0) {
    UpsilonInputs in;
    in.lambda = std::move(lambda);
    in.psi = default_bump(1);
    in.phi = mother().base;
    in.mother = mother();
    for (int gam = 0; gam <= std::max(k1, k2); ++gam) in.fams.push_back(make_gamma_family(gam, 0.5));
    in.grid = g;
    in.k1 = k1;
    in.k2 = k2;
    return in;
}

}  // namespace

TEST_CASE("pointwise product and the unit multiplier agree") {
    Grid g = small_grid();
    auto f = rnd(g, 1), u = rnd(g, 2), h = rnd(g, 3);
    cplx a = pointwise_product()(f, u, h);
    cplx b = smooth_multiplier([](double, double) { return cplx(1.0); })(f, u, h);
    CHECK(std::abs(a) > 1e-6);
    CHECK(rel(b, a) < 1e-12);
}

TEST_CASE("catalog forms are trilinear") {
    Grid g = small_grid();
    auto fam0 = make_gamma_family(0, 0.5);
    std::vector<FormEvaluator> forms = {
        pointwise_product(),
        smooth_multiplier([](double a, double b) { return cplx(1.0 / (1 + a * a + b * b)); }, "bessel"),
        paraproduct(rnd(g, 9), {0, 0}, {fam0, fam0}, mother(), small_affine()),
    };
    std::mt19937_64 rng(5);
    std::normal_distribution<double> nd;
    for (const auto& form : forms) {
        CAPTURE(form.tag);
        for (int trial = 0; trial < 3; ++trial) {
            unsigned s = 10 + 7 * trial;
            auto f1 = rnd(g, s), f2 = rnd(g, s + 1), u = rnd(g, s + 2), h = rnd(g, s + 3);
            cplx a(nd(rng), nd(rng)), b(nd(rng), nd(rng));
            cplx lhs = form(a * f1 + b * f2, u, h);
            cplx rhs = a * form(f1, u, h) + b * form(f2, u, h);
            CHECK(std::abs(lhs - rhs) <= 1e-10 * (std::abs(a * form(f1, u, h)) + std::abs(b * form(f2, u, h))));
            cplx lhs3 = form(u, h, a * f1 + b * f2);
            cplx rhs3 = a * form(u, h, f1) + b * form(u, h, f2);
            CHECK(std::abs(lhs3 - rhs3) <= 1e-10 * (std::abs(a * form(u, h, f1)) + std::abs(b * form(u, h, f2))));
        }
    }
}

TEST_CASE("wavelet form: trivial cancellations") {
    Grid g(1, 4.0, 256);
    auto ag = AffineGrid::from_range(g, 4, 0.5, 2.0, 4);
    auto nu = mother_tensor_family(mother(), g);
    auto f = test::sample_expr("-x*exp(-x^2)", g);
    SampledFunction one = sample([](double, double) { return cplx(1.0); }, g);
    CHECK(std::abs(wavelet_form(nu, mother(), f, f, one, ag)) < 1e-12);
    CHECK(wavelet_form(nu, mother(), SampledFunction(g), f, f, ag) == cplx(0.0));
}

TEST_CASE("wavelet form matches a nested-loop quadrature") {
    Grid g(1, 4.0, 512);
    auto ag = AffineGrid::from_range(g, 4, 0.5, 2.0, 6);
    auto nu = mother_tensor_family(mother(), g);
    // Derivatives of Gaussians with different centers and widths.
    auto f = test::sample_expr("-(x-0.3)*exp(-50*(x-0.3)^2)", g);
    auto u = test::sample_expr("-(x+0.2)*exp(-30*(x+0.2)^2)", g);
    auto h = test::sample_expr("-(x-0.1)*exp(-80*(x-0.1)^2)", g);
    cplx fast = wavelet_form(nu, mother(), f, u, h, ag);

    double area = g.h() * g.h();
    cplx slow = 0;
    for (int j = 0; j < ag.M; ++j)
        for (int i = 0; i < ag.K(); ++i) {
            AffinePoint z(ag.position(i), ag.scale(j));
            SampledFunction2D n = nu(z);
            cplx pair = 0;
            for (int a = 0; a < g.N; ++a)
                for (int b = 0; b < g.N; ++b) pair += f.values[a] * u.values[b] * std::conj(n.at(a, b)) * area;
            slow += pair * naive_pair(h, place(mother().base, z, g));
        }
    slow *= ag.stride * g.h() * ag.log_rho();
    CHECK(std::abs(fast) > 1e-8);
    CHECK(rel(fast, slow) < 1e-8);
}

TEST_CASE("paraproduct of zero symbol vanishes") {
    Grid g = small_grid();
    auto fam0 = make_gamma_family(0, 0.5);
    cplx v = paraproduct_form(SampledFunction(g), {0, 0}, {fam0, fam0}, mother(), rnd(g, 1), rnd(g, 2), rnd(g, 3),
                              small_affine());
    CHECK(v == cplx(0.0));
}

TEST_CASE("paraproduct testing identities on windowed monomials") {
    Grid g(1, 32.0, 2048);
    auto ag = AffineGrid::from_range(g, 1, 1.0 / 16, 16.0, 64);
    auto b = random_band_limited(g, 5, 3.0, 60.0, 2.0);
    auto psi = place(mother().base, AffinePoint(0.0, 1.0), g);
    auto one = windowed_monomial(g, 0, 24.0, 30.0);
    auto fam0 = make_gamma_family(0, 0.5), fam1 = make_gamma_family(1, 0.5);

    SUBCASE("gamma = (0, 0)") {
        cplx ref = inner(b, psi);
        cplx v = paraproduct_form(b, {0, 0}, {fam0, fam0}, mother(), one, one, psi, ag);
        CHECK(rel(v, ref) < 0.01);
        CHECK(std::abs(paraproduct_form(b, {0, 0}, {fam0, fam0}, mother(), psi, one, one, ag)) < 1e-6);
        CHECK(std::abs(paraproduct_form(b, {0, 0}, {fam0, fam0}, mother(), one, psi, one, ag)) < 1e-6);
    }
    SUBCASE("gamma = (1, 0)") {
        auto x = windowed_monomial(g, 1, 24.0, 30.0);
        cplx ref = inner(b, symbol_derivative(psi, -1));
        cplx v = paraproduct_form(b, {1, 0}, {fam1, fam0}, mother(), x, one, psi, ag);
        CHECK(rel(v, ref) < 0.01);
        // kappa < gamma gives no contribution.
        CHECK(std::abs(paraproduct_form(b, {1, 0}, {fam1, fam0}, mother(), one, one, psi, ag)) < 1e-6);
        FormEvaluator pi = paraproduct(b, {1, 0}, {fam1, fam0}, mother(), ag);
        CHECK(std::abs(adjoint(pi, 1)(x, one, psi)) < 1e-6);
        CHECK(std::abs(adjoint(pi, 2)(x, one, psi)) < 1e-6);
    }
}

TEST_CASE("paraproduct rejects mismatched families and uncancelled wavelets") {
    Grid g = small_grid();
    auto fam0 = make_gamma_family(0, 0.5), fam1 = make_gamma_family(1, 0.5);
    auto f = rnd(g, 1);
    CHECK_THROWS_AS(paraproduct_form(f, {1, 0}, {fam0, fam0}, mother(), f, f, f, small_affine()), Error);
    MotherWavelet flat = mother();
    flat.base = default_bump(1);
    CHECK_THROWS_AS(paraproduct_form(f, {1, 0}, {fam1, fam0}, flat, f, f, f, small_affine()), Error);
    CHECK_THROWS_AS(adjoint(pointwise_product(), 3), Error);
}

TEST_CASE("intrinsic coefficients") {
    Grid g = small_grid();
    auto f = rnd(g, 3), u = rnd(g, 4);
    AffinePoint z(0.5, 0.75);
    const auto& d = dicts();
    CHECK(intrinsic_coefficient(SampledFunction(g), z, d.rapid) == 0.0);
    CHECK(intrinsic_coefficient(SampledFunction(g), u, z, d.pair10) == 0.0);
    double c = intrinsic_coefficient(f, z, d.rapid);
    CHECK(c > 0);
    CHECK(intrinsic_coefficient(cplx(-2.5) * f, z, d.rapid) == doctest::Approx(2.5 * c).epsilon(1e-12));
    CHECK(intrinsic_coefficient(f, cplx(3.0) * u, z, d.pair10) ==
          doctest::Approx(3 * intrinsic_coefficient(f, u, z, d.pair10)).epsilon(1e-12));

    auto small = build_dictionary(WaveletClassSpec::rapid_decay(), AffinePoint(0.0, 1.0), 2, 21);
    auto large = build_dictionary(WaveletClassSpec::rapid_decay(), AffinePoint(0.0, 1.0), 6, 21);
    CHECK(intrinsic_coefficient(f, z, small) <= intrinsic_coefficient(f, z, large));
    CHECK(intrinsic_coefficient(f, z, small) <= intrinsic_coefficient(f, z, d.rapid) + 1e-15);
}

TEST_CASE("intrinsic field agrees with point evaluation") {
    Grid g = small_grid();
    auto ag = small_affine();
    auto f = rnd(g, 3), u = rnd(g, 4);
    auto one = intrinsic_field(f, dicts().rapid, ag);
    auto two = intrinsic_field(f, u, dicts().pair10, ag);
    for (int j : {0, 3, 5})
        for (int i : {10, 31, 50}) {
            AffinePoint z(ag.position(i), ag.scale(j));
            std::size_t idx = std::size_t(j) * ag.K() + i;
            CHECK(one[idx] == doctest::Approx(intrinsic_coefficient(f, z, dicts().rapid)).epsilon(1e-10));
            CHECK(two[idx] == doctest::Approx(intrinsic_coefficient(f, u, z, dicts().pair10)).epsilon(1e-10));
        }
}

TEST_CASE("mss form: zeros, loop oracle, sub-trilinearity") {
    Grid g = small_grid();
    auto ag = small_affine();
    const auto& d = dicts();
    auto f = rnd(g, 31), u = rnd(g, 32), h = rnd(g, 33);
    SampledFunction zero(g);
    CHECK(mss_form(zero, u, h, d, ag) == 0.0);
    CHECK(mss_form(f, zero, h, d, ag) == 0.0);
    CHECK(mss_form(f, u, zero, d, ag) == 0.0);

    double v = mss_form(f, u, h, d, ag);
    double oracle = naive_integral(ag, [&](const AffinePoint& z) {
        return naive_two(f, u, z, d.pair10) * naive_one(h, z, d.rapid);
    });
    CHECK(v > 0);
    CHECK(v == doctest::Approx(oracle).epsilon(1e-10));

    for (unsigned s = 0; s < 20; ++s) {
        auto f1 = rnd(g, 100 + s), f2 = rnd(g, 200 + s), gg = rnd(g, 300 + s), hh = rnd(g, 400 + s);
        double lhs = mss_form(f1 + f2, gg, hh, d, ag);
        double rhs = mss_form(f1, gg, hh, d, ag) + mss_form(f2, gg, hh, d, ag);
        CHECK(lhs <= rhs * (1 + 1e-12));
    }
}

TEST_CASE("pi_b form") {
    Grid g = small_grid();
    auto ag = small_affine();
    const auto& d = dicts();
    auto b = rnd(g, 40), f = rnd(g, 41), u = rnd(g, 42), h = rnd(g, 43);
    double v = pi_b_form(b, f, u, h, d, ag);
    double oracle = naive_integral(ag, [&](const AffinePoint& z) {
        return naive_one(b, z, d.rapid) * naive_two(f, u, z, d.pair11) * naive_one(h, z, d.rapid);
    });
    CHECK(v > 0);
    CHECK(v == doctest::Approx(oracle).epsilon(1e-10));

    SampledFunction constant = sample([](double, double) { return cplx(1.0); }, g);
    double scale = l2_norm(b) / l2_norm(constant);
    CHECK(pi_b_form(cplx(scale) * constant, f, u, h, d, ag) < 1e-10 * v);
}

TEST_CASE("sigma forms") {
    Grid g = small_grid();
    auto ag = small_affine();
    const auto& d = dicts();
    auto b = rnd(g, 50), f = rnd(g, 51), u = rnd(g, 52), h = rnd(g, 53);

    double v = msssig_form(h, u, f, 0.5, d, ag);
    auto df = fractional_derivative(f, 0.5);
    double oracle = naive_integral(ag, [&](const AffinePoint& z) {
        return naive_two(h, u, z, *d.sigma10) * naive_one(df, z, d.rapid);
    });
    CHECK(v > 0);
    CHECK(v == doctest::Approx(oracle).epsilon(1e-10));

    double pv = pi_b_sigma_form(b, f, u, h, 0.5, d, ag);
    double poracle = naive_integral(ag, [&](const AffinePoint& z) {
        return naive_one(b, z, d.rapid) * naive_two(f, u, z, *d.sigma11) * naive_one(h, z, d.rapid);
    });
    CHECK(pv > 0);
    CHECK(pv == doctest::Approx(poracle).epsilon(1e-10));

    CHECK_THROWS_AS(msssig_form(h, u, f, 0.7, d, ag), Error);
    CHECK_THROWS_AS(pi_b_sigma_form(b, f, u, h, 0.5, IntrinsicDictionaries::standard(2), ag), Error);
}

TEST_CASE("msssig reduces to mss when the classes coincide") {
    Grid g = small_grid();
    auto ag = small_affine();
    auto d = IntrinsicDictionaries::standard(3, 21).with_sigma(4.0, 3, 21);
    // Above 1 + eta the sigma norm is the star norm, so the sigma dictionary is
    // also a correctly normalized standard dictionary.
    for (const auto& m : d.sigma10->tensor_members) {
        auto full = m.assemble();
        CHECK(sigma_norm(full, 4.0, 1.0, 1.0) == doctest::Approx(star_norm(full, 1.0, 1.0)).epsilon(1e-12));
    }
    IntrinsicDictionaries same = d;
    same.pair10 = *d.sigma10;
    auto f = rnd(g, 61), u = rnd(g, 62), h = rnd(g, 63);
    double a = msssig_form(h, u, f, 4.0, d, ag);
    double b = mss_form(h, u, fractional_derivative(f, 4.0), same, ag);
    CHECK(a == doctest::Approx(b).epsilon(1e-10));
}

TEST_CASE("region classification") {
    CHECK(classify_region(4.0, 0.0, 0.0, 1.0, 1.0) == UpsilonRegion::Far);
    CHECK(classify_region(0.5, -0.5, 0.0, 2.0, 1.0) == UpsilonRegion::Near);
    CHECK(classify_region(0.5, -0.5, 0.0, 4.0, 1.0) == UpsilonRegion::HighLow);
    CHECK(std::string(region_name(UpsilonRegion::HighLow)) == "A");
}

TEST_CASE("upsilon: errors, disjoint supports, specialization at k = 0") {
    Grid g(1, 16.0, 2048);
    auto in = upsilon_inputs(g, pointwise_product());
    CHECK_THROWS_AS(upsilon(in, 0.0, 0.0, 0.0, 0.5, 1.0), Error);
    // Supports [5.5, 6.5], [-0.5, 0.5], [-0.25, 0.25] share no point.
    CHECK(upsilon(in, 6.0, 0.0, 0.0, 1.0, 0.5) == cplx(0.0));

    // Hand-specialized k1 = k2 = 0: subtract <psi, theta> <phi, theta> integral(phi_wt) on A.
    for (auto [u, v, s] : {std::tuple{0.4, -0.3, 2.0}, std::tuple{1.0, 0.5, 1.0}, std::tuple{0.2, 0.1, 0.6}}) {
        double w = 0.1, t = 0.5;
        auto psi = sy(AffinePoint(u, s), in.psi, g), phi = sy(AffinePoint(v, s), in.phi, g);
        auto third = sy(AffinePoint(w, t), mother().base, g);
        auto theta = sy(AffinePoint(w, t), in.fams[0].base, g);
        cplx direct = 0, mass = 0;
        for (int i = 0; i < g.N; ++i) {
            direct += psi.values[i] * phi.values[i] * third.values[i];
            mass += third.values[i] * smooth_window(g.node(i) - w, 0.5 * (g.L - w), 0.9 * (g.L - w));
        }
        direct *= g.h();
        mass *= g.h();
        bool in_a = std::max(std::abs(u - w), std::abs(v - w)) <= 3 * s && s >= 3 * t;
        cplx expect = direct - (in_a ? naive_pair(psi, theta) * naive_pair(phi, theta) * mass : cplx(0.0));
        CAPTURE(s);
        CHECK(std::abs(upsilon(in, u, v, w, s, t) - expect) <= 1e-12 * std::max(1.0, std::abs(expect)));
    }

    auto in1 = upsilon_inputs(g, pointwise_product(), 1, 1);
    cplx val = upsilon(in1, 0.4, -0.3, 0.1, 2.0, 0.5);
    CHECK(std::isfinite(val.real()));
    in1.fams.pop_back();
    CHECK_THROWS_AS(upsilon(in1, 0.4, -0.3, 0.1, 2.0, 0.5), Error);
}

TEST_CASE("upsilon field and decay certificate") {
    Grid g(1, 16.0, 2048);
    UpsilonSampling opt;
    opt.count = 100;
    opt.ratio_max = 16;
    opt.offset_max = 16;
    auto in = upsilon_inputs(g, pointwise_product());
    auto field = sample_upsilon(in, 0.0, 0.5, opt);
    REQUIRE(field.samples.size() == 100);
    auto cert = upsilon_decay_certificate(field, 0.5);
    CHECK_FALSE(cert.degenerate);
    CHECK(cert.target == doctest::Approx(-2.5));
    CHECK(cert.slope <= -2.0);
    CHECK(cert.disjoint > 0);
    CHECK(cert.disjoint_nonzero == 0);
    CHECK(cert.far + cert.near + cert.highlow == 100);

    SUBCASE("the unit multiplier gives the same certificate") {
        auto in_m = upsilon_inputs(g, smooth_multiplier([](double, double) { return cplx(1.0); }));
        auto cm = upsilon_decay_certificate(sample_upsilon(in_m, 0.0, 0.5, opt), 0.5);
        CHECK(cm.slope == doctest::Approx(cert.slope).epsilon(1e-8));
        CHECK(cm.constant == doctest::Approx(cert.constant).epsilon(1e-8));
        CHECK(cm.nonzero == cert.nonzero);
    }
    SUBCASE("zero field is flagged, not fatal") {
        UpsilonField z = field;
        for (auto& s : z.samples) s.value = 0;
        auto cz = upsilon_decay_certificate(z, 0.5);
        CHECK(cz.degenerate);
        CHECK(cz.nonzero == 0);
    }
    SUBCASE("too few samples in a region") {
        UpsilonField z = field;
        z.samples.resize(10);
        CHECK_THROWS_AS(upsilon_decay_certificate(z, 0.5), Error);
    }
    SUBCASE("csv export") {
        std::string path = "upsilon_field_test.csv";
        write_csv(field, path);
        std::ifstream is(path);
        std::string line;
        std::getline(is, line);
        CHECK(line == "u,v,w,s,t,re,im");
        int rows = 0;
        while (std::getline(is, line)) ++rows;
        CHECK(rows == 100);
        std::remove(path.c_str());
    }
}

TEST_CASE("sampling rejects supports leaving the domain") {
    auto in = upsilon_inputs(Grid(1, 4.0, 512), pointwise_product());
    CHECK_THROWS_AS(sample_upsilon(in, 0.0, 0.5, UpsilonSampling{}), Error);
}

TEST_CASE("pointwise product has a z-uniform weak boundedness constant") {
    Grid g(1, 8.0, 1024);
    auto ag = AffineGrid::from_range(g, 16, 0.5, 4.0, 6);
    auto w = wbp_constant(pointwise_product(), mother().base, default_bump(1), default_bump(1), ag);
    CHECK(w.max > 0);
    CHECK(w.max / w.min < 1.001);
}

TEST_CASE("derivative shift identity for a mother-wavelet tensor form") {
    Grid g(1, 4.0, 512);
    auto ag = AffineGrid::from_range(g, 8, 0.5, 2.0, 6);
    auto f = rnd(g, 71), u = rnd(g, 72), h = rnd(g, 73);
    auto r = derivative_shift_check(mother_tensor_family(mother(), g), mother(), f, u, h, ag);
    CHECK(std::abs(r.lhs) > 1e-8);
    CHECK(r.relative < 1e-6);
}

TEST_CASE("bmo oscillation and fractional derivative") {
    Grid g(1, 2 * kPi, 256);
    SampledFunction c = sample([](double, double) { return cplx(3.0); }, g);
    CHECK(bmo_oscillation(c) == doctest::Approx(0.0).epsilon(1e-15));
    auto s = test::sample_expr("sin(x)", g);
    CHECK(bmo_oscillation(s) == doctest::Approx(2 / kPi).epsilon(1e-3));
    CHECK(test::max_diff(fractional_derivative(s, 0.7), s) < 1e-12);
    CHECK(fractional_derivative(s, 0.0).values == s.values);
    CHECK_THROWS_AS(fractional_derivative(s, -1.0), Error);
}
