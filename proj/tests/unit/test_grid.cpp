#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "czw/grid.hpp"
#include "helpers.hpp"

using namespace czw;
using czw::test::max_diff;
using czw::test::sample_expr;

namespace {
const Grid G(1, 16.0, 1024);
}

TEST_CASE("grid rejects non power of two and bad dimension") {
    CHECK_THROWS_AS(Grid(1, 1.0, 1000), Error);
    CHECK_THROWS_AS(Grid(3, 1.0, 64), Error);
    CHECK_THROWS_AS(Grid(1, -1.0, 64), Error);
    CHECK(G.h() == doctest::Approx(1.0 / 32));
    CHECK(G.node(0) == -16.0);
}

TEST_CASE("sample evaluates at nodes") {
    auto f = sample_expr("exp(-x^2)", G);
    CHECK(f[512].real() == doctest::Approx(1.0).epsilon(1e-15));
    auto z = sample_expr("0", G);
    CHECK(max_abs(z) == 0.0);
    auto g = sample_expr("x*exp(-x^2)", G);
    CHECK(std::abs(g[512 + 32].real() - std::exp(-1.0)) < 1e-15);
    CHECK_THROWS_WITH_AS(sample_expr("1/x", G), doctest::Contains("node 512"), Error);
}

TEST_CASE("integrate examples") {
    auto f = sample_expr("exp(-x^2)", G);
    CHECK(std::abs(integrate(f) - std::sqrt(kPi)) < 1e-10);
    auto odd = sample_expr("x*exp(-x^2)", G);
    CHECK(std::abs(integrate(odd)) < 1e-12);
    auto ind = sample([](double x, double) { return cplx(std::abs(x) <= 1 ? 1.0 : 0.0); }, G);
    CHECK(std::abs(integrate(ind).real() - 2.0) <= 2 * G.h());
}

TEST_CASE("integrate is linear") {
    auto f = sample_expr("exp(-x^2)", G), g = sample_expr("cos(x)*exp(-abs(x))", G);
    cplx a(2.0, -1.0);
    CHECK(std::abs(integrate(f + a * g) - (integrate(f) + a * integrate(g))) < 1e-12);
}

TEST_CASE("spectral multiplier examples") {
    auto f = sample_expr("exp(-x^2)*cos(3*x)", G);
    auto id = spectral_multiplier(f, Multiplier::of1([](double) { return cplx(1.0); }));
    CHECK(max_diff(id, f) < 1e-12);

    Grid gp(1, kPi * 4, 256);
    auto s = sample_expr("sin(x)", gp);
    auto lap = spectral_multiplier(s, Multiplier::of1([](double xi) { return cplx(xi * xi); }));
    CHECK(max_diff(lap, s) < 1e-12);

    auto gauss = sample_expr("exp(-x^2)", G);
    cplx mean = integrate(gauss) / (2 * G.L);
    for (auto& v : gauss.values) v -= mean;
    Multiplier anti = Multiplier::of1([](double xi) { return cplx(xi / (xi * xi)); });
    anti.singular_at_zero = true;
    auto back = spectral_multiplier(spectral_multiplier(gauss, anti), Multiplier::of1([](double xi) { return cplx(xi); }));
    CHECK(max_diff(back, gauss) < 1e-8);

    auto raw = sample_expr("exp(-x^2)", G);
    CHECK_THROWS_AS(spectral_multiplier(raw, anti), Error);
}

TEST_CASE("multiplier composition equals product symbol") {
    auto f = sample_expr("exp(-x^2/2)*sin(2*x)", G);
    auto m1 = [](double xi) { return cplx(std::exp(-xi * xi / 50), xi / 7); };
    auto m2 = [](double xi) { return cplx(1 + std::abs(xi), 0.0); };
    auto seq = spectral_multiplier(spectral_multiplier(f, Multiplier::of1(m1)), Multiplier::of1(m2));
    auto once = spectral_multiplier(f, Multiplier::of1([&](double xi) { return m1(xi) * m2(xi); }));
    CHECK(max_diff(seq, once) < 1e-10);
}

TEST_CASE("convolution examples") {
    auto f = sample_expr("exp(-(x-1)^2)*cos(x)", G);
    SampledFunction delta(G);
    delta[512 + 64] = 1.0 / G.h();  // peak at x = 2
    auto shifted = convolve(f, delta);
    double err = 0;
    for (int i = 64; i < G.N; ++i) err = std::max(err, std::abs(shifted[i] - f[i - 64]));
    CHECK(err <= 1e-10);

    auto g = sample_expr("exp(-x^2)", G);
    auto gg = convolve(g, g);
    // closed form: integral of e^{-y^2} e^{-(x-y)^2} dy = sqrt(pi/2) e^{-x^2/2}
    auto oracle = sample([](double x, double) { return cplx(std::sqrt(kPi / 2) * std::exp(-x * x / 2)); }, G);
    CHECK(max_diff(gg, oracle) < 1e-8);

    SampledFunction zero(G);
    CHECK(max_abs(convolve(f, zero)) == 0.0);
    CHECK(std::abs(integrate(gg) - integrate(g) * integrate(g)) < 1e-8);
    CHECK_THROWS_AS(convolve(f, SampledFunction(Grid(1, 8.0, 1024))), Error);
}

TEST_CASE("two dimensional convolution and multiplier") {
    Grid g2(2, 8.0, 128);
    auto a = sample_expr("exp(-x^2-y^2)", g2);
    auto aa = convolve(a, a);
    auto oracle = sample([](double x, double y) { return cplx(kPi / 2 * std::exp(-(x * x + y * y) / 2)); }, g2);
    CHECK(max_diff(aa, oracle) < 1e-8);
    auto id = spectral_multiplier(a, Multiplier::of([](double, double) { return cplx(1.0); }));
    CHECK(max_diff(id, a) < 1e-12);
}

TEST_CASE("mu_integrate examples") {
    AffineGrid ag(G, 4, 0.125, 1.1, 10);
    std::vector<cplx> ones(ag.cell_count(), 1.0);
    double expect = ag.K() * (4 * G.h()) * 10 * std::log(1.1);
    CHECK(std::abs(mu_integrate(ag, ones) - expect) < 1e-12);

    std::vector<cplx> row(ag.cell_count(), 0.0);
    for (std::size_t i = 0; i < ag.spatial_count(); ++i) row[i] = 1.0;
    CHECK(std::abs(mu_integrate(ag, row) - ag.K() * 4 * G.h() * std::log(1.1)) < 1e-12);

    auto tg = AffineGrid::from_range(G, 1, 1.0, 2.0, 200);
    std::vector<double> tv(tg.cell_count());
    for (int j = 0; j < tg.M; ++j)
        for (std::size_t i = 0; i < tg.spatial_count(); ++i) tv[j * tg.spatial_count() + i] = tg.scale(j);
    double per_w = mu_integrate(tg, tv) / (tg.K() * G.h());
    CHECK(std::abs(per_w - 1.0) < 0.01);
}

TEST_CASE("affine grid invariants") {
    CHECK_THROWS_AS(AffineGrid(G, 1, G.h(), 1.1, 4), Error);
    CHECK_THROWS_AS(AffineGrid(G, 3, 0.125, 1.1, 4), Error);
    auto ag = AffineGrid::from_range(G, 2, 0.125, 8.0, 48);
    CHECK(ag.t_max() == doctest::Approx(8.0));
    CHECK(ag.cell_weight() == doctest::Approx(2 * G.h() * std::log(ag.rho)));
    auto r = ag.refined();
    CHECK(r.M == 96);
    CHECK(r.t_max() == doctest::Approx(8.0));
}

TEST_CASE("scale refinement changes smooth integrals at second order or better") {
    // g(w, t) = exp(-w^2) exp(-(ln t)^2), decaying at both ends of [1/8, 8].
    auto eval = [](const AffineGrid& ag) {
        std::vector<double> v(ag.cell_count());
        for (int j = 0; j < ag.M; ++j) {
            double lt = std::log(ag.scale(j));
            for (int i = 0; i < ag.K(); ++i) {
                double w = ag.position(i);
                v[j * ag.spatial_count() + i] = std::exp(-w * w) * std::exp(-lt * lt);
            }
        }
        return mu_integrate(ag, v);
    };
    auto ag = AffineGrid::from_range(G, 1, 0.125, 8.0, 12);
    double a = eval(ag), b = eval(ag.refined());
    double lr = std::log(ag.rho);
    CHECK(std::abs(a - b) < lr * lr);
}

TEST_CASE("chirp transform matches direct sums") {
    Grid g(1, 2.0, 64);
    auto f = sample_expr("exp(-4*x^2)*(1+x)", g);
    auto fast = dtft(f, -3.7, 0.91, 40);
    for (int m = 0; m < 40; ++m) CHECK(std::abs(fast[m] - dtft_at(f, -3.7 + 0.91 * m)) < 1e-12);
    // Gaussian transform: integral e^{-4x^2} e^{-iux} dx = sqrt(pi/4) e^{-u^2/16}
    Grid fine(1, 4.0, 512);
    auto gs = sample_expr("exp(-4*x^2)", fine);
    auto F = dtft(gs, 0.0, 0.5, 30);
    for (int m = 0; m < 30; ++m) {
        double u = 0.5 * m;
        CHECK(std::abs(F[m] - std::sqrt(kPi / 4) * std::exp(-u * u / 16)) < 1e-12);
    }
}

TEST_CASE("trigonometric interpolation") {
    auto f = sample_expr("exp(-x^2)*cos(2*x)", G);
    auto at_nodes = interpolate(f, G.node(0), G.h(), G.N);
    for (int i = 0; i < G.N; ++i) CHECK(std::abs(at_nodes[i] - f[i]) < 1e-12);
    auto off = interpolate(f, -3.0 + 0.0123, 0.0177, 300);
    for (int m = 0; m < 300; ++m) {
        double y = -3.0 + 0.0123 + 0.0177 * m;
        CHECK(std::abs(off[m] - std::exp(-y * y) * std::cos(2 * y)) < 1e-12);
    }
}

TEST_CASE("spectrum round trip") {
    auto f = sample_expr("exp(-x^2)*sin(5*x)", G);
    auto back = from_spectrum(G, to_spectrum(f));
    CHECK(max_diff(back, f) < 1e-14);
    auto s = to_spectrum(sample_expr("exp(-x^2)", G));
    CHECK(std::abs(s[0] - std::sqrt(kPi)) < 1e-12);
    double xi = G.freq(10);
    CHECK(std::abs(s[10] - std::sqrt(kPi) * std::exp(-xi * xi / 4)) < 1e-12);
}

TEST_CASE("serialization round trip") {
    auto f = sample_expr("exp(-x^2)*cos(x)", Grid(1, 4.0, 64));
    f[3] = cplx(0.25, -1.5);
    auto dir = std::filesystem::temp_directory_path();
    auto bin = (dir / "czw_grid_test.bin").string();
    write_binary(f, bin);
    auto g = read_binary(bin);
    CHECK(g.grid == f.grid);
    CHECK(max_diff(f, g) == 0.0);
    auto csv = (dir / "czw_grid_test.csv").string();
    write_csv(f, csv);
    CHECK(std::filesystem::file_size(csv) > 64);
    std::remove(bin.c_str());
    std::remove(csv.c_str());
}
