// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
// Experiment-level criteria go through the same path as `czwave run`; the
// reference values they are judged against come from independent routes
// written out below.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "czw/cli.hpp"
#include "czw/expression.hpp"
#include "czw/forms.hpp"
#include "czw/parallel.hpp"
#include "czw/probes.hpp"
#include "czw/sparse.hpp"
#include "czw/transform.hpp"
#include "czw/weights.hpp"

using namespace czw;
namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

const fs::path kRoot = fs::temp_directory_path() / "czw_acceptance";

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        pass = pass && ok;
        detail += (detail.empty() ? "" : "; ") + what + (ok ? "" : " [FAIL]");
    }
};

std::string fmt(const char* f, double v) {
    char b[64];
    std::snprintf(b, sizeof b, f, v);
    return b;
}

// Runs one experiment from config text into kRoot/<tag>.
ExperimentOutput experiment(const std::string& tag, const std::string& text, unsigned threads = 0) {
    if (threads) set_thread_count(threads);
    ExperimentConfig cfg(ConfigFile::parse(text, tag + ".ini"));
    fs::path dir = kRoot / tag;
    fs::remove_all(dir);
    fs::create_directories(dir);
    auto out = run_experiment(cfg, dir.string());
    std::ofstream(dir / "report.json") << out.report.dump(2) << "\n";
    return out;
}

const CheckResult& check(const ExperimentOutput& o, const std::string& name) {
    for (const auto& c : o.checks)
        if (c.name == name) return c;
    throw Error("acceptance: missing check " + name);
}

void require_check(Outcome& r, const ExperimentOutput& o, const std::string& name, const char* f = "%.3g") {
    const auto& c = check(o, name);
    r.require(c.passed, name + " " + fmt(f, c.value) + " " + c.relation + " " + fmt("%g", c.threshold));
}

// Admissibility by zero padding and a plain Riemann sum over the FFT bins.
double admissibility_oracle(const SampledFunction& phi) {
    const Grid& g = phi.grid;
    int pad = 128;
    Grid big(1, g.L * pad, g.N * pad);
    SampledFunction z(big);
    int off = (g.N * pad - g.N) / 2;
    for (int i = 0; i < g.N; ++i) z.values[off + i] = phi.values[i];
    auto F = to_spectrum(z);
    double dxi = M_PI / big.L, s = 0;
    for (int k = 1; k < big.N; ++k) s += std::norm(F[k]) / std::abs(big.freq(k));
    return 0.5 * s * dxi;
}

// Moments by the trapezoid rule, independent of the library's moment().
double moment_oracle(const SampledFunction& f, int a) {
    double s = 0;
    for (int i = 0; i < f.grid.N; ++i) s += std::pow(f.grid.node(i), a) * f.values[i].real();
    return std::abs(s * f.grid.h());
}

// Characteristic by visiting every cube of every generation directly.
double brute_characteristic(const WeightVector& v, const ExponentTuple& e) {
    const Grid& g = v.v1.grid;
    auto eps = e.eps();
    const SampledFunction* vs[3] = {&v.v1, &v.v2, &v.v3};
    double best = 0;
    for (int gen = 0; gen <= finest_generation(g); ++gen)
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
            best = std::max(best, prod);
        }
    return best;
}

double rel(cplx a, cplx b) { return std::abs(a - b) / std::abs(b); }

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

// Default configs of every experiment, reused by the determinism criterion.
const std::vector<std::pair<std::string, std::string>>& runs() {
    static const std::vector<std::pair<std::string, std::string>> r{
        {"reconstruct", "experiment = reconstruct\n"},
        {"admissibility", "experiment = admissibility\n"},
        {"highlow", "experiment = highlow\n"},
        {"tensor", "experiment = tensor\n"},
        {"averaging", "experiment = averaging\n"},
        {"upsilon", "experiment = upsilon\n"},
        {"sparse-certify", "experiment = sparse-certify\n"},
        {"ap-weights", "experiment = ap-weights\n"},
        {"leibniz", "experiment = leibniz\n"},
        {"leibniz-holder", "experiment = leibniz\n[leibniz]\nsigma = 0\nr = 1, 1, 1\n"},
        {"sharpness", "experiment = sharpness\n"},
    };
    return r;
}

std::string config_of(const std::string& tag) {
    for (const auto& [t, text] : runs())
        if (t == tag) return text;
    throw Error("acceptance: no run " + tag);
}

Outcome c1_admissibility() {
    Outcome r;
    auto out = experiment("admissibility", config_of("admissibility"));
    require_check(r, out, "admissibility_constant");
    require_check(r, out, "vanishing_moments");
    auto mw = make_mother_wavelet(1, default_bump(1));
    double oracle = admissibility_oracle(mw.base);
    r.require(std::abs(oracle - 1) <= 1e-6, "padded-FFT oracle |C - 1| = " + fmt("%.2e", std::abs(oracle - 1)));
    double worst = 0;
    for (int a = 0; a <= 2; ++a) worst = std::max(worst, moment_oracle(mw.base, a));
    r.require(worst < 1e-8, "trapezoid moments <= " + fmt("%.2e", worst));
    return r;
}

Outcome c2_reconstruct() {
    Outcome r;
    auto out = experiment("reconstruct", config_of("reconstruct"));
    require_check(r, out, "relative_l2_error", "%.4g");
    require_check(r, out, "refinement_reduces_error", "%.3g");
    // The probe is mean zero to rounding.
    Grid g(1, 16, 1024);
    auto f = sample(parse_expression("cos(22*x)*exp(-x^2/2)", 1).field(), g);
    r.require(std::abs(integrate(f)) < 1e-12, "probe mean " + fmt("%.1e", std::abs(integrate(f))));
    return r;
}

Outcome c3_highlow() {
    Outcome r;
    auto out = experiment("highlow", config_of("highlow"));
    require_check(r, out, "single_scale_gap", "%.4g");
    require_check(r, out, "psi_support_in_unit_ball");
    require_check(r, out, "psi2_mean_zero");
    require_check(r, out, "psi4_mean_zero");
    return r;
}

Outcome c4_tensor() {
    Outcome r;
    auto out = experiment("tensor", config_of("tensor"));
    require_check(r, out, "tensor_residual", "%.4g");
    return r;
}

Outcome c5_averaging() {
    Outcome r;
    auto out = experiment("averaging", config_of("averaging"));
    require_check(r, out, "star_norms_finite", "%g");
    require_check(r, out, "star_norm_variation", "%.4g");
    r.require(out.report["results"]["points"].size() == 5, "5 affine points");
    r.require(out.report["results"]["bound_warnings"].empty(), "H within the hypothesis bound");
    return r;
}

Outcome c6_upsilon() {
    Outcome r;
    auto out = experiment("upsilon", config_of("upsilon"));
    const auto& res = out.report["results"];
    require_check(r, out, "decay_slope", "%.3f");
    require_check(r, out, "disjoint_support_nonzero", "%g");
    r.require(res["target"].get<double>() == -2.5, "target " + fmt("%g", res["target"].get<double>()));
    r.require(out.report["parameters"]["upsilon.samples"] == "500", "500 samples");
    r.require(res["disjoint"].get<int>() > 0, fmt("%g", res["disjoint"].get<int>()) + " disjoint samples");
    return r;
}

Outcome c7_paraproduct() {
    Outcome r;
    Grid g(1, 32.0, 2048);
    auto ag = AffineGrid::from_range(g, 1, 1.0 / 16, 16.0, 64);
    auto mw = make_mother_wavelet(1, default_bump(1));
    auto b = band_limited_probe(g, 5, 3.0, 60.0, 2.0);
    auto psi = place(mw.base, AffinePoint(0.0, 1.0), g);
    auto one = windowed_monomial(g, 0, 24.0, 30.0), x = windowed_monomial(g, 1, 24.0, 30.0);
    auto fam0 = make_gamma_family(0, 0.5), fam1 = make_gamma_family(1, 0.5);

    cplx v00 = paraproduct_form(b, {0, 0}, {fam0, fam0}, mw, one, one, psi, ag);
    double e00 = rel(v00, inner(b, psi));
    r.require(e00 < 0.01, "gamma (0,0) rel " + fmt("%.2e", e00));
    cplx v10 = paraproduct_form(b, {1, 0}, {fam1, fam0}, mw, x, one, psi, ag);
    double e10 = rel(v10, inner(b, symbol_derivative(psi, -1)));
    r.require(e10 < 0.01, "gamma (1,0) rel " + fmt("%.2e", e10));

    double worst = std::abs(paraproduct_form(b, {1, 0}, {fam1, fam0}, mw, one, one, psi, ag));
    for (auto [fam_a, fam_b, gam] : {std::tuple{fam0, fam0, GammaPair{0, 0}}, std::tuple{fam1, fam0, GammaPair{1, 0}}}) {
        FormEvaluator pi = paraproduct(b, gam, {fam_a, fam_b}, mw, ag);
        const auto& first = gam.first ? x : one;
        for (int which : {1, 2}) worst = std::max(worst, std::abs(adjoint(pi, which)(first, one, psi)));
    }
    r.require(worst < 1e-6, "adjoint and off-diagonal testing values <= " + fmt("%.1e", worst));
    return r;
}

Outcome c8_sparse() {
    Outcome r;
    auto out = experiment("sparse-certify", config_of("sparse-certify"));
    require_check(r, out, "all_collections_certified", "%g");
    require_check(r, out, "ratio_spread", "%.3g");
    // Every collection of the ensemble rechecked node by node.
    Grid g(1, 16, 1024);
    auto ag = AffineGrid::from_range(g, 4, 0.0625, 8, 24);
    auto dicts = IntrinsicDictionaries::standard(4, 7);
    DominationRequest req;
    req.root = DyadicCube(2, {3});
    double lo = req.root.corner(g), hi = lo + req.root.side(g);
    int good = 0;
    for (std::uint64_t k = 0; k < 20; ++k) {
        std::uint64_t s = 3 * (1 + k);
        auto rep = certify_domination(req, bump_cluster(g, s + 1, lo, hi), bump_cluster(g, s + 2, lo, hi),
                                      bump_cluster(g, s + 3, lo, hi), dicts, ag);
        std::vector<int> owner(g.N, 0);
        bool ok = !rep.collection.entries.empty();
        for (const auto& e : rep.collection.entries) {
            auto q = e.cube.nodes(g);
            std::vector<bool> in_q(g.N, false);
            for (auto i : q) in_q[i] = true;
            for (auto i : e.major) ok = ok && in_q[i] && owner[i]++ == 0;
            ok = ok && 2 * e.major.size() > q.size();
        }
        good += ok;
    }
    r.require(good == 20, std::to_string(good) + "/20 collections rechecked node by node");
    bool rejected = false;
    std::string msg;
    try {
        experiment("sparse-sigma-reject",
                   "experiment = sparse-certify\n[sparse]\nform = mss_sigma\nsigma = 0\np = 1, 1, 1\n");
    } catch (const ConfigError& e) {
        rejected = true;
        msg = e.what();
    }
    r.require(rejected && msg.find("1/p2 + 1/p3") != std::string::npos, "sigma-form exponents rejected");
    return r;
}

Outcome c9_localization() {
    Outcome r;
    Grid g(1, 16.0, 2048);
    auto f = sample(parse_expression("1.2 + sin(0.7*x) + 0.3*cos(2.1*x)", 1).field(), g);
    auto dicts = IntrinsicDictionaries::standard(3, 31);
    LocalizationSweep sw;
    sw.points = 12;
    auto rep = localization_fits(f, DyadicCube(4, {13}), dicts.plain, sw);
    for (const auto* fit : {&rep.large_far, &rep.cancel, &rep.outside})
        r.require(fit->nonzero > 0 && fit->spread < 0.2, fit->label + " spread " + fmt("%.3f", fit->spread));
    auto sums = cube_family_sums(Grid(1, 16.0, 1024), 100, 1.0, 3);
    r.require(sums.sums.size() == 100 && sums.bounded(),
              "cube sums max " + fmt("%.3g", sums.max) + " <= " + fmt("%.3g", sums.bound));
    return r;
}

Outcome c10_weights() {
    Outcome r;
    auto out = experiment("ap-weights", config_of("ap-weights"));
    require_check(r, out, "unit_weights", "%g");
    require_check(r, out, "jensen_lower_bound", "%.4g");
    r.require(out.report["results"]["random_vectors"] == 30, "30 random vectors");
    // The experiment's power weights against the all-cubes scan.
    Grid g(1, 16, 512);
    double worst = 0;
    for (const auto& e : {holder_tuple(4, 4), holder_tuple(4, 4, {1.5, 1.5, 1}), holder_tuple(2, 3, {1, 1.5, 1})})
        for (double a : {0.1, 0.2, 0.4}) {
            auto w = WeightVector::power(g, a);
            double fast = ap_characteristic(w, e), ref = brute_characteristic(w, e);
            worst = std::max(worst, std::abs(fast - ref) / ref);
        }
    for (const auto& row : out.report["results"]["power_weights"]) {
        double ref = brute_characteristic(WeightVector::power(g, row["a"].get<double>()), holder_tuple(4, 4));
        worst = std::max(worst, std::abs(row["characteristic"].get<double>() - ref) / ref);
    }
    r.require(worst <= 1e-10, "power weights vs scan rel " + fmt("%.1e", worst));
    return r;
}

Outcome c11_leibniz() {
    Outcome r;
    auto holder = experiment("leibniz-holder", config_of("leibniz-holder"));
    require_check(r, holder, "holder_oracle", "%.1e");
    auto out = experiment("leibniz", config_of("leibniz"));
    require_check(r, out, "ratio_spread", "%.3g");
    r.require(out.report["results"]["pairs"].size() == 20, "20 pairs");
    return r;
}

Outcome c12_sharpness() {
    Outcome r;
    auto out = experiment("sharpness", config_of("sharpness"));
    for (const auto& row : out.report["results"]["sweeps"]) {
        double s = row["sigma"], slope = row["slope"];
        r.require(std::abs(slope + s) <= 0.1, "sigma " + fmt("%g", s) + " slope " + fmt("%.3f", slope));
        // A sparse bound with r forces slope <= 1 - 1/r1 - 1/r2; the measured slope
        // must land on the side the constraint predicts.
        bool below = slope <= row["sparse_slope"].get<double>();
        bool holds = row["constraint_holds"];
        r.require(below == holds, std::string("constraint ") + (holds ? "holds" : "fails") + ", slope " +
                                      (below ? "below" : "above") + " " + fmt("%.3f", row["sparse_slope"]));
    }
    for (const auto& c : out.checks)
        if (c.name.rfind("refinement", 0) == 0) r.require(c.passed, c.name + " " + fmt("%.1e", c.value));
    return r;
}

Outcome c13_determinism() {
    Outcome r;
    int identical = 0, total = 0;
    for (const auto& [tag, text] : runs()) {
        fs::path first = kRoot / tag, second = kRoot / (tag + "-again");
        if (!fs::exists(first / "report.json")) experiment(tag, text);
        experiment(tag + "-again", text, 3);
        bool same = true;
        for (const auto& entry : fs::directory_iterator(first)) {
            auto other = second / entry.path().filename();
            same = same && fs::exists(other) && slurp(entry.path()) == slurp(other);
        }
        ++total;
        identical += same;
        if (!same) r.require(false, tag + " differs");
    }
    r.require(identical == total, std::to_string(identical) + "/" + std::to_string(total) +
                                      " experiments byte-identical under a different worker count");
    return r;
}

struct Criterion {
    int id;
    const char* name;
    double max_seconds;  // 0: no runtime bound
    std::function<Outcome()> run;
};

}  // namespace

int main() {
    fs::create_directories(kRoot);
    const unsigned threads = thread_count();
    const std::vector<Criterion> criteria{
        {1, "admissibility and moments", 5, c1_admissibility},
        {2, "Calderon reconstruction", 60, c2_reconstruct},
        {3, "high-low identity", 120, c3_highlow},
        {4, "tensor reproducing formula", 600, c4_tensor},
        {5, "wavelet averaging", 0, c5_averaging},
        {6, "Upsilon decay", 0, c6_upsilon},
        {7, "paraproduct testing identities", 0, c7_paraproduct},
        {8, "sparse certification", 0, c8_sparse},
        {9, "localization bounds", 0, c9_localization},
        {10, "weight characteristics", 0, c10_weights},
        {11, "Leibniz check", 0, c11_leibniz},
        {12, "sharpness", 60, c12_sharpness},
        {13, "determinism", 0, c13_determinism},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        set_thread_count(threads);
        auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.require(false, std::string("exception: ") + e.what());
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.max_seconds > 0) o.require(secs < c.max_seconds, "runtime < " + fmt("%g", c.max_seconds) + " s");
        failed += !o.pass;
        std::printf("%s criterion %2d (%s) [%.1f s]: %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, secs,
                    o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", int(criteria.size()) - failed, criteria.size());
    return failed ? 1 : 0;
}
