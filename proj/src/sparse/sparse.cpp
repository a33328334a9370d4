#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "czw/parallel.hpp"
#include "czw/sparse.hpp"

namespace czw {
namespace {

SampledFunction cut_to(const SampledFunction& f, const std::vector<std::size_t>& idx) {
    SampledFunction out(f.grid);
    for (auto i : idx) out.values[i] = f.values[i];
    return out;
}

double mean_abs(const SampledFunction& f, const std::vector<std::size_t>& idx) {
    double s = 0;
    for (auto i : idx) s += std::abs(f.values[i]);
    return s / double(idx.size());
}

// Conjugated scaled spectra of the dictionary members at every scale of ag,
// shared by all maximal-function evaluations on one grid.
class MaximalKernel {
public:
    MaximalKernel(const WaveletDictionary& plain, const AffineGrid& ag) : ag_(ag) {
        if (plain.spec.slots() != 1 || plain.spec.cancellative[0])
            throw Error("intrinsic_maximal: noncancellative one-slot dictionary required");
        if (ag.stride != 1) throw Error("intrinsic_maximal: affine grid must have stride 1");
        bank_.resize(plain.members.size() * ag.M);
        parallel_for(bank_.size(), [&](std::size_t i) {
            auto S = scaled_spectrum(plain.members[i / ag.M], ag.scale(int(i % ag.M)), ag.grid);
            for (auto& v : S) v = std::conj(v);
            bank_[i] = std::move(S);
        });
    }

    // sup over members of |<f, member_{w,t}>| for every node w and scale t.
    std::vector<double> field(const SampledFunction& f) const {
        int N = ag_.grid.N, M = ag_.M;
        std::vector<double> best(std::size_t(N) * M, 0.0);
        auto F = to_spectrum(f);
        std::size_t members = bank_.size() / M;
        parallel_for(std::size_t(M), [&](std::size_t j) {
            for (std::size_t m = 0; m < members; ++m) {
                const auto& S = bank_[m * M + j];
                std::vector<cplx> spec(F.size());
                for (std::size_t k = 0; k < F.size(); ++k) spec[k] = F[k] * S[k];
                SampledFunction c = from_spectrum(ag_.grid, std::move(spec));
                for (int i = 0; i < N; ++i) best[j * N + i] = std::max(best[j * N + i], std::abs(c.values[i]));
            }
        });
        return best;
    }

    SampledFunction maximal(const SampledFunction& f1, const SampledFunction& f2, const SampledFunction& f3) const {
        const Grid& g = ag_.grid;
        if (f1.grid != g || f2.grid != g || f3.grid != g)
            throw Error("intrinsic_maximal: inputs live on different grids");
        auto a = field(f1), b = field(f2), c = field(f3);
        SampledFunction out(g);
        for (int j = 0; j < ag_.M; ++j)
            for (int i = 0; i < g.N; ++i) {
                std::size_t idx = std::size_t(j) * g.N + i;
                double v = a[idx] * b[idx] * c[idx];
                if (v > out.values[i].real()) out.values[i] = v;
            }
        return out;
    }

private:
    AffineGrid ag_;
    std::vector<std::vector<cplx>> bank_;
};

struct Processed {
    SparseEntry entry;
    std::vector<DyadicCube> selected;
};

Processed process_cube(const SampledFunction& f1, const SampledFunction& f2, const SampledFunction& f3,
                       const DyadicCube& q, int depth, const MaximalKernel& kernel, const SparseOptions& opt) {
    const Grid& g = f1.grid;
    Processed out;
    out.entry.cube = q;
    out.entry.depth = depth;
    auto nodes = q.nodes(g);
    if (depth >= opt.max_depth || q.g >= finest_generation(g)) {
        out.entry.major = nodes;
        return out;
    }
    auto halo = q.dilate_nodes(g, 3);
    SampledFunction a = cut_to(f1, halo), b = cut_to(f2, halo), c = cut_to(f3, halo);
    double level = mean_abs(a, halo) * mean_abs(b, halo) * mean_abs(c, halo);
    SampledFunction m = kernel.maximal(a, b, c);

    double C = opt.level_start, frac = 0;
    std::vector<char> mask(g.size());
    for (int it = 0; it <= opt.max_doublings; ++it, C *= 2) {
        double thr = C * level;
        for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = m.values[i].real() > thr;
        long inside = 0;
        for (auto i : nodes) inside += mask[i];
        frac = double(inside) / double(nodes.size());
        if (2 * inside > long(nodes.size())) continue;
        auto sel = select_maximal_cubes(g, q, mask);
        std::vector<char> taken(g.size(), 0);
        for (const auto& s : sel)
            for (auto i : s.nodes(g)) taken[i] = 1;
        std::vector<std::size_t> major;
        for (auto i : nodes)
            if (!taken[i]) major.push_back(i);
        if (2 * major.size() <= nodes.size()) continue;
        out.entry.major = std::move(major);
        out.entry.level = C;
        out.entry.level_set_fraction = frac;
        out.selected = std::move(sel);
        return out;
    }
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "build_sparse_collection: calibration failed after %d doublings (|E|/|Q| = %.4f at generation %d)",
                  opt.max_doublings, frac, q.g);
    throw Error(buf);
}

}  // namespace

SampledFunction intrinsic_maximal(const SampledFunction& f1, const SampledFunction& f2, const SampledFunction& f3,
                                  const WaveletDictionary& plain, const AffineGrid& ag) {
    if (f1.grid.d != 1) throw Error("intrinsic_maximal: one-dimensional input required");
    if (ag.grid != f1.grid) throw Error("intrinsic_maximal: affine grid is built over a different grid");
    return MaximalKernel(plain, ag).maximal(f1, f2, f3);
}

SparseCollection build_sparse_collection(const SampledFunction& f1, const SampledFunction& f2,
                                         const SampledFunction& f3, const DyadicCube& root,
                                         const WaveletDictionary& plain, const AffineGrid& ag,
                                         const SparseOptions& opt) {
    const Grid& g = f1.grid;
    if (g.d != 1) throw Error("build_sparse_collection: one-dimensional input required");
    if (opt.max_depth < 0 || opt.max_doublings < 0 || !(opt.level_start > 0))
        throw Error("build_sparse_collection: invalid options");
    root.width(g);
    if (ag.grid != g) throw Error("build_sparse_collection: affine grid is built over a different grid");
    MaximalKernel kernel(plain, AffineGrid(g, 1, ag.t_min, ag.rho, ag.M));

    SparseCollection s;
    s.grid = g;
    std::vector<DyadicCube> frontier{root};
    for (int depth = 0; !frontier.empty(); ++depth) {
        std::vector<Processed> done(frontier.size());
        parallel_for(frontier.size(), [&](std::size_t i) {
            done[i] = process_cube(f1, f2, f3, frontier[i], depth, kernel, opt);
        });
        std::vector<DyadicCube> next;
        for (auto& p : done) {
            s.entries.push_back(std::move(p.entry));
            next.insert(next.end(), p.selected.begin(), p.selected.end());
        }
        std::sort(next.begin(), next.end());
        frontier = std::move(next);
    }
    std::sort(s.entries.begin(), s.entries.end(),
              [](const SparseEntry& a, const SparseEntry& b) { return a.cube < b.cube; });
    return s;
}

SparsityReport SparseCollection::certify() const {
    SparsityReport r;
    std::vector<char> used(grid.size(), 0);
    for (const auto& e : entries) {
        for (auto i : e.major) {
            if (i >= used.size() || !e.cube.contains_node(grid, i)) {
                r.subset = false;
                continue;
            }
            if (used[i]) r.disjoint = false;
            used[i] = 1;
        }
        std::size_t vol = std::size_t(std::pow(e.cube.width(grid), grid.d));
        if (2 * e.major.size() <= vol) r.dense = false;
        r.min_density = std::min(r.min_density, double(e.major.size()) / double(vol));
    }
    return r;
}

void SparseCollection::write_csv(const std::string& path) const {
    std::ofstream os(path);
    if (!os) throw Error("SparseCollection::write_csv: cannot open " + path);
    os << "generation,corner,left,side,density\n";
    char buf[160];
    for (const auto& e : entries) {
        std::snprintf(buf, sizeof buf, "%d,%d,%.17g,%.17g,%.17g\n", e.cube.g, e.cube.k[0], e.cube.corner(grid),
                      e.cube.side(grid), e.density(grid));
        os << buf;
    }
}

double local_average(const SampledFunction& f, const DyadicCube& q, double p) {
    if (!(p >= 1)) throw Error("local_average: p must lie in [1, inf]");
    auto idx = q.nodes(f.grid);
    if (std::isinf(p)) {
        double m = 0;
        for (auto i : idx) m = std::max(m, std::abs(f.values[i]));
        return m;
    }
    double s = 0;
    for (auto i : idx) s += std::pow(std::abs(f.values[i]), p);
    return std::pow(s / double(idx.size()), 1.0 / p);
}

double sparse_form_value(const SparseCollection& s, const SampledFunction& f1, const SampledFunction& f2,
                         const SampledFunction& f3, const std::array<double, 3>& p) {
    double total = 0;
    for (const auto& e : s.entries)
        total += e.cube.volume(s.grid) * local_average(f1, e.cube, p[0]) * local_average(f2, e.cube, p[1]) *
                 local_average(f3, e.cube, p[2]);
    return total;
}

const char* form_name(IntrinsicForm f) {
    switch (f) {
        case IntrinsicForm::Mss: return "mss";
        case IntrinsicForm::PiB: return "pi_b";
        case IntrinsicForm::MssSigma: return "mss_sigma";
        default: return "pi_b_sigma";
    }
}

IntrinsicForm parse_form_name(const std::string& s) {
    for (auto f : {IntrinsicForm::Mss, IntrinsicForm::PiB, IntrinsicForm::MssSigma, IntrinsicForm::PiBSigma})
        if (s == form_name(f)) return f;
    throw ConfigError("unknown form '" + s + "' (expected mss, pi_b, mss_sigma or pi_b_sigma)");
}

DominationReport certify_domination(const DominationRequest& req, const SampledFunction& f1,
                                    const SampledFunction& f2, const SampledFunction& f3,
                                    const IntrinsicDictionaries& dicts, const AffineGrid& ag) {
    for (double p : req.p)
        if (!(p >= 1)) throw Error("certify_domination: exponents must lie in [1, inf]");
    bool sigma_form = req.form == IntrinsicForm::MssSigma || req.form == IntrinsicForm::PiBSigma;
    if (sigma_form) {
        const double d = 1.0;
        double lhs = 1.0 / req.p[1] + 1.0 / req.p[2];
        if (!(lhs < (req.sigma + d) / d)) {
            char buf[200];
            std::snprintf(buf, sizeof buf,
                          "certify_domination: exponents violate 1/p2 + 1/p3 < (sigma + d)/d (%.6g >= %.6g)", lhs,
                          (req.sigma + d) / d);
            throw Error(buf);
        }
    }
    DominationReport r;
    r.form = form_name(req.form);
    r.p = req.p;
    switch (req.form) {
        case IntrinsicForm::Mss: r.form_value = mss_form(f1, f2, f3, dicts, ag); break;
        case IntrinsicForm::PiB: r.form_value = pi_b_form(req.b, f1, f2, f3, dicts, ag); break;
        case IntrinsicForm::MssSigma: r.form_value = msssig_form(f1, f2, f3, req.sigma, dicts, ag); break;
        case IntrinsicForm::PiBSigma: r.form_value = pi_b_sigma_form(req.b, f1, f2, f3, req.sigma, dicts, ag); break;
    }
    r.collection = build_sparse_collection(f1, f2, f3, req.root, dicts.plain, ag, req.options);
    r.sparsity = r.collection.certify();
    r.sparse_value = sparse_form_value(r.collection, f1, f2, f3, req.p);
    r.degenerate = !(r.sparse_value > 0) || !std::isfinite(r.form_value);
    r.ratio = r.degenerate ? 0.0 : r.form_value / r.sparse_value;
    return r;
}

}  // namespace czw
