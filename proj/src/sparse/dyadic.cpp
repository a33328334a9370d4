#include <algorithm>
#include <cmath>

#include "czw/sparse.hpp"

namespace czw {
namespace {

int per_axis(int g) { return 1 << (g + 1); }

// Node counts of a 0/1 mask over wrapped windows [a, a + len).
class WrappedCounter {
public:
    explicit WrappedCounter(const std::vector<char>& mask) : n_(mask.size()), pre_(2 * mask.size() + 1, 0) {
        for (std::size_t i = 0; i < 2 * n_; ++i) pre_[i + 1] = pre_[i] + (mask[i % n_] ? 1 : 0);
    }
    long count(long a, long len) const {
        if (len >= long(n_)) return pre_[n_];
        long s = ((a % long(n_)) + long(n_)) % long(n_);
        return pre_[s + len] - pre_[s];
    }

private:
    std::size_t n_;
    std::vector<long> pre_;
};

}  // namespace

double DyadicCube::volume(const Grid& grid) const { return std::pow(side(grid), dim()); }

int DyadicCube::width(const Grid& grid) const {
    if (g < 0 || g > 30) throw Error("DyadicCube: generation out of range");
    int c = per_axis(g);
    if (grid.N % c != 0) throw Error("DyadicCube: generation " + std::to_string(g) + " is finer than the grid");
    return grid.N / c;
}

std::vector<std::size_t> DyadicCube::nodes(const Grid& grid) const {
    if (dim() != grid.d) throw Error("DyadicCube: dimension does not match the grid");
    int w = width(grid);
    std::vector<std::size_t> out;
    if (grid.d == 1) {
        for (int i = 0; i < w; ++i) out.push_back(std::size_t(k[0]) * w + i);
        return out;
    }
    for (int i = 0; i < w; ++i)
        for (int j = 0; j < w; ++j) out.push_back((std::size_t(k[0]) * w + i) * grid.N + std::size_t(k[1]) * w + j);
    return out;
}

std::vector<std::size_t> DyadicCube::dilate_nodes(const Grid& grid, int factor) const {
    if (factor < 1 || factor % 2 == 0) throw Error("DyadicCube: dilation factor must be odd and positive");
    if (dim() != grid.d) throw Error("DyadicCube: dimension does not match the grid");
    int w = width(grid), N = grid.N;
    std::vector<int> axes[2];
    for (int a = 0; a < grid.d; ++a) {
        long len = long(factor) * w;
        if (len >= N) {
            for (int i = 0; i < N; ++i) axes[a].push_back(i);
            continue;
        }
        long start = long(k[a]) * w - long(factor - 1) / 2 * w;
        for (long i = 0; i < len; ++i) axes[a].push_back(int(((start + i) % N + N) % N));
        std::sort(axes[a].begin(), axes[a].end());
    }
    std::vector<std::size_t> out;
    if (grid.d == 1) {
        for (int i : axes[0]) out.push_back(std::size_t(i));
        return out;
    }
    for (int i : axes[0])
        for (int j : axes[1]) out.push_back(std::size_t(i) * N + j);
    return out;
}

bool DyadicCube::contains_node(const Grid& grid, std::size_t idx) const {
    int w = width(grid);
    if (grid.d == 1) return int(idx) / w == k[0];
    return int(idx / grid.N) / w == k[0] && int(idx % grid.N) / w == k[1];
}

DyadicCube DyadicCube::parent() const {
    if (g == 0) throw Error("DyadicCube: generation 0 has no dyadic parent");
    std::vector<int> c(k);
    for (int& x : c) x /= 2;
    return {g - 1, c};
}

std::vector<DyadicCube> DyadicCube::children() const {
    std::vector<DyadicCube> out;
    if (dim() == 1) {
        for (int a = 0; a < 2; ++a) out.push_back({g + 1, {2 * k[0] + a}});
        return out;
    }
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) out.push_back({g + 1, {2 * k[0] + a, 2 * k[1] + b}});
    return out;
}

bool DyadicCube::contains(const DyadicCube& o) const {
    if (o.g < g || o.dim() != dim()) return false;
    for (int a = 0; a < dim(); ++a)
        if ((o.k[a] >> (o.g - g)) != k[a]) return false;
    return true;
}

DyadicCube DyadicCube::containing(const Grid& grid, double x, int generation) {
    if (grid.d != 1) throw Error("DyadicCube::containing: one-dimensional grid required");
    DyadicCube q(generation, {0});
    double s = q.side(grid);
    int c = per_axis(generation);
    int idx = int(std::floor((x + grid.L) / s));
    q.k[0] = ((idx % c) + c) % c;
    return q;
}

int finest_generation(const Grid& grid) {
    int g = -1;
    while (grid.N % per_axis(g + 1) == 0 && per_axis(g + 1) <= grid.N) ++g;
    if (g < 0) throw Error("finest_generation: N must be even");
    return g;
}

std::vector<DyadicCube> cubes_of_generation(const Grid& grid, int generation) {
    int c = per_axis(generation);
    std::vector<DyadicCube> out;
    if (grid.d == 1) {
        for (int i = 0; i < c; ++i) out.push_back({generation, {i}});
    } else {
        for (int i = 0; i < c; ++i)
            for (int j = 0; j < c; ++j) out.push_back({generation, {i, j}});
    }
    return out;
}

SampledFunction maximal_function(const SampledFunction& f, const DyadicFamily& fam) {
    const Grid& g = f.grid;
    int finest = fam.finest < 0 ? finest_generation(g) : fam.finest;
    if (fam.coarsest < 0 || finest < fam.coarsest) throw Error("maximal_function: empty generation range");
    std::vector<double> best(g.size(), 0.0);
    for (int gen = fam.coarsest; gen <= finest; ++gen) {
        for (const auto& q : cubes_of_generation(g, gen)) {
            auto idx = q.nodes(g);
            double s = 0;
            for (auto i : idx) s += std::abs(f.values[i]);
            s /= double(idx.size());
            for (auto i : idx) best[i] = std::max(best[i], s);
        }
    }
    SampledFunction out(g);
    for (std::size_t i = 0; i < best.size(); ++i) out.values[i] = best[i];
    return out;
}

std::vector<DyadicCube> select_maximal_cubes(const Grid& grid, const DyadicCube& root, const std::vector<char>& in_set,
                                             int dilation) {
    if (grid.d != 1) throw Error("select_maximal_cubes: one-dimensional grid required");
    if (in_set.size() != grid.size()) throw Error("select_maximal_cubes: mask size does not match the grid");
    WrappedCounter cnt(in_set);
    int finest = finest_generation(grid);
    std::vector<DyadicCube> out;
    std::vector<DyadicCube> stack;
    if (root.g < finest)
        for (auto& c : root.children()) stack.push_back(c);
    std::reverse(stack.begin(), stack.end());
    while (!stack.empty()) {
        DyadicCube q = stack.back();
        stack.pop_back();
        long w = q.width(grid), a = long(q.k[0]) * w;
        if (cnt.count(a, w) == 0) continue;
        long len = long(dilation) * w;
        if (cnt.count(a - long(dilation - 1) / 2 * w, len) == std::min<long>(len, grid.N)) {
            out.push_back(q);
            continue;
        }
        if (q.g < finest) {
            auto ch = q.children();
            for (auto it = ch.rbegin(); it != ch.rend(); ++it) stack.push_back(*it);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace czw
