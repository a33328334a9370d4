#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "czw/forms.hpp"

namespace czw {

// Dyadic cube of generation g in [-L, L)^d: side L 2^-g, corner -L + k side.
// Generation 0 splits the domain into 2^d cubes.
struct DyadicCube {
    int g = 0;
    std::vector<int> k{0};

    DyadicCube() = default;
    DyadicCube(int generation, std::vector<int> corner) : g(generation), k(std::move(corner)) {}

    int dim() const { return int(k.size()); }
    double side(const Grid& grid) const { return grid.L * std::ldexp(1.0, -g); }
    double corner(const Grid& grid, int axis = 0) const { return -grid.L + k[axis] * side(grid); }
    double center(const Grid& grid, int axis = 0) const { return corner(grid, axis) + 0.5 * side(grid); }
    double volume(const Grid& grid) const;
    // Nodes per axis; throws when the cube is finer than the grid.
    int width(const Grid& grid) const;

    // Flat node indices (d = 2 layout i * N + j), in increasing order.
    std::vector<std::size_t> nodes(const Grid& grid) const;
    // Nodes of the concentric factor-dilate (odd factor), wrapped periodically.
    std::vector<std::size_t> dilate_nodes(const Grid& grid, int factor) const;
    bool contains_node(const Grid& grid, std::size_t idx) const;

    DyadicCube parent() const;
    std::vector<DyadicCube> children() const;
    bool contains(const DyadicCube& other) const;  // other is this cube or a descendant

    bool operator==(const DyadicCube& o) const { return g == o.g && k == o.k; }
    bool operator!=(const DyadicCube& o) const { return !(*this == o); }
    // Canonical order: generation, then corner.
    bool operator<(const DyadicCube& o) const { return g != o.g ? g < o.g : k < o.k; }

    // Generation-g cube containing x (d = 1).
    static DyadicCube containing(const Grid& grid, double x, int generation);
};

// Generation whose cubes hold a single node per axis.
int finest_generation(const Grid& grid);

// All generation-g cubes of the grid in canonical order.
std::vector<DyadicCube> cubes_of_generation(const Grid& grid, int generation);

// Generations coarsest..finest; finest < 0 means the grid's finest generation.
struct DyadicFamily {
    int coarsest = 0;
    int finest = -1;
};

// max over cubes of the family containing each node of the mean of |f| on the cube.
SampledFunction maximal_function(const SampledFunction& f, const DyadicFamily& fam = {});

// Node-wise max over the scales of ag (stride 1) of the product of the
// noncancellative coefficients of f1, f2, f3.
SampledFunction intrinsic_maximal(const SampledFunction& f1, const SampledFunction& f2, const SampledFunction& f3,
                                  const WaveletDictionary& plain, const AffineGrid& ag);

// Maximal dyadic cubes strictly inside root whose 9-fold dilate lies in the
// node set marked by in_set (wrapped periodically). d = 1.
std::vector<DyadicCube> select_maximal_cubes(const Grid& grid, const DyadicCube& root, const std::vector<char>& in_set,
                                             int dilation = 9);

struct SparseEntry {
    DyadicCube cube;
    std::vector<std::size_t> major;  // E_Q as node indices
    int depth = 0;
    double level = 0;  // calibrated C for this cube (0 when not carved)
    double level_set_fraction = 0;  // |E intersect Q| / |Q|

    double density(const Grid& grid) const { return double(major.size()) / cube.width(grid); }
};

struct SparsityReport {
    bool subset = true;
    bool disjoint = true;
    bool dense = true;
    double min_density = 1.0;
    bool ok() const { return subset && disjoint && dense; }
};

struct SparseCollection {
    Grid grid;
    std::vector<SparseEntry> entries;  // canonical (generation, corner) order

    // Node-count checks of E_Q in Q, pairwise disjointness and |E_Q| > |Q| / 2.
    SparsityReport certify() const;
    void write_csv(const std::string& path) const;
};

struct SparseOptions {
    int max_depth = 5;
    double level_start = 1.0;
    int max_doublings = 40;
};

// Stopping-time construction: at each cube Q the f_i are cut to 3Q, the level
// set E = {M > C prod <|f_i|>_3Q} is calibrated by doubling C until the carved
// set keeps more than half of Q, and the selected cubes are processed in turn.
SparseCollection build_sparse_collection(const SampledFunction& f1, const SampledFunction& f2,
                                         const SampledFunction& f3, const DyadicCube& root,
                                         const WaveletDictionary& plain, const AffineGrid& ag,
                                         const SparseOptions& opt = {});

// <f>_{p,Q} = |Q|^{-1/p} ||f||_{L^p(Q)}; p = infinity gives the max.
double local_average(const SampledFunction& f, const DyadicCube& q, double p);

// Sum over Q of |Q| prod <f_i>_{p_i,Q}.
double sparse_form_value(const SparseCollection& s, const SampledFunction& f1, const SampledFunction& f2,
                         const SampledFunction& f3, const std::array<double, 3>& p);

enum class IntrinsicForm { Mss, PiB, MssSigma, PiBSigma };
const char* form_name(IntrinsicForm f);
IntrinsicForm parse_form_name(const std::string& s);

struct DominationRequest {
    IntrinsicForm form = IntrinsicForm::Mss;
    SampledFunction b;  // symbol for the pi_b forms
    double sigma = 0;   // for the sigma forms
    std::array<double, 3> p{1.0, 1.0, 1.0};
    DyadicCube root;
    SparseOptions options;
};

struct DominationReport {
    std::string form;
    std::array<double, 3> p{};
    double form_value = 0;
    double sparse_value = 0;
    double ratio = 0;  // C_emp = form / sparse, 0 when degenerate
    bool degenerate = false;
    SparseCollection collection;
    SparsityReport sparsity;
};

// Throws for p outside [1, inf] and, for the sigma forms, unless
// 1/p2 + 1/p3 < (sigma + d) / d.
DominationReport certify_domination(const DominationRequest& req, const SampledFunction& f1,
                                    const SampledFunction& f2, const SampledFunction& f3,
                                    const IntrinsicDictionaries& dicts, const AffineGrid& ag);

// ---- localization estimates ----

// Each sweep draws `points` stratified log-uniform scales t and visits every
// grid position w at each of them.
struct LocalizationSweep {
    int points = 32;
    int sweeps = 4;        // independent seeded sweeps
    std::uint64_t seed = 5;
    double t_lo = 0.125;   // t / l(Q) range, log-uniform
    double t_hi = 2.0;
};

struct LocalizationFit {
    std::string label;
    std::vector<double> constants;  // sup of |pairing| / bound per sweep
    double constant = 0;            // over all sweeps
    double spread = 0;              // max / min - 1 over sweeps
    int nonzero = 0;
};

struct LocalizationReport {
    LocalizationFit large_far;  // w outside 3Q, f 1_Q
    LocalizationFit cancel;     // same with f - <f>_Q on Q
    LocalizationFit outside;    // w in Q, f 1_{(3Q)^c}
};

// Fits the constants of the three localization bounds for the members of a
// noncancellative dictionary, with the dictionary's eta and delta. d = 1.
LocalizationReport localization_fits(const SampledFunction& f, const DyadicCube& q, const WaveletDictionary& plain,
                                     const LocalizationSweep& sweep = {});

struct CubeSumReport {
    std::vector<double> sums;
    double max = 0;
    double mean = 0;
    double bound = 0;  // family-independent constant on this grid
    int cubes_max = 0;
    bool bounded() const { return max <= bound; }
};

// Sum over Q with w outside 3Q of |Q| min{l(Q), t}^delta / |w - c(Q)|^(1 + delta)
// for Whitney-type families (maximal cubes with 9Q inside a random open set)
// and random (w, t) outside their Carleson boxes.
CubeSumReport cube_family_sums(const Grid& grid, int configs, double delta, std::uint64_t seed);

// Closed-form bound for any disjoint dyadic family on grid.
double cube_sum_bound(const Grid& grid, double delta);

}  // namespace czw
