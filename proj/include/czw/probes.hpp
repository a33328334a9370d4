#pragma once

#include <cstdint>

#include "czw/grid.hpp"

namespace czw {

// Seeded test inputs shared by the experiments.

// Gaussian envelope times two random cosines with frequencies in [lo, hi].
SampledFunction band_limited_probe(const Grid& g, std::uint64_t seed, double lo = 11.0, double hi = 37.0,
                                   double width = 1.5, double center = 0.0);

// Nonnegative sum of `count` smooth bumps with random centers, radii and
// heights, supported in [lo, hi] (d = 1).
SampledFunction bump_cluster(const Grid& g, std::uint64_t seed, double lo, double hi, int count = 3);

}  // namespace czw
