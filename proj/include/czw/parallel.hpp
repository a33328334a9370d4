#pragma once

#include <cstddef>
#include <functional>

namespace czw {

// Worker count used by parallel_for. Defaults to the hardware concurrency.
void set_thread_count(unsigned n);
unsigned thread_count();

// Calls body(i) for i in [0, n). Each index is visited exactly once; callers
// write to per-index slots and reduce afterwards in index order, so results
// never depend on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace czw
