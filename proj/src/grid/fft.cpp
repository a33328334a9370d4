#include "czw/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>

namespace czw {
namespace {

// FFTW planning is not thread-safe; execution with new-array calls is.
std::mutex plan_mutex;
std::map<std::tuple<int, int, bool>, fftw_plan>& plan_cache() {
    static std::map<std::tuple<int, int, bool>, fftw_plan> cache;
    return cache;
}

fftw_plan get_plan(int n, int d, bool forward) {
    std::lock_guard<std::mutex> lock(plan_mutex);
    auto key = std::make_tuple(n, d, forward);
    auto& cache = plan_cache();
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    std::size_t len = d == 1 ? std::size_t(n) : std::size_t(n) * n;
    fftw_complex* buf = fftw_alloc_complex(len);
    // FFTW_ESTIMATE keeps the plan (and so every bit of output) independent of timing.
    unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    int sign = forward ? FFTW_FORWARD : FFTW_BACKWARD;
    fftw_plan p = d == 1 ? fftw_plan_dft_1d(n, buf, buf, sign, flags)
                         : fftw_plan_dft_2d(n, n, buf, buf, sign, flags);
    fftw_free(buf);
    cache.emplace(key, p);
    return p;
}

}  // namespace

void fft_inplace(std::vector<cplx>& data, int n, int d, bool forward) {
    std::size_t len = d == 1 ? std::size_t(n) : std::size_t(n) * n;
    if (data.size() != len) throw Error("fft: buffer length does not match transform size");
    if (n <= 0) return;
    fftw_plan p = get_plan(n, d, forward);
    auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(p, ptr, ptr);
}

}  // namespace czw
