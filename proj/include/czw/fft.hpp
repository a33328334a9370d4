#pragma once

#include <vector>

#include "czw/common.hpp"

namespace czw {

// In-place unnormalized DFT of length n (d = 1) or n x n (d = 2, row-major).
// forward uses e^{-2 pi i k m / n}; the backward transform is not scaled.
void fft_inplace(std::vector<cplx>& data, int n, int d, bool forward);

inline void fft_forward(std::vector<cplx>& data, int n, int d = 1) { fft_inplace(data, n, d, true); }
inline void fft_backward(std::vector<cplx>& data, int n, int d = 1) { fft_inplace(data, n, d, false); }

}  // namespace czw
