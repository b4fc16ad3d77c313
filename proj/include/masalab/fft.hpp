#pragma once

#include <complex>
#include <vector>

#include "masalab/common.hpp"

namespace masalab {

// In-place iterative radix-2 FFT.  data.size() must be a power of two.
// Computes X[k] = sum_j data[j] * e^{-2*pi*i*j*k/n} (sign = -1), or the
// unnormalized inverse with sign = +1.
void fft_pow2(std::vector<Complex>& data, int sign = -1);

}  // namespace masalab
