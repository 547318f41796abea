#pragma once

#include <complex>
#include <vector>

namespace optomech {

// In-place radix-2 transform; size must be a power of two. Forward uses
// exp(-i w t) phases, inverse scales by 1/N.
void fft_pow2(std::vector<std::complex<double>>& a, bool inverse);

std::size_t next_pow2(std::size_t n);

} // namespace optomech
