// Dense convolution kernels on d-dimensional integer boxes: a complex
// radix-2 FFT for float weights and a two-prime NTT with CRT lifting for
// exact integer weights.
#pragma once

#include <complex>
#include <cstdint>
#include <vector>

namespace dsk::detail {

// In-place FFT along each axis of a row-major tensor with power-of-two extents.
void fft_nd(std::vector<std::complex<double>>& data, const std::vector<std::int64_t>& extents,
            bool inverse);

// Cyclic convolution of two real tensors over the given power-of-two extents.
std::vector<double> fft_convolve(const std::vector<double>& a, const std::vector<double>& b,
                                 const std::vector<std::int64_t>& extents);

// Exact convolution of nonnegative integer tensors. Entries of the result
// must stay below ~4.6e18 (product of the two NTT primes); the caller checks
// a bound before dispatching here.
std::vector<unsigned long long> ntt_convolve(const std::vector<unsigned long long>& a,
                                             const std::vector<unsigned long long>& b,
                                             const std::vector<std::int64_t>& extents);

inline std::int64_t next_pow2(std::int64_t n) {
  std::int64_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace dsk::detail
