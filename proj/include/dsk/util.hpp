#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "dsk/types.hpp"

namespace dsk {

std::string int128_to_string(unsigned __int128 v);

// 17 significant digits, enough to round-trip any double.
std::string format_double17(double v);

std::string rational_to_string(const Rational& q);

// SHA-256 of a byte string, lowercase hex.
std::string sha256_hex(const std::string& data);

// Runs fn(i) for i in [begin, end) on up to `threads` workers. Each index
// owns its output slot, so results are independent of scheduling.
void parallel_for(std::int64_t begin, std::int64_t end, int threads,
                  const std::function<void(std::int64_t)>& fn);

inline std::int64_t pow2(int e) {
  if (e < 0 || e > 62) throw Error("pow2 exponent out of range");
  return std::int64_t{1} << e;
}

inline bool fits_int64(const mpz_class& z) { return z.fits_slong_p(); }

}  // namespace dsk
