// Core domain types: dyadic lattice points, grid sets, uniformity profiles.
//
// All lattice data is kept as exact integer coordinates; a point p of a
// grid set with scale exponent m encodes the dyadic rational p * 2^-m.
#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace dsk {

inline constexpr int kMaxDim = 6;
inline constexpr const char* kVersion = "0.1.0";

using Coord = std::int64_t;

// Unused trailing coordinates must stay zero so that the array's
// lexicographic order coincides with point order in any dimension.
using Point = std::array<Coord, kMaxDim>;

using Rational = mpq_class;

// Invalid input / violated precondition.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// A mathematically guaranteed identity or inequality failed to verify.
struct MathCheckError : std::runtime_error {
  explicit MathCheckError(const std::string& what) : std::runtime_error(what) {}
};

inline Point make_point(std::initializer_list<Coord> cs) {
  if (cs.size() > static_cast<std::size_t>(kMaxDim)) throw Error("point dimension too large");
  Point p{};
  int i = 0;
  for (Coord c : cs) p[static_cast<std::size_t>(i++)] = c;
  return p;
}

struct DyadicCube {
  int dim = 1;
  int level = 0;           // side length 2^-level
  Point coords{};          // componentwise in [0, 2^level) for cubes inside [0,1)^d

  bool operator==(const DyadicCube&) const = default;
};

// Branching certificate of an (L,S)-uniform set: every cube of depth s*L
// that meets the set has exactly branching[s] children at depth (s+1)*L.
struct UniformProfile {
  int L = 1;
  int S = 0;
  std::vector<std::int64_t> branching;

  bool operator==(const UniformProfile&) const = default;
};

// Finite subset of the lattice 2^-m Z^d. Coordinates lie in
// [0, span * 2^m); span is 1 for sets inside [0,1)^d and grows under
// sumsets so that sums stay exact.
struct GridSet {
  int dim = 1;
  int scale_exp = 0;
  int span = 1;
  std::vector<Point> points;  // sorted lexicographically, no duplicates

  std::int64_t size() const { return static_cast<std::int64_t>(points.size()); }
  bool empty() const { return points.empty(); }

  static GridSet make(int dim, int scale_exp, std::vector<Point> pts, int span = 1);
  void validate() const;
  bool contains(const Point& p) const;
};

// Dyadic rational radius num * 2^-exp2, num >= 0.
struct Dyadic {
  std::int64_t num = 0;
  int exp2 = 0;

  double value() const { return static_cast<double>(num) / static_cast<double>(std::int64_t{1} << exp2); }
};

enum class Norm { l2, linf };

// splitmix64: the corpus and all seeded tests draw randomness through this
// generator so results are identical across platforms and standard libraries.
struct SplitMix64 {
  std::uint64_t state = 0;
  explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // unbiased draw from [0, n)
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) throw Error("below(0)");
    std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t u;
    do { u = next(); } while (u >= limit);
    return u % n;
  }

  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

}  // namespace dsk
