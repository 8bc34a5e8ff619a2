// Deterministic corpus of structured test sets and measures with known
// ground truth.
#pragma once

#include <optional>

#include "dsk/measure.hpp"
#include "dsk/types.hpp"

namespace dsk {

// family:
//   full          - the whole lattice
//   singleton     - {0}
//   ap            - {0..count-1} * 2^-m, d = 1
//   gap           - {sum a_i v_i : 0 <= a_i < lengths_i}, generators gap_generators
//   flat          - lattice points within sqrt(d) 2^-m of an axis-aligned
//                   k-flat whose normal offsets sit just past 1/4 so the
//                   slab layers never straddle a coarse cube boundary
//   cantor_dyadic - binary digits vanish on digit_mask (bit i-1 <=> digit i,
//                   counted from the most significant), same mask every axis
//   product       - cartesian product of children (dims add, equal m)
//   random        - seeded uniform sample without replacement (splitmix64)
//   plane_union   - union of `count` parallel exact axis-aligned k-flats
struct CorpusSpec {
  std::string family;
  int d = 1;
  int m = 0;
  int k = 0;                        // flat/plane_union dimension
  std::int64_t count = 1;           // ap length / random size / plane count
  std::uint64_t seed = 0;
  std::uint64_t digit_mask = 0;
  std::vector<Point> gap_generators;
  std::vector<std::int64_t> gap_lengths;
  std::vector<CorpusSpec> children;  // product factors
};

GridSet generate(const CorpusSpec& spec);

enum class WeightRule { uniform, dyadic };

// dyadic draws exponents j in [0,8) per atom from the seed and normalizes
// exactly in rationals.
GridMeasureQ generate_measure(const CorpusSpec& spec, WeightRule rule, std::uint64_t seed = 0);

// Random (L,S)-uniform set with the given branching numbers, built by
// explicit tree construction; recovery of the profile is exact.
GridSet random_uniform_tree(int d, const UniformProfile& profile, std::uint64_t seed);

// Seeded random measure with the given atom count (atoms distinct).
GridMeasureQ random_measure(int d, int m, std::int64_t atoms, WeightRule rule, std::uint64_t seed);

// Expected properties asserted by the corpus test suite.
struct GroundTruth {
  std::optional<double> sigma_star_max;        // doubling class
  std::optional<int> structure_dim;            // expected k_s for s >= 1
  std::optional<bool> porous;                  // (k, rho) porosity with the listed params
  std::optional<int> porosity_k;
  std::optional<double> porosity_rho;
};

struct CorpusEntry {
  std::string name;
  CorpusSpec spec;
  GroundTruth truth;
};

// The named standard corpus used by the verification suites.
std::vector<CorpusEntry> standard_corpus();

}  // namespace dsk
