// Dyadic lattice geometry: covering numbers, uniformity checks,
// renormalization and truncation of grid sets, neighborhood counts.
#pragma once

#include <optional>

#include "dsk/types.hpp"

namespace dsk {

// Level-k cube containing the lattice point p of a scale-m set (k <= m).
DyadicCube cube_of(const GridSet& a, const Point& p, int level);

// Number of level-k dyadic cubes meeting A. Requires 0 <= k <= m and A nonempty.
std::int64_t covering_count(const GridSet& a, int level);

struct UniformityCheck {
  bool uniform = false;
  UniformProfile profile;        // valid when uniform
  int violation_scale = -1;      // first s with unequal child counts
  Point violation_cube{};        // lex-least offending cube at depth s*L
  std::string detail;
};

// Checks whether every depth-s*L cube meeting A has the same number of
// depth-(s+1)*L children, for all s. Reports the first violation otherwise.
UniformityCheck is_uniform(const GridSet& a, int L);

// A^I: the part of A inside cube I, rescaled to [0,1)^d at scale m - level(I).
GridSet renormalize_set(const GridSet& a, const DyadicCube& cube);

// The 2^-level set of cube corners whose level-`level` cube meets A.
GridSet truncate_set(const GridSet& a, int level);

// |A^(r)|_{2^-k}: level-k cubes meeting the closed r-neighborhood of A,
// clipped to [0,1)^d. Exact integer arithmetic; r is a dyadic rational.
std::int64_t neighborhood_count(const GridSet& a, Dyadic r, int level, Norm norm = Norm::l2);

// Children (level-to_level cubes) of each level-from_level cube meeting A,
// as sorted unique pairs (parent coords, child coords). Helper shared by the
// uniformity machinery.
std::vector<std::pair<Point, Point>> cube_children(const GridSet& a, int from_level, int to_level);

}  // namespace dsk
