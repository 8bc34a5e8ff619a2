// Uniformization: extracting large structured subsets by dyadic
// pigeonholing, with every size guarantee checked in exact arithmetic.
#pragma once

#include <functional>

#include "dsk/types.hpp"

namespace dsk {

// Deterministic function on 2^-L sets taking values in [0, V).
struct ValueFunction {
  std::string name;
  int V = 1;
  std::function<int(const GridSet&)> evaluate;
};

struct UniformizationResult {
  GridSet subset;
  UniformProfile profile;
  std::int64_t input_size = 0;
  std::int64_t output_size = 0;
  Rational size_ratio;            // output / input
  Rational guarantee;             // the construction's lower bound on the ratio
  bool meets_guarantee = false;
  std::vector<int> per_scale_values;  // pigeonholed codes (value-function modes)
};

// Keeps, per scale from fine to coarse, the heaviest dyadic band of child
// counts and prunes every kept cube to a common child count. Output is
// uniform with |A'| >= (2Ld)^-S |A|; already-uniform input passes through.
UniformizationResult uniform_subset(const GridSet& a, int L);

// Same as uniform_subset but additionally pigeonholes, per scale, a common
// value of fns[s] on the renormalized child sets of the surviving cubes.
// |A'| >= (2LVd)^-S |A| with V the common value bound.
UniformizationResult uniform_subset_general(const GridSet& a, int L,
                                            const std::vector<ValueFunction>& fns);

struct SubspaceUniformResult {
  UniformizationResult base;
  std::vector<int> dims;  // pigeonholed slab dimension per scale
};

// Value function = minimal slab dimension of the renormalized child sets
// (V = d+1); |A'| >= (2d(d+1)L)^-S |A|.
SubspaceUniformResult uniform_subset_subspace(const GridSet& a, int L);

struct CenterResult {
  GridSet subset;
  std::vector<Rational> translation;  // y, componentwise in [-1/3, 1/3)
  bool predicate_ok = false;          // every surviving point centered at all scales
  bool meets_bound = false;           // |A'| >= 3^-2dS |A|
  Rational size_ratio;
  Rational guarantee;
};

// Finds a translation y putting a large subset into the middle third of its
// dyadic cube at every scale s*L. The blockwise binary pigeonhole retains a
// 4^-d fraction per scale for L >= 2. For L = 1 and S >= 2 no translation
// of any nonempty set satisfies the predicate (consecutive dyadic scales
// cannot both hold a point in their middle thirds), and the result reports
// the honest failure.
CenterResult center_by_translation(const GridSet& a, int L);

// Membership predicate used by center_by_translation and conclusion C:
// with x = p 2^-m + y, checks frac(2^{Ls} x) in [1/3, 2/3)^d for all s.
bool centered_at_all_scales(const Point& p, int dim, int m, int L,
                            const std::vector<Rational>& y);

// Prunes every depth-s cube, s in `scales`, to its lexicographically least
// child subtree. Requires uniform input; all three guarantees (branching,
// exact size, untouched off-scale child sets) hold by construction.
UniformizationResult collapse_branching(const GridSet& a, int L, const std::vector<int>& scales);

}  // namespace dsk
