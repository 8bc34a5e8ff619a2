// Flat fitting, minimal slab dimension, projection covering numbers,
// Grassmannian nets, and porosity testing.
#pragma once

#include <optional>

#include "dsk/flat.hpp"
#include "dsk/types.hpp"

namespace dsk {

struct FlatFit {
  AffineFlat flat;
  double slack = 0;  // max distance of any point to the flat
  bool certified = false;
};

// Principal-component fit of a k-flat through the centroid; slack is
// re-verified by direct distance computation over all points.
FlatFit fit_flat(const GridSet& a, int k);

// Smallest j such that the fitted j-flat has slack <= (sqrt(d)+1) 2^-L.
// The fit is a heuristic upper bound, so the result is a certified upper
// bound on the true minimal dimension; j = d always succeeds.
std::pair<int, FlatFit> min_dimension(const GridSet& a, int L);

// Covering number at scale 2^-level of the projection of A onto the
// direction space of v, in the frame's intrinsic coordinates.
std::int64_t projection_covering(const GridSet& a, const AffineFlat& v, int level);

struct GrassmannianResult {
  std::int64_t value = 0;
  AffineFlat minimizer;
  std::int64_t axis_floor = 0;  // minimum over axis-aligned subspaces alone
};

// Minimum projection covering over a deterministic net of subspaces of
// dimension d - codim_target. Axis-aligned subspaces are always included,
// so the value is at most axis_floor.
GrassmannianResult grassmannian_inf_covering(const GridSet& a, int codim_target, int level,
                                             int net_res);

struct PorosityCounterexample {
  AffineFlat flat;
  std::vector<double> center;
  double radius = 0;
};

struct PorosityResult {
  bool porous = false;
  std::optional<PorosityCounterexample> counterexample;
  int k = 0;
  double rho = 0, eta = 0;
  int net_res = 0;
  std::int64_t flats_tested = 0;
};

// For every k-flat in the net, every ball center on it and every dyadic
// radius r in [eta, 1], looks for a sub-ball of radius rho*r on the flat
// avoiding the half-cell thickening of X. Reports the first failing
// (flat, center, r) as a counterexample.
PorosityResult porosity_check(const GridSet& x, int k, double rho, double eta, int net_res = 16);

// k - c_d * rho^k / log2(1/rho) + slack / L
double porous_covering_bound(int k, double rho, int L, double c_d, double slack);

// Deterministic net of linear subspaces of the given dimension, axis-aligned
// ones first. Exposed for tests.
std::vector<AffineFlat> subspace_net(int dim, int subspace_dim, int net_res);

}  // namespace dsk
