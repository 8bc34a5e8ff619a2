// Discrete measures on the dyadic lattice: L^q norms, convolution (sparse
// exact path plus a dense FFT/NTT fast path), dyadic entropy, renormalized
// local measures, and the concentration/saturation predicates.
#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "dsk/flat.hpp"
#include "dsk/types.hpp"

namespace dsk {

// Weighted atoms on the lattice. W is either Rational (exact backend) or
// double (float backend); operations state which backend they need.
template <class W>
struct BasicMeasure {
  int dim = 1;
  int scale_exp = 0;
  int span = 1;
  bool normalized = false;
  std::vector<std::pair<Point, W>> atoms;  // sorted by point, weights > 0

  std::int64_t size() const { return static_cast<std::int64_t>(atoms.size()); }
  bool empty() const { return atoms.empty(); }
  W total_mass() const;

  static BasicMeasure make(int dim, int scale_exp, std::vector<std::pair<Point, W>> atoms,
                           bool normalized = false, int span = 1);
  void validate() const;
};

using GridMeasureQ = BasicMeasure<Rational>;
using GridMeasureD = BasicMeasure<double>;

GridMeasureD to_float(const GridMeasureQ& mu);
GridMeasureQ counting_measure(const GridSet& a);
GridMeasureQ uniform_measure(const GridSet& a);
GridSet support(const GridMeasureQ& mu);
GridSet support(const GridMeasureD& mu);

// (sum_x mu(x)^q)^(1/q); total mass for q = 1. Requires q >= 1.
template <class W>
double lq_norm(const BasicMeasure<W>& mu, double q);

// Exact convolution by direct accumulation over atom pairs.
template <class W>
BasicMeasure<W> convolve_direct(const BasicMeasure<W>& a, const BasicMeasure<W>& b);

// Dense fast path over the bounding box: NTT for integral rational weights,
// complex FFT for float weights. Throws if the box is too large or the
// weights do not qualify.
template <class W>
BasicMeasure<W> convolve_dense(const BasicMeasure<W>& a, const BasicMeasure<W>& b);

// Picks the dense path when the padded bounding box is small, otherwise the
// direct path. Result support may reach [0, 2^(m+1))^d; span doubles.
template <class W>
BasicMeasure<W> convolve(const BasicMeasure<W>& a, const BasicMeasure<W>& b);

// Exact squared L2 norm of a rational measure.
Rational l2_norm_sq(const GridMeasureQ& mu);

// (1/k) * sum over level-k cubes of -mu(I) log2 mu(I). Requires mu normalized.
template <class W>
double entropy(const BasicMeasure<W>& mu, int level);

// mu^{x,k}: mass on the level-k cube of x renormalized to [0,1)^d.
template <class W>
BasicMeasure<W> local_measure(const BasicMeasure<W>& mu, const Point& x, int level);

struct EntropyProfile {
  struct Local {
    int s;
    Point cube;
    double weight;         // mu(I)
    double local_entropy;  // H_L of the renormalized cube measure
  };
  double total = 0;              // H_{LS}(mu)
  double local_expectation = 0;  // (1/S) sum over scales of sum mu(I) H_L(mu^I)
  std::vector<Local> locals;
  double discrepancy() const { return total - local_expectation; }
};

// Computes both sides of the global-vs-local entropy identity independently.
template <class W>
EntropyProfile entropy_decomposition(const BasicMeasure<W>& mu, int L);

struct ConcentrationResult {
  bool concentrated = false;
  std::vector<double> witness;  // translate x achieving the mass bound
  bool witness_is_atom = true;
  double best_mass = 0;
  // the translate is quantified over atoms plus the barycenter, not all of R^d
  std::string witness_search = "atoms+barycenter";
};

// mu(x + V^(eps)) >= 1 - eps for some translate x. The search runs over the
// atoms of mu plus its barycenter (witness-restricted semantics).
ConcentrationResult is_concentrated(const GridMeasureD& mu, const AffineFlat& v, double eps,
                                    Norm norm = Norm::l2);

struct SaturationResult {
  bool saturated = false;
  double deficit = 0;  // H_L(mu) - H_L(proj) - dim V + C/L
  double h_mu = 0;
  double h_proj = 0;
  Eigen::MatrixXd vperp_basis;  // recorded projection frame
};

// H_L(mu) >= H_L(proj onto V-perp) + dim(V) - C/L. Projected atoms are
// binned into level-L cubes of a fixed orthonormal coordinate system of
// V-perp anchored at the origin.
SaturationResult is_saturated(const GridMeasureD& mu, const AffineFlat& v, int L, double C);

inline double default_saturation_constant(int dim) { return 4.0 * dim; }

}  // namespace dsk
