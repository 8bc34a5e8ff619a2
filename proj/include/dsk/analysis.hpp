// Multi-scale structure analysis, conclusion checkers for the two inverse
// statements and the energy corollary, the porosity-flattening experiment,
// and the fractal-uncertainty-principle evaluator.
#pragma once

#include <complex>
#include <map>
#include <optional>

#include "dsk/geometry.hpp"
#include "dsk/measure.hpp"
#include "dsk/sumset.hpp"
#include "dsk/types.hpp"
#include "dsk/uniformize.hpp"

namespace dsk {

struct StructureReport {
  static constexpr int kSchemaVersion = 1;

  struct CubeEntry {
    Point cube{};
    double slack = 0;              // fitted-flat slack of the renormalized child set
    bool contained = false;        // slack within (sqrt(d)+1) 2^-L
    std::int64_t proj_covering = 0;  // minimal projection covering over the net
    double saturation_ratio = 0;   // R_s / (2^(k_s - delta) L * proj_covering)
  };
  struct ScaleEntry {
    int s = 0;
    int k_s = 0;
    std::int64_t R_s = 1;
    bool branching_ok = false;  // log2 R_s >= L (k_s - delta)
    std::vector<CubeEntry> cubes;
  };

  int d = 1, m = 0, L = 1, S = 0;
  double delta = 0;
  int net_res = 0;
  std::vector<ScaleEntry> scales;
  double achieved_delta = 0;  // max over s of k_s - log2(R_s)/L
};

// Per scale s: k_s is the smallest dimension whose fitted flat covers every
// renormalized child set within (sqrt(d)+1) 2^-L, the per-cube minimal
// projection covering runs over subspaces of dimension d - k_s, and the
// branching inequality log2 R_s >= L (k_s - delta) is recorded. Requires an
// (L,S)-uniform input.
StructureReport analyze_structure(const GridSet& a, int L, double delta, int net_res = 32,
                                  int threads = 1);

struct Theorem2Ledger {
  bool uniform = false;
  bool size_ok = false;         // |A'| >= 2^(-delta m) |A|
  bool branching_ok = false;    // log2 R_s >= L (k_s - delta) at every scale
  bool containment_ok = false;  // every cube's child set within its fitted flat
  bool pass = false;
  std::string detail;
};

Theorem2Ledger check_theorem2(const GridSet& a_prime, std::int64_t original_size, int L,
                              double delta, const StructureReport& report);

// Witness flats per scale: for each depth-s*L cube, the subspace (clause A4,
// linear, dimension d - k_s) or affine plane (clause B4, dimension k_s).
using FlatWitnesses = std::vector<std::vector<std::pair<Point, AffineFlat>>>;

struct Theorem1Inputs {
  GridMeasureD mu, nu;
  GridSet a, b;
  int L = 1;
  double delta = 0.1;
  double q = 2.0;
  std::vector<int> k_s;
  FlatWitnesses w_a;  // linear subspaces, dim d - k_s
  FlatWitnesses v_b;  // affine flats, dim k_s
  std::vector<Rational> y_a, y_b;  // optional translations for clause C
};

struct Theorem1Ledger {
  bool a1 = false, a2 = false, a3 = false, a4 = false;
  bool b1 = false, b2 = false, b3 = false, b4 = false;
  bool c = false;
  bool pass = false;
  std::string detail;
};

// Evaluates all nine conclusions as exact predicates against the supplied
// witnesses. The checker verifies; it does not search.
Theorem1Ledger check_theorem1_conclusions(const Theorem1Inputs& in);

struct EnergyExperimentReport {
  EnergyResult energy;
  bool above_threshold = false;  // E >= 2^(-sigma m) |X|^3
  bool structure_found = false;  // empirical: the greedy pipeline may miss
  std::optional<UniformizationResult> uniformization;
  std::optional<StructureReport> report;
  std::optional<Theorem2Ledger> ledger;
};

// If X has near-maximal energy, uniformizes it and analyzes the structured
// subset. A miss is reported, not treated as a refutation.
EnergyExperimentReport energy_structure_experiment(const GridSet& x, int L, double delta,
                                                   double sigma, int net_res = 32);

struct FlatteningReport {
  bool porosity_ok = false;
  bool size_ok = false;  // |X| >= 2^((k-1+lambda) m)
  bool hypothesis_ok = false;
  EnergyResult energy;
  double sigma_star = 0;
  PorosityResult porosity;
};

// Porous sets with enough mass must show an energy gain; reports sigma*.
FlatteningReport flattening_check(const GridSet& x, int k, double rho, double lambda,
                                  double eta, int net_res = 16);

struct FupOptions {
  double sigma = 0;        // energy exponent fed into the beta formula
  double tol = 1e-8;       // relative tolerance of the power iteration
  bool exact_cell = false; // d=1: sinc cell factors instead of midpoint sampling
  int threads = 1;
  std::int64_t max_entries = std::int64_t{1} << 24;
};

struct FupResult {
  double h = 0;
  std::int64_t x_count = 0, y_count = 0;
  double norm = 0;           // largest singular value of the discretized operator
  double trivial_bound = 0;  // min(1, h^(d/2) sqrt(|X| |Y|))
  double beta_measured = 0;  // log norm / log h
  double beta_formula = 0;   // 3/8 (d - log(|X||Y|)/log(1/h)) + sigma/8
  int iterations = 0;
  bool converged = false;
};

// Largest singular value of the midpoint-discretized semiclassical Fourier
// kernel between the cube centers of X and Y, h = 2^-m.
FupResult fup_norm(const GridSet& x, const GridSet& y, const FupOptions& opts = {});

// 3/8 (d - log(xc * yc)/log(1/h)) + sigma/8; negative values are returned
// as-is and mean the bound does not beat the trivial one.
double fup_beta(double h, double x_count, double y_count, double sigma, int d);

// Dense complex matrix of the discretized kernel; exposed for oracle tests.
std::vector<std::complex<double>> fup_matrix(const GridSet& x, const GridSet& y, bool exact_cell);

}  // namespace dsk
