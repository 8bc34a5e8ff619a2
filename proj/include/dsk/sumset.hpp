// Sumsets, iterated sumsets, additive energy (exact counting and the
// convolution identity), scale-r energy, and the iterated-growth checker.
#pragma once

#include "dsk/measure.hpp"
#include "dsk/types.hpp"

namespace dsk {

// {a + b}; coordinates extend to [0, (span_a + span_b) 2^m)^d.
GridSet sumset(const GridSet& a, const GridSet& b);

// A + ... + A, k summands.
GridSet iterated_sumset(const GridSet& a, int k);

struct EnergyResult {
  unsigned __int128 quadruples = 0;  // #{x1 + y1 = x2 + y2}
  double normalized = 0;             // quadruples / |X|^3
  double sigma_star = 0;             // E = 2^(-sigma* m) |X|^3

  std::string quadruples_str() const;
};

// Exact additive energy via representation-function counting; a dense
// NTT path runs when the bounding box is small.
EnergyResult additive_energy(const GridSet& x);

struct ScaleEnergyResult {
  Rational value;          // quadruple measure of the slab |s1 - s2| <= r
  Rational conv_norm_sq;   // squared L2 norm of the rebinned convolution
  double ratio = 0;        // value / conv_norm_sq
  int matched_scale = 0;   // m' with r = 2^-m'
};

// (mu^2 x nu^2){ |x1+y1-x2-y2| <= r }, exact in rationals, together with
// the matching-scale convolution norm it is comparable to.
ScaleEnergyResult scale_energy(const GridMeasureQ& mu, const GridMeasureQ& nu, Dyadic r);

struct PrReport {
  std::int64_t base_size = 0;
  std::int64_t doubling_size = 0;  // |A+A|
  std::int64_t iterated_size = 0;  // |kA|
  int k = 0;
  double K = 0;                    // |A+A| / |A|
  double slack_log2 = 0;           // k log2 K + log2|A| - log2|kA|
  bool ok = false;
};

// Verifies |kA| <= K^k |A| with K = |A+A|/|A| by exact integer comparison.
// This inequality is theorem-backed, so failure throws MathCheckError.
PrReport pr_check(const GridSet& a, int k);

// Smallest sigma with |A+A| <= 2^(sigma m) |A|.
double small_doubling_certificate(const GridSet& a);

}  // namespace dsk
