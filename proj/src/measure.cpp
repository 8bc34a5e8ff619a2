#include "dsk/measure.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "dsk/fftconv.hpp"
#include "dsk/grid.hpp"
#include "dsk/util.hpp"

namespace dsk {

namespace {

template <class W>
bool weight_positive(const W& w) {
  if constexpr (std::is_same_v<W, double>) return w > 0.0;
  else return sgn(w) > 0;
}

Point shift_point(const Point& p, int dim, int shift) {
  Point q{};
  for (int i = 0; i < dim; ++i) q[static_cast<std::size_t>(i)] = p[static_cast<std::size_t>(i)] >> shift;
  return q;
}

}  // namespace

template <class W>
W BasicMeasure<W>::total_mass() const {
  W total{};
  for (const auto& [p, w] : atoms) total += w;
  return total;
}

template <class W>
BasicMeasure<W> BasicMeasure<W>::make(int dim, int scale_exp, std::vector<std::pair<Point, W>> atoms,
                                      bool normalized, int span) {
  BasicMeasure<W> mu;
  mu.dim = dim;
  mu.scale_exp = scale_exp;
  mu.span = span;
  mu.normalized = normalized;
  std::sort(atoms.begin(), atoms.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  // merge duplicate points additively
  for (auto& [p, w] : atoms) {
    if (!mu.atoms.empty() && mu.atoms.back().first == p) mu.atoms.back().second += w;
    else mu.atoms.emplace_back(p, w);
  }
  mu.validate();
  return mu;
}

template <class W>
void BasicMeasure<W>::validate() const {
  if (dim < 1 || dim > kMaxDim) throw Error("dimension out of range");
  if (scale_exp < 0) throw Error("negative scale exponent");
  if (dim * scale_exp > 62) throw Error("scale too fine for exact integer keys");
  std::int64_t bound = span * pow2(scale_exp);
  for (const auto& [p, w] : atoms) {
    if (!weight_positive(w)) throw Error("weights must be positive");
    for (int i = 0; i < dim; ++i)
      if (p[static_cast<std::size_t>(i)] < 0 || p[static_cast<std::size_t>(i)] >= bound)
        throw Error("atom coordinate out of range");
    for (int i = dim; i < kMaxDim; ++i)
      if (p[static_cast<std::size_t>(i)] != 0) throw Error("trailing coordinates must be zero");
  }
  if (normalized) {
    if constexpr (std::is_same_v<W, Rational>) {
      if (total_mass() != 1) throw Error("normalized measure must have mass exactly 1");
    } else {
      if (std::abs(total_mass() - 1.0) > 1e-9) throw Error("normalized measure must have mass 1");
    }
  }
}

template struct BasicMeasure<Rational>;
template struct BasicMeasure<double>;

GridMeasureD to_float(const GridMeasureQ& mu) {
  std::vector<std::pair<Point, double>> atoms;
  atoms.reserve(mu.atoms.size());
  for (const auto& [p, w] : mu.atoms) atoms.emplace_back(p, w.get_d());
  GridMeasureD out;
  out.dim = mu.dim;
  out.scale_exp = mu.scale_exp;
  out.span = mu.span;
  out.normalized = mu.normalized;
  out.atoms = std::move(atoms);
  return out;
}

GridMeasureQ counting_measure(const GridSet& a) {
  std::vector<std::pair<Point, Rational>> atoms;
  atoms.reserve(a.points.size());
  for (const Point& p : a.points) atoms.emplace_back(p, Rational(1));
  return GridMeasureQ::make(a.dim, a.scale_exp, std::move(atoms), false, a.span);
}

GridMeasureQ uniform_measure(const GridSet& a) {
  if (a.empty()) throw Error("empty set");
  Rational w(1, static_cast<unsigned long>(a.points.size()));
  w.canonicalize();
  std::vector<std::pair<Point, Rational>> atoms;
  atoms.reserve(a.points.size());
  for (const Point& p : a.points) atoms.emplace_back(p, w);
  return GridMeasureQ::make(a.dim, a.scale_exp, std::move(atoms), true, a.span);
}

namespace {

template <class W>
GridSet support_impl(const BasicMeasure<W>& mu) {
  std::vector<Point> pts;
  pts.reserve(mu.atoms.size());
  for (const auto& [p, w] : mu.atoms) pts.push_back(p);
  return GridSet::make(mu.dim, mu.scale_exp, std::move(pts), mu.span);
}

}  // namespace

GridSet support(const GridMeasureQ& mu) { return support_impl(mu); }
GridSet support(const GridMeasureD& mu) { return support_impl(mu); }

template <class W>
double lq_norm(const BasicMeasure<W>& mu, double q) {
  if (mu.empty()) throw Error("empty measure");
  if (q < 1.0) throw Error("q must be at least 1");
  double acc = 0;
  for (const auto& [p, w] : mu.atoms) {
    double x;
    if constexpr (std::is_same_v<W, Rational>) x = w.get_d();
    else x = w;
    acc += (q == 1.0) ? x : std::pow(x, q);
  }
  return (q == 1.0) ? acc : std::pow(acc, 1.0 / q);
}

template double lq_norm<Rational>(const GridMeasureQ&, double);
template double lq_norm<double>(const GridMeasureD&, double);

namespace {

template <class W>
void check_compatible(const BasicMeasure<W>& a, const BasicMeasure<W>& b) {
  if (a.dim != b.dim || a.scale_exp != b.scale_exp) throw Error("dimension or scale mismatch");
  if (a.empty() || b.empty()) throw Error("empty measure");
}

}  // namespace

template <class W>
BasicMeasure<W> convolve_direct(const BasicMeasure<W>& a, const BasicMeasure<W>& b) {
  check_compatible(a, b);
  if (a.size() * b.size() > 40'000'000) throw Error("convolution too large for direct path");
  std::map<Point, W> acc;
  for (const auto& [pa, wa] : a.atoms)
    for (const auto& [pb, wb] : b.atoms) {
      Point s{};
      for (int i = 0; i < a.dim; ++i)
        s[static_cast<std::size_t>(i)] = pa[static_cast<std::size_t>(i)] + pb[static_cast<std::size_t>(i)];
      acc[s] += wa * wb;
    }
  std::vector<std::pair<Point, W>> atoms(acc.begin(), acc.end());
  BasicMeasure<W> out;
  out.dim = a.dim;
  out.scale_exp = a.scale_exp;
  out.span = a.span + b.span;
  out.normalized = false;
  out.atoms = std::move(atoms);
  out.validate();
  return out;
}

namespace {

struct Box {
  Point lo{}, hi{};  // inclusive
  std::vector<std::int64_t> extents(int dim, const Point& other_lo, const Point& other_hi) const {
    std::vector<std::int64_t> e;
    for (int i = 0; i < dim; ++i) {
      std::int64_t ext = (hi[static_cast<std::size_t>(i)] - lo[static_cast<std::size_t>(i)] + 1) +
                         (other_hi[static_cast<std::size_t>(i)] - other_lo[static_cast<std::size_t>(i)] + 1) - 1;
      e.push_back(dsk::detail::next_pow2(ext));
    }
    return e;
  }
};

template <class W>
Box bounding_box(const BasicMeasure<W>& mu) {
  Box b;
  for (int i = 0; i < mu.dim; ++i) {
    b.lo[static_cast<std::size_t>(i)] = std::numeric_limits<Coord>::max();
    b.hi[static_cast<std::size_t>(i)] = std::numeric_limits<Coord>::min();
  }
  for (const auto& [p, w] : mu.atoms)
    for (int i = 0; i < mu.dim; ++i) {
      b.lo[static_cast<std::size_t>(i)] = std::min(b.lo[static_cast<std::size_t>(i)], p[static_cast<std::size_t>(i)]);
      b.hi[static_cast<std::size_t>(i)] = std::max(b.hi[static_cast<std::size_t>(i)], p[static_cast<std::size_t>(i)]);
    }
  return b;
}

std::int64_t padded_volume(const std::vector<std::int64_t>& extents) {
  std::int64_t v = 1;
  for (auto e : extents) {
    if (v > (std::int64_t{1} << 62) / e) return std::numeric_limits<std::int64_t>::max();
    v *= e;
  }
  return v;
}

std::int64_t flatten_index(const Point& p, const Point& lo, const std::vector<std::int64_t>& extents,
                           int dim) {
  std::int64_t idx = 0;
  for (int i = 0; i < dim; ++i)
    idx = idx * extents[static_cast<std::size_t>(i)] +
          (p[static_cast<std::size_t>(i)] - lo[static_cast<std::size_t>(i)]);
  return idx;
}

}  // namespace

template <class W>
BasicMeasure<W> convolve_dense(const BasicMeasure<W>& a, const BasicMeasure<W>& b) {
  check_compatible(a, b);
  Box ba = bounding_box(a), bb = bounding_box(b);
  auto extents = ba.extents(a.dim, bb.lo, bb.hi);
  std::int64_t vol = padded_volume(extents);
  constexpr std::int64_t kDenseCap = std::int64_t{1} << 24;
  if (vol > kDenseCap) throw Error("bounding box too large for dense path");

  Point lo_sum{};
  for (int i = 0; i < a.dim; ++i)
    lo_sum[static_cast<std::size_t>(i)] = ba.lo[static_cast<std::size_t>(i)] + bb.lo[static_cast<std::size_t>(i)];

  std::vector<std::pair<Point, W>> atoms;
  if constexpr (std::is_same_v<W, Rational>) {
    // integral weights only; values must fit the CRT range
    std::vector<unsigned long long> da(static_cast<std::size_t>(vol), 0),
        db(static_cast<std::size_t>(vol), 0);
    unsigned long long max_a = 0, max_b = 0;
    unsigned __int128 sum_a = 0, sum_b = 0;
    auto fill = [&](const BasicMeasure<W>& mu, const Box& box, std::vector<unsigned long long>& d,
                    unsigned long long& maxv, unsigned __int128& sumv) {
      for (const auto& [p, w] : mu.atoms) {
        if (w.get_den() != 1) throw Error("dense exact path requires integer weights");
        if (!w.get_num().fits_ulong_p()) throw Error("weight too large for dense path");
        unsigned long long v = w.get_num().get_ui();
        d[static_cast<std::size_t>(flatten_index(p, box.lo, extents, mu.dim))] = v;
        maxv = std::max(maxv, v);
        sumv += v;
      }
    };
    fill(a, ba, da, max_a, sum_a);
    fill(b, bb, db, max_b, sum_b);
    unsigned __int128 bound = std::min(sum_a * max_b, sum_b * max_a);
    if (bound >= (static_cast<unsigned __int128>(2013265921ULL) * 2281701377ULL))
      throw Error("convolution values exceed exact dense range");
    auto conv = dsk::detail::ntt_convolve(da, db, extents);
    for (std::int64_t idx = 0; idx < vol; ++idx) {
      if (conv[static_cast<std::size_t>(idx)] == 0) continue;
      Point p{};
      std::int64_t rem = idx;
      for (int i = a.dim - 1; i >= 0; --i) {
        p[static_cast<std::size_t>(i)] = rem % extents[static_cast<std::size_t>(i)] + lo_sum[static_cast<std::size_t>(i)];
        rem /= extents[static_cast<std::size_t>(i)];
      }
      atoms.emplace_back(p, Rational(static_cast<unsigned long>(conv[static_cast<std::size_t>(idx)])));
    }
  } else {
    std::vector<double> da(static_cast<std::size_t>(vol), 0.0), db(static_cast<std::size_t>(vol), 0.0);
    double maxw = 0;
    for (const auto& [p, w] : a.atoms) {
      da[static_cast<std::size_t>(flatten_index(p, ba.lo, extents, a.dim))] = w;
      maxw = std::max(maxw, w);
    }
    for (const auto& [p, w] : b.atoms) {
      db[static_cast<std::size_t>(flatten_index(p, bb.lo, extents, b.dim))] = w;
      maxw = std::max(maxw, w);
    }
    auto conv = dsk::detail::fft_convolve(da, db, extents);
    double peak = 0;
    for (double v : conv) peak = std::max(peak, std::abs(v));
    double threshold = peak * 1e-13;  // FFT noise floor on empty cells
    for (std::int64_t idx = 0; idx < vol; ++idx) {
      double v = conv[static_cast<std::size_t>(idx)];
      if (v <= threshold) continue;
      Point p{};
      std::int64_t rem = idx;
      for (int i = a.dim - 1; i >= 0; --i) {
        p[static_cast<std::size_t>(i)] = rem % extents[static_cast<std::size_t>(i)] + lo_sum[static_cast<std::size_t>(i)];
        rem /= extents[static_cast<std::size_t>(i)];
      }
      atoms.emplace_back(p, v);
    }
  }
  std::sort(atoms.begin(), atoms.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  BasicMeasure<W> out;
  out.dim = a.dim;
  out.scale_exp = a.scale_exp;
  out.span = a.span + b.span;
  out.normalized = false;
  out.atoms = std::move(atoms);
  out.validate();
  return out;
}

template <class W>
BasicMeasure<W> convolve(const BasicMeasure<W>& a, const BasicMeasure<W>& b) {
  check_compatible(a, b);
  Box ba = bounding_box(a), bb = bounding_box(b);
  auto extents = ba.extents(a.dim, bb.lo, bb.hi);
  std::int64_t vol = padded_volume(extents);
  bool dense_ok = vol <= (std::int64_t{1} << (std::is_same_v<W, double> ? 22 : 24));
  if constexpr (std::is_same_v<W, Rational>) {
    for (const auto& [p, w] : a.atoms)
      if (w.get_den() != 1) { dense_ok = false; break; }
    if (dense_ok)
      for (const auto& [p, w] : b.atoms)
        if (w.get_den() != 1) { dense_ok = false; break; }
  }
  // dense only pays off when the box is denser than the atom count
  if (dense_ok && vol <= 4 * (a.size() * b.size() + 1024)) return convolve_dense(a, b);
  return convolve_direct(a, b);
}

template GridMeasureQ convolve_direct<Rational>(const GridMeasureQ&, const GridMeasureQ&);
template GridMeasureD convolve_direct<double>(const GridMeasureD&, const GridMeasureD&);
template GridMeasureQ convolve_dense<Rational>(const GridMeasureQ&, const GridMeasureQ&);
template GridMeasureD convolve_dense<double>(const GridMeasureD&, const GridMeasureD&);
template GridMeasureQ convolve<Rational>(const GridMeasureQ&, const GridMeasureQ&);
template GridMeasureD convolve<double>(const GridMeasureD&, const GridMeasureD&);

Rational l2_norm_sq(const GridMeasureQ& mu) {
  Rational acc(0);
  for (const auto& [p, w] : mu.atoms) acc += w * w;
  return acc;
}

template <class W>
double entropy(const BasicMeasure<W>& mu, int level) {
  if (!mu.normalized) throw Error("entropy requires a normalized measure");
  if (level < 1 || level > mu.scale_exp) throw Error("level out of range");
  if (mu.span != 1) throw Error("entropy requires support in [0,1)^d");
  int shift = mu.scale_exp - level;
  std::map<Point, double> bins;
  for (const auto& [p, w] : mu.atoms) {
    double x;
    if constexpr (std::is_same_v<W, Rational>) x = w.get_d();
    else x = w;
    bins[shift_point(p, mu.dim, shift)] += x;
  }
  double h = 0;
  for (const auto& [c, w] : bins)
    if (w > 0) h -= w * std::log2(w);
  return h / static_cast<double>(level);
}

template double entropy<Rational>(const GridMeasureQ&, int);
template double entropy<double>(const GridMeasureD&, int);

template <class W>
BasicMeasure<W> local_measure(const BasicMeasure<W>& mu, const Point& x, int level) {
  if (level < 0 || level > mu.scale_exp) throw Error("level out of range");
  if (mu.span != 1) throw Error("local measure requires support in [0,1)^d");
  int shift = mu.scale_exp - level;
  Point cube = shift_point(x, mu.dim, shift);
  W mass{};
  std::vector<std::pair<Point, W>> atoms;
  for (const auto& [p, w] : mu.atoms) {
    if (shift_point(p, mu.dim, shift) != cube) continue;
    Point q{};
    for (int i = 0; i < mu.dim; ++i)
      q[static_cast<std::size_t>(i)] =
          p[static_cast<std::size_t>(i)] - (cube[static_cast<std::size_t>(i)] << shift);
    atoms.emplace_back(q, w);
    mass += w;
  }
  if (atoms.empty() || !weight_positive(mass)) throw Error("cube has zero mass");
  for (auto& [q, w] : atoms) w /= mass;
  return BasicMeasure<W>::make(mu.dim, shift, std::move(atoms), true);
}

template GridMeasureQ local_measure<Rational>(const GridMeasureQ&, const Point&, int);
template GridMeasureD local_measure<double>(const GridMeasureD&, const Point&, int);

template <class W>
EntropyProfile entropy_decomposition(const BasicMeasure<W>& mu, int L) {
  if (!mu.normalized) throw Error("entropy requires a normalized measure");
  if (L < 1 || mu.scale_exp % L != 0 || mu.scale_exp == 0) throw Error("L does not divide m");
  int S = mu.scale_exp / L;
  EntropyProfile out;
  out.total = entropy(mu, mu.scale_exp);

  double acc = 0;
  for (int s = 0; s < S; ++s) {
    int shift = mu.scale_exp - s * L;
    std::map<Point, double> cube_mass;
    std::map<Point, Point> representative;
    for (const auto& [p, w] : mu.atoms) {
      Point cube = shift_point(p, mu.dim, shift);
      double x;
      if constexpr (std::is_same_v<W, Rational>) x = w.get_d();
      else x = w;
      cube_mass[cube] += x;
      representative.emplace(cube, p);
    }
    for (const auto& [cube, mass] : cube_mass) {
      auto local = local_measure(mu, representative.at(cube), s * L);
      double h = entropy(local, L);
      out.locals.push_back({s, cube, mass, h});
      acc += mass * h;
    }
  }
  out.local_expectation = acc / static_cast<double>(S);
  return out;
}

template EntropyProfile entropy_decomposition<Rational>(const GridMeasureQ&, int);
template EntropyProfile entropy_decomposition<double>(const GridMeasureD&, int);

ConcentrationResult is_concentrated(const GridMeasureD& mu, const AffineFlat& v, double eps,
                                    Norm norm) {
  if (mu.empty()) throw Error("empty measure");
  if (eps <= 0 || eps >= 1) throw Error("eps must be in (0,1)");
  int d = mu.dim;
  if (v.ambient_dim() != d) throw Error("dimension mismatch");
  double cell = std::pow(0.5, mu.scale_exp);

  std::vector<Eigen::VectorXd> positions;
  positions.reserve(mu.atoms.size());
  for (const auto& [p, w] : mu.atoms) {
    Eigen::VectorXd x(d);
    for (int i = 0; i < d; ++i) x[i] = static_cast<double>(p[static_cast<std::size_t>(i)]) * cell;
    positions.push_back(x);
  }
  Eigen::VectorXd bary = Eigen::VectorXd::Zero(d);
  double total = 0;
  for (std::size_t i = 0; i < positions.size(); ++i) {
    bary += mu.atoms[i].second * positions[i];
    total += mu.atoms[i].second;
  }
  bary /= total;

  auto mass_near = [&](const Eigen::VectorXd& x) {
    double acc = 0;
    for (std::size_t i = 0; i < positions.size(); ++i) {
      Eigen::VectorXd w = positions[i] - x;
      double dist;
      if (v.dim_k() == 0) {
        dist = (norm == Norm::l2) ? w.norm() : w.lpNorm<Eigen::Infinity>();
      } else if (norm == Norm::l2) {
        Eigen::VectorXd t = v.frame.transpose() * w;
        dist = std::sqrt(std::max(0.0, w.squaredNorm() - t.squaredNorm()));
      } else {
        Eigen::VectorXd res = w - v.frame * (v.frame.transpose() * w);
        dist = res.lpNorm<Eigen::Infinity>();
      }
      if (dist < eps) acc += mu.atoms[i].second;
    }
    return acc;
  };

  ConcentrationResult best;
  double target = (1.0 - eps) * total;
  for (std::size_t i = 0; i < positions.size(); ++i) {
    double mass = mass_near(positions[i]);
    if (mass > best.best_mass) {
      best.best_mass = mass;
      best.witness.assign(positions[i].data(), positions[i].data() + d);
      best.witness_is_atom = true;
    }
    if (mass >= target) break;
  }
  if (best.best_mass < target) {
    double mass = mass_near(bary);
    if (mass > best.best_mass) {
      best.best_mass = mass;
      best.witness.assign(bary.data(), bary.data() + d);
      best.witness_is_atom = false;
    }
  }
  best.concentrated = best.best_mass >= target;
  return best;
}

SaturationResult is_saturated(const GridMeasureD& mu, const AffineFlat& v, int L, double C) {
  if (mu.empty()) throw Error("empty measure");
  if (L < 1 || L > mu.scale_exp) throw Error("L out of range");
  int d = mu.dim;
  if (v.ambient_dim() != d) throw Error("dimension mismatch");

  SaturationResult r;
  r.h_mu = entropy(mu, L);
  r.vperp_basis = orthogonal_complement(v);

  double cell = std::pow(0.5, mu.scale_exp);
  double binsize = std::pow(0.5, L);
  std::map<std::vector<std::int64_t>, double> bins;
  for (const auto& [p, w] : mu.atoms) {
    Eigen::VectorXd x(d);
    for (int i = 0; i < d; ++i) x[i] = static_cast<double>(p[static_cast<std::size_t>(i)]) * cell;
    Eigen::VectorXd proj = r.vperp_basis.transpose() * x;
    std::vector<std::int64_t> key(static_cast<std::size_t>(proj.size()));
    for (int i = 0; i < proj.size(); ++i)
      key[static_cast<std::size_t>(i)] = static_cast<std::int64_t>(std::floor(proj[i] / binsize));
    bins[key] += w;
  }
  double h = 0;
  for (const auto& [k, w] : bins)
    if (w > 0) h -= w * std::log2(w);
  r.h_proj = h / static_cast<double>(L);

  r.deficit = r.h_mu - r.h_proj - static_cast<double>(v.dim_k()) + C / static_cast<double>(L);
  r.saturated = r.deficit >= 0;
  return r;
}

}  // namespace dsk
