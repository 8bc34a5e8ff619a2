#include "dsk/sumset.hpp"

#include <algorithm>
#include <cmath>

#include "dsk/fftconv.hpp"
#include "dsk/util.hpp"

namespace dsk {

namespace {

struct SetBox {
  Point lo{}, hi{};
};

SetBox set_box(const GridSet& a) {
  SetBox b;
  for (int i = 0; i < a.dim; ++i) {
    b.lo[static_cast<std::size_t>(i)] = std::numeric_limits<Coord>::max();
    b.hi[static_cast<std::size_t>(i)] = std::numeric_limits<Coord>::min();
  }
  for (const Point& p : a.points)
    for (int i = 0; i < a.dim; ++i) {
      b.lo[static_cast<std::size_t>(i)] = std::min(b.lo[static_cast<std::size_t>(i)], p[static_cast<std::size_t>(i)]);
      b.hi[static_cast<std::size_t>(i)] = std::max(b.hi[static_cast<std::size_t>(i)], p[static_cast<std::size_t>(i)]);
    }
  return b;
}

// support of the indicator convolution over the padded bounding box
GridSet sumset_dense(const GridSet& a, const GridSet& b, const std::vector<std::int64_t>& extents,
                     const SetBox& ba, const SetBox& bb) {
  std::int64_t vol = 1;
  for (auto e : extents) vol *= e;
  std::vector<unsigned long long> da(static_cast<std::size_t>(vol), 0),
      db(static_cast<std::size_t>(vol), 0);
  auto fill = [&](const GridSet& s, const SetBox& box, std::vector<unsigned long long>& d) {
    for (const Point& p : s.points) {
      std::int64_t idx = 0;
      for (int i = 0; i < s.dim; ++i)
        idx = idx * extents[static_cast<std::size_t>(i)] +
              (p[static_cast<std::size_t>(i)] - box.lo[static_cast<std::size_t>(i)]);
      d[static_cast<std::size_t>(idx)] = 1;
    }
  };
  fill(a, ba, da);
  fill(b, bb, db);
  auto conv = detail::ntt_convolve(da, db, extents);
  std::vector<Point> sums;
  for (std::int64_t idx = 0; idx < vol; ++idx) {
    if (conv[static_cast<std::size_t>(idx)] == 0) continue;
    Point p{};
    std::int64_t rem = idx;
    for (int i = a.dim - 1; i >= 0; --i) {
      p[static_cast<std::size_t>(i)] = rem % extents[static_cast<std::size_t>(i)] +
                                       ba.lo[static_cast<std::size_t>(i)] +
                                       bb.lo[static_cast<std::size_t>(i)];
      rem /= extents[static_cast<std::size_t>(i)];
    }
    sums.push_back(p);
  }
  return GridSet::make(a.dim, a.scale_exp, std::move(sums), a.span + b.span);
}

}  // namespace

GridSet sumset(const GridSet& a, const GridSet& b) {
  if (a.dim != b.dim || a.scale_exp != b.scale_exp) throw Error("dimension or scale mismatch");
  if (a.empty() || b.empty()) throw Error("empty set");

  SetBox ba = set_box(a), bb = set_box(b);
  std::vector<std::int64_t> extents;
  std::int64_t vol = 1;
  bool dense_ok = true;
  for (int i = 0; i < a.dim; ++i) {
    std::int64_t ext = detail::next_pow2(
        (ba.hi[static_cast<std::size_t>(i)] - ba.lo[static_cast<std::size_t>(i)] + 1) +
        (bb.hi[static_cast<std::size_t>(i)] - bb.lo[static_cast<std::size_t>(i)] + 1) - 1);
    extents.push_back(ext);
    if (vol > (std::int64_t{1} << 24) / ext) { dense_ok = false; break; }
    vol *= ext;
  }
  if (dense_ok && a.size() * b.size() > std::max<std::int64_t>(vol / 8, 1 << 16))
    return sumset_dense(a, b, extents, ba, bb);

  if (a.size() * b.size() > 60'000'000) throw Error("sumset too large");
  std::vector<Point> sums;
  sums.reserve(static_cast<std::size_t>(a.size() * b.size()));
  for (const Point& pa : a.points)
    for (const Point& pb : b.points) {
      Point s{};
      for (int i = 0; i < a.dim; ++i)
        s[static_cast<std::size_t>(i)] = pa[static_cast<std::size_t>(i)] + pb[static_cast<std::size_t>(i)];
      sums.push_back(s);
    }
  return GridSet::make(a.dim, a.scale_exp, std::move(sums), a.span + b.span);
}

GridSet iterated_sumset(const GridSet& a, int k) {
  if (k < 1) throw Error("k must be at least 1");
  if (static_cast<double>(k) * static_cast<double>(a.span) * std::pow(2.0, a.scale_exp) > 4e18)
    throw Error("iterated sumset overflows coordinate range");
  GridSet acc = a;
  for (int i = 1; i < k; ++i) acc = sumset(acc, a);
  return acc;
}

std::string EnergyResult::quadruples_str() const { return int128_to_string(quadruples); }

namespace {

// representation function of A+A as sorted (sum, count) pairs
std::vector<std::pair<Point, std::int64_t>> representation_counts(const GridSet& x) {
  std::vector<Point> sums;
  if (x.size() * x.size() > 40'000'000) throw Error("set too large for exact energy");
  sums.reserve(static_cast<std::size_t>(x.size() * x.size()));
  for (const Point& pa : x.points)
    for (const Point& pb : x.points) {
      Point s{};
      for (int i = 0; i < x.dim; ++i)
        s[static_cast<std::size_t>(i)] = pa[static_cast<std::size_t>(i)] + pb[static_cast<std::size_t>(i)];
      sums.push_back(s);
    }
  std::sort(sums.begin(), sums.end());
  std::vector<std::pair<Point, std::int64_t>> out;
  std::size_t i = 0;
  while (i < sums.size()) {
    std::size_t j = i;
    while (j < sums.size() && sums[j] == sums[i]) ++j;
    out.emplace_back(sums[i], static_cast<std::int64_t>(j - i));
    i = j;
  }
  return out;
}

bool dense_energy_possible(const GridSet& x, std::vector<std::int64_t>& extents, Point& lo) {
  for (int i = 0; i < x.dim; ++i) {
    lo[static_cast<std::size_t>(i)] = std::numeric_limits<Coord>::max();
  }
  Point hi{};
  for (int i = 0; i < x.dim; ++i) hi[static_cast<std::size_t>(i)] = std::numeric_limits<Coord>::min();
  for (const Point& p : x.points)
    for (int i = 0; i < x.dim; ++i) {
      lo[static_cast<std::size_t>(i)] = std::min(lo[static_cast<std::size_t>(i)], p[static_cast<std::size_t>(i)]);
      hi[static_cast<std::size_t>(i)] = std::max(hi[static_cast<std::size_t>(i)], p[static_cast<std::size_t>(i)]);
    }
  extents.clear();
  std::int64_t vol = 1;
  for (int i = 0; i < x.dim; ++i) {
    std::int64_t ext = detail::next_pow2(
        2 * (hi[static_cast<std::size_t>(i)] - lo[static_cast<std::size_t>(i)] + 1) - 1);
    extents.push_back(ext);
    if (vol > (std::int64_t{1} << 24) / ext) return false;
    vol *= ext;
  }
  return vol <= (std::int64_t{1} << 24);
}

}  // namespace

EnergyResult additive_energy(const GridSet& x) {
  if (x.empty()) throw Error("empty set");
  EnergyResult r;

  std::vector<std::int64_t> extents;
  Point lo{};
  bool dense = dense_energy_possible(x, extents, lo);
  // prefer dense when the box is comparable to the pair count
  std::int64_t vol = 1;
  for (auto e : extents) vol *= e;
  if (dense && (x.size() * x.size() > vol / 4 || x.size() * x.size() > 40'000'000)) {
    std::vector<unsigned long long> ind(static_cast<std::size_t>(vol), 0);
    for (const Point& p : x.points) {
      std::int64_t idx = 0;
      for (int i = 0; i < x.dim; ++i)
        idx = idx * extents[static_cast<std::size_t>(i)] +
              (p[static_cast<std::size_t>(i)] - lo[static_cast<std::size_t>(i)]);
      ind[static_cast<std::size_t>(idx)] = 1;
    }
    auto conv = detail::ntt_convolve(ind, ind, extents);
    unsigned __int128 total = 0;
    for (unsigned long long c : conv) total += static_cast<unsigned __int128>(c) * c;
    r.quadruples = total;
  } else {
    auto reps = representation_counts(x);
    unsigned __int128 total = 0;
    for (const auto& [s, c] : reps) total += static_cast<unsigned __int128>(c) * static_cast<unsigned __int128>(c);
    r.quadruples = total;
  }

  long double n = static_cast<long double>(x.size());
  long double norm = static_cast<long double>(r.quadruples) / (n * n * n);
  r.normalized = static_cast<double>(norm);
  if (norm >= 1.0L || x.scale_exp == 0) {
    r.sigma_star = 0.0;
  } else {
    r.sigma_star = static_cast<double>(-std::log2(static_cast<double>(norm)) / x.scale_exp);
  }
  return r;
}

ScaleEnergyResult scale_energy(const GridMeasureQ& mu, const GridMeasureQ& nu, Dyadic r) {
  if (mu.dim != nu.dim || mu.scale_exp != nu.scale_exp) throw Error("dimension or scale mismatch");
  if (r.num <= 0) throw Error("radius must be positive");
  int m = mu.scale_exp;
  if (r.value() < std::pow(0.5, m) * (1 - 1e-12)) throw Error("radius below lattice scale");

  GridMeasureQ tau = convolve(mu, nu);

  // slab measure: sum over pairs of tau atoms with |s1 - s2| <= r, exact.
  // distances are compared as integers at scale max(m, r.exp2).
  int t = std::max(m, r.exp2);
  if (t > 40) throw Error("scale too fine for exact slab arithmetic");
  unsigned __int128 r_scaled = static_cast<unsigned __int128>(r.num) << (t - r.exp2);
  unsigned __int128 r2 = r_scaled * r_scaled;
  Rational acc(0);
  const auto& atoms = tau.atoms;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    for (std::size_t j = i; j < atoms.size(); ++j) {
      unsigned __int128 dist2 = 0;
      bool over = false;
      for (int c = 0; c < tau.dim && !over; ++c) {
        std::int64_t diff = (atoms[i].first[static_cast<std::size_t>(c)] -
                             atoms[j].first[static_cast<std::size_t>(c)])
                            << (t - m);
        unsigned __int128 a2 = static_cast<unsigned __int128>(diff < 0 ? -diff : diff);
        dist2 += a2 * a2;
        if (dist2 > r2) over = true;
      }
      if (over) continue;
      Rational term = atoms[i].second * atoms[j].second;
      acc += (i == j) ? term : 2 * term;
    }
  }

  ScaleEnergyResult out;
  out.value = acc;

  // matching-scale convolution norm: rebin tau at scale m' = -log2(r)
  int mprime = m;
  {
    // largest m' with 2^-m' <= r
    double rv = r.value();
    mprime = static_cast<int>(std::floor(-std::log2(rv) + 1e-9));
    mprime = std::max(0, std::min(mprime, m));
  }
  out.matched_scale = mprime;
  int shift = m - mprime;
  std::vector<std::pair<Point, Rational>> binned;
  for (const auto& [p, w] : tau.atoms) {
    Point q{};
    for (int i = 0; i < tau.dim; ++i) q[static_cast<std::size_t>(i)] = p[static_cast<std::size_t>(i)] >> shift;
    binned.emplace_back(q, w);
  }
  auto rebinned = GridMeasureQ::make(tau.dim, mprime, std::move(binned), false, tau.span);
  out.conv_norm_sq = l2_norm_sq(rebinned);
  out.ratio = out.value.get_d() / out.conv_norm_sq.get_d();
  return out;
}

PrReport pr_check(const GridSet& a, int k) {
  if (k < 2) throw Error("k must be at least 2");
  PrReport rep;
  rep.k = k;
  rep.base_size = a.size();
  GridSet twoa = sumset(a, a);
  rep.doubling_size = twoa.size();
  GridSet ka = iterated_sumset(a, k);
  rep.iterated_size = ka.size();
  rep.K = static_cast<double>(rep.doubling_size) / static_cast<double>(rep.base_size);

  // |kA| * |A|^(k-1) <= |A+A|^k, exact integers
  unsigned __int128 lhs = static_cast<unsigned __int128>(rep.iterated_size);
  unsigned __int128 rhs = 1;
  bool overflow = false;
  for (int i = 0; i < k - 1; ++i) {
    if (lhs > (~static_cast<unsigned __int128>(0)) / static_cast<unsigned __int128>(rep.base_size)) {
      overflow = true;
      break;
    }
    lhs *= static_cast<unsigned __int128>(rep.base_size);
  }
  for (int i = 0; i < k && !overflow; ++i) {
    if (rhs > (~static_cast<unsigned __int128>(0)) / static_cast<unsigned __int128>(rep.doubling_size)) {
      overflow = true;
      break;
    }
    rhs *= static_cast<unsigned __int128>(rep.doubling_size);
  }
  if (overflow) throw Error("sizes overflow exact comparison");
  rep.ok = lhs <= rhs;
  rep.slack_log2 = static_cast<double>(k) * std::log2(rep.K) +
                   std::log2(static_cast<double>(rep.base_size)) -
                   std::log2(static_cast<double>(rep.iterated_size));
  if (!rep.ok)
    throw MathCheckError("iterated sumset growth bound violated: |" + std::to_string(k) +
                         "A| = " + std::to_string(rep.iterated_size) + ", |A+A| = " +
                         std::to_string(rep.doubling_size) + ", |A| = " + std::to_string(rep.base_size));
  return rep;
}

double small_doubling_certificate(const GridSet& a) {
  if (a.empty()) throw Error("empty set");
  if (a.size() == 1) return 0.0;
  if (a.scale_exp < 1) throw Error("m must be at least 1");
  GridSet twoa = sumset(a, a);
  return std::log2(static_cast<double>(twoa.size()) / static_cast<double>(a.size())) /
         static_cast<double>(a.scale_exp);
}

}  // namespace dsk
