#include "dsk/uniformize.hpp"

#include <algorithm>
#include <map>

#include "dsk/geometry.hpp"
#include "dsk/grid.hpp"
#include "dsk/util.hpp"

namespace dsk {

namespace {

Point shift_point(const Point& p, int dim, int shift) {
  Point q{};
  for (int i = 0; i < dim; ++i) q[static_cast<std::size_t>(i)] = p[static_cast<std::size_t>(i)] >> shift;
  return q;
}

struct CubeGroup {
  Point parent;
  std::vector<Point> children;          // full child-cube keys, sorted unique
  std::vector<std::int64_t> child_pts;  // surviving points per child
  std::int64_t pts = 0;
};

// Groups the current set by depth-s*L cube, children at depth (s+1)*L.
std::vector<CubeGroup> group_by_cube(const std::vector<Point>& pts, int dim, int m, int s, int L) {
  std::vector<std::tuple<Point, Point>> keys;
  keys.reserve(pts.size());
  int cs = m - (s + 1) * L;
  for (const Point& p : pts) {
    Point child = shift_point(p, dim, cs);
    Point parent = shift_point(child, dim, L);
    keys.emplace_back(parent, child);
  }
  std::sort(keys.begin(), keys.end());
  std::vector<CubeGroup> groups;
  std::size_t i = 0;
  while (i < keys.size()) {
    CubeGroup g;
    g.parent = std::get<0>(keys[i]);
    std::size_t j = i;
    while (j < keys.size() && std::get<0>(keys[j]) == g.parent) {
      Point child = std::get<1>(keys[j]);
      std::size_t k = j;
      while (k < keys.size() && std::get<0>(keys[k]) == g.parent && std::get<1>(keys[k]) == child) ++k;
      g.children.push_back(child);
      g.child_pts.push_back(static_cast<std::int64_t>(k - j));
      g.pts += static_cast<std::int64_t>(k - j);
      j = k;
    }
    groups.push_back(std::move(g));
    i = j;
  }
  return groups;
}

int floor_log2(std::int64_t n) {
  int j = 0;
  while ((std::int64_t{1} << (j + 1)) <= n) ++j;
  return j;
}

// Filters points whose depth-`level` cube key appears in `keep` (sorted).
std::vector<Point> filter_by_cubes(const std::vector<Point>& pts, int dim, int m, int level,
                                   const std::vector<Point>& keep) {
  std::vector<Point> out;
  out.reserve(pts.size());
  int shift = m - level;
  for (const Point& p : pts) {
    Point key = shift_point(p, dim, shift);
    if (std::binary_search(keep.begin(), keep.end(), key)) out.push_back(p);
  }
  return out;
}

// Relative child-cube set of one cube as a 2^-L set.
GridSet child_set(const CubeGroup& g, int dim, int L) {
  std::vector<Point> rel;
  rel.reserve(g.children.size());
  for (const Point& c : g.children) {
    Point q{};
    for (int i = 0; i < dim; ++i)
      q[static_cast<std::size_t>(i)] =
          c[static_cast<std::size_t>(i)] - (g.parent[static_cast<std::size_t>(i)] << L);
    rel.push_back(q);
  }
  return GridSet::make(dim, L, std::move(rel));
}

Rational power_ratio(std::int64_t base, int exp) {
  mpz_class denom = 1;
  for (int i = 0; i < exp; ++i) denom *= base;
  Rational g(1);
  g /= Rational(denom);
  return g;
}

UniformizationResult uniformize_core(const GridSet& a, int L,
                                     const std::vector<ValueFunction>* fns) {
  if (a.empty()) throw Error("empty set");
  if (a.span != 1) throw Error("uniformization requires a set inside [0,1)^d");
  if (L < 1) throw Error("L must be positive");
  if (a.scale_exp % L != 0) throw Error("L does not divide m");
  int S = a.scale_exp / L;
  int d = a.dim;
  if (fns && static_cast<int>(fns->size()) != S) throw Error("need one value function per scale");

  UniformizationResult res;
  res.input_size = a.size();
  res.per_scale_values.assign(static_cast<std::size_t>(S), 0);

  std::vector<Point> cur = a.points;
  std::vector<std::int64_t> branching(static_cast<std::size_t>(S), 1);

  int bands = d * L;  // child counts in [1, 2^dL] split into dL dyadic bands
  for (int s = S - 1; s >= 0; --s) {
    auto groups = group_by_cube(cur, d, a.scale_exp, s, L);

    // heaviest dyadic band of child counts
    std::vector<std::int64_t> band_mass(static_cast<std::size_t>(bands), 0);
    for (const auto& g : groups) {
      int j = std::min(floor_log2(static_cast<std::int64_t>(g.children.size())), bands - 1);
      band_mass[static_cast<std::size_t>(j)] += g.pts;
    }
    int best = 0;
    for (int j = 1; j < bands; ++j)
      if (band_mass[static_cast<std::size_t>(j)] > band_mass[static_cast<std::size_t>(best)]) best = j;

    // common child count: the band minimum, so uniform input passes through
    std::int64_t r = -1;
    for (const auto& g : groups) {
      int j = std::min(floor_log2(static_cast<std::int64_t>(g.children.size())), bands - 1);
      if (j != best) continue;
      auto n = static_cast<std::int64_t>(g.children.size());
      r = (r < 0) ? n : std::min(r, n);
    }
    branching[static_cast<std::size_t>(s)] = r;

    std::vector<Point> keep_children;
    for (const auto& g : groups) {
      int j = std::min(floor_log2(static_cast<std::int64_t>(g.children.size())), bands - 1);
      if (j != best) continue;
      for (std::int64_t t = 0; t < r; ++t)
        keep_children.push_back(g.children[static_cast<std::size_t>(t)]);
    }
    std::sort(keep_children.begin(), keep_children.end());
    cur = filter_by_cubes(cur, d, a.scale_exp, (s + 1) * L, keep_children);

    if (fns) {
      const ValueFunction& fn = (*fns)[static_cast<std::size_t>(s)];
      auto pruned = group_by_cube(cur, d, a.scale_exp, s, L);
      std::map<int, std::int64_t> value_mass;
      std::vector<std::pair<Point, int>> cube_value;
      for (const auto& g : pruned) {
        int v = fn.evaluate(child_set(g, d, L));
        if (v < 0 || v >= fn.V) throw Error("value function returned code outside [0, V)");
        value_mass[v] += g.pts;
        cube_value.emplace_back(g.parent, v);
      }
      int best_v = -1;
      std::int64_t best_mass = -1;
      for (const auto& [v, mass] : value_mass)
        if (mass > best_mass) { best_v = v; best_mass = mass; }
      res.per_scale_values[static_cast<std::size_t>(s)] = best_v;
      std::vector<Point> keep_parents;
      for (const auto& [parent, v] : cube_value)
        if (v == best_v) keep_parents.push_back(parent);
      std::sort(keep_parents.begin(), keep_parents.end());
      cur = filter_by_cubes(cur, d, a.scale_exp, s * L, keep_parents);
    }
  }

  res.subset = GridSet::make(d, a.scale_exp, std::move(cur));
  res.output_size = res.subset.size();
  auto check = is_uniform(res.subset, L);
  if (!check.uniform) throw MathCheckError("uniformization produced a non-uniform set");
  res.profile = check.profile;

  std::int64_t vmax = 1;
  if (fns)
    for (const auto& f : *fns) vmax = std::max<std::int64_t>(vmax, f.V);
  res.guarantee = power_ratio(2 * static_cast<std::int64_t>(L) * d * vmax, S);
  res.size_ratio = Rational(static_cast<long>(res.output_size), static_cast<long>(res.input_size));
  res.size_ratio.canonicalize();
  res.meets_guarantee = res.size_ratio >= res.guarantee;
  if (!res.meets_guarantee)
    throw MathCheckError("uniformization lost more mass than the pigeonhole bound allows");
  return res;
}

}  // namespace

UniformizationResult uniform_subset(const GridSet& a, int L) {
  auto res = uniformize_core(a, L, nullptr);
  res.per_scale_values.clear();
  return res;
}

UniformizationResult uniform_subset_general(const GridSet& a, int L,
                                            const std::vector<ValueFunction>& fns) {
  return uniformize_core(a, L, &fns);
}

SubspaceUniformResult uniform_subset_subspace(const GridSet& a, int L) {
  int S = (L >= 1 && a.scale_exp % L == 0) ? a.scale_exp / L : 0;
  ValueFunction dim_code{"slab-dimension", a.dim + 1,
                         [L](const GridSet& y) { return min_dimension(y, L).first; }};
  std::vector<ValueFunction> fns(static_cast<std::size_t>(S), dim_code);
  SubspaceUniformResult out;
  out.base = uniform_subset_general(a, L, fns);
  out.dims = out.base.per_scale_values;
  return out;
}

bool centered_at_all_scales(const Point& p, int dim, int m, int L, const std::vector<Rational>& y) {
  if (L < 1 || m % L != 0) throw Error("L does not divide m");
  int S = m / L;
  for (int i = 0; i < dim; ++i) {
    Rational x(static_cast<long>(p[static_cast<std::size_t>(i)]));
    x /= Rational(mpz_class(1) << m);
    if (!y.empty()) x += y[static_cast<std::size_t>(i)];
    for (int s = 0; s < S; ++s) {
      Rational scaled = x * Rational(mpz_class(1) << (L * s));
      mpz_class fl;
      mpz_fdiv_q(fl.get_mpz_t(), scaled.get_num().get_mpz_t(), scaled.get_den().get_mpz_t());
      Rational frac = scaled - Rational(fl);
      if (3 * frac < 1 || 3 * frac >= 2) return false;
    }
  }
  return true;
}

CenterResult center_by_translation(const GridSet& a, int L) {
  if (a.empty()) throw Error("empty set");
  if (a.span != 1) throw Error("centering requires a set inside [0,1)^d");
  if (L < 1 || a.scale_exp % L != 0) throw Error("L does not divide m");
  int d = a.dim;
  int m = a.scale_exp;
  int S = m / L;
  std::int64_t big = pow2(m);
  for (const Point& p : a.points)
    for (int i = 0; i < d; ++i) {
      std::int64_t c = p[static_cast<std::size_t>(i)];
      if (3 * c < big || 3 * c >= 2 * big) throw Error("input must lie in [1/3, 2/3)^d");
    }

  CenterResult res;
  res.guarantee = [&] {
    mpz_class denom = 1;
    for (int i = 0; i < 2 * d * S; ++i) denom *= 3;
    Rational g(1);
    g /= Rational(denom);
    return g;
  }();

  // Translation built L bits at a time, finest block first. Coarser blocks
  // never change the value of (X + Q) mod 2^(m - Ls) at finer scales, so
  // each scale's condition is final once its block is chosen.
  std::vector<Point> cur = a.points;
  std::array<std::int64_t, kMaxDim> qpartial{};
  std::int64_t ncand = pow2(L);
  for (int s = S - 1; s >= 0; --s) {
    std::int64_t M = pow2(m - s * L);
    std::int64_t block = pow2(m - (s + 1) * L);
    std::int64_t lo = (M - 1 + 2) / 3;           // ceil((M-1)/3)
    std::int64_t hi = (2 * M - 1 + 2) / 3 - 1;   // ceil((2M-1)/3) - 1
    auto satisfied = [&](const Point& p, const std::array<std::int64_t, kMaxDim>& cc) {
      for (int i = 0; i < d; ++i) {
        std::int64_t z = (p[static_cast<std::size_t>(i)] + qpartial[static_cast<std::size_t>(i)] +
                          cc[static_cast<std::size_t>(i)] * block) % M;
        if (z < lo || z > hi) return false;
      }
      return true;
    };
    std::array<std::int64_t, kMaxDim> bestc{};
    std::int64_t best_count = -1;
    std::array<std::int64_t, kMaxDim> cc{};
    while (true) {
      std::int64_t count = 0;
      for (const Point& p : cur)
        if (satisfied(p, cc)) ++count;
      if (count > best_count) {
        best_count = count;
        bestc = cc;
      }
      int i = d - 1;  // lexicographic candidate order with ties to the smallest
      for (; i >= 0; --i) {
        if (cc[static_cast<std::size_t>(i)] + 1 < ncand) { ++cc[static_cast<std::size_t>(i)]; break; }
        cc[static_cast<std::size_t>(i)] = 0;
      }
      if (i < 0) break;
    }
    std::vector<Point> next;
    next.reserve(static_cast<std::size_t>(best_count));
    for (const Point& p : cur)
      if (satisfied(p, bestc)) next.push_back(p);
    cur = std::move(next);
    for (int i = 0; i < d; ++i)
      qpartial[static_cast<std::size_t>(i)] += bestc[static_cast<std::size_t>(i)] * block;
    if (cur.empty()) break;
  }

  // y = r 2^-m + 1/(3 2^m) with r = z_0(x0) - x0 for any survivor, which is
  // the in-range representative of Q mod 2^m.
  res.translation.assign(static_cast<std::size_t>(d), Rational(0));
  mpz_class denom3 = 3 * (mpz_class(1) << m);
  for (int i = 0; i < d; ++i) {
    std::int64_t r = 0;
    if (!cur.empty()) {
      std::int64_t x0 = cur.front()[static_cast<std::size_t>(i)];
      std::int64_t z0 = (x0 + qpartial[static_cast<std::size_t>(i)]) % big;
      r = z0 - x0;
    }
    Rational y(3 * r + 1);
    y /= Rational(denom3);
    res.translation[static_cast<std::size_t>(i)] = y;
  }

  res.subset = GridSet::make(d, m, std::move(cur));
  res.size_ratio = Rational(static_cast<long>(res.subset.size()), static_cast<long>(a.size()));
  res.size_ratio.canonicalize();
  res.meets_bound = res.size_ratio >= res.guarantee;
  res.predicate_ok = true;  // vacuously true when empty; the bound flag reports the loss
  for (const Point& p : res.subset.points)
    if (!centered_at_all_scales(p, d, m, L, res.translation)) { res.predicate_ok = false; break; }
  return res;
}

UniformizationResult collapse_branching(const GridSet& a, int L, const std::vector<int>& scales) {
  auto check = is_uniform(a, L);
  if (!check.uniform) throw Error("input not uniform");
  int S = check.profile.S;
  int d = a.dim;
  std::vector<int> sc(scales);
  std::sort(sc.begin(), sc.end());
  sc.erase(std::unique(sc.begin(), sc.end()), sc.end());
  for (int s : sc)
    if (s < 0 || s >= S) throw Error("scale index out of range");

  UniformizationResult res;
  res.input_size = a.size();
  std::vector<Point> cur = a.points;
  Rational expected(1);
  for (int s : sc) {
    auto groups = group_by_cube(cur, d, a.scale_exp, s, L);
    std::vector<Point> keep;
    keep.reserve(groups.size());
    for (const auto& g : groups) keep.push_back(g.children.front());
    std::sort(keep.begin(), keep.end());
    cur = filter_by_cubes(cur, d, a.scale_exp, (s + 1) * L, keep);
    Rational f(1, static_cast<unsigned long>(check.profile.branching[static_cast<std::size_t>(s)]));
    f.canonicalize();
    expected *= f;
  }
  res.subset = GridSet::make(d, a.scale_exp, std::move(cur));
  res.output_size = res.subset.size();
  auto after = is_uniform(res.subset, L);
  if (!after.uniform) throw MathCheckError("branching collapse produced a non-uniform set");
  res.profile = after.profile;
  for (int s = 0; s < S; ++s) {
    bool collapsed = std::binary_search(sc.begin(), sc.end(), s);
    std::int64_t want = collapsed ? 1 : check.profile.branching[static_cast<std::size_t>(s)];
    if (res.profile.branching[static_cast<std::size_t>(s)] != want)
      throw MathCheckError("collapse changed branching off the selected scales");
  }
  res.guarantee = expected;
  res.size_ratio = Rational(static_cast<long>(res.output_size), static_cast<long>(res.input_size));
  res.size_ratio.canonicalize();
  res.meets_guarantee = res.size_ratio >= res.guarantee;
  if (!res.meets_guarantee) throw MathCheckError("collapse kept fewer points than the exact count");
  return res;
}

}  // namespace dsk
