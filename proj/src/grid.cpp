#include "dsk/grid.hpp"

#include <algorithm>

#include "dsk/util.hpp"

namespace dsk {

GridSet GridSet::make(int dim, int scale_exp, std::vector<Point> pts, int span) {
  GridSet a;
  a.dim = dim;
  a.scale_exp = scale_exp;
  a.span = span;
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  a.points = std::move(pts);
  a.validate();
  return a;
}

void GridSet::validate() const {
  if (dim < 1 || dim > kMaxDim) throw Error("dimension out of range");
  if (scale_exp < 0) throw Error("negative scale exponent");
  if (span < 1) throw Error("span must be positive");
  if (dim * scale_exp > 62) throw Error("scale too fine for exact integer keys");
  std::int64_t bound = span * pow2(scale_exp);
  for (const Point& p : points) {
    for (int i = 0; i < dim; ++i)
      if (p[static_cast<std::size_t>(i)] < 0 || p[static_cast<std::size_t>(i)] >= bound)
        throw Error("point coordinate out of range");
    for (int i = dim; i < kMaxDim; ++i)
      if (p[static_cast<std::size_t>(i)] != 0) throw Error("trailing coordinates must be zero");
  }
  if (!std::is_sorted(points.begin(), points.end())) throw Error("points not sorted");
  if (std::adjacent_find(points.begin(), points.end()) != points.end())
    throw Error("duplicate points");
}

bool GridSet::contains(const Point& p) const {
  return std::binary_search(points.begin(), points.end(), p);
}

namespace {

Point shift_point(const Point& p, int dim, int shift) {
  Point q{};
  for (int i = 0; i < dim; ++i) q[static_cast<std::size_t>(i)] = p[static_cast<std::size_t>(i)] >> shift;
  return q;
}

}  // namespace

DyadicCube cube_of(const GridSet& a, const Point& p, int level) {
  if (level < 0 || level > a.scale_exp) throw Error("level out of range");
  DyadicCube c;
  c.dim = a.dim;
  c.level = level;
  c.coords = shift_point(p, a.dim, a.scale_exp - level);
  return c;
}

std::int64_t covering_count(const GridSet& a, int level) {
  if (a.empty()) throw Error("empty set");
  if (level < 0 || level > a.scale_exp) throw Error("level out of range");
  int shift = a.scale_exp - level;
  // point order does not keep multi-dimensional cube keys contiguous
  std::vector<Point> cubes;
  cubes.reserve(a.points.size());
  for (const Point& p : a.points) cubes.push_back(shift_point(p, a.dim, shift));
  std::sort(cubes.begin(), cubes.end());
  cubes.erase(std::unique(cubes.begin(), cubes.end()), cubes.end());
  return static_cast<std::int64_t>(cubes.size());
}

std::vector<std::pair<Point, Point>> cube_children(const GridSet& a, int from_level, int to_level) {
  if (from_level > to_level || to_level > a.scale_exp) throw Error("bad level pair");
  std::vector<std::pair<Point, Point>> out;
  out.reserve(a.points.size());
  int cs = a.scale_exp - to_level;
  int ps = to_level - from_level;
  for (const Point& p : a.points) {
    Point child = shift_point(p, a.dim, cs);
    Point parent = shift_point(child, a.dim, ps);
    out.emplace_back(parent, child);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

UniformityCheck is_uniform(const GridSet& a, int L) {
  UniformityCheck r;
  if (a.empty()) throw Error("empty set");
  if (a.span != 1) throw Error("uniformity requires a set inside [0,1)^d");
  if (L < 1) throw Error("L must be positive");
  if (a.scale_exp % L != 0) throw Error("L does not divide m");
  int S = a.scale_exp / L;
  r.profile.L = L;
  r.profile.S = S;
  r.profile.branching.assign(static_cast<std::size_t>(S), 0);
  for (int s = 0; s < S; ++s) {
    auto pairs = cube_children(a, s * L, (s + 1) * L);
    std::int64_t expected = -1;
    std::size_t i = 0;
    while (i < pairs.size()) {
      std::size_t j = i;
      while (j < pairs.size() && pairs[j].first == pairs[i].first) ++j;
      std::int64_t count = static_cast<std::int64_t>(j - i);
      if (expected < 0) {
        expected = count;
      } else if (count != expected) {
        r.uniform = false;
        r.violation_scale = s;
        r.violation_cube = pairs[i].first;
        r.detail = "child count " + std::to_string(count) + " != " + std::to_string(expected) +
                   " at scale " + std::to_string(s);
        return r;
      }
      i = j;
    }
    r.profile.branching[static_cast<std::size_t>(s)] = expected;
  }
  r.uniform = true;
  return r;
}

GridSet renormalize_set(const GridSet& a, const DyadicCube& cube) {
  if (cube.dim != a.dim) throw Error("dimension mismatch");
  if (cube.level < 0 || cube.level > a.scale_exp) throw Error("level out of range");
  if (a.span != 1) throw Error("renormalization requires a set inside [0,1)^d");
  int shift = a.scale_exp - cube.level;
  std::vector<Point> pts;
  for (const Point& p : a.points) {
    if (shift_point(p, a.dim, shift) != cube.coords) continue;
    Point q{};
    for (int i = 0; i < a.dim; ++i)
      q[static_cast<std::size_t>(i)] =
          p[static_cast<std::size_t>(i)] - (cube.coords[static_cast<std::size_t>(i)] << shift);
    pts.push_back(q);
  }
  if (pts.empty()) throw Error("cube does not meet the set");
  return GridSet::make(a.dim, shift, std::move(pts));
}

GridSet truncate_set(const GridSet& a, int level) {
  if (level < 0 || level > a.scale_exp) throw Error("level out of range");
  int shift = a.scale_exp - level;
  std::vector<Point> pts;
  pts.reserve(a.points.size());
  for (const Point& p : a.points) pts.push_back(shift_point(p, a.dim, shift));
  return GridSet::make(a.dim, level, std::move(pts), a.span);
}

namespace {

// Everything scaled by 2^t so cube corners, points and the radius are integers.
struct NbhdScale {
  int t;
  std::int64_t cell;    // 2^(t-k), cube side
  std::int64_t radius;  // r * 2^t
};

}  // namespace

std::int64_t neighborhood_count(const GridSet& a, Dyadic r, int level, Norm norm) {
  if (r.num <= 0) throw Error("radius must be positive");
  if (level < 0) throw Error("level out of range");
  if (a.span != 1) throw Error("neighborhood requires a set inside [0,1)^d");
  int t = std::max({a.scale_exp, level, r.exp2});
  if (t > 40) throw Error("scales too fine for exact neighborhood arithmetic");
  NbhdScale sc{t, pow2(t - level), r.num << (t - r.exp2)};
  std::int64_t grid = pow2(level);

  std::vector<Point> cubes;
  for (const Point& p : a.points) {
    // Candidate cube range per coordinate: cube [c, c+1)*cell must touch
    // [x - r, x + r]. Left faces are closed, so c*cell <= x + r and
    // (c+1)*cell > x - r.
    std::array<std::pair<std::int64_t, std::int64_t>, kMaxDim> range{};
    bool any = true;
    for (int i = 0; i < a.dim; ++i) {
      std::int64_t x = p[static_cast<std::size_t>(i)] << (t - a.scale_exp);
      std::int64_t lo_num = x - sc.radius;  // c+1 > lo_num/cell
      std::int64_t hi_num = x + sc.radius;  // c <= hi_num/cell
      std::int64_t cmin =
          (lo_num % sc.cell == 0) ? lo_num / sc.cell
                                  : (lo_num > 0 ? lo_num / sc.cell : lo_num / sc.cell - 1);
      std::int64_t cmax = hi_num >= 0 ? hi_num / sc.cell : -((-hi_num + sc.cell - 1) / sc.cell);
      cmin = std::max<std::int64_t>(cmin, 0);
      cmax = std::min<std::int64_t>(cmax, grid - 1);
      if (cmin > cmax) { any = false; break; }
      range[static_cast<std::size_t>(i)] = {cmin, cmax};
    }
    if (!any) continue;

    Point c{};
    for (int i = 0; i < a.dim; ++i) c[static_cast<std::size_t>(i)] = range[static_cast<std::size_t>(i)].first;
    while (true) {
      bool keep = true;
      if (norm == Norm::l2) {
        // Exact distance from the point to the half-open cube. An infimum
        // attained only on an open upper face does not count as touching.
        unsigned __int128 dist2 = 0;
        bool open_face = false;
        for (int i = 0; i < a.dim; ++i) {
          std::int64_t x = p[static_cast<std::size_t>(i)] << (t - a.scale_exp);
          std::int64_t lo = c[static_cast<std::size_t>(i)] * sc.cell;
          std::int64_t hi = lo + sc.cell;
          std::int64_t gap = 0;
          if (x < lo) {
            gap = lo - x;
          } else if (x >= hi) {
            gap = x - hi;
            open_face = true;
          }
          dist2 += static_cast<unsigned __int128>(gap) * static_cast<unsigned __int128>(gap);
        }
        unsigned __int128 r2 = static_cast<unsigned __int128>(sc.radius) * static_cast<unsigned __int128>(sc.radius);
        if (dist2 > r2 || (dist2 == r2 && open_face)) keep = false;
      }
      // linf: the per-coordinate candidate ranges already encode the box test.
      if (keep) cubes.push_back(c);

      int i = 0;
      for (; i < a.dim; ++i) {
        auto& ci = c[static_cast<std::size_t>(i)];
        if (ci < range[static_cast<std::size_t>(i)].second) { ++ci; break; }
        ci = range[static_cast<std::size_t>(i)].first;
      }
      if (i == a.dim) break;
    }
    if (cubes.size() > 20'000'000) throw Error("neighborhood enumeration too large");
  }
  std::sort(cubes.begin(), cubes.end());
  cubes.erase(std::unique(cubes.begin(), cubes.end()), cubes.end());
  return static_cast<std::int64_t>(cubes.size());
}

}  // namespace dsk
