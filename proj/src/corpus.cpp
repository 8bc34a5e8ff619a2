#include "dsk/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "dsk/util.hpp"

namespace dsk {

namespace {

GridSet generate_full(int d, int m) {
  if (d * m > 22) throw Error("full lattice too large");
  std::int64_t side = pow2(m);
  std::vector<Point> pts;
  pts.reserve(static_cast<std::size_t>(std::pow(static_cast<double>(side), d)));
  Point p{};
  while (true) {
    pts.push_back(p);
    int i = d - 1;
    for (; i >= 0; --i) {
      if (p[static_cast<std::size_t>(i)] + 1 < side) { ++p[static_cast<std::size_t>(i)]; break; }
      p[static_cast<std::size_t>(i)] = 0;
    }
    if (i < 0) break;
  }
  return GridSet::make(d, m, std::move(pts));
}

GridSet generate_gap(const CorpusSpec& spec) {
  if (spec.gap_generators.size() != spec.gap_lengths.size() || spec.gap_generators.empty())
    throw Error("gap needs matching generators and lengths");
  std::vector<Point> pts;
  std::vector<std::int64_t> idx(spec.gap_lengths.size(), 0);
  while (true) {
    Point p{};
    for (std::size_t g = 0; g < spec.gap_generators.size(); ++g)
      for (int i = 0; i < spec.d; ++i)
        p[static_cast<std::size_t>(i)] += idx[g] * spec.gap_generators[g][static_cast<std::size_t>(i)];
    pts.push_back(p);
    std::size_t g = 0;
    for (; g < idx.size(); ++g) {
      if (idx[g] + 1 < spec.gap_lengths[g]) { ++idx[g]; break; }
      idx[g] = 0;
    }
    if (g == idx.size()) break;
  }
  return GridSet::make(spec.d, spec.m, std::move(pts));
}

// Axis-aligned slab: free coordinates 0..k-1, normal offsets at
// (2^(m-2) + 1 + 1/2) 2^-m. The layer set around the base never crosses a
// cube boundary coarser than the cell level, so the slab is exactly uniform.
GridSet generate_flat(const CorpusSpec& spec) {
  int d = spec.d, m = spec.m, k = spec.k;
  if (k < 0 || k > d) throw Error("flat dimension out of range");
  if (m < 2) throw Error("flat family needs m >= 2");
  if (k * m > 22) throw Error("flat too large");
  int nk = d - k;
  std::int64_t base = pow2(m - 2) + 1;
  // normal layer offsets delta with sum (delta - 3/2)^2 <= d over normals
  std::vector<Point> layers;  // offsets relative to base, stored in first nk slots
  if (nk == 0) {
    layers.push_back(Point{});
  } else {
    std::vector<std::int64_t> delta(static_cast<std::size_t>(nk), -2);
    while (true) {
      double s = 0;
      for (auto v : delta) {
        double t = static_cast<double>(v) - 1.5;
        s += t * t;
      }
      if (s <= static_cast<double>(d) + 1e-12) {
        Point p{};
        for (int i = 0; i < nk; ++i) p[static_cast<std::size_t>(i)] = delta[static_cast<std::size_t>(i)];
        layers.push_back(p);
      }
      std::size_t i = 0;
      for (; i < delta.size(); ++i) {
        if (delta[i] < 5) { ++delta[i]; break; }
        delta[i] = -2;
      }
      if (i == delta.size()) break;
    }
  }
  std::int64_t side = pow2(m);
  std::vector<Point> pts;
  std::vector<std::int64_t> free(static_cast<std::size_t>(k), 0);
  while (true) {
    for (const Point& layer : layers) {
      Point p{};
      for (int i = 0; i < k; ++i) p[static_cast<std::size_t>(i)] = free[static_cast<std::size_t>(i)];
      bool ok = true;
      for (int i = 0; i < nk; ++i) {
        std::int64_t c = base + layer[static_cast<std::size_t>(i)];
        if (c < 0 || c >= side) { ok = false; break; }
        p[static_cast<std::size_t>(k + i)] = c;
      }
      if (ok) pts.push_back(p);
    }
    std::size_t i = 0;
    for (; i < free.size(); ++i) {
      if (free[i] + 1 < side) { ++free[i]; break; }
      free[i] = 0;
    }
    if (i == free.size() || k == 0) break;
  }
  return GridSet::make(d, m, std::move(pts));
}

GridSet generate_cantor(const CorpusSpec& spec) {
  int d = spec.d, m = spec.m;
  std::vector<int> free_digits;
  for (int i = 1; i <= m; ++i)
    if ((spec.digit_mask & (std::uint64_t{1} << (i - 1))) == 0) free_digits.push_back(i);
  std::size_t nf = free_digits.size();
  if (static_cast<int>(nf) * d > 22) throw Error("cantor set too large");
  std::vector<std::int64_t> axis_values;
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << nf); ++bits) {
    std::int64_t v = 0;
    for (std::size_t i = 0; i < nf; ++i)
      if (bits & (std::uint64_t{1} << i)) v += pow2(m - free_digits[i]);
    axis_values.push_back(v);
  }
  std::sort(axis_values.begin(), axis_values.end());
  std::vector<Point> pts;
  std::vector<std::size_t> idx(static_cast<std::size_t>(d), 0);
  while (true) {
    Point p{};
    for (int i = 0; i < d; ++i) p[static_cast<std::size_t>(i)] = axis_values[idx[static_cast<std::size_t>(i)]];
    pts.push_back(p);
    int i = d - 1;
    for (; i >= 0; --i) {
      if (idx[static_cast<std::size_t>(i)] + 1 < axis_values.size()) { ++idx[static_cast<std::size_t>(i)]; break; }
      idx[static_cast<std::size_t>(i)] = 0;
    }
    if (i < 0) break;
  }
  return GridSet::make(d, m, std::move(pts));
}

GridSet generate_product(const CorpusSpec& spec) {
  if (spec.children.size() < 2) throw Error("product needs at least two factors");
  std::vector<GridSet> parts;
  int dim = 0;
  for (const auto& child : spec.children) {
    parts.push_back(generate(child));
    if (parts.back().scale_exp != parts.front().scale_exp)
      throw Error("product factors must share the scale exponent");
    dim += parts.back().dim;
  }
  if (dim > kMaxDim) throw Error("product dimension too large");
  std::vector<Point> pts;
  std::vector<std::size_t> idx(parts.size(), 0);
  while (true) {
    Point p{};
    int off = 0;
    for (std::size_t f = 0; f < parts.size(); ++f) {
      const Point& q = parts[f].points[idx[f]];
      for (int i = 0; i < parts[f].dim; ++i) p[static_cast<std::size_t>(off + i)] = q[static_cast<std::size_t>(i)];
      off += parts[f].dim;
    }
    pts.push_back(p);
    std::size_t f = 0;
    for (; f < parts.size(); ++f) {
      if (idx[f] + 1 < parts[f].points.size()) { ++idx[f]; break; }
      idx[f] = 0;
    }
    if (f == parts.size()) break;
  }
  return GridSet::make(dim, spec.m, std::move(pts));
}

GridSet generate_random(const CorpusSpec& spec) {
  int d = spec.d, m = spec.m;
  double space = std::pow(2.0, d * m);
  if (static_cast<double>(spec.count) > space) throw Error("sample larger than the lattice");
  SplitMix64 rng(spec.seed);
  std::set<Point> chosen;
  std::int64_t side = pow2(m);
  while (static_cast<std::int64_t>(chosen.size()) < spec.count) {
    Point p{};
    for (int i = 0; i < d; ++i)
      p[static_cast<std::size_t>(i)] = static_cast<Coord>(rng.below(static_cast<std::uint64_t>(side)));
    chosen.insert(p);
  }
  return GridSet::make(d, m, std::vector<Point>(chosen.begin(), chosen.end()));
}

GridSet generate_plane_union(const CorpusSpec& spec) {
  int d = spec.d, m = spec.m, k = spec.k;
  if (k < 0 || k >= d) throw Error("plane dimension out of range");
  if (k * m > 22) throw Error("plane union too large");
  std::int64_t side = pow2(m);
  std::int64_t planes = std::max<std::int64_t>(1, spec.count);
  std::vector<Point> pts;
  for (std::int64_t t = 0; t < planes; ++t) {
    // exact planes at normal offset (t+1) * 2^m / (planes+1)
    std::int64_t off = (t + 1) * side / (planes + 1);
    std::vector<std::int64_t> free(static_cast<std::size_t>(k), 0);
    while (true) {
      Point p{};
      for (int i = 0; i < k; ++i) p[static_cast<std::size_t>(i)] = free[static_cast<std::size_t>(i)];
      for (int i = k; i < d; ++i) p[static_cast<std::size_t>(i)] = off;
      pts.push_back(p);
      std::size_t i = 0;
      for (; i < free.size(); ++i) {
        if (free[i] + 1 < side) { ++free[i]; break; }
        free[i] = 0;
      }
      if (i == free.size() || k == 0) break;
    }
  }
  return GridSet::make(d, m, std::move(pts));
}

}  // namespace

GridSet generate(const CorpusSpec& spec) {
  if (spec.d < 1 || spec.d > kMaxDim) throw Error("dimension out of range");
  if (spec.m < 0) throw Error("negative scale exponent");
  if (spec.family == "full") return generate_full(spec.d, spec.m);
  if (spec.family == "singleton") return GridSet::make(spec.d, spec.m, {Point{}});
  if (spec.family == "ap") {
    if (spec.d != 1) throw Error("ap family is one-dimensional");
    if (spec.count < 1 || spec.count > pow2(spec.m)) throw Error("ap length out of range");
    std::vector<Point> pts;
    for (std::int64_t i = 0; i < spec.count; ++i) pts.push_back(make_point({i}));
    return GridSet::make(1, spec.m, std::move(pts));
  }
  if (spec.family == "gap") return generate_gap(spec);
  if (spec.family == "flat") return generate_flat(spec);
  if (spec.family == "cantor_dyadic") return generate_cantor(spec);
  if (spec.family == "product") return generate_product(spec);
  if (spec.family == "random") return generate_random(spec);
  if (spec.family == "plane_union") return generate_plane_union(spec);
  throw Error("unknown family: " + spec.family);
}

GridMeasureQ generate_measure(const CorpusSpec& spec, WeightRule rule, std::uint64_t seed) {
  GridSet base = generate(spec);
  if (base.empty()) throw Error("empty base set");
  if (rule == WeightRule::uniform) return uniform_measure(base);
  SplitMix64 rng(seed ^ 0x5eedULL);
  std::vector<std::pair<Point, Rational>> atoms;
  Rational total(0);
  for (const Point& p : base.points) {
    int j = static_cast<int>(rng.below(8));
    Rational w(1, 1UL << j);
    w.canonicalize();
    atoms.emplace_back(p, w);
    total += w;
  }
  for (auto& [p, w] : atoms) w /= total;
  return GridMeasureQ::make(base.dim, base.scale_exp, std::move(atoms), true);
}

GridMeasureQ random_measure(int d, int m, std::int64_t atoms, WeightRule rule, std::uint64_t seed) {
  CorpusSpec spec;
  spec.family = "random";
  spec.d = d;
  spec.m = m;
  spec.count = atoms;
  spec.seed = seed;
  return generate_measure(spec, rule, seed + 1);
}

namespace {

void build_tree(std::vector<Point>& out, const Point& prefix, int depth, int d,
                const UniformProfile& profile, SplitMix64& rng) {
  if (depth == profile.S) {
    out.push_back(prefix);
    return;
  }
  std::int64_t cells = pow2(d * profile.L);
  std::int64_t want = profile.branching[static_cast<std::size_t>(depth)];
  if (want < 1 || want > cells) throw Error("branching number out of range");
  // sample `want` distinct child offsets
  std::set<std::int64_t> offs;
  while (static_cast<std::int64_t>(offs.size()) < want)
    offs.insert(static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(cells))));
  for (std::int64_t code : offs) {
    Point child = prefix;
    std::int64_t rem = code;
    for (int i = d - 1; i >= 0; --i) {
      std::int64_t c = rem % pow2(profile.L);
      rem /= pow2(profile.L);
      child[static_cast<std::size_t>(i)] =
          (child[static_cast<std::size_t>(i)] << profile.L) + c;
    }
    build_tree(out, child, depth + 1, d, profile, rng);
  }
}

}  // namespace

GridSet random_uniform_tree(int d, const UniformProfile& profile, std::uint64_t seed) {
  if (profile.S != static_cast<int>(profile.branching.size())) throw Error("bad profile");
  SplitMix64 rng(seed);
  std::vector<Point> pts;
  build_tree(pts, Point{}, 0, d, profile, rng);
  return GridSet::make(d, profile.L * profile.S, std::move(pts));
}

std::vector<CorpusEntry> standard_corpus() {
  std::vector<CorpusEntry> entries;
  auto add = [&](const std::string& name, CorpusSpec spec, GroundTruth truth) {
    entries.push_back({name, std::move(spec), truth});
  };

  {
    CorpusSpec s;
    s.family = "full"; s.d = 1; s.m = 6;
    GroundTruth t;
    t.sigma_star_max = 1.5 / 6.0;
    t.structure_dim = 1;
    add("full-1d", s, t);
  }
  {
    CorpusSpec s;
    s.family = "full"; s.d = 2; s.m = 6;
    GroundTruth t;
    t.sigma_star_max = 2.5 / 6.0;
    t.structure_dim = 2;
    add("full-2d", s, t);
  }
  {
    CorpusSpec s;
    s.family = "singleton"; s.d = 2; s.m = 4;
    GroundTruth t;
    t.sigma_star_max = 0.0;
    t.structure_dim = 0;
    add("singleton", s, t);
  }
  {
    CorpusSpec s;
    s.family = "ap"; s.d = 1; s.m = 8; s.count = 37;
    GroundTruth t;
    t.sigma_star_max = 1.0 / 8.0;
    add("ap-37", s, t);
  }
  {
    CorpusSpec s;
    s.family = "gap"; s.d = 2; s.m = 6;
    s.gap_generators = {make_point({1, 0}), make_point({3, 5})};
    s.gap_lengths = {9, 7};
    GroundTruth t;
    t.sigma_star_max = 2.0 / 6.0;
    add("gap-2d", s, t);
  }
  {
    CorpusSpec s;
    s.family = "flat"; s.d = 2; s.m = 6; s.k = 1;
    GroundTruth t;
    t.sigma_star_max = (1.0 + 5.0) / 6.0;
    t.structure_dim = 1;
    add("flat-1-in-2", s, t);
  }
  {
    CorpusSpec s;
    s.family = "cantor_dyadic"; s.d = 1; s.m = 8;
    s.digit_mask = 0x55;  // digits 1,3,5,7 forced to zero
    GroundTruth t;
    t.porous = true;
    t.porosity_k = 1;
    t.porosity_rho = 1.0 / 16.0;
    // |A+A| = 3^4 over |A| = 2^4: log2(81/16)/8
    t.sigma_star_max = 0.30;
    add("cantor-odd-8", s, t);
  }
  {
    CorpusSpec s;
    CorpusSpec line; line.family = "full"; line.d = 1; line.m = 8;
    CorpusSpec cantor; cantor.family = "cantor_dyadic"; cantor.d = 1; cantor.m = 8; cantor.digit_mask = 0x55;
    s.family = "product"; s.d = 2; s.m = 8; s.children = {line, cantor};
    GroundTruth t;
    add("line-x-cantor", s, t);
  }
  {
    CorpusSpec s;
    s.family = "random"; s.d = 2; s.m = 8; s.count = 300; s.seed = 41;
    GroundTruth t;
    add("random-2d", s, t);
  }
  {
    CorpusSpec s;
    s.family = "random"; s.d = 3; s.m = 4; s.count = 50; s.seed = 42;
    GroundTruth t;
    add("random-3d", s, t);
  }
  {
    CorpusSpec s;
    s.family = "plane_union"; s.d = 2; s.m = 6; s.k = 1; s.count = 2;
    GroundTruth t;
    t.structure_dim = 1;
    add("two-lines", s, t);
  }
  return entries;
}

}  // namespace dsk
