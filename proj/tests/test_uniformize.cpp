#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dsk/corpus.hpp"
#include "dsk/geometry.hpp"
#include "dsk/grid.hpp"
#include "dsk/uniformize.hpp"

using namespace dsk;

namespace {

GridSet random_set(int d, int m, std::int64_t n, std::uint64_t seed) {
  CorpusSpec s;
  s.family = "random";
  s.d = d;
  s.m = m;
  s.count = n;
  s.seed = seed;
  return generate(s);
}

GridSet full_lattice(int d, int m) {
  CorpusSpec s;
  s.family = "full";
  s.d = d;
  s.m = m;
  return generate(s);
}

bool subset_of(const GridSet& a, const GridSet& b) {
  for (const Point& p : a.points)
    if (!b.contains(p)) return false;
  return true;
}

GridSet middle_third_random(int d, int m, std::int64_t want, std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::int64_t big = std::int64_t{1} << m;
  std::int64_t lo = (big + 2) / 3;        // smallest p with 3p >= 2^m
  std::int64_t hi = (2 * big - 1) / 3;    // largest p with 3p < 2^{m+1}
  std::vector<Point> pts;
  for (std::int64_t i = 0; i < want * 4 && static_cast<std::int64_t>(pts.size()) < want; ++i) {
    Point p{};
    for (int c = 0; c < d; ++c)
      p[static_cast<std::size_t>(c)] = lo + static_cast<Coord>(rng.below(static_cast<std::uint64_t>(hi - lo + 1)));
    pts.push_back(p);
  }
  return GridSet::make(d, m, std::move(pts));
}

}  // namespace

TEST_CASE("uniform subset basics") {
  GridSet full = full_lattice(1, 4);
  auto r = uniform_subset(full, 2);
  CHECK(r.subset.points == full.points);
  CHECK(r.size_ratio == Rational(1));

  GridSet single = GridSet::make(2, 4, {make_point({3, 7})});
  auto rs = uniform_subset(single, 2);
  CHECK(rs.subset.size() == 1);
  CHECK(rs.profile.branching == std::vector<std::int64_t>{1, 1});

  CHECK_THROWS_AS(uniform_subset(full, 3), Error);
}

TEST_CASE("uniform subset guarantee on random sets") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    // d=1: 50 of 64 cells; d=2: 200 of 4096
    GridSet a = (seed % 2 == 0) ? random_set(1, 6, 50, 2000 + seed)
                                : random_set(2, 6, 200, 2000 + seed);
    auto r = uniform_subset(a, 2);
    CHECK(subset_of(r.subset, a));
    CHECK(is_uniform(r.subset, 2).uniform);
    CHECK(r.meets_guarantee);
    // exact rational comparison against (2Ld)^-S
    CHECK(r.size_ratio >= r.guarantee);
  }
}

TEST_CASE("uniform subset is idempotent on its own output") {
  GridSet a = random_set(2, 6, 300, 31);
  auto r1 = uniform_subset(a, 2);
  auto r2 = uniform_subset(r1.subset, 2);
  CHECK(r2.subset.points == r1.subset.points);
  CHECK(r2.size_ratio == Rational(1));
}

TEST_CASE("value-function uniformization") {
  GridSet a = random_set(1, 6, 48, 77);
  int S = 3, L = 2;

  // constant function reduces to plain uniformization
  std::vector<ValueFunction> constant(
      static_cast<std::size_t>(S),
      ValueFunction{"const", 1, [](const GridSet&) { return 0; }});
  auto rc = uniform_subset_general(a, L, constant);
  auto rp = uniform_subset(a, L);
  CHECK(rc.subset.points == rp.subset.points);

  // parity of the least child coordinate varies across cubes
  std::vector<ValueFunction> parity(
      static_cast<std::size_t>(S),
      ValueFunction{"least-child-parity", 2,
                    [](const GridSet& y) { return static_cast<int>(y.points.front()[0] % 2); }});
  auto rg = uniform_subset_general(a, L, parity);
  CHECK(subset_of(rg.subset, a));
  CHECK(is_uniform(rg.subset, L).uniform);
  CHECK(rg.meets_guarantee);

  // constancy of the pigeonholed value on the final child sets, checked
  // exhaustively per scale
  for (int s = 0; s < S; ++s) {
    auto pairs = cube_children(rg.subset, s * L, (s + 1) * L);
    std::size_t i = 0;
    int expect = -1;
    while (i < pairs.size()) {
      std::size_t j = i;
      std::vector<Point> rel;
      while (j < pairs.size() && pairs[j].first == pairs[i].first) {
        Point q{};
        for (int c = 0; c < 1; ++c)
          q[static_cast<std::size_t>(c)] = pairs[j].second[static_cast<std::size_t>(c)] -
                                           (pairs[i].first[static_cast<std::size_t>(c)] << L);
        rel.push_back(q);
        ++j;
      }
      GridSet child = GridSet::make(1, L, rel);
      int v = static_cast<int>(child.points.front()[0] % 2);
      if (expect < 0) expect = v;
      CHECK(v == expect);
      i = j;
    }
    CHECK(expect == rg.per_scale_values[static_cast<std::size_t>(s)]);
  }
}

TEST_CASE("guarantees hold on biased subsets with band-boundary child counts") {
  // subsets of uniform trees whose branching sits on dyadic band boundaries
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    UniformProfile p;
    p.L = 2;
    p.S = 3;
    p.branching = {4, 15, 16};  // 2^2, 2^4 - 1, 2^dL with d=2, L=2
    GridSet tree = random_uniform_tree(2, p, 9000 + seed);
    SplitMix64 rng(9100 + seed);
    std::vector<Point> kept;
    for (const Point& q : tree.points)
      if (rng.below(10) < 3 + seed % 6) kept.push_back(q);
    if (kept.empty()) continue;
    GridSet a = GridSet::make(2, 6, kept);
    auto r = uniform_subset(a, 2);            // throws if the bound is missed
    CHECK(r.meets_guarantee);
    auto s = uniform_subset_subspace(a, 2);
    CHECK(s.base.meets_guarantee);
    auto c = collapse_branching(r.subset, 2, {1});
    CHECK(c.meets_guarantee);
  }
  // and a third dimension
  UniformProfile p3;
  p3.L = 1;
  p3.S = 4;
  p3.branching = {8, 3, 5, 2};
  GridSet tree3 = random_uniform_tree(3, p3, 77);
  SplitMix64 rng(78);
  std::vector<Point> kept;
  for (const Point& q : tree3.points)
    if (rng.below(2) == 0) kept.push_back(q);
  GridSet a3 = GridSet::make(3, 4, kept);
  auto r3 = uniform_subset(a3, 1);
  CHECK(r3.meets_guarantee);
  CHECK(is_uniform(r3.subset, 1).uniform);
}

TEST_CASE("general uniformization with the slab-dimension code matches the subspace mode") {
  GridSet a = random_set(2, 6, 250, 55);
  int L = 3, S = 2;
  ValueFunction dim_code{"slab-dimension", 3,
                         [L](const GridSet& y) { return min_dimension(y, L).first; }};
  std::vector<ValueFunction> fns(static_cast<std::size_t>(S), dim_code);
  auto general = uniform_subset_general(a, L, fns);
  auto subspace = uniform_subset_subspace(a, L);
  CHECK(general.subset.points == subspace.base.subset.points);
  CHECK(general.per_scale_values == subspace.dims);

  // idempotent on its own output
  auto again = uniform_subset_subspace(subspace.base.subset, L);
  CHECK(again.base.subset.points == subspace.base.subset.points);
}

TEST_CASE("subspace uniformization") {
  // a line keeps slab dimension <= 1 at every scale
  CorpusSpec s;
  s.family = "plane_union";
  s.d = 2;
  s.m = 6;
  s.k = 1;
  s.count = 1;
  auto line = generate(s);
  auto r = uniform_subset_subspace(line, 3);
  REQUIRE(r.dims.size() == 2);
  for (int v : r.dims) CHECK(v <= 1);
  CHECK(r.base.meets_guarantee);

  // full lattice: slab dimension d at every scale for L >= 3
  auto full = uniform_subset_subspace(full_lattice(2, 6), 3);
  for (int v : full.dims) CHECK(v == 2);

  // singleton: all zero
  GridSet single = GridSet::make(2, 6, {make_point({11, 38})});
  auto rs = uniform_subset_subspace(single, 3);
  for (int v : rs.dims) CHECK(v == 0);
}

TEST_CASE("centering: translation puts points in middle thirds") {
  for (int L : {2, 3}) {
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
      int S = 2 + static_cast<int>(seed % 3);
      int m = L * S;
      GridSet a = middle_third_random(1 + static_cast<int>(seed % 2), m, 40, 3000 + seed);
      auto r = center_by_translation(a, L);
      CHECK(r.meets_bound);
      CHECK(r.predicate_ok);
      CHECK(subset_of(r.subset, a));
      for (const auto& y : r.translation) {
        CHECK(3 * y >= -1);
        CHECK(3 * y < 1);
      }
    }
  }
}

TEST_CASE("centering: singleton always survives for L >= 2") {
  GridSet single = GridSet::make(2, 4, {make_point({8, 8})});  // the center point
  auto r = center_by_translation(single, 2);
  CHECK(r.subset.size() == 1);
  CHECK(r.predicate_ok);
  CHECK(r.meets_bound);
}

TEST_CASE("centering: the exact predicate is decidable in rationals") {
  std::vector<Rational> y{Rational(1, 48)};
  // 5/16 + 1/48 = 1/3 exactly: on the closed lower edge of the middle third
  CHECK(centered_at_all_scales(make_point({5}), 1, 4, 2, y));
  // 4/16 + 1/48 < 1/3: outside
  CHECK_FALSE(centered_at_all_scales(make_point({4}), 1, 4, 2, y));
}

TEST_CASE("centering honestly reports the impossible L = 1 case") {
  GridSet a = middle_third_random(1, 3, 2, 99);
  auto r = center_by_translation(a, 1);
  // no translation can center two consecutive scales; the op must not
  // pretend otherwise
  CHECK_FALSE(r.meets_bound);
  CHECK(r.subset.empty());
}

TEST_CASE("centering rejects inputs outside the middle of the unit cube") {
  GridSet a = GridSet::make(1, 4, {make_point({1})});
  CHECK_THROWS_AS(center_by_translation(a, 2), Error);
}

TEST_CASE("branching collapse") {
  GridSet full = full_lattice(1, 4);

  auto none = collapse_branching(full, 2, {});
  CHECK(none.subset.points == full.points);

  auto top = collapse_branching(full, 2, {0});
  CHECK(top.output_size == 4);
  CHECK(top.profile.branching == std::vector<std::int64_t>{1, 4});
  CHECK(top.size_ratio == Rational(1, 4));

  auto all = collapse_branching(full, 2, {0, 1});
  CHECK(all.output_size == 1);

  GridSet nonuniform = GridSet::make(1, 4, {make_point({0}), make_point({1}), make_point({4})});
  CHECK_THROWS_AS(collapse_branching(nonuniform, 2, {0}), Error);
}

TEST_CASE("collapse keeps off-scale child sets bit-identical") {
  UniformProfile p;
  p.L = 2;
  p.S = 3;
  p.branching = {3, 4, 2};
  GridSet a = random_uniform_tree(2, p, 17);
  auto r = collapse_branching(a, 2, {1});
  CHECK(r.profile.branching == std::vector<std::int64_t>{3, 1, 2});
  CHECK(r.size_ratio == Rational(1, 4));

  // scale 0 children of surviving cubes coincide with the input's
  auto before = cube_children(a, 0, 2);
  auto after = cube_children(r.subset, 0, 2);
  CHECK(before == after);  // collapsing at scale 1 keeps scale-0 structure

  // scale 2 child sets: for each surviving depth-2L cube, identical
  auto before2 = cube_children(a, 4, 6);
  auto after2 = cube_children(r.subset, 4, 6);
  for (const auto& pr : after2)
    CHECK(std::binary_search(before2.begin(), before2.end(), pr));
  // and each surviving parent keeps its full child list
  std::size_t i = 0;
  while (i < after2.size()) {
    Point parent = after2[i].first;
    std::size_t cnt_after = 0, cnt_before = 0;
    for (const auto& pr : after2)
      if (pr.first == parent) ++cnt_after;
    for (const auto& pr : before2)
      if (pr.first == parent) ++cnt_before;
    CHECK(cnt_after == cnt_before);
    while (i < after2.size() && after2[i].first == parent) ++i;
  }
}
