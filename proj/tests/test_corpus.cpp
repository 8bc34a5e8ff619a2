#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dsk/analysis.hpp"
#include "dsk/corpus.hpp"
#include "dsk/geometry.hpp"
#include "dsk/json_io.hpp"
#include "dsk/sumset.hpp"
#include "dsk/uniformize.hpp"

using namespace dsk;

TEST_CASE("generator examples") {
  CorpusSpec single;
  single.family = "singleton";
  single.d = 2;
  single.m = 5;
  CHECK(generate(single).points == std::vector<Point>{Point{}});

  // digit enumeration: m=4, odd digit positions zeroed
  CorpusSpec cantor;
  cantor.family = "cantor_dyadic";
  cantor.d = 1;
  cantor.m = 4;
  cantor.digit_mask = 0x5;
  GridSet c = generate(cantor);
  std::vector<Point> expect{make_point({0}), make_point({1}), make_point({4}), make_point({5})};
  CHECK(c.points == expect);  // {0, 1/16, 1/4, 5/16}

  // product cardinality
  CorpusSpec flat;
  flat.family = "flat";
  flat.d = 2;
  flat.m = 4;
  flat.k = 1;
  CorpusSpec prod;
  prod.family = "product";
  prod.d = 3;
  prod.m = 4;
  prod.children = {flat, cantor};
  CHECK(generate(prod).size() == generate(flat).size() * c.size());
}

TEST_CASE("generation is deterministic") {
  CorpusSpec s;
  s.family = "random";
  s.d = 2;
  s.m = 7;
  s.count = 120;
  s.seed = 20260809;
  GridSet a = generate(s);
  GridSet b = generate(s);
  CHECK(a.points == b.points);
  CHECK(to_json(a).dump() == to_json(b).dump());

  auto mu1 = generate_measure(s, WeightRule::dyadic, 1);
  auto mu2 = generate_measure(s, WeightRule::dyadic, 1);
  CHECK(to_json(mu1).dump() == to_json(mu2).dump());
  auto mu3 = generate_measure(s, WeightRule::dyadic, 2);
  CHECK(to_json(mu1).dump() != to_json(mu3).dump());
}

TEST_CASE("measure generation") {
  CorpusSpec s;
  s.family = "ap";
  s.d = 1;
  s.m = 4;
  s.count = 8;
  auto uni = generate_measure(s, WeightRule::uniform);
  for (const auto& [p, w] : uni.atoms) CHECK(w == Rational(1, 8));
  CHECK(uni.total_mass() == Rational(1));

  auto dy = generate_measure(s, WeightRule::dyadic, 3);
  CHECK(dy.total_mass() == Rational(1));
  CHECK(dy.normalized);

  // product measure equals the product of factor measures atomwise
  CorpusSpec two;
  two.family = "ap";
  two.d = 1;
  two.m = 4;
  two.count = 2;
  CorpusSpec prod;
  prod.family = "product";
  prod.d = 2;
  prod.m = 4;
  prod.children = {two, two};
  auto pm = generate_measure(prod, WeightRule::uniform);
  for (const auto& [p, w] : pm.atoms) CHECK(w == Rational(1, 4));
}

TEST_CASE("corpus ground truths hold") {
  for (const auto& entry : standard_corpus()) {
    CAPTURE(entry.name);
    GridSet x = generate(entry.spec);
    CHECK(!x.empty());
    if (entry.truth.sigma_star_max) {
      double sigma = small_doubling_certificate(x);
      CHECK(sigma <= *entry.truth.sigma_star_max + 1e-9);
    }
    if (entry.truth.porous) {
      double eta = std::pow(0.5, entry.spec.m - 1);
      auto r = porosity_check(x, *entry.truth.porosity_k, *entry.truth.porosity_rho, eta);
      CHECK(r.porous == *entry.truth.porous);
    }
    if (entry.truth.structure_dim) {
      int L = entry.spec.m % 3 == 0 ? 3 : 2;
      auto uni = uniform_subset(x, L);
      auto rep = analyze_structure(uni.subset, L, 0.25, 16);
      for (const auto& sc : rep.scales)
        if (sc.s >= 1) CHECK(sc.k_s == *entry.truth.structure_dim);
      auto ledger = check_theorem2(uni.subset, x.size(), L, 0.25, rep);
      CHECK(ledger.pass);
    }
  }
}

TEST_CASE("corpus spec JSON round trip") {
  for (const auto& entry : standard_corpus()) {
    Json j = to_json(entry.spec);
    CorpusSpec back = corpus_spec_from_json(j);
    CHECK(generate(back).points == generate(entry.spec).points);
  }
}
