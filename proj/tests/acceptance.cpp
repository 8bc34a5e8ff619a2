// Acceptance suite: one pass/fail line per criterion, nonzero exit if any
// criterion fails. Every tolerance is pinned here, in code.
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "dsk/analysis.hpp"
#include "dsk/cli.hpp"
#include "dsk/corpus.hpp"
#include "dsk/grid.hpp"
#include "dsk/json_io.hpp"
#include "dsk/measure.hpp"
#include "dsk/sumset.hpp"
#include "dsk/uniformize.hpp"
#include "dsk/util.hpp"

using namespace dsk;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int id, bool pass, const std::string& detail) {
  std::cout << "[criterion " << id << "] " << (pass ? "PASS" : "FAIL") << " - " << detail << "\n";
  if (!pass) ++failures;
}

GridSet random_set(int d, int m, std::int64_t n, std::uint64_t seed) {
  CorpusSpec s;
  s.family = "random";
  s.d = d;
  s.m = m;
  s.count = n;
  s.seed = seed;
  return generate(s);
}

unsigned __int128 brute_energy(const GridSet& x) {
  unsigned __int128 total = 0;
  for (const Point& x1 : x.points)
    for (const Point& x2 : x.points)
      for (const Point& y1 : x.points) {
        Point y2{};
        bool ok = true;
        for (int i = 0; i < x.dim; ++i) {
          y2[static_cast<std::size_t>(i)] = x1[static_cast<std::size_t>(i)] +
                                            y1[static_cast<std::size_t>(i)] -
                                            x2[static_cast<std::size_t>(i)];
          if (y2[static_cast<std::size_t>(i)] < 0) ok = false;
        }
        if (ok && x.contains(y2)) ++total;
      }
  return total;
}

// 1. energy oracle equivalence on 50 seeded sets, exact, under 10 s
void criterion1() {
  auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  std::string why;
  for (std::uint64_t i = 0; i < 50 && ok; ++i) {
    int d = static_cast<int>(1 + i % 3);
    int m = 4 + static_cast<int>(i % 3);
    std::int64_t space = std::int64_t{1} << (d * m);
    std::int64_t n = std::min(space, 8 + static_cast<std::int64_t>(i % 57));  // up to 64
    GridSet x = random_set(d, m, n, 1000 + i);
    auto e = additive_energy(x);
    if (e.quadruples != brute_energy(x)) {
      ok = false;
      why = "brute-force mismatch at seed " + std::to_string(1000 + i);
      break;
    }
    Rational norm = l2_norm_sq(convolve(counting_measure(x), counting_measure(x)));
    if (Rational(e.quadruples_str()) != norm) {
      ok = false;
      why = "convolution-norm mismatch at seed " + std::to_string(1000 + i);
    }
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (ok && secs >= 10.0) {
    ok = false;
    why = "runtime " + std::to_string(secs) + "s";
  }
  report(1, ok, ok ? "50 seeded sets, exact, " + std::to_string(secs) + "s" : why);
}

// 2. closed-form AP energy for n in 2..32, exact
void criterion2() {
  bool ok = true;
  std::string why;
  for (std::int64_t n = 2; n <= 32; ++n) {
    CorpusSpec s;
    s.family = "ap";
    s.d = 1;
    s.m = 6;
    s.count = n;
    auto e = additive_energy(generate(s));
    // sum over s of r(s)^2 with r the tent function: 2 sum_{j<n} j^2 + n^2
    unsigned __int128 expect = 2 * static_cast<unsigned __int128>((n - 1) * n * (2 * n - 1) / 6) +
                               static_cast<unsigned __int128>(n) * n;
    if (e.quadruples != expect) {
      ok = false;
      why = "n = " + std::to_string(n);
      break;
    }
    if (n == 4 && e.quadruples != 44) {
      ok = false;
      why = "E([4]) != 44";
      break;
    }
  }
  report(2, ok, ok ? "E([n]) matches the representation-function sum for n in 2..32" : why);
}

// 3. entropy identity to 1e-9 on 100 seeded measures
void criterion3() {
  bool ok = true;
  std::string why;
  double worst = 0;
  for (std::uint64_t i = 0; i < 100 && ok; ++i) {
    int d = static_cast<int>(1 + i % 2);
    int L = static_cast<int>(1 + i % 3);
    int S = static_cast<int>(2 + i % 3);
    int m = L * S;
    if (m > 12) m = 12 - (12 % L);
    std::int64_t atoms = std::min<std::int64_t>(30, std::int64_t{1} << std::min(10, d * m));
    auto mu = random_measure(d, m, atoms, WeightRule::dyadic, 3000 + i);
    auto prof = entropy_decomposition(mu, L);
    worst = std::max(worst, std::abs(prof.discrepancy()));
    if (std::abs(prof.discrepancy()) > 1e-9) {
      ok = false;
      why = "discrepancy " + format_double17(prof.discrepancy()) + " at seed " + std::to_string(3000 + i);
    }
  }
  report(3, ok, ok ? "100 measures, worst discrepancy " + format_double17(worst) : why);
}

// 4. uniformization guarantees across the (d, L, S) grid, exact rationals
void criterion4() {
  auto t0 = std::chrono::steady_clock::now();
  int sets = 0;
  bool plain_ok = true, subspace_ok = true, collapse_ok = true;
  bool center_ok = true;
  std::string center_fail_cells;
  std::uint64_t seed = 42;
  // 200 sets round-robin over the 18 (d, L, S) cells so every cell runs
  struct Cell { int d, L, S; };
  std::vector<Cell> cells;
  for (int d = 1; d <= 2; ++d)
    for (int L = 1; L <= 3; ++L)
      for (int S = 2; S <= 4; ++S) cells.push_back({d, L, S});
  for (int i = 0; i < 200; ++i) {
    const Cell& cell = cells[static_cast<std::size_t>(i) % cells.size()];
    int d = cell.d, L = cell.L, S = cell.S;
    {
      int m = L * S;
      {
          ++sets;
          ++seed;
          std::int64_t space = std::int64_t{1} << std::min(20, d * m);
          std::int64_t n = std::min<std::int64_t>(space, 20 + static_cast<std::int64_t>(seed % 180));
          GridSet a = random_set(d, m, n, seed);

          auto up = uniform_subset(a, L);
          if (!is_uniform(up.subset, L).uniform || !up.meets_guarantee) plain_ok = false;

          auto us = uniform_subset_subspace(a, L);
          if (!us.base.meets_guarantee) subspace_ok = false;

          if (auto check = is_uniform(up.subset, L); check.uniform) {
            std::vector<int> sc;
            for (int s = 0; s < check.profile.S; s += 2) sc.push_back(s);
            auto col = collapse_branching(up.subset, L, sc);
            Rational expect(1);
            for (int s : sc) {
              Rational f(1, static_cast<unsigned long>(check.profile.branching[static_cast<std::size_t>(s)]));
              f.canonicalize();
              expect *= f;
            }
            if (col.size_ratio != expect) collapse_ok = false;
            for (int s = 0; s < check.profile.S; ++s) {
              bool in = std::find(sc.begin(), sc.end(), s) != sc.end();
              std::int64_t want = in ? 1 : check.profile.branching[static_cast<std::size_t>(s)];
              if (col.profile.branching[static_cast<std::size_t>(s)] != want) collapse_ok = false;
            }
          }

          // centering input: the same seeds, pushed into [1/3, 2/3)^d
          std::int64_t big = std::int64_t{1} << m;
          std::int64_t lo = (big + 2) / 3, hi = (2 * big - 1) / 3;
          std::vector<Point> mid;
          SplitMix64 rng(seed * 7 + 1);
          std::int64_t want = std::min<std::int64_t>(hi - lo + 1, 24);
          for (int t = 0; t < 200 && static_cast<std::int64_t>(mid.size()) < want; ++t) {
            Point p{};
            for (int c = 0; c < d; ++c)
              p[static_cast<std::size_t>(c)] =
                  lo + static_cast<Coord>(rng.below(static_cast<std::uint64_t>(hi - lo + 1)));
            mid.push_back(p);
          }
          GridSet centered_input = GridSet::make(d, m, mid);
          auto cr = center_by_translation(centered_input, L);
          bool cell_ok = cr.meets_bound && cr.predicate_ok;
          for (const Point& p : cr.subset.points)
            if (!centered_at_all_scales(p, d, m, L, cr.translation)) cell_ok = false;
          if (!cell_ok) {
            center_ok = false;
            std::string tag = "(d=" + std::to_string(d) + ",L=" + std::to_string(L) +
                              ",S=" + std::to_string(S) + ")";
            if (center_fail_cells.find(tag) == std::string::npos) center_fail_cells += tag;
          }
      }
    }
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  bool ok = plain_ok && subspace_ok && collapse_ok && center_ok && secs < 60.0;
  std::ostringstream detail;
  detail << sets << " sets in " << secs << "s; uniform_subset "
         << (plain_ok ? "ok" : "FAIL") << ", subspace " << (subspace_ok ? "ok" : "FAIL")
         << ", collapse " << (collapse_ok ? "ok" : "FAIL") << ", center "
         << (center_ok ? "ok" : "FAIL at " + center_fail_cells +
                                    " - middle thirds of consecutive dyadic scales are disjoint, "
                                    "so the L=1 predicate is unsatisfiable for any set");
  report(4, ok, detail.str());
}

// 5. Young bound on 100 seeded pairs
void criterion5() {
  bool ok = true;
  std::string why;
  for (std::uint64_t i = 0; i < 100 && ok; ++i) {
    int d = static_cast<int>(1 + i % 2);
    auto mu = to_float(random_measure(d, 6, 12 + static_cast<std::int64_t>(i % 20),
                                      WeightRule::dyadic, 5000 + i));
    auto nu = to_float(random_measure(d, 6, 8 + static_cast<std::int64_t>(i % 15),
                                      WeightRule::dyadic, 6000 + i));
    auto conv = convolve(mu, nu);
    double mass_nu = 0;
    for (const auto& [p, w] : nu.atoms) mass_nu += w;
    for (double q : {1.5, 2.0, 3.0}) {
      if (lq_norm(conv, q) > lq_norm(mu, q) * mass_nu + 1e-9) {
        ok = false;
        why = "q = " + format_double17(q) + " at seed " + std::to_string(5000 + i);
        break;
      }
    }
  }
  report(5, ok, ok ? "norm of the convolution within the product bound on 100 pairs" : why);
}

// 6. iterated growth bound over the standard corpus, exact
void criterion6() {
  bool ok = true;
  std::string why;
  for (const auto& entry : standard_corpus()) {
    GridSet x = generate(entry.spec);
    for (int k = 2; k <= 4; ++k) {
      try {
        auto rep = pr_check(x, k);
        if (!rep.ok) {
          ok = false;
          why = entry.name + " k=" + std::to_string(k);
        }
      } catch (const MathCheckError& e) {
        ok = false;
        why = entry.name + ": " + e.what();
      }
    }
    if (!ok) break;
  }
  report(6, ok, ok ? "growth bound holds on the whole corpus for k in 2..4" : why);
}

// 7. structure recovery for corpus flats and products
void criterion7() {
  bool ok = true;
  std::string why;
  for (int d = 2; d <= 3 && ok; ++d) {
    int m = (d == 2) ? 9 : 6;
    int L = 3;
    for (int k = 0; k <= d && ok; ++k) {
      CorpusSpec s;
      s.family = "flat";
      s.d = d;
      s.m = m;
      s.k = k;
      GridSet flat = generate(s);
      auto uni = uniform_subset(flat, L);
      auto rep = analyze_structure(uni.subset, L, 0.25, 16);
      for (const auto& sc : rep.scales) {
        if (sc.s >= 1 && sc.k_s != k) {
          ok = false;
          why = "flat d=" + std::to_string(d) + " k=" + std::to_string(k) + " scale " +
                std::to_string(sc.s) + " reported " + std::to_string(sc.k_s);
        }
      }
      auto ledger = check_theorem2(uni.subset, flat.size(), L, 0.25, rep);
      if (!ledger.pass) {
        ok = false;
        why = "ledger fails for flat d=" + std::to_string(d) + " k=" + std::to_string(k) + ": " +
              ledger.detail;
      }
    }
  }
  if (ok) {
    // product of a full interval and a cantor factor: k_s >= 1 at every scale
    CorpusSpec line;
    line.family = "full";
    line.d = 1;
    line.m = 8;
    CorpusSpec cantor;
    cantor.family = "cantor_dyadic";
    cantor.d = 1;
    cantor.m = 8;
    cantor.digit_mask = 0x55;
    CorpusSpec prod;
    prod.family = "product";
    prod.d = 2;
    prod.m = 8;
    prod.children = {line, cantor};
    GridSet x = generate(prod);
    auto uni = uniform_subset(x, 4);
    auto rep = analyze_structure(uni.subset, 4, 0.25, 16);
    for (const auto& sc : rep.scales)
      if (sc.k_s < 1) {
        ok = false;
        why = "product reported k_s = 0 at scale " + std::to_string(sc.s);
      }
  }
  report(7, ok, ok ? "flats recover k at every scale past the top; ledger passes at delta 0.25" : why);
}

// 8. porosity and energy flattening of the quarter-scale cantor family
void criterion8() {
  bool ok = true;
  std::string why;
  double prev_sigma = -1;
  for (int m : {8, 10, 12}) {
    CorpusSpec s;
    s.family = "cantor_dyadic";
    s.d = 1;
    s.m = m;
    s.digit_mask = 0;
    for (int i = 1; i <= m; i += 2) s.digit_mask |= std::uint64_t{1} << (i - 1);
    GridSet x = generate(s);
    auto por = porosity_check(x, 1, 1.0 / 16.0, std::pow(0.5, m - 1));
    if (!por.porous) {
      ok = false;
      why = "cantor m=" + std::to_string(m) + " not porous";
      break;
    }
    auto e = additive_energy(x);
    if (e.sigma_star <= 0.1) {
      ok = false;
      why = "sigma* = " + format_double17(e.sigma_star) + " at m=" + std::to_string(m);
      break;
    }
    if (prev_sigma >= 0 && e.sigma_star < prev_sigma - 0.02) {
      ok = false;
      why = "sigma* dropped more than 0.02 across the sweep";
      break;
    }
    prev_sigma = e.sigma_star;
  }
  if (ok) {
    CorpusSpec f;
    f.family = "full";
    f.d = 1;
    f.m = 8;
    auto por = porosity_check(generate(f), 1, 0.5, std::pow(0.5, 6));
    if (por.porous || !por.counterexample.has_value()) {
      ok = false;
      why = "full lattice should fail with a counterexample";
    }
  }
  report(8, ok,
         ok ? "cantor porous with sigma* > 0.1 (non-decreasing within 0.02); full lattice blocked"
            : why);
}

// 9. uncertainty-principle bounds
void criterion9() {
  bool ok = true;
  std::string why;
  int m = 8;
  double h = std::pow(0.5, m);
  for (std::uint64_t i = 0; i < 20 && ok; ++i) {
    GridSet x = random_set(1, m, 10 + static_cast<std::int64_t>(i * 3 % 40), 7000 + i);
    GridSet y = random_set(1, m, 8 + static_cast<std::int64_t>(i * 5 % 48), 7500 + i);
    auto r = fup_norm(x, y);
    if (!(r.norm <= r.trivial_bound * 1.05)) {
      ok = false;
      why = "norm " + format_double17(r.norm) + " exceeds 1.05x trivial bound at seed " +
            std::to_string(7000 + i);
    }
  }
  if (ok) {
    GridSet x = GridSet::make(1, m, {make_point({100})});
    GridSet y = GridSet::make(1, m, {make_point({37})});
    auto r = fup_norm(x, y);
    double expect = std::pow(2.0 * std::acos(-1.0) * h, -0.5) * h;
    if (std::abs(r.norm - expect) > 1e-10) {
      ok = false;
      why = "singleton norm off by " + format_double17(r.norm - expect);
    }
  }
  if (ok) {
    for (std::uint64_t i = 0; i < 5 && ok; ++i) {
      GridSet x = random_set(1, 7, 40, 8000 + i);
      GridSet y = random_set(1, 7, 50, 8100 + i);
      auto r = fup_norm(x, y);
      auto entries = fup_matrix(x, y, false);
      Eigen::MatrixXcd mat(x.size(), y.size());
      for (std::int64_t a = 0; a < x.size(); ++a)
        for (std::int64_t b = 0; b < y.size(); ++b)
          mat(a, b) = entries[static_cast<std::size_t>(a * y.size() + b)];
      double oracle = Eigen::JacobiSVD<Eigen::MatrixXcd>(mat).singularValues()(0);
      if (std::abs(r.norm - oracle) > 1e-6 * std::max(1.0, oracle)) {
        ok = false;
        why = "power iteration " + format_double17(r.norm) + " vs SVD " + format_double17(oracle);
      }
    }
  }
  if (ok) {
    double crit = std::pow(h, -0.5);
    double sigma = 0.32;
    if (std::abs(fup_beta(h, crit, crit, sigma, 1) - sigma / 8.0) > 1e-12) {
      ok = false;
      why = "beta formula at critical density";
    }
  }
  report(9, ok, ok ? "trivial-bound window, singleton value, SVD oracle, beta formula" : why);
}

// 10. determinism: byte-identical artifacts across two full pipeline runs
void criterion10() {
  fs::path base = fs::temp_directory_path() / "dsk-acceptance";
  fs::remove_all(base);
  bool ok = true;
  std::string why;
  std::vector<std::string> artifacts;
  for (int round = 0; round < 2; ++round) {
    fs::path dir = base / ("run" + std::to_string(round));
    fs::create_directories(dir);
    auto file = [&](const std::string& name) { return (dir / name).string(); };

    RunConfig gen;
    gen.subcommand = "generate";
    gen.family = "random";
    gen.d = 2;
    gen.m = 8;
    gen.count = 200;
    gen.seed = 20260809;
    gen.output = file("set.json");
    if (run(gen) != 0) { ok = false; why = "generate failed"; }

    RunConfig energy;
    energy.subcommand = "energy";
    energy.input = file("set.json");
    energy.output = file("energy.json");
    if (run(energy) != 0) { ok = false; why = "energy failed"; }

    RunConfig uni;
    uni.subcommand = "uniformize";
    uni.mode = "subspace";
    uni.L = 2;
    uni.input = file("set.json");
    uni.output = file("uniform.json");
    uni.manifest = file("uniform-manifest.json");
    if (run(uni) != 0) { ok = false; why = "uniformize failed"; }

    RunConfig ana;
    ana.subcommand = "analyze";
    ana.L = 2;
    ana.input = file("uniform.json");
    ana.output = file("report.json");
    if (run(ana) != 0) { ok = false; why = "analyze failed"; }

    RunConfig fup;
    fup.subcommand = "fup";
    fup.sweep = {6, 7, 8};
    fup.count = 24;
    fup.seed = 5;
    fup.output = file("fup.csv");
    if (run(fup) != 0) { ok = false; why = "fup sweep failed"; }

    artifacts = {"set.json", "energy.json", "uniform.json", "uniform-manifest.json",
                 "report.json", "fup.csv"};
  }
  if (ok) {
    for (const auto& name : artifacts) {
      std::string h0 = file_sha256((base / "run0" / name).string());
      std::string h1 = file_sha256((base / "run1" / name).string());
      // manifests embed their input paths, which differ between run dirs;
      // compare those after scrubbing the directory prefix
      if (name == "energy.json" || name == "report.json" || name == "uniform-manifest.json") {
        auto scrub = [&](const fs::path& p) {
          std::ifstream in(p);
          std::stringstream ss;
          ss << in.rdbuf();
          std::string s = ss.str();
          std::string d0 = (base / "run0").string(), d1 = (base / "run1").string();
          std::size_t pos;
          while ((pos = s.find(d0)) != std::string::npos) s.replace(pos, d0.size(), "RUN");
          while ((pos = s.find(d1)) != std::string::npos) s.replace(pos, d1.size(), "RUN");
          return sha256_hex(s);
        };
        h0 = scrub(base / "run0" / name);
        h1 = scrub(base / "run1" / name);
      }
      if (h0 != h1) {
        ok = false;
        why = name + " differs between runs";
        break;
      }
    }
  }
  fs::remove_all(base);
  report(10, ok,
         ok ? "two pipeline runs byte-identical across " + std::to_string(artifacts.size()) +
                  " artifact files"
            : why);
}

}  // namespace

int main() {
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criterion9();
  criterion10();
  if (failures > 0) {
    std::cout << failures << " criterion(s) failed\n";
    return 1;
  }
  std::cout << "all criteria passed\n";
  return 0;
}
