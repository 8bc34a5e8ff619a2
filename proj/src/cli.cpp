#include "dsk/cli.hpp"

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "dsk/json_io.hpp"
#include "dsk/util.hpp"

namespace dsk {

namespace {

Json config_to_json(const RunConfig& c) {
  Json j;
  j["subcommand"] = c.subcommand;
  if (!c.input.empty()) j["input"] = c.input;
  if (!c.input2.empty()) j["input2"] = c.input2;
  if (!c.output.empty()) j["output"] = c.output;
  j["L"] = c.L;
  j["delta"] = c.delta;
  j["sigma"] = c.sigma;
  j["rho"] = c.rho;
  j["eta"] = c.eta;
  j["lambda"] = c.lambda;
  j["k"] = c.k;
  j["q"] = c.q;
  j["h_exp"] = c.h_exp;
  j["net_res"] = c.net_res;
  j["backend"] = c.backend;
  j["threads"] = c.threads;
  j["seed"] = c.seed;
  if (!c.family.empty()) {
    j["family"] = c.family;
    j["d"] = c.d;
    j["m"] = c.m;
    j["count"] = c.count;
    j["digit_mask"] = c.digit_mask;
  }
  if (c.subcommand == "uniformize") {
    j["mode"] = c.mode;
    j["valuefn"] = c.valuefn;
    j["scales"] = c.scales;
  }
  if (c.subcommand == "verify") {
    j["theorem"] = c.theorem;
    j["demo"] = c.demo;
  }
  return j;
}

void emit(const RunConfig& c, const Json& result,
          const std::vector<std::pair<std::string, std::string>>& hashes) {
  Json manifest = make_manifest(config_to_json(c), hashes, result);
  if (!c.output.empty()) write_file(c.output, manifest);
  else std::cout << manifest.dump(2) << "\n";
}

GridSet load_set(const std::string& path) {
  if (path.empty()) throw Error("missing --input");
  return gridset_from_json(parse_file(path));
}

CorpusSpec spec_from_config(const RunConfig& c) {
  if (!c.spec_path.empty()) return corpus_spec_from_json(parse_file(c.spec_path));
  if (c.family.empty()) throw Error("generate needs --family or --spec");
  CorpusSpec s;
  s.family = c.family;
  s.d = c.d;
  s.m = c.m;
  s.k = c.k;
  s.count = c.count;
  s.seed = c.seed;
  s.digit_mask = c.digit_mask;
  return s;
}

int cmd_generate(const RunConfig& c) {
  CorpusSpec spec = spec_from_config(c);
  GridSet set = generate(spec);
  if (c.output.empty()) throw Error("generate needs --output");
  write_file(c.output, to_json(set));
  if (!c.manifest.empty()) {
    Json result;
    result["spec"] = to_json(spec);
    result["size"] = set.size();
    Json manifest = make_manifest(config_to_json(c), {{c.output, file_sha256(c.output)}}, result);
    write_file(c.manifest, manifest);
  }
  return 0;
}

int cmd_energy(const RunConfig& c) {
  GridSet x = load_set(c.input);
  EnergyResult e = additive_energy(x);
  emit(c, to_json(e), {{c.input, file_sha256(c.input)}});
  return 0;
}

int cmd_sumset(const RunConfig& c) {
  GridSet a = load_set(c.input);
  GridSet b = c.input2.empty() ? a : load_set(c.input2);
  GridSet s = sumset(a, b);
  if (!c.output.empty()) write_file(c.output, to_json(s));
  else std::cout << to_json(s).dump(2) << "\n";
  return 0;
}

int cmd_doubling(const RunConfig& c) {
  GridSet a = load_set(c.input);
  Json result;
  result["sigma_star"] = small_doubling_certificate(a);
  result["size"] = a.size();
  result["doubling_size"] = sumset(a, a).size();
  if (c.pr_k >= 2) {
    PrReport pr = pr_check(a, c.pr_k);
    Json prj;
    prj["k"] = pr.k;
    prj["K"] = pr.K;
    prj["iterated_size"] = pr.iterated_size;
    prj["slack_log2"] = pr.slack_log2;
    prj["ok"] = pr.ok;
    result["pr"] = std::move(prj);
  }
  emit(c, result, {{c.input, file_sha256(c.input)}});
  return 0;
}

int cmd_uniformize(const RunConfig& c) {
  GridSet a = load_set(c.input);
  Json result;
  GridSet out_set;
  bool ok = true;
  if (c.mode == "plain") {
    auto r = uniform_subset(a, c.L);
    result = to_json(r, c.mode);
    out_set = r.subset;
  } else if (c.mode == "valuefn") {
    ValueFunction fn;
    if (c.valuefn == "parity") {
      fn = {"child-count-parity", 2, [](const GridSet& y) { return static_cast<int>(y.size() % 2); }};
    } else if (c.valuefn == "dim") {
      int L = c.L;
      fn = {"slab-dimension", a.dim + 1, [L](const GridSet& y) { return min_dimension(y, L).first; }};
    } else {
      throw Error("unknown value function: " + c.valuefn);
    }
    std::vector<ValueFunction> fns(static_cast<std::size_t>(a.scale_exp / std::max(1, c.L)), fn);
    auto r = uniform_subset_general(a, c.L, fns);
    result = to_json(r, c.mode);
    out_set = r.subset;
  } else if (c.mode == "subspace") {
    auto r = uniform_subset_subspace(a, c.L);
    result = to_json(r.base, c.mode);
    result["dims"] = r.dims;
    out_set = r.base.subset;
  } else if (c.mode == "center") {
    auto r = center_by_translation(a, c.L);
    result = to_json(r);
    out_set = r.subset;
    ok = r.meets_bound && r.predicate_ok;
  } else if (c.mode == "collapse") {
    auto r = collapse_branching(a, c.L, c.scales);
    result = to_json(r, c.mode);
    out_set = r.subset;
  } else {
    throw Error("unknown mode: " + c.mode);
  }
  if (!c.output.empty()) write_file(c.output, to_json(out_set));
  Json wrapped = make_manifest(config_to_json(c), {{c.input, file_sha256(c.input)}}, result);
  if (!c.manifest.empty()) write_file(c.manifest, wrapped);
  else std::cout << wrapped.dump(2) << "\n";
  return ok ? 0 : 2;
}

int cmd_analyze(const RunConfig& c) {
  GridSet a = load_set(c.input);
  if (c.auto_uniformize) a = uniform_subset(a, c.L).subset;
  StructureReport rep = analyze_structure(a, c.L, c.delta, c.net_res, c.threads);
  emit(c, to_json(rep), {{c.input, file_sha256(c.input)}});
  return 0;
}

int cmd_fup(const RunConfig& c) {
  FupOptions opts;
  opts.sigma = c.sigma;
  opts.threads = c.threads;
  if (!c.sweep.empty()) {
    // seeded random pairs per h, CSV out
    std::ostringstream csv;
    csv << "h,x_count,y_count,norm,trivial_bound,beta_measured,beta_formula\n";
    for (int e : c.sweep) {
      CorpusSpec sx;
      sx.family = "random";
      sx.d = 1;
      sx.m = e;
      sx.count = std::max<std::int64_t>(2, c.count);
      sx.seed = c.seed * 2 + 1;
      CorpusSpec sy = sx;
      sy.seed = c.seed * 2 + 2;
      FupResult r = fup_norm(generate(sx), generate(sy), opts);
      csv << format_double17(r.h) << "," << r.x_count << "," << r.y_count << ","
          << format_double17(r.norm) << "," << format_double17(r.trivial_bound) << ","
          << format_double17(r.beta_measured) << "," << format_double17(r.beta_formula) << "\n";
    }
    if (c.output.empty()) std::cout << csv.str();
    else {
      std::ofstream out(c.output);
      if (!out) throw Error("cannot write " + c.output);
      out << csv.str();
    }
    return 0;
  }
  if (c.input.empty()) {
    // no input: seeded random pair at h = 2^-h_exp
    CorpusSpec sx;
    sx.family = "random";
    sx.d = 1;
    sx.m = c.h_exp;
    sx.count = std::max<std::int64_t>(2, c.count);
    sx.seed = c.seed * 2 + 1;
    CorpusSpec sy = sx;
    sy.seed = c.seed * 2 + 2;
    FupResult r = fup_norm(generate(sx), generate(sy), opts);
    emit(c, to_json(r), {});
    return 0;
  }
  GridSet x = load_set(c.input);
  GridSet y = c.input2.empty() ? x : load_set(c.input2);
  FupResult r = fup_norm(x, y, opts);
  emit(c, to_json(r), {{c.input, file_sha256(c.input)}});
  return 0;
}

int cmd_energy_experiment(const RunConfig& c) {
  GridSet x = load_set(c.input);
  auto rep = energy_structure_experiment(x, c.L, c.delta, c.sigma, c.net_res);
  emit(c, to_json(rep), {{c.input, file_sha256(c.input)}});
  return 0;
}

int cmd_verify(const RunConfig& c) {
  if (c.theorem == 2) {
    GridSet a = load_set(c.input);
    auto uni = uniform_subset(a, c.L);
    auto rep = analyze_structure(uni.subset, c.L, c.delta, c.net_res, c.threads);
    auto ledger = check_theorem2(uni.subset, a.size(), c.L, c.delta, rep);
    Json result;
    result["uniformization"] = to_json(uni, "plain");
    result["report"] = to_json(rep);
    result["ledger"] = to_json(ledger);
    emit(c, result, {{c.input, file_sha256(c.input)}});
    if (!ledger.pass) {
      std::cerr << "ledger failed: " << ledger.detail << "\n";
      return 2;
    }
    return 0;
  }
  if (c.theorem == 1) {
    if (!c.demo) throw Error("verify --theorem 1 runs the constructed-witness demo; pass --demo");
    // base-4 digit set {1,2} on a fixed row: uniform, line-supported, and
    // centered at all scales under y = (1/48, 1/48)
    int m = 4, L = 2;
    std::vector<Point> pts;
    for (std::int64_t x : {5, 6, 9, 10}) pts.push_back(make_point({x, 5}));
    GridSet a = GridSet::make(2, m, std::move(pts));
    Theorem1Inputs in;
    in.a = in.b = a;
    in.mu = in.nu = to_float(uniform_measure(a));
    in.L = L;
    in.delta = 0.5;
    in.q = 2.0;
    in.k_s = {1, 1};
    Rational y(1, 48);
    in.y_a = in.y_b = {y, y};
    Eigen::VectorXd zero = Eigen::VectorXd::Zero(2);
    AffineFlat normal = AffineFlat::span_axes(2, {1}, zero);
    Eigen::VectorXd line_off(2);
    line_off << 0.0, (5.0 + 0.5) / 16.0;
    AffineFlat line = AffineFlat::span_axes(2, {0}, line_off);
    in.w_a.resize(2);
    in.v_b.resize(2);
    for (int s = 0; s < 2; ++s) {
      int shift = m - s * L;
      std::set<Point> cubes;
      for (const Point& p : a.points) {
        Point q{};
        for (int i = 0; i < 2; ++i) q[static_cast<std::size_t>(i)] = p[static_cast<std::size_t>(i)] >> shift;
        cubes.insert(q);
      }
      for (const Point& cube : cubes) {
        in.w_a[static_cast<std::size_t>(s)].emplace_back(cube, normal);
        in.v_b[static_cast<std::size_t>(s)].emplace_back(cube, line);
      }
    }
    auto ledger = check_theorem1_conclusions(in);
    emit(c, to_json(ledger), {});
    if (!ledger.pass) {
      std::cerr << "ledger failed: " << ledger.detail << "\n";
      return 2;
    }
    return 0;
  }
  throw Error("unknown theorem id");
}

}  // namespace

int run(const RunConfig& config) {
  try {
    if (config.threads < 1) throw Error("threads must be positive");
    if (config.backend != "rational" && config.backend != "float")
      throw Error("backend must be rational or float");
    if (config.L < 1) throw Error("L must be positive");
    if (config.q < 1.0) throw Error("q must be at least 1");
    if (config.h_exp < 1 || config.h_exp > 20) throw Error("h_exp out of range");
    if (config.subcommand == "generate") return cmd_generate(config);
    if (config.subcommand == "energy") return cmd_energy(config);
    if (config.subcommand == "sumset") return cmd_sumset(config);
    if (config.subcommand == "doubling") return cmd_doubling(config);
    if (config.subcommand == "uniformize") return cmd_uniformize(config);
    if (config.subcommand == "analyze") return cmd_analyze(config);
    if (config.subcommand == "fup") return cmd_fup(config);
    if (config.subcommand == "energy-experiment") return cmd_energy_experiment(config);
    if (config.subcommand == "verify") return cmd_verify(config);
    throw Error("unknown subcommand: " + config.subcommand);
  } catch (const MathCheckError& e) {
    std::cerr << "mathematical check failed: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

int run_cli(int argc, char** argv) {
  CLI::App app{"dsk: discretized additive-structure toolkit"};
  app.require_subcommand(1);
  RunConfig c;
  if (const char* env = std::getenv("DSK_DEFAULT_BACKEND")) c.backend = env;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--input", c.input, "input JSON path");
    sub->add_option("--input2", c.input2, "second input JSON path");
    sub->add_option("--output,-o", c.output, "output path");
    sub->add_option("--manifest", c.manifest, "manifest path");
    sub->add_option("-L,--L", c.L, "block length L");
    sub->add_option("--delta", c.delta, "delta");
    sub->add_option("--sigma", c.sigma, "sigma");
    sub->add_option("--rho", c.rho, "porosity rho");
    sub->add_option("--eta", c.eta, "porosity bottom scale");
    sub->add_option("--lambda", c.lambda, "density exponent margin");
    sub->add_option("-k,--k", c.k, "dimension parameter k");
    sub->add_option("-q,--q", c.q, "Lq exponent");
    sub->add_option("--h-exp", c.h_exp, "h = 2^-h_exp");
    sub->add_option("--net-res", c.net_res, "net resolution");
    sub->add_option("--backend", c.backend, "rational | float");
    sub->add_option("--threads", c.threads, "worker threads");
    sub->add_option("--seed", c.seed, "PRNG seed");
  };

  auto* gen = app.add_subcommand("generate", "emit a corpus set");
  add_common(gen);
  gen->add_option("--family", c.family, "corpus family");
  gen->add_option("-d,--d", c.d, "dimension");
  gen->add_option("-m,--m", c.m, "scale exponent");
  gen->add_option("--count", c.count, "family size parameter");
  gen->add_option("--digit-mask", c.digit_mask, "cantor digit mask");
  gen->add_option("--spec", c.spec_path, "corpus spec JSON");

  auto* energy = app.add_subcommand("energy", "additive energy of a set");
  add_common(energy);
  auto* sum = app.add_subcommand("sumset", "A + B");
  add_common(sum);
  auto* dbl = app.add_subcommand("doubling", "doubling certificate and growth check");
  add_common(dbl);
  dbl->add_option("--pr-k", c.pr_k, "iterated growth exponent (0 disables)");

  auto* uni = app.add_subcommand("uniformize", "extract a uniform subset");
  add_common(uni);
  uni->add_option("--mode", c.mode, "plain | valuefn | subspace | center | collapse");
  uni->add_option("--valuefn", c.valuefn, "parity | dim");
  uni->add_option("--scales", c.scales, "scales to collapse")->delimiter(',');

  auto* ana = app.add_subcommand("analyze", "multi-scale structure report");
  add_common(ana);
  ana->add_flag("--auto-uniformize", c.auto_uniformize, "uniformize the input first");

  auto* fup = app.add_subcommand("fup", "uncertainty-principle norm");
  add_common(fup);
  fup->add_option("--sweep", c.sweep, "h exponents for a CSV sweep")->delimiter(',');
  fup->add_option("--count", c.count, "random set size for sweeps");

  auto* exp = app.add_subcommand("energy-experiment", "energy threshold + structure search");
  add_common(exp);

  auto* ver = app.add_subcommand("verify", "run a conclusion ledger");
  add_common(ver);
  ver->add_option("--theorem", c.theorem, "1 or 2");
  ver->add_flag("--demo", c.demo, "constructed-witness demo (theorem 1)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }
  for (auto* sub : app.get_subcommands()) c.subcommand = sub->get_name();
  return run(c);
}

}  // namespace dsk
