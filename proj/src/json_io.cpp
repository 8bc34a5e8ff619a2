#include "dsk/json_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "dsk/util.hpp"

namespace dsk {

namespace {

Json point_to_json(const Point& p, int dim) {
  Json arr = Json::array();
  for (int i = 0; i < dim; ++i) arr.push_back(p[static_cast<std::size_t>(i)]);
  return arr;
}

Point point_from_json(const Json& j, int dim) {
  if (!j.is_array() || static_cast<int>(j.size()) != dim) throw Error("bad point");
  Point p{};
  for (int i = 0; i < dim; ++i) p[static_cast<std::size_t>(i)] = j[static_cast<std::size_t>(i)].get<std::int64_t>();
  return p;
}

// locale-independent parse of the 17-digit decimal strings
double parse_double(const std::string& s) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw Error("bad number: " + s);
  return v;
}

}  // namespace

Json to_json(const GridSet& a) {
  Json j;
  j["d"] = a.dim;
  j["m"] = a.scale_exp;
  if (a.span != 1) j["span"] = a.span;
  Json pts = Json::array();
  for (const Point& p : a.points) pts.push_back(point_to_json(p, a.dim));
  j["points"] = std::move(pts);
  return j;
}

GridSet gridset_from_json(const Json& j) {
  if (!j.contains("d") || !j.contains("m") || !j.contains("points"))
    throw Error("grid set needs fields d, m, points");
  int d = j.at("d").get<int>();
  int m = j.at("m").get<int>();
  int span = j.value("span", 1);
  std::vector<Point> pts;
  for (const auto& pj : j.at("points")) pts.push_back(point_from_json(pj, d));
  return GridSet::make(d, m, std::move(pts), span);
}

Json to_json(const GridMeasureQ& mu) {
  Json j;
  j["d"] = mu.dim;
  j["m"] = mu.scale_exp;
  if (mu.span != 1) j["span"] = mu.span;
  j["normalized"] = mu.normalized;
  j["backend"] = "rational";
  Json atoms = Json::array();
  for (const auto& [p, w] : mu.atoms) {
    if (!w.get_num().fits_slong_p() || !w.get_den().fits_slong_p())
      throw Error("rational weight too large for JSON");
    atoms.push_back(Json::array({point_to_json(p, mu.dim), w.get_num().get_si(), w.get_den().get_si()}));
  }
  j["atoms"] = std::move(atoms);
  return j;
}

Json to_json(const GridMeasureD& mu) {
  Json j;
  j["d"] = mu.dim;
  j["m"] = mu.scale_exp;
  if (mu.span != 1) j["span"] = mu.span;
  j["normalized"] = mu.normalized;
  j["backend"] = "float";
  Json atoms = Json::array();
  for (const auto& [p, w] : mu.atoms)
    atoms.push_back(Json::array({point_to_json(p, mu.dim), format_double17(w)}));
  j["atoms"] = std::move(atoms);
  return j;
}

GridMeasureQ measure_q_from_json(const Json& j) {
  int d = j.at("d").get<int>();
  int m = j.at("m").get<int>();
  int span = j.value("span", 1);
  bool normalized = j.value("normalized", false);
  std::vector<std::pair<Point, Rational>> atoms;
  for (const auto& aj : j.at("atoms")) {
    if (!aj.is_array() || aj.size() != 3) throw Error("rational atom needs [coords, num, den]");
    Point p = point_from_json(aj[0], d);
    Rational w(static_cast<long>(aj[1].get<std::int64_t>()), static_cast<long>(aj[2].get<std::int64_t>()));
    w.canonicalize();
    atoms.emplace_back(p, w);
  }
  return GridMeasureQ::make(d, m, std::move(atoms), normalized, span);
}

GridMeasureD measure_d_from_json(const Json& j) {
  int d = j.at("d").get<int>();
  int m = j.at("m").get<int>();
  int span = j.value("span", 1);
  bool normalized = j.value("normalized", false);
  std::vector<std::pair<Point, double>> atoms;
  for (const auto& aj : j.at("atoms")) {
    if (!aj.is_array() || aj.size() < 2) throw Error("float atom needs [coords, weight]");
    Point p = point_from_json(aj[0], d);
    double w = aj[1].is_string() ? parse_double(aj[1].get<std::string>()) : aj[1].get<double>();
    atoms.emplace_back(p, w);
  }
  return GridMeasureD::make(d, m, std::move(atoms), normalized, span);
}

Json to_json(const AffineFlat& f) {
  Json j;
  j["k"] = f.dim_k();
  Json frame = Json::array();
  for (int c = 0; c < f.frame.cols(); ++c) {
    Json col = Json::array();
    for (int r = 0; r < f.frame.rows(); ++r) col.push_back(format_double17(f.frame(r, c)));
    frame.push_back(std::move(col));
  }
  j["frame"] = std::move(frame);
  Json off = Json::array();
  for (int i = 0; i < f.offset.size(); ++i) off.push_back(format_double17(f.offset(i)));
  j["offset"] = std::move(off);
  return j;
}

AffineFlat flat_from_json(const Json& j) {
  const auto& off = j.at("offset");
  int d = static_cast<int>(off.size());
  AffineFlat f;
  f.offset = Eigen::VectorXd(d);
  auto num = [](const Json& v) {
    return v.is_string() ? parse_double(v.get<std::string>()) : v.get<double>();
  };
  for (int i = 0; i < d; ++i) f.offset(i) = num(off[static_cast<std::size_t>(i)]);
  const auto& frame = j.at("frame");
  f.frame = Eigen::MatrixXd(d, static_cast<int>(frame.size()));
  for (int c = 0; c < static_cast<int>(frame.size()); ++c)
    for (int r = 0; r < d; ++r) f.frame(r, c) = num(frame[static_cast<std::size_t>(c)][static_cast<std::size_t>(r)]);
  f.validate(1e-9);
  return f;
}

Json to_json(const UniformProfile& p) {
  Json j;
  j["L"] = p.L;
  j["S"] = p.S;
  j["branching"] = p.branching;
  return j;
}

Json to_json(const EnergyResult& e) {
  Json j;
  j["quadruples"] = e.quadruples_str();
  j["normalized"] = e.normalized;
  j["sigma_star"] = e.sigma_star;
  return j;
}

Json to_json(const UniformizationResult& r, const std::string& mode) {
  Json j;
  j["mode"] = mode;
  j["profile"] = to_json(r.profile);
  j["input_size"] = r.input_size;
  j["output_size"] = r.output_size;
  j["size_ratio"] = rational_to_string(r.size_ratio);
  j["guarantee"] = rational_to_string(r.guarantee);
  j["meets_guarantee"] = r.meets_guarantee;
  if (!r.per_scale_values.empty()) j["per_scale_values"] = r.per_scale_values;
  return j;
}

Json to_json(const CenterResult& r) {
  Json j;
  j["mode"] = "center";
  j["output_size"] = r.subset.size();
  Json y = Json::array();
  for (const auto& q : r.translation) y.push_back(rational_to_string(q));
  j["translation"] = std::move(y);
  j["predicate_ok"] = r.predicate_ok;
  j["meets_bound"] = r.meets_bound;
  j["size_ratio"] = rational_to_string(r.size_ratio);
  j["guarantee"] = rational_to_string(r.guarantee);
  return j;
}

Json to_json(const StructureReport& r) {
  Json j;
  j["schema_version"] = StructureReport::kSchemaVersion;
  j["d"] = r.d;
  j["m"] = r.m;
  j["L"] = r.L;
  j["S"] = r.S;
  j["delta"] = r.delta;
  j["net_res"] = r.net_res;
  j["achieved_delta"] = r.achieved_delta;
  Json scales = Json::array();
  for (const auto& s : r.scales) {
    Json sj;
    sj["s"] = s.s;
    sj["k_s"] = s.k_s;
    sj["R_s"] = s.R_s;
    sj["branching_ok"] = s.branching_ok;
    Json cubes = Json::array();
    for (const auto& c : s.cubes) {
      Json cj;
      cj["cube"] = point_to_json(c.cube, r.d);
      cj["slack"] = c.slack;
      cj["contained"] = c.contained;
      cj["proj_covering"] = c.proj_covering;
      cj["saturation_ratio"] = c.saturation_ratio;
      cubes.push_back(std::move(cj));
    }
    sj["cubes"] = std::move(cubes);
    scales.push_back(std::move(sj));
  }
  j["scales"] = std::move(scales);
  return j;
}

Json to_json(const Theorem2Ledger& r) {
  Json j;
  j["uniform"] = r.uniform;
  j["size"] = r.size_ok;
  j["branching"] = r.branching_ok;
  j["containment"] = r.containment_ok;
  j["pass"] = r.pass;
  if (!r.detail.empty()) j["detail"] = r.detail;
  return j;
}

Json to_json(const Theorem1Ledger& r) {
  Json j;
  j["A1"] = r.a1;
  j["A2"] = r.a2;
  j["A3"] = r.a3;
  j["A4"] = r.a4;
  j["B1"] = r.b1;
  j["B2"] = r.b2;
  j["B3"] = r.b3;
  j["B4"] = r.b4;
  j["C"] = r.c;
  j["pass"] = r.pass;
  if (!r.detail.empty()) j["detail"] = r.detail;
  return j;
}

Json to_json(const PorosityResult& r) {
  Json j;
  j["porous"] = r.porous;
  j["k"] = r.k;
  j["rho"] = r.rho;
  j["eta"] = r.eta;
  j["net_res"] = r.net_res;
  j["flats_tested"] = r.flats_tested;
  if (r.counterexample) {
    Json c;
    c["flat"] = to_json(r.counterexample->flat);
    Json center = Json::array();
    for (double v : r.counterexample->center) center.push_back(format_double17(v));
    c["center"] = std::move(center);
    c["r"] = r.counterexample->radius;
    j["counterexample"] = std::move(c);
  }
  return j;
}

Json to_json(const FupResult& r) {
  Json j;
  j["h"] = r.h;
  j["x_count"] = r.x_count;
  j["y_count"] = r.y_count;
  j["norm"] = r.norm;
  j["trivial_bound"] = r.trivial_bound;
  j["beta_measured"] = r.beta_measured;
  j["beta_formula"] = r.beta_formula;
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  return j;
}

Json to_json(const EnergyExperimentReport& r) {
  Json j;
  j["energy"] = to_json(r.energy);
  j["above_threshold"] = r.above_threshold;
  j["structure_found"] = r.structure_found;
  if (r.uniformization) j["uniformization"] = to_json(*r.uniformization, "plain");
  if (r.report) j["report"] = to_json(*r.report);
  if (r.ledger) j["ledger"] = to_json(*r.ledger);
  return j;
}

Json to_json(const FlatteningReport& r) {
  Json j;
  j["porosity_ok"] = r.porosity_ok;
  j["size_ok"] = r.size_ok;
  j["hypothesis_ok"] = r.hypothesis_ok;
  j["energy"] = to_json(r.energy);
  j["sigma_star"] = r.sigma_star;
  j["porosity"] = to_json(r.porosity);
  return j;
}

Json to_json(const CorpusSpec& s) {
  Json j;
  j["family"] = s.family;
  j["d"] = s.d;
  j["m"] = s.m;
  if (s.k != 0) j["k"] = s.k;
  if (s.count != 1) j["count"] = s.count;
  if (s.seed != 0) j["seed"] = s.seed;
  if (s.digit_mask != 0) j["digit_mask"] = s.digit_mask;
  if (!s.gap_generators.empty()) {
    Json gens = Json::array();
    for (const Point& g : s.gap_generators) gens.push_back(point_to_json(g, s.d));
    j["gap_generators"] = std::move(gens);
    j["gap_lengths"] = s.gap_lengths;
  }
  if (!s.children.empty()) {
    Json kids = Json::array();
    for (const auto& c : s.children) kids.push_back(to_json(c));
    j["children"] = std::move(kids);
  }
  return j;
}

CorpusSpec corpus_spec_from_json(const Json& j) {
  CorpusSpec s;
  s.family = j.at("family").get<std::string>();
  s.d = j.at("d").get<int>();
  s.m = j.at("m").get<int>();
  s.k = j.value("k", 0);
  s.count = j.value("count", std::int64_t{1});
  s.seed = j.value("seed", std::uint64_t{0});
  s.digit_mask = j.value("digit_mask", std::uint64_t{0});
  if (j.contains("gap_generators")) {
    for (const auto& gj : j.at("gap_generators")) s.gap_generators.push_back(point_from_json(gj, s.d));
    s.gap_lengths = j.at("gap_lengths").get<std::vector<std::int64_t>>();
  }
  if (j.contains("children"))
    for (const auto& cj : j.at("children")) s.children.push_back(corpus_spec_from_json(cj));
  return s;
}

Json parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  std::string text = buf.str();
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    // e.byte is a 1-based offset into the input
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') { ++line; col = 1; }
      else ++col;
    }
    throw Error("malformed JSON in " + path + " at line " + std::to_string(line) + ", column " +
                std::to_string(col) + ": " + e.what());
  }
}

void write_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << j.dump(2) << "\n";
}

std::string file_sha256(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return sha256_hex(buf.str());
}

Json make_manifest(const Json& config,
                   const std::vector<std::pair<std::string, std::string>>& input_hashes,
                   Json result) {
  Json j;
  j["config"] = config;
  Json versions;
  versions["dsk"] = kVersion;
  versions["schema"] = StructureReport::kSchemaVersion;
  j["versions"] = std::move(versions);
  if (!input_hashes.empty()) {
    Json inputs;
    for (const auto& [path, hash] : input_hashes) inputs[path] = hash;
    j["inputs"] = std::move(inputs);
  }
  j["result"] = std::move(result);
  return j;
}

}  // namespace dsk
