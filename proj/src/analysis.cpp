#include "dsk/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dsk/grid.hpp"
#include "dsk/util.hpp"

namespace dsk {

namespace {

Point shift_point(const Point& p, int dim, int shift) {
  Point q{};
  for (int i = 0; i < dim; ++i) q[static_cast<std::size_t>(i)] = p[static_cast<std::size_t>(i)] >> shift;
  return q;
}

// all depth-level cubes meeting A, sorted
std::vector<Point> cubes_at(const GridSet& a, int level) {
  std::vector<Point> out;
  out.reserve(a.points.size());
  int shift = a.scale_exp - level;
  for (const Point& p : a.points) out.push_back(shift_point(p, a.dim, shift));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

GridSet renormalized_child_set(const GridSet& a, const Point& cube, int s, int L) {
  DyadicCube c;
  c.dim = a.dim;
  c.level = s * L;
  c.coords = cube;
  return truncate_set(renormalize_set(a, c), L);
}

}  // namespace

StructureReport analyze_structure(const GridSet& a, int L, double delta, int net_res, int threads) {
  auto check = is_uniform(a, L);
  if (!check.uniform)
    throw Error("analyze_structure needs an (L,S)-uniform input: " + check.detail);
  StructureReport rep;
  rep.d = a.dim;
  rep.m = a.scale_exp;
  rep.L = L;
  rep.S = check.profile.S;
  rep.delta = delta;
  rep.net_res = net_res;

  double contain_threshold = (std::sqrt(static_cast<double>(a.dim)) + 1.0) * std::pow(0.5, L);
  double max_gap = 0;

  for (int s = 0; s < rep.S; ++s) {
    StructureReport::ScaleEntry entry;
    entry.s = s;
    entry.R_s = check.profile.branching[static_cast<std::size_t>(s)];
    auto cubes = cubes_at(a, s * L);
    entry.cubes.resize(cubes.size());

    // fit every cube's renormalized child set; k_s is the max fitted dimension
    std::vector<int> dims(cubes.size(), 0);
    std::vector<double> slacks(cubes.size(), 0.0);
    std::vector<GridSet> children(cubes.size());
    parallel_for(0, static_cast<std::int64_t>(cubes.size()), threads, [&](std::int64_t i) {
      children[static_cast<std::size_t>(i)] =
          renormalized_child_set(a, cubes[static_cast<std::size_t>(i)], s, L);
      auto [j, fit] = min_dimension(children[static_cast<std::size_t>(i)], L);
      dims[static_cast<std::size_t>(i)] = j;
      slacks[static_cast<std::size_t>(i)] = fit.slack;
    });
    entry.k_s = 0;
    for (int j : dims) entry.k_s = std::max(entry.k_s, j);

    parallel_for(0, static_cast<std::int64_t>(cubes.size()), threads, [&](std::int64_t i) {
      auto& ce = entry.cubes[static_cast<std::size_t>(i)];
      ce.cube = cubes[static_cast<std::size_t>(i)];
      // re-fit at the common dimension so slack and containment refer to k_s
      FlatFit fit = fit_flat(children[static_cast<std::size_t>(i)], entry.k_s);
      ce.slack = fit.slack;
      ce.contained = fit.slack <= contain_threshold;
      auto grass = grassmannian_inf_covering(children[static_cast<std::size_t>(i)],
                                             entry.k_s, L, net_res);
      ce.proj_covering = grass.value;
      double denom = std::pow(2.0, (static_cast<double>(entry.k_s) - delta) * L) *
                     static_cast<double>(grass.value);
      ce.saturation_ratio = static_cast<double>(entry.R_s) / denom;
    });

    entry.branching_ok =
        std::log2(static_cast<double>(entry.R_s)) >=
        static_cast<double>(L) * (static_cast<double>(entry.k_s) - delta) - 1e-12;
    max_gap = std::max(max_gap, static_cast<double>(entry.k_s) -
                                    std::log2(static_cast<double>(entry.R_s)) / static_cast<double>(L));
    rep.scales.push_back(std::move(entry));
  }
  rep.achieved_delta = max_gap;
  return rep;
}

Theorem2Ledger check_theorem2(const GridSet& a_prime, std::int64_t original_size, int L,
                              double delta, const StructureReport& report) {
  Theorem2Ledger ledger;
  auto check = is_uniform(a_prime, L);
  ledger.uniform = check.uniform;
  if (check.uniform && report.S == check.profile.S) {
    for (int s = 0; s < report.S; ++s)
      if (check.profile.branching[static_cast<std::size_t>(s)] !=
          report.scales[static_cast<std::size_t>(s)].R_s)
        ledger.uniform = false;
  }

  double m = static_cast<double>(a_prime.scale_exp);
  ledger.size_ok = std::log2(static_cast<double>(a_prime.size())) >=
                   std::log2(static_cast<double>(original_size)) - delta * m - 1e-12;

  ledger.branching_ok = true;
  ledger.containment_ok = true;
  for (const auto& sc : report.scales) {
    double lhs = std::log2(static_cast<double>(sc.R_s));
    if (lhs < static_cast<double>(L) * (static_cast<double>(sc.k_s) - delta) - 1e-12) {
      ledger.branching_ok = false;
      ledger.detail += "branching fails at scale " + std::to_string(sc.s) + "; ";
    }
    for (const auto& ce : sc.cubes)
      if (!ce.contained) {
        ledger.containment_ok = false;
        ledger.detail += "containment fails at scale " + std::to_string(sc.s) + "; ";
        break;
      }
  }
  ledger.pass = ledger.uniform && ledger.size_ok && ledger.branching_ok && ledger.containment_ok;
  return ledger;
}

namespace {

bool mass_ratio_at_most_two(const GridMeasureD& mu, const GridSet& on, std::string& why) {
  double lo = std::numeric_limits<double>::infinity(), hi = 0;
  for (const auto& [p, w] : mu.atoms) {
    if (!on.contains(p)) continue;
    lo = std::min(lo, w);
    hi = std::max(hi, w);
  }
  if (hi > 2.0 * lo * (1 + 1e-12)) {
    why = "mass ratio " + format_double17(hi / lo);
    return false;
  }
  return true;
}

double restricted_lq(const GridMeasureD& mu, const GridSet& on, double q) {
  double acc = 0;
  for (const auto& [p, w] : mu.atoms)
    if (on.contains(p)) acc += (q == 1.0) ? w : std::pow(w, q);
  return (q == 1.0) ? acc : std::pow(acc, 1.0 / q);
}

const AffineFlat* find_witness(const FlatWitnesses& w, int s, const Point& cube) {
  if (s >= static_cast<int>(w.size())) return nullptr;
  for (const auto& [c, f] : w[static_cast<std::size_t>(s)])
    if (c == cube) return &f;
  return nullptr;
}

}  // namespace

Theorem1Ledger check_theorem1_conclusions(const Theorem1Inputs& in) {
  Theorem1Ledger ledger;
  const GridSet& a = in.a;
  const GridSet& b = in.b;
  GridSet supp_mu = support(in.mu);
  GridSet supp_nu = support(in.nu);
  for (const Point& p : a.points)
    if (!supp_mu.contains(p)) throw Error("A not contained in supp mu");
  for (const Point& p : b.points)
    if (!supp_nu.contains(p)) throw Error("B not contained in supp nu");
  int m = a.scale_exp;
  int L = in.L;
  if (m % L != 0) throw Error("L does not divide m");
  int S = m / L;
  if (static_cast<int>(in.k_s.size()) != S) throw Error("need one k_s per scale");

  // A1: restricted norm keeps a 2^(-delta m) share
  ledger.a1 = restricted_lq(in.mu, a, in.q) >=
              std::pow(2.0, -in.delta * m) * lq_norm(in.mu, in.q) * (1 - 1e-12);
  std::string why;
  ledger.a2 = mass_ratio_at_most_two(in.mu, a, why);
  if (!ledger.a2) ledger.detail += "A2: " + why + "; ";
  ledger.a3 = is_uniform(a, L).uniform;

  // A4: R_s >= 2^((k_s - delta) L) |pi_W (A cap I)|_{2^-(s+1)L} with the given W_I
  ledger.a4 = true;
  auto profile_a = is_uniform(a, L);
  for (int s = 0; s < S && ledger.a4; ++s) {
    if (!profile_a.uniform) { ledger.a4 = false; break; }
    std::int64_t r_s = profile_a.profile.branching[static_cast<std::size_t>(s)];
    for (const Point& cube : cubes_at(a, s * L)) {
      const AffineFlat* w = find_witness(in.w_a, s, cube);
      if (!w) { ledger.a4 = false; ledger.detail += "A4: missing witness; "; break; }
      if (w->dim_k() != a.dim - in.k_s[static_cast<std::size_t>(s)]) {
        ledger.a4 = false;
        ledger.detail += "A4: witness dimension mismatch; ";
        break;
      }
      DyadicCube c{a.dim, s * L, cube};
      GridSet part = renormalize_set(a, c);
      // projection covering in absolute coordinates at scale (s+1)L equals
      // the renormalized covering at scale L
      std::int64_t cover = projection_covering(part, *w, L);
      double rhs = std::pow(2.0, (static_cast<double>(in.k_s[static_cast<std::size_t>(s)]) - in.delta) * L) *
                   static_cast<double>(cover);
      if (static_cast<double>(r_s) < rhs * (1 - 1e-12)) {
        ledger.a4 = false;
        ledger.detail += "A4 fails at scale " + std::to_string(s) + "; ";
        break;
      }
    }
  }

  double nu_mass_b = 0;
  for (const auto& [p, w] : in.nu.atoms)
    if (b.contains(p)) nu_mass_b += w;
  ledger.b1 = nu_mass_b >= std::pow(2.0, -in.delta * m) * (1 - 1e-12);
  ledger.b2 = mass_ratio_at_most_two(in.nu, b, why);
  ledger.b3 = is_uniform(b, L).uniform;

  // B4: every depth-(s+1)L cube of B cap I meets the sqrt(d) 2^-(s+1)L
  // neighborhood of the witness plane
  ledger.b4 = true;
  for (int s = 0; s < S && ledger.b4; ++s) {
    for (const Point& cube : cubes_at(b, s * L)) {
      const AffineFlat* v = find_witness(in.v_b, s, cube);
      if (!v) { ledger.b4 = false; ledger.detail += "B4: missing witness; "; break; }
      if (v->dim_k() != in.k_s[static_cast<std::size_t>(s)]) {
        ledger.b4 = false;
        ledger.detail += "B4: witness dimension mismatch; ";
        break;
      }
      double cell = std::pow(0.5, (s + 1) * L);
      double thresh = std::sqrt(static_cast<double>(b.dim)) * cell;
      int shift = m - (s + 1) * L;
      std::vector<Point> child_cubes;
      for (const Point& p : b.points)
        if (shift_point(p, b.dim, m - s * L) == cube)
          child_cubes.push_back(shift_point(p, b.dim, shift));
      std::sort(child_cubes.begin(), child_cubes.end());
      child_cubes.erase(std::unique(child_cubes.begin(), child_cubes.end()), child_cubes.end());
      for (const Point& cc : child_cubes) {
        Eigen::VectorXd center(b.dim);
        for (int i = 0; i < b.dim; ++i)
          center[i] = (static_cast<double>(cc[static_cast<std::size_t>(i)]) + 0.5) * cell;
        double dist = std::sqrt(v->dist_sq(center));
        // cube meets the neighborhood iff its center is within threshold of
        // the plane plus the cube's own circumradius
        if (dist > thresh + 0.5 * std::sqrt(static_cast<double>(b.dim)) * cell + 1e-12) {
          ledger.b4 = false;
          ledger.detail += "B4 fails at scale " + std::to_string(s) + "; ";
          break;
        }
      }
      if (!ledger.b4) break;
    }
  }

  ledger.c = true;
  for (const Point& p : a.points)
    if (!centered_at_all_scales(p, a.dim, m, L, in.y_a)) { ledger.c = false; break; }
  if (ledger.c)
    for (const Point& p : b.points)
      if (!centered_at_all_scales(p, b.dim, m, L, in.y_b)) { ledger.c = false; break; }

  ledger.pass = ledger.a1 && ledger.a2 && ledger.a3 && ledger.a4 && ledger.b1 && ledger.b2 &&
                ledger.b3 && ledger.b4 && ledger.c;
  return ledger;
}

EnergyExperimentReport energy_structure_experiment(const GridSet& x, int L, double delta,
                                                   double sigma, int net_res) {
  EnergyExperimentReport rep;
  rep.energy = additive_energy(x);
  // E >= 2^(-sigma m) |X|^3  <=>  sigma* <= sigma
  rep.above_threshold = rep.energy.sigma_star <= sigma + 1e-12;
  if (!rep.above_threshold) return rep;
  if (x.scale_exp % L != 0) throw Error("L does not divide m");

  auto uni = uniform_subset(x, L);
  rep.uniformization = uni;
  auto report = analyze_structure(uni.subset, L, delta, net_res);
  rep.report = report;
  rep.ledger = check_theorem2(uni.subset, x.size(), L, delta, report);
  rep.structure_found = rep.ledger->pass;
  return rep;
}

FlatteningReport flattening_check(const GridSet& x, int k, double rho, double lambda, double eta,
                                  int net_res) {
  FlatteningReport rep;
  rep.porosity = porosity_check(x, k, rho, eta, net_res);
  rep.porosity_ok = rep.porosity.porous;
  double m = static_cast<double>(x.scale_exp);
  rep.size_ok = std::log2(static_cast<double>(x.size())) >=
                (static_cast<double>(k) - 1.0 + lambda) * m - 1e-9;
  rep.hypothesis_ok = rep.porosity_ok && rep.size_ok;
  rep.energy = additive_energy(x);
  rep.sigma_star = rep.energy.sigma_star;
  return rep;
}

std::vector<std::complex<double>> fup_matrix(const GridSet& x, const GridSet& y, bool exact_cell) {
  if (x.dim != y.dim || x.scale_exp != y.scale_exp) throw Error("dimension or scale mismatch");
  if (exact_cell && x.dim != 1) throw Error("exact cell integration only in d=1");
  int d = x.dim;
  int m = x.scale_exp;
  double h = std::pow(0.5, m);
  double amp = std::pow(2.0 * std::numbers::pi * h, -0.5 * d) * std::pow(h, d);
  std::int64_t nx = x.size(), ny = y.size();
  std::vector<std::complex<double>> mat(static_cast<std::size_t>(nx * ny));
  std::vector<std::array<double, kMaxDim>> xc(static_cast<std::size_t>(nx)),
      yc(static_cast<std::size_t>(ny));
  for (std::int64_t i = 0; i < nx; ++i)
    for (int c = 0; c < d; ++c)
      xc[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)] =
          (static_cast<double>(x.points[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)]) + 0.5) * h;
  for (std::int64_t j = 0; j < ny; ++j)
    for (int c = 0; c < d; ++c)
      yc[static_cast<std::size_t>(j)][static_cast<std::size_t>(c)] =
          (static_cast<double>(y.points[static_cast<std::size_t>(j)][static_cast<std::size_t>(c)]) + 0.5) * h;
  for (std::int64_t i = 0; i < nx; ++i) {
    for (std::int64_t j = 0; j < ny; ++j) {
      double dot = 0;
      for (int c = 0; c < d; ++c)
        dot += xc[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)] *
               yc[static_cast<std::size_t>(j)][static_cast<std::size_t>(c)];
      double phase = dot / h;
      double scale = amp;
      if (exact_cell) {
        // separable cell integration: sinc factors at the midpoints
        auto sinc = [](double t) { return t == 0 ? 1.0 : std::sin(t) / t; };
        scale *= sinc(xc[static_cast<std::size_t>(i)][0] / 2.0) * sinc(yc[static_cast<std::size_t>(j)][0] / 2.0);
      }
      mat[static_cast<std::size_t>(i * ny + j)] =
          std::complex<double>(scale * std::cos(phase), scale * std::sin(phase));
    }
  }
  return mat;
}

FupResult fup_norm(const GridSet& x, const GridSet& y, const FupOptions& opts) {
  if (x.dim != y.dim || x.scale_exp != y.scale_exp) throw Error("dimension or scale mismatch");
  if (x.empty() || y.empty()) throw Error("empty set");
  std::int64_t entries = x.size() * y.size();
  if (entries > opts.max_entries) throw Error("matrix too large");
  int d = x.dim;
  int m = x.scale_exp;

  FupResult res;
  res.h = std::pow(0.5, m);
  res.x_count = x.size();
  res.y_count = y.size();

  auto mat = fup_matrix(x, y, opts.exact_cell);
  std::int64_t nx = x.size(), ny = y.size();

  // power iteration on M* M
  std::vector<std::complex<double>> v(static_cast<std::size_t>(ny));
  for (std::int64_t j = 0; j < ny; ++j)
    v[static_cast<std::size_t>(j)] = std::complex<double>(1.0 + 1e-3 * static_cast<double>(j % 7), 0.0);
  auto normalize = [](std::vector<std::complex<double>>& w) {
    double n = 0;
    for (auto& c : w) n += std::norm(c);
    n = std::sqrt(n);
    if (n > 0)
      for (auto& c : w) c /= n;
    return n;
  };
  normalize(v);

  std::vector<std::complex<double>> mv(static_cast<std::size_t>(nx)),
      mtmv(static_cast<std::size_t>(ny));
  double sigma = 0, prev = -1;
  int iter = 0;
  const int max_iter = 20000;
  while (iter < max_iter) {
    ++iter;
    parallel_for(0, nx, opts.threads, [&](std::int64_t i) {
      std::complex<double> acc(0, 0);
      const std::complex<double>* row = mat.data() + i * ny;
      for (std::int64_t j = 0; j < ny; ++j) acc += row[j] * v[static_cast<std::size_t>(j)];
      mv[static_cast<std::size_t>(i)] = acc;
    });
    parallel_for(0, ny, opts.threads, [&](std::int64_t j) {
      std::complex<double> acc(0, 0);
      for (std::int64_t i = 0; i < nx; ++i)
        acc += std::conj(mat[static_cast<std::size_t>(i * ny + j)]) * mv[static_cast<std::size_t>(i)];
      mtmv[static_cast<std::size_t>(j)] = acc;
    });
    double lambda = normalize(mtmv);  // Rayleigh estimate of sigma^2
    v.swap(mtmv);
    sigma = std::sqrt(lambda);
    if (iter >= 30 && std::abs(sigma - prev) <= opts.tol * std::max(sigma, 1e-300)) {
      res.converged = true;
      break;
    }
    prev = sigma;
  }
  res.iterations = iter;
  res.norm = sigma;
  res.trivial_bound = std::min(
      1.0, std::pow(res.h, 0.5 * d) * std::sqrt(static_cast<double>(res.x_count) *
                                                static_cast<double>(res.y_count)));
  res.beta_measured = res.norm > 0 ? std::log(res.norm) / std::log(res.h) : 0.0;
  res.beta_formula = fup_beta(res.h, static_cast<double>(res.x_count),
                              static_cast<double>(res.y_count), opts.sigma, d);
  return res;
}

double fup_beta(double h, double x_count, double y_count, double sigma, int d) {
  if (h <= 0 || h >= 1) throw Error("h must be in (0,1)");
  if (x_count < 1 || y_count < 1) throw Error("counts must be at least 1");
  // log(|X||Y|) / log(1/h): the denominator uses |log h| so that the
  // critical density |X||Y| = h^-d gives beta = sigma/8.
  double ratio = std::log2(x_count * y_count) / std::log2(1.0 / h);
  return 0.375 * (static_cast<double>(d) - ratio) + sigma / 8.0;
}

}  // namespace dsk
