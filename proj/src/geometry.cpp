#include "dsk/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "dsk/grid.hpp"
#include "dsk/util.hpp"

namespace dsk {

void AffineFlat::validate(double tol) const {
  if (frame.cols() > 0) {
    Eigen::MatrixXd g = frame.transpose() * frame;
    Eigen::MatrixXd id = Eigen::MatrixXd::Identity(frame.cols(), frame.cols());
    if ((g - id).cwiseAbs().maxCoeff() > tol) throw Error("frame not orthonormal");
  }
  if (frame.cols() > 0 && frame.rows() != offset.size()) throw Error("frame/offset mismatch");
}

AffineFlat AffineFlat::span_axes(int dim, const std::vector<int>& axes,
                                 const Eigen::VectorXd& offset) {
  AffineFlat f;
  f.frame = Eigen::MatrixXd::Zero(dim, static_cast<Eigen::Index>(axes.size()));
  for (std::size_t j = 0; j < axes.size(); ++j) {
    if (axes[j] < 0 || axes[j] >= dim) throw Error("axis out of range");
    f.frame(axes[j], static_cast<Eigen::Index>(j)) = 1.0;
  }
  f.offset = offset;
  return f;
}

AffineFlat AffineFlat::point(const Eigen::VectorXd& offset) {
  AffineFlat f;
  f.frame = Eigen::MatrixXd::Zero(offset.size(), 0);
  f.offset = offset;
  return f;
}

AffineFlat AffineFlat::full(int dim) {
  AffineFlat f;
  f.frame = Eigen::MatrixXd::Identity(dim, dim);
  f.offset = Eigen::VectorXd::Zero(dim);
  return f;
}

Eigen::MatrixXd orthogonal_complement(const AffineFlat& v) {
  int d = v.ambient_dim();
  int k = v.dim_k();
  if (k == 0) return Eigen::MatrixXd::Identity(d, d);
  if (k == d) return Eigen::MatrixXd::Zero(d, 0);
  // eigenvectors of I - FF^T with eigenvalue 1
  Eigen::MatrixXd proj = Eigen::MatrixXd::Identity(d, d) - v.frame * v.frame.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(proj);
  Eigen::MatrixXd basis(d, d - k);
  // eigenvalues ascending: the top d-k eigenvectors span the complement
  for (int j = 0; j < d - k; ++j) basis.col(j) = es.eigenvectors().col(d - 1 - j);
  return basis;
}

namespace {

std::vector<Eigen::VectorXd> lattice_positions(const GridSet& a) {
  double cell = std::pow(0.5, a.scale_exp);
  std::vector<Eigen::VectorXd> pos;
  pos.reserve(a.points.size());
  for (const Point& p : a.points) {
    Eigen::VectorXd x(a.dim);
    for (int i = 0; i < a.dim; ++i) x[i] = static_cast<double>(p[static_cast<std::size_t>(i)]) * cell;
    pos.push_back(x);
  }
  return pos;
}

}  // namespace

FlatFit fit_flat(const GridSet& a, int k) {
  if (a.empty()) throw Error("empty set");
  if (k < 0 || k > a.dim) throw Error("target dimension out of range");
  int d = a.dim;
  auto pos = lattice_positions(a);
  Eigen::VectorXd centroid = Eigen::VectorXd::Zero(d);
  for (const auto& x : pos) centroid += x;
  centroid /= static_cast<double>(pos.size());

  FlatFit fit;
  if (k == d) {
    fit.flat = AffineFlat::full(d);
    fit.flat.offset = centroid;
    fit.slack = 0.0;
    fit.certified = true;
    return fit;
  }

  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(d, d);
  for (const auto& x : pos) {
    Eigen::VectorXd v = x - centroid;
    cov += v * v.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
  AffineFlat flat;
  flat.offset = centroid;
  flat.frame = Eigen::MatrixXd(d, k);
  for (int j = 0; j < k; ++j) flat.frame.col(j) = es.eigenvectors().col(d - 1 - j);

  double slack_sq = 0;
  for (const auto& x : pos) slack_sq = std::max(slack_sq, flat.dist_sq(x));
  fit.flat = std::move(flat);
  fit.slack = std::sqrt(slack_sq);
  fit.certified = true;
  return fit;
}

std::pair<int, FlatFit> min_dimension(const GridSet& a, int L) {
  if (a.empty()) throw Error("empty set");
  double threshold = (std::sqrt(static_cast<double>(a.dim)) + 1.0) * std::pow(0.5, L);
  for (int j = 0; j <= a.dim; ++j) {
    FlatFit fit = fit_flat(a, j);
    if (fit.slack <= threshold) return {j, fit};
  }
  return {a.dim, fit_flat(a, a.dim)};  // unreachable: j = d has slack 0
}

std::int64_t projection_covering(const GridSet& a, const AffineFlat& v, int level) {
  if (a.empty()) throw Error("empty set");
  if (level < 0) throw Error("level out of range");
  int k = v.dim_k();
  if (k == 0) return 1;
  auto pos = lattice_positions(a);
  double binsize = std::pow(0.5, level);
  std::set<std::vector<std::int64_t>> bins;
  for (const auto& x : pos) {
    Eigen::VectorXd t = v.project_intrinsic(x);
    std::vector<std::int64_t> key(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) key[static_cast<std::size_t>(i)] = static_cast<std::int64_t>(std::floor(t[i] / binsize));
    bins.insert(std::move(key));
  }
  return static_cast<std::int64_t>(bins.size());
}

namespace {

// all k-subsets of {0..d-1}, lexicographic
std::vector<std::vector<int>> axis_subsets(int d, int k) {
  std::vector<std::vector<int>> out;
  std::vector<int> idx(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
  if (k == 0) { out.push_back({}); return out; }
  while (true) {
    out.push_back(idx);
    int i = k - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] == d - k + i) --i;
    if (i < 0) break;
    ++idx[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
  }
  return out;
}

// Deterministic direction net on the half-sphere in R^3 (golden-angle spiral).
std::vector<Eigen::Vector3d> sphere_directions(int count) {
  std::vector<Eigen::Vector3d> dirs;
  dirs.reserve(static_cast<std::size_t>(count));
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < count; ++i) {
    double z = (static_cast<double>(i) + 0.5) / static_cast<double>(count);  // (0,1]: half sphere
    double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    double phi = golden * static_cast<double>(i);
    dirs.emplace_back(r * std::cos(phi), r * std::sin(phi), z);
  }
  return dirs;
}

Eigen::MatrixXd plane_frame_from_normal(const Eigen::Vector3d& n) {
  int least = 0;
  for (int i = 1; i < 3; ++i)
    if (std::abs(n[i]) < std::abs(n[least])) least = i;
  Eigen::Vector3d e = Eigen::Vector3d::Zero();
  e[least] = 1.0;
  Eigen::Vector3d f1 = (e - e.dot(n) * n).normalized();
  Eigen::Vector3d f2 = n.cross(f1);
  Eigen::MatrixXd frame(3, 2);
  frame.col(0) = f1;
  frame.col(1) = f2;
  return frame;
}

}  // namespace

std::vector<AffineFlat> subspace_net(int dim, int subspace_dim, int net_res) {
  if (subspace_dim < 0 || subspace_dim > dim) throw Error("subspace dimension out of range");
  std::vector<AffineFlat> net;
  Eigen::VectorXd zero = Eigen::VectorXd::Zero(dim);
  // axis-aligned first, so ties resolve toward them
  for (const auto& axes : axis_subsets(dim, subspace_dim))
    net.push_back(AffineFlat::span_axes(dim, axes, zero));
  if (subspace_dim == 0 || subspace_dim == dim) return net;

  if (dim == 2) {
    for (int i = 1; i < net_res; ++i) {
      double theta = std::numbers::pi * static_cast<double>(i) / static_cast<double>(net_res);
      if (std::abs(theta - std::numbers::pi / 2.0) < 1e-12) continue;  // axis already present
      Eigen::MatrixXd frame(2, 1);
      frame(0, 0) = std::cos(theta);
      frame(1, 0) = std::sin(theta);
      AffineFlat f;
      f.frame = frame;
      f.offset = zero;
      net.push_back(f);
    }
  } else if (dim == 3) {
    auto dirs = sphere_directions(net_res * net_res);
    for (const auto& u : dirs) {
      AffineFlat f;
      if (subspace_dim == 1) {
        f.frame = Eigen::MatrixXd(3, 1);
        f.frame.col(0) = u;
      } else {
        f.frame = plane_frame_from_normal(u);
      }
      f.offset = zero;
      net.push_back(f);
    }
  }
  // d >= 4: axis-aligned subspaces only
  return net;
}

GrassmannianResult grassmannian_inf_covering(const GridSet& a, int codim_target, int level,
                                             int net_res) {
  if (codim_target < 0 || codim_target > a.dim) throw Error("codimension out of range");
  int sdim = a.dim - codim_target;
  auto net = subspace_net(a.dim, sdim, net_res);
  std::size_t axis_count = axis_subsets(a.dim, sdim).size();

  GrassmannianResult r;
  r.value = std::numeric_limits<std::int64_t>::max();
  for (std::size_t i = 0; i < net.size(); ++i) {
    std::int64_t c = projection_covering(a, net[i], level);
    if (i < axis_count) r.axis_floor = (i == 0) ? c : std::min(r.axis_floor, c);
    if (c < r.value) {
      r.value = c;
      r.minimizer = net[i];
    }
  }
  return r;
}

namespace {

struct FlatNetEntry {
  AffineFlat flat;
};

// Affine k-flats used by the porosity scan: every axis-aligned direction
// with offsets on a coarse grid in the normal directions, plus tilted
// directions in d = 2, 3 through the cube center.
std::vector<FlatNetEntry> porosity_flat_net(int d, int k, int net_res) {
  std::vector<FlatNetEntry> out;
  int off_res = 4;  // offsets at granularity 2^-2 per normal direction
  for (const auto& axes : axis_subsets(d, k)) {
    std::vector<int> normals;
    for (int i = 0; i < d; ++i)
      if (std::find(axes.begin(), axes.end(), i) == axes.end()) normals.push_back(i);
    std::vector<int> idx(normals.size(), 0);
    while (true) {
      Eigen::VectorXd offset = Eigen::VectorXd::Zero(d);
      for (std::size_t j = 0; j < normals.size(); ++j)
        offset[normals[j]] = (static_cast<double>(idx[j]) + 0.5) / static_cast<double>(off_res);
      out.push_back({AffineFlat::span_axes(d, axes, offset)});
      std::size_t i = 0;
      for (; i < idx.size(); ++i) {
        if (idx[i] + 1 < off_res) { ++idx[i]; break; }
        idx[i] = 0;
      }
      if (i == idx.size()) break;
    }
  }
  if (d == 2 || d == 3) {
    Eigen::VectorXd center = Eigen::VectorXd::Constant(d, 0.5);
    for (auto& f : subspace_net(d, k, std::max(2, net_res / 4))) {
      bool axis = true;
      for (int c = 0; c < f.frame.cols() && axis; ++c)
        for (int r0 = 0; r0 < f.frame.rows() && axis; ++r0) {
          double v = f.frame(r0, c);
          if (std::abs(v) > 1e-12 && std::abs(v - 1.0) > 1e-12) axis = false;
        }
      if (axis) continue;  // covered with offsets above
      f.offset = center;
      out.push_back({f});
    }
  }
  return out;
}

}  // namespace

PorosityResult porosity_check(const GridSet& x, int k, double rho, double eta, int net_res) {
  if (k < 1 || k > x.dim) throw Error("k out of range");
  if (rho <= 0 || rho >= 1 || eta <= 0 || eta >= 1) throw Error("rho and eta must be in (0,1)");
  PorosityResult result;
  result.k = k;
  result.rho = rho;
  result.eta = eta;
  result.net_res = net_res;

  int d = x.dim;
  double delta = 0.5 * std::pow(0.5, x.scale_exp);  // half-cell thickening
  auto pos = lattice_positions(x);

  auto net = porosity_flat_net(d, k, net_res);
  result.flats_tested = static_cast<std::int64_t>(net.size());

  for (const auto& entry : net) {
    const AffineFlat& w = entry.flat;
    // project all points once per flat
    std::vector<Eigen::VectorXd> proj(pos.size());
    std::vector<double> perp(pos.size());
    for (std::size_t i = 0; i < pos.size(); ++i) {
      Eigen::VectorXd v = pos[i] - w.offset;
      Eigen::VectorXd t = w.frame.transpose() * v;
      proj[i] = t;
      perp[i] = std::sqrt(std::max(0.0, v.squaredNorm() - t.squaredNorm()));
    }
    // blocked(y, rr): some thickened point meets the k-disk B(y, rr) on W
    auto blocked = [&](const Eigen::VectorXd& y, double rr) {
      for (std::size_t i = 0; i < pos.size(); ++i) {
        double lateral = (proj[i] - y).norm();
        double dist = lateral <= rr ? perp[i]
                                    : std::sqrt(perp[i] * perp[i] + (lateral - rr) * (lateral - rr));
        if (dist <= delta) return true;
      }
      return false;
    };

    for (double r = 1.0; r >= eta * (1.0 - 1e-12); r /= 2.0) {
      // centers on a grid covering the flat's trace through [0,1]^d
      double step = r / 2.0;
      std::int64_t per_axis = static_cast<std::int64_t>(std::floor(1.0 / step)) + 1;
      std::vector<std::int64_t> cidx(static_cast<std::size_t>(k), 0);
      while (true) {
        Eigen::VectorXd c(k);
        for (int i = 0; i < k; ++i) c[i] = static_cast<double>(cidx[static_cast<std::size_t>(i)]) * step;
        // skip centers whose ball cannot meet any thickened point laterally
        bool relevant = false;
        double reach = r * (1.0 + rho) + delta;
        for (std::size_t i = 0; i < pos.size() && !relevant; ++i)
          if ((proj[i] - c).norm() <= reach && perp[i] <= rho * r + delta) relevant = true;
        if (relevant) {
          bool found = false;
          double ystep = std::max(rho * r / 2.0, 1e-9);
          std::int64_t yrange = static_cast<std::int64_t>(std::floor(r / ystep));
          std::vector<std::int64_t> yidx(static_cast<std::size_t>(k), -yrange);
          while (!found) {
            Eigen::VectorXd y(k);
            double n2 = 0;
            for (int i = 0; i < k; ++i) {
              y[i] = c[i] + static_cast<double>(yidx[static_cast<std::size_t>(i)]) * ystep;
              double diff = y[i] - c[i];
              n2 += diff * diff;
            }
            if (n2 <= r * r && !blocked(y, rho * r)) found = true;
            std::size_t i = 0;
            for (; i < yidx.size(); ++i) {
              if (yidx[i] < yrange) { ++yidx[i]; break; }
              yidx[i] = -yrange;
            }
            if (i == yidx.size()) break;
          }
          if (!found) {
            result.porous = false;
            PorosityCounterexample ce;
            ce.flat = w;
            Eigen::VectorXd full_center = w.offset + w.frame * c;
            ce.center.assign(full_center.data(), full_center.data() + d);
            ce.radius = r;
            result.counterexample = ce;
            return result;
          }
        }
        std::size_t i = 0;
        for (; i < cidx.size(); ++i) {
          if (cidx[i] + 1 < per_axis) { ++cidx[i]; break; }
          cidx[i] = 0;
        }
        if (i == cidx.size()) break;
      }
    }
  }
  result.porous = true;
  return result;
}

double porous_covering_bound(int k, double rho, int L, double c_d, double slack) {
  if (k < 1 || rho <= 0 || rho >= 1 || L < 1) throw Error("bad parameters");
  return static_cast<double>(k) - c_d * std::pow(rho, k) / std::log2(1.0 / rho) +
         slack / static_cast<double>(L);
}

}  // namespace dsk
