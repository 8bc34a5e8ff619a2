// Affine flats: a k-dimensional plane given by an orthonormal direction
// frame and an offset point.
#pragma once

#include <Eigen/Dense>

#include "dsk/types.hpp"

namespace dsk {

struct AffineFlat {
  Eigen::MatrixXd frame;   // d x k, orthonormal columns (directions)
  Eigen::VectorXd offset;  // point in R^d

  int ambient_dim() const { return static_cast<int>(offset.size()); }
  int dim_k() const { return static_cast<int>(frame.cols()); }

  // Squared distance from a point to the flat.
  double dist_sq(const Eigen::VectorXd& p) const {
    Eigen::VectorXd v = p - offset;
    if (frame.cols() == 0) return v.squaredNorm();
    Eigen::VectorXd t = frame.transpose() * v;
    return std::max(0.0, v.squaredNorm() - t.squaredNorm());
  }

  // Orthogonal projection onto the flat's direction space (offset ignored),
  // expressed in the frame's intrinsic coordinates.
  Eigen::VectorXd project_intrinsic(const Eigen::VectorXd& p) const {
    return frame.transpose() * p;
  }

  void validate(double tol = 1e-12) const;

  static AffineFlat span_axes(int dim, const std::vector<int>& axes,
                              const Eigen::VectorXd& offset);
  static AffineFlat point(const Eigen::VectorXd& offset);
  static AffineFlat full(int dim);
};

// Deterministic orthonormal basis of the orthogonal complement of the
// flat's direction space.
Eigen::MatrixXd orthogonal_complement(const AffineFlat& v);

}  // namespace dsk
