#pragma once

// Dense pointwise arrays and metric linear algebra shared by the geometry
// modules. Values at a point only; derivative information lives in Jet3.

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <vector>

#include "warpcheck/errors.hpp"

namespace warpcheck {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// n x n x n array, index order as written at the call site.
class Array3 {
 public:
  Array3() = default;
  explicit Array3(int n) : n_(n), data_(static_cast<std::size_t>(n * n * n), 0.0) {}
  int dim() const noexcept { return n_; }
  double& operator()(int a, int b, int c) { return data_[at(a, b, c)]; }
  double operator()(int a, int b, int c) const { return data_[at(a, b, c)]; }

 private:
  std::size_t at(int a, int b, int c) const { return static_cast<std::size_t>((a * n_ + b) * n_ + c); }
  int n_ = 0;
  std::vector<double> data_;
};

/// n x n x n x n array.
class Array4 {
 public:
  Array4() = default;
  explicit Array4(int n) : n_(n), data_(static_cast<std::size_t>(n * n * n * n), 0.0) {}
  int dim() const noexcept { return n_; }
  double& operator()(int a, int b, int c, int d) { return data_[at(a, b, c, d)]; }
  double operator()(int a, int b, int c, int d) const { return data_[at(a, b, c, d)]; }

 private:
  std::size_t at(int a, int b, int c, int d) const {
    return static_cast<std::size_t>(((a * n_ + b) * n_ + c) * n_ + d);
  }
  int n_ = 0;
  std::vector<double> data_;
};

inline double inner(const Mat& g, const Vec& x, const Vec& y) { return x.dot(g * y); }
inline double norm(const Mat& g, const Vec& x) { return std::sqrt(std::max(0.0, inner(g, x, x))); }

/// Residual threshold below which a Gram-Schmidt candidate counts as dependent.
inline constexpr double kFramePivotTol = 1e-12;

/// Modified Gram-Schmidt against g. Starts from the orthonormal columns of
/// `basis` and appends candidates in order until `target` columns exist;
/// candidates whose relative residual falls below kFramePivotTol are skipped.
/// Returns the number of candidates that were rejected before the target
/// was reached.
inline int extend_orthonormal(const Mat& g, Mat& basis, const std::vector<Vec>& candidates, int target) {
  int rejected = 0;
  for (const Vec& c : candidates) {
    if (basis.cols() >= target) break;
    const double c_norm = norm(g, c);
    if (c_norm == 0.0) {
      ++rejected;
      continue;
    }
    Vec v = c / c_norm;
    for (int pass = 0; pass < 2; ++pass) {
      for (int k = 0; k < basis.cols(); ++k) v -= inner(g, basis.col(k), v) * basis.col(k);
    }
    const double r = norm(g, v);
    if (r < kFramePivotTol) {
      ++rejected;
      continue;
    }
    basis.conservativeResize(g.rows(), basis.cols() + 1);
    basis.col(basis.cols() - 1) = v / r;
  }
  return rejected;
}

inline std::vector<Vec> coordinate_vectors(int n) {
  std::vector<Vec> out;
  for (int i = 0; i < n; ++i) out.push_back(Vec::Unit(n, i));
  return out;
}

/// Inverse of a symmetric positive-definite matrix; throws DegenerateMetric.
inline Mat spd_inverse(const Mat& g) {
  Eigen::LLT<Mat> llt(g);
  if (llt.info() != Eigen::Success) throw DegenerateMetric("metric is not positive definite");
  Mat inv = llt.solve(Mat::Identity(g.rows(), g.cols()));
  return 0.5 * (inv + inv.transpose());
}

/// Smallest leading principal minor (positive iff the matrix is positive definite).
inline double min_leading_minor(const Mat& g) {
  double m = INFINITY;
  for (int k = 1; k <= g.rows(); ++k) m = std::min(m, g.topLeftCorner(k, k).determinant());
  return m;
}

}  // namespace warpcheck
