#pragma once

// Intrinsic Riemannian geometry of a metric given as jets: Levi-Civita
// connection, curvature, sectional and scalar curvature, gradient, Laplacian
// and orthonormal frames.
//
// Conventions
//   R(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z
//   R(X,Y,Z,W) = g(R(X,Y)Z, W), so K(X^Y) = R(X,Y,Y,X) / |X^Y|^2.
//   The Laplacian is the geometer's one, sum_i ((nabla_{e_i} e_i) psi - e_i e_i psi),
//   i.e. minus the trace of the Hessian: on flat R^n, Laplacian(x1^2) = -2.

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "warpcheck/expr.hpp"
#include "warpcheck/jets.hpp"
#include "warpcheck/tensor.hpp"

namespace warpcheck {

/// Smooth field of symmetric matrices g_ij on a chart, evaluable as jets.
///
/// The evaluator receives the coordinate jets (or any jets composed into the
/// chart) and returns the n*n entries row-major. Metrics built from
/// expressions, induced metrics and warped assemblies all share this form.
class MetricField {
 public:
  using Evaluator = std::function<std::vector<Jet3>(std::span<const Jet3>)>;

  MetricField() = default;
  MetricField(int dim, Evaluator eval, DomainBox domain, std::string label = {})
      : dim_(dim), eval_(std::move(eval)), domain_(std::move(domain)), label_(std::move(label)) {
    if (dim <= 0) throw InvalidArgument("metric dimension must be positive");
  }

  /// Metric from an n*n row-major matrix of expressions over x1..xn.
  /// Off-diagonal pairs must be structurally identical or one of them empty.
  static MetricField from_exprs(int n, std::vector<Expr> entries, DomainBox domain,
                                std::vector<double> params = {}, std::string label = {}) {
    if (static_cast<int>(entries.size()) != n * n) throw InvalidArgument("metric needs n*n entries");
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        auto& a = entries[static_cast<std::size_t>(i * n + j)];
        auto& b = entries[static_cast<std::size_t>(j * n + i)];
        if (a.empty()) a = b;
        if (b.empty()) b = a;
        if (!(a == b)) throw InvalidArgument("metric entries g_ij and g_ji differ");
      }
    }
    for (auto& e : entries) {
      if (e.empty()) e = Expr::number(0.0, n);
    }
    auto eval = [n, entries = std::move(entries), params = std::move(params)](std::span<const Jet3> vars) {
      std::vector<Jet3> out(static_cast<std::size_t>(n * n));
      for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
          Jet3 v = eval_expr(entries[static_cast<std::size_t>(i * n + j)], vars, params);
          out[static_cast<std::size_t>(j * n + i)] = v;
          out[static_cast<std::size_t>(i * n + j)] = std::move(v);
        }
      }
      return out;
    };
    return MetricField(n, std::move(eval), std::move(domain), std::move(label));
  }

  int dim() const noexcept { return dim_; }
  const DomainBox& domain() const noexcept { return domain_; }
  const std::string& label() const noexcept { return label_; }

  std::vector<Jet3> jets(std::span<const Jet3> vars) const {
    if (static_cast<int>(vars.size()) != dim_) throw InvalidArgument("metric evaluated with wrong arity");
    return eval_(vars);
  }
  std::vector<Jet3> jets(const Point& x) const {
    const auto vars = jet_vars(x);
    return jets(std::span<const Jet3>(vars));
  }

  Mat value(const Point& x) const {
    const auto g = jets(x);
    Mat m(dim_, dim_);
    for (int i = 0; i < dim_; ++i) {
      for (int j = 0; j < dim_; ++j) m(i, j) = g[static_cast<std::size_t>(i * dim_ + j)].value();
    }
    return m;
  }

 private:
  int dim_ = 0;
  Evaluator eval_;
  DomainBox domain_;
  std::string label_;
};

/// Metric values and coordinate derivatives through order 2 at a point.
struct MetricDerivs {
  int n = 0;
  Mat g;
  Mat ginv;
  std::vector<Mat> dg;                // dg[k](i,j) = d_k g_ij
  std::vector<std::vector<Mat>> ddg;  // ddg[k][l](i,j) = d_k d_l g_ij (when order >= 2)
  int order = 0;
};

inline MetricDerivs metric_derivs_from_jets(int n, const std::vector<Jet3>& jets) {
  MetricDerivs d;
  d.n = n;
  d.order = jets.front().order();
  for (const auto& j : jets) d.order = std::min(d.order, j.order());
  d.g = Mat(n, n);
  d.dg.assign(static_cast<std::size_t>(n), Mat::Zero(n, n));
  d.ddg.assign(static_cast<std::size_t>(n), std::vector<Mat>(static_cast<std::size_t>(n), Mat::Zero(n, n)));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const Jet3& e = jets[static_cast<std::size_t>(i * n + j)];
      d.g(i, j) = e.value();
      for (int k = 0; k < n; ++k) {
        d.dg[static_cast<std::size_t>(k)](i, j) = e.d1(k);
        for (int l = 0; l < n; ++l) d.ddg[static_cast<std::size_t>(k)][static_cast<std::size_t>(l)](i, j) = e.d2(k, l);
      }
    }
  }
  const double asym = (d.g - d.g.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-10 * std::max(1.0, d.g.cwiseAbs().maxCoeff())) throw DegenerateMetric("metric is not symmetric");
  d.g = 0.5 * (d.g + d.g.transpose());
  d.ginv = spd_inverse(d.g);
  return d;
}

inline MetricDerivs metric_derivs(const MetricField& g, const Point& x) {
  if (x.dim() != g.dim()) throw InvalidArgument("point dimension does not match metric");
  return metric_derivs_from_jets(g.dim(), g.jets(x));
}

/// Christoffel symbols of the second kind, gamma(k, i, j) = Gamma^k_ij.
inline Array3 christoffel(const MetricDerivs& d) {
  const int n = d.n;
  Array3 first(n);  // Gamma_{l,ij}
  for (int l = 0; l < n; ++l) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        first(l, i, j) = 0.5 * (d.dg[i](j, l) + d.dg[j](i, l) - d.dg[l](i, j));
      }
    }
  }
  Array3 gamma(n);
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int l = 0; l < n; ++l) s += d.ginv(k, l) * first(l, i, j);
        gamma(k, i, j) = s;
      }
    }
  }
  return gamma;
}

inline Array3 christoffel(const MetricField& g, const Point& x) { return christoffel(metric_derivs(g, x)); }

enum class Basis { Coordinate, Frame };

/// Fully covariant curvature R(i,j,k,l) = g(R(e_i,e_j)e_k, e_l) at a point.
class Curvature4 {
 public:
  Curvature4() = default;
  Curvature4(Point base, Array4 components, Basis basis)
      : base_(std::move(base)), r_(std::move(components)), basis_(basis) {}

  int dim() const noexcept { return r_.dim(); }
  const Point& base() const noexcept { return base_; }
  Basis basis() const noexcept { return basis_; }
  double operator()(int i, int j, int k, int l) const { return r_(i, j, k, l); }

  double eval(const Vec& x, const Vec& y, const Vec& z, const Vec& w) const {
    const int n = dim();
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      if (x(i) == 0.0) continue;
      for (int j = 0; j < n; ++j) {
        if (y(j) == 0.0) continue;
        for (int k = 0; k < n; ++k) {
          if (z(k) == 0.0) continue;
          double t = 0.0;
          for (int l = 0; l < n; ++l) t += r_(i, j, k, l) * w(l);
          s += x(i) * y(j) * z(k) * t;
        }
      }
    }
    return s;
  }

  /// Components in the basis given by the columns of `frame`.
  Curvature4 in_frame(const Mat& frame) const {
    const int m = static_cast<int>(frame.cols());
    Array4 out(m);
    for (int a = 0; a < m; ++a) {
      for (int b = 0; b < m; ++b) {
        for (int c = 0; c < m; ++c) {
          for (int d = 0; d < m; ++d) out(a, b, c, d) = eval(frame.col(a), frame.col(b), frame.col(c), frame.col(d));
        }
      }
    }
    return Curvature4(base_, std::move(out), Basis::Frame);
  }

  struct Symmetries {
    double antisym_first = 0.0;   // R_ijkl + R_jikl
    double antisym_second = 0.0;  // R_ijkl + R_ijlk
    double pair = 0.0;            // R_ijkl - R_klij
    double bianchi = 0.0;         // R_ijkl + R_jkil + R_kijl
    double max() const { return std::max({antisym_first, antisym_second, pair, bianchi}); }
  };

  Symmetries symmetry_residuals() const {
    Symmetries s;
    const int n = dim();
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) {
          for (int l = 0; l < n; ++l) {
            const double r = r_(i, j, k, l);
            s.antisym_first = std::max(s.antisym_first, std::abs(r + r_(j, i, k, l)));
            s.antisym_second = std::max(s.antisym_second, std::abs(r + r_(i, j, l, k)));
            s.pair = std::max(s.pair, std::abs(r - r_(k, l, i, j)));
            s.bianchi = std::max(s.bianchi, std::abs(r + r_(j, k, i, l) + r_(k, i, j, l)));
          }
        }
      }
    }
    return s;
  }

 private:
  Point base_;
  Array4 r_;
  Basis basis_ = Basis::Coordinate;
};

/// Coordinate curvature from metric derivatives through order 2:
/// R^l_kij = d_i G^l_jk - d_j G^l_ik + G^l_im G^m_jk - G^l_jm G^m_ik, lowered on l.
inline Curvature4 curvature(const MetricDerivs& d, const Point& base) {
  if (d.order < 2) throw InvalidArgument("curvature needs metric jets of order 2");
  const int n = d.n;
  Array3 first(n);
  for (int l = 0; l < n; ++l)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) first(l, i, j) = 0.5 * (d.dg[i](j, l) + d.dg[j](i, l) - d.dg[l](i, j));
  const Array3 gamma = christoffel(d);

  // dgamma[m](k,i,j) = d_m Gamma^k_ij
  std::vector<Array3> dgamma(static_cast<std::size_t>(n), Array3(n));
  for (int m = 0; m < n; ++m) {
    const Mat dginv = -d.ginv * d.dg[m] * d.ginv;
    Array3 dfirst(n);
    for (int l = 0; l < n; ++l)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          dfirst(l, i, j) = 0.5 * (d.ddg[m][i](j, l) + d.ddg[m][j](i, l) - d.ddg[m][l](i, j));
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          double s = 0.0;
          for (int l = 0; l < n; ++l) s += dginv(k, l) * first(l, i, j) + d.ginv(k, l) * dfirst(l, i, j);
          dgamma[static_cast<std::size_t>(m)](k, i, j) = s;
        }
  }

  Array4 rup(n);  // rup(l,k,i,j) = R^l_kij
  for (int l = 0; l < n; ++l)
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          double s = dgamma[static_cast<std::size_t>(i)](l, j, k) - dgamma[static_cast<std::size_t>(j)](l, i, k);
          for (int m = 0; m < n; ++m) s += gamma(l, i, m) * gamma(m, j, k) - gamma(l, j, m) * gamma(m, i, k);
          rup(l, k, i, j) = s;
        }

  Array4 r(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int w = 0; w < n; ++w) {
          double s = 0.0;
          for (int l = 0; l < n; ++l) s += d.g(w, l) * rup(l, k, i, j);
          r(i, j, k, w) = s;
        }
  return Curvature4(base, std::move(r), Basis::Coordinate);
}

inline Curvature4 curvature(const MetricField& g, const Point& x) { return curvature(metric_derivs(g, x), x); }

/// Sectional curvature of span(X, Y) given the curvature and metric at a point.
inline double sectional(const Curvature4& r, const Mat& g, const Vec& x, const Vec& y) {
  const double gram = inner(g, x, x) * inner(g, y, y) - inner(g, x, y) * inner(g, x, y);
  if (!(gram > 1e-12)) throw DegeneratePlane("sectional curvature of a degenerate plane");
  return r.eval(x, y, y, x) / gram;
}

inline double sectional(const MetricField& g, const Point& x, const Vec& X, const Vec& Y) {
  const MetricDerivs d = metric_derivs(g, x);
  return sectional(curvature(d, x), d.g, X, Y);
}

/// Orthonormal basis (columns) of a tangent space with respect to a metric.
struct OrthoFrame {
  Point base;
  Mat vectors;  // columns, chart components
  Mat metric;   // the metric they are orthonormal against

  int size() const noexcept { return static_cast<int>(vectors.cols()); }
  Vec operator[](int i) const { return vectors.col(i); }

  /// max |g(e_i, e_j) - delta_ij|
  double orthonormality_residual() const {
    const Mat gram = vectors.transpose() * metric * vectors;
    return (gram - Mat::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
  }
};

/// Gram-Schmidt against g at x. Seeds (if any) must be linearly independent;
/// the frame spans the same flag as the seeds and is completed with
/// coordinate vectors in index order.
inline OrthoFrame orthonormal_frame(const Mat& g, const Point& x, const std::vector<Vec>& seeds = {}) {
  const int n = static_cast<int>(g.rows());
  Mat basis(n, 0);
  if (static_cast<int>(seeds.size()) > n) throw DegeneratePlane("more frame seeds than dimensions");
  if (extend_orthonormal(g, basis, seeds, n) > 0) throw DegeneratePlane("frame seeds are linearly dependent");
  extend_orthonormal(g, basis, coordinate_vectors(n), n);
  if (basis.cols() != n) throw DegenerateMetric("could not complete an orthonormal frame");
  return OrthoFrame{x, basis, g};
}

inline OrthoFrame orthonormal_frame(const MetricField& g, const Point& x, const std::vector<Vec>& seeds = {}) {
  const Mat gv = g.value(x);
  spd_inverse(gv);  // rejects degenerate metrics
  return orthonormal_frame(gv, x, seeds);
}

/// Sum over i<j of K(e_i ^ e_j) for an orthonormal frame.
inline double scalar_curvature(const Curvature4& r, const OrthoFrame& frame) {
  double tau = 0.0;
  for (int i = 0; i < frame.size(); ++i)
    for (int j = i + 1; j < frame.size(); ++j) tau += r.eval(frame[i], frame[j], frame[j], frame[i]);
  return tau;
}

inline double scalar_curvature(const MetricField& g, const Point& x, const std::vector<Vec>& seeds = {}) {
  const MetricDerivs d = metric_derivs(g, x);
  return scalar_curvature(curvature(d, x), orthonormal_frame(d.g, x, seeds));
}

/// Gradient components g^{ij} d_j psi from a jet of psi.
inline Vec gradient(const MetricDerivs& d, const Jet3& psi) {
  Vec dpsi(d.n);
  for (int i = 0; i < d.n; ++i) dpsi(i) = psi.d1(i);
  return d.ginv * dpsi;
}

inline Vec gradient(const MetricField& g, const Expr& psi, const Point& x, std::span<const double> params = {}) {
  return gradient(metric_derivs(g, x), eval_expr(psi, x, params));
}

inline double grad_norm_sq(const MetricDerivs& d, const Jet3& psi) {
  const Vec grad = gradient(d, psi);
  return inner(d.g, grad, grad);
}

inline double grad_norm_sq(const MetricField& g, const Expr& psi, const Point& x,
                           std::span<const double> params = {}) {
  return grad_norm_sq(metric_derivs(g, x), eval_expr(psi, x, params));
}

/// Sum over an orthonormal frame of (e_i psi)^2.
inline double grad_norm_sq_frame(const OrthoFrame& frame, const Jet3& psi) {
  double s = 0.0;
  for (int i = 0; i < frame.size(); ++i) {
    double e_psi = 0.0;
    for (int k = 0; k < psi.dim(); ++k) e_psi += frame.vectors(k, i) * psi.d1(k);
    s += e_psi * e_psi;
  }
  return s;
}

/// Geometer's Laplacian evaluated over an orthonormal frame. The terms with
/// derivatives of the frame fields cancel between (nabla_{e_i} e_i) psi and
/// e_i e_i psi, leaving -sum_i e_i^k e_i^l (d_k d_l psi - Gamma^m_kl d_m psi).
inline double laplacian(const MetricDerivs& d, const OrthoFrame& frame, const Jet3& psi) {
  if (psi.order() < 2) throw InvalidArgument("laplacian needs a jet of order 2");
  const Array3 gamma = christoffel(d);
  const int n = d.n;
  double s = 0.0;
  for (int i = 0; i < frame.size(); ++i) {
    for (int k = 0; k < n; ++k) {
      for (int l = 0; l < n; ++l) {
        double hess = psi.d2(k, l);
        for (int m = 0; m < n; ++m) hess -= gamma(m, k, l) * psi.d1(m);
        s -= frame.vectors(k, i) * frame.vectors(l, i) * hess;
      }
    }
  }
  return s;
}

/// Same operator written with the inverse metric, -g^{kl}(d_k d_l psi - Gamma^m_kl d_m psi).
inline double laplacian_coordinate(const MetricDerivs& d, const Jet3& psi) {
  const Array3 gamma = christoffel(d);
  double s = 0.0;
  for (int k = 0; k < d.n; ++k)
    for (int l = 0; l < d.n; ++l) {
      double hess = psi.d2(k, l);
      for (int m = 0; m < d.n; ++m) hess -= gamma(m, k, l) * psi.d1(m);
      s -= d.ginv(k, l) * hess;
    }
  return s;
}

inline double laplacian(const MetricField& g, const Expr& psi, const Point& x, std::span<const double> params = {}) {
  const MetricDerivs d = metric_derivs(g, x);
  return laplacian(d, orthonormal_frame(d.g, x), eval_expr(psi, x, params));
}

/// Smallest leading principal minor of g at x; the metric is positive
/// definite there iff the result is positive.
inline double positive_definiteness_margin(const MetricField& g, const Point& x) {
  return min_leading_minor(g.value(x));
}

}  // namespace warpcheck
