#pragma once

// Warped-product metrics g = g1 + f^2 g2 on a chart whose first n1
// coordinates belong to the leaf factor N1 and last n2 to the fiber N2, with
// block-level checks that apply equally to assembled and induced metrics.

#include <cmath>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "warpcheck/expr.hpp"
#include "warpcheck/riemann.hpp"

namespace warpcheck {

/// Coordinate split of a chart into leaf (first n1) and fiber (last n2) blocks.
struct BlockSplit {
  int n1 = 0;
  int n2 = 0;
  int dim() const noexcept { return n1 + n2; }
  bool is_leaf(int i) const noexcept { return i < n1; }
};

/// Product of a leaf box and a fiber box; fiber exclusions are shifted past the leaf axes.
inline DomainBox product_domain(const DomainBox& leaf, const DomainBox& fiber) {
  std::vector<double> lo, hi;
  for (int i = 0; i < leaf.dim(); ++i) lo.push_back(leaf.lower(i)), hi.push_back(leaf.upper(i));
  for (int i = 0; i < fiber.dim(); ++i) lo.push_back(fiber.lower(i)), hi.push_back(fiber.upper(i));
  std::vector<ExcludedBall> excluded = leaf.excluded();
  for (ExcludedBall b : fiber.excluded()) {
    for (int& a : b.axes) a += leaf.dim();
    excluded.push_back(std::move(b));
  }
  return DomainBox(std::move(lo), std::move(hi), std::move(excluded));
}

/// Jet of a leaf function (an expression over x1..x_n1) at a point of the full chart.
inline Jet3 leaf_jet(const Expr& f, std::span<const Jet3> vars, int n1, std::span<const double> params = {}) {
  return eval_expr(f, vars.first(static_cast<std::size_t>(n1)), params);
}

inline Jet3 leaf_jet(const Expr& f, const Point& x, int n1, std::span<const double> params = {}) {
  const auto vars = jet_vars(x);
  return leaf_jet(f, std::span<const Jet3>(vars), n1, params);
}

class WarpedMetric {
 public:
  WarpedMetric(MetricField g1, MetricField g2, Expr f, std::vector<double> params, MetricField assembled)
      : g1_(std::move(g1)), g2_(std::move(g2)), f_(std::move(f)), params_(std::move(params)),
        assembled_(std::move(assembled)) {}

  const MetricField& g1() const noexcept { return g1_; }
  const MetricField& g2() const noexcept { return g2_; }
  const Expr& f() const noexcept { return f_; }
  std::span<const double> params() const noexcept { return params_; }
  const MetricField& metric() const noexcept { return assembled_; }
  BlockSplit split() const noexcept { return {g1_.dim(), g2_.dim()}; }

  double f_value(const Point& x) const {
    return eval_value(f_, x.coords().first(static_cast<std::size_t>(g1_.dim())), params_);
  }
  Point leaf_point(const Point& x) const {
    return Point(std::vector<double>(x.coords().begin(), x.coords().begin() + g1_.dim()));
  }

 private:
  MetricField g1_;
  MetricField g2_;
  Expr f_;
  std::vector<double> params_;
  MetricField assembled_;
};

/// Assembles g1 + f^2 g2. `f` is an expression over the leaf coordinates.
/// Throws InvalidWarping if f is not positive at one of `check_points`
/// (points of the assembled chart).
inline WarpedMetric assemble(MetricField g1, MetricField g2, Expr f, std::vector<double> params = {},
                             const std::vector<Point>& check_points = {}) {
  const int n1 = g1.dim(), n2 = g2.dim(), n = n1 + n2;
  if (f.dim() != n1) throw InvalidArgument("warping function must be an expression over the leaf coordinates");
  auto eval = [g1, g2, f, params, n1, n2, n](std::span<const Jet3> vars) {
    const auto leaf = vars.first(static_cast<std::size_t>(n1));
    const auto fiber = vars.subspan(static_cast<std::size_t>(n1), static_cast<std::size_t>(n2));
    const auto a = g1.jets(leaf);
    const auto b = g2.jets(fiber);
    const Jet3 fj = eval_expr(f, leaf, params);
    const Jet3 f2 = fj * fj;
    const Jet3 zero(0.0, vars[0].dim(), vars[0].order());
    std::vector<Jet3> out(static_cast<std::size_t>(n * n), zero);
    for (int i = 0; i < n1; ++i)
      for (int j = 0; j < n1; ++j) out[static_cast<std::size_t>(i * n + j)] = a[static_cast<std::size_t>(i * n1 + j)];
    for (int i = 0; i < n2; ++i)
      for (int j = 0; j < n2; ++j)
        out[static_cast<std::size_t>((n1 + i) * n + n1 + j)] = f2 * b[static_cast<std::size_t>(i * n2 + j)];
    return out;
  };
  MetricField assembled(n, std::move(eval), product_domain(g1.domain(), g2.domain()),
                        g1.label().empty() ? std::string("warped") : g1.label() + " x_f " + g2.label());
  WarpedMetric w(std::move(g1), std::move(g2), std::move(f), std::move(params), std::move(assembled));
  for (const Point& p : check_points) {
    double v = 0.0;
    try {
      v = w.f_value(p);
    } catch (const JetDomainError&) {
      v = NAN;
    }
    if (!(v > 0.0)) throw InvalidWarping("warping function is not positive at a sample point");
  }
  return w;
}

/// Restriction of a block metric to the leaf through x: fiber coordinates are
/// frozen at their values in x and only the leaf block is returned.
inline MetricField leaf_metric(const MetricField& g, const BlockSplit& s, const Point& x) {
  const std::vector<double> fiber(x.coords().begin() + s.n1, x.coords().end());
  const int n = s.dim(), n1 = s.n1;
  auto eval = [g, fiber, n, n1](std::span<const Jet3> leaf) {
    std::vector<Jet3> full(leaf.begin(), leaf.end());
    for (double c : fiber) full.emplace_back(c, leaf[0].dim(), leaf[0].order());
    const auto gj = g.jets(std::span<const Jet3>(full));
    std::vector<Jet3> out;
    for (int i = 0; i < n1; ++i)
      for (int j = 0; j < n1; ++j) out.push_back(gj[static_cast<std::size_t>(i * n + j)]);
    return out;
  };
  std::vector<double> lo, hi;
  for (int i = 0; i < n1; ++i) lo.push_back(g.domain().lower(i)), hi.push_back(g.domain().upper(i));
  std::vector<ExcludedBall> excluded;
  for (const auto& b : g.domain().excluded()) {
    bool leaf_only = true;
    for (int a : b.axes) leaf_only = leaf_only && a < n1;
    if (leaf_only) excluded.push_back(b);
  }
  return MetricField(n1, std::move(eval), DomainBox(std::move(lo), std::move(hi), std::move(excluded)), "leaf");
}

/// Laplacian of the warping function on the leaf through x (geometer's sign).
inline double leaf_laplacian(const MetricField& g, const BlockSplit& s, const Expr& f, const Point& x,
                             std::span<const double> params = {}) {
  const Point leaf(std::vector<double>(x.coords().begin(), x.coords().begin() + s.n1));
  return laplacian(leaf_metric(g, s, x), f, leaf, params);
}

/// Squared leaf gradient norm of a leaf function.
inline double leaf_grad_norm_sq(const MetricField& g, const BlockSplit& s, const Expr& psi, const Point& x,
                                std::span<const double> params = {}) {
  const Point leaf(std::vector<double>(x.coords().begin(), x.coords().begin() + s.n1));
  return grad_norm_sq(leaf_metric(g, s, x), psi, leaf, params);
}

/// Orthonormal frame whose first n1 vectors span the leaf block and last n2
/// the fiber block. Gram-Schmidt in coordinate order yields this whenever the
/// metric is block diagonal at x.
inline OrthoFrame adapted_frame(const Mat& g, const BlockSplit& s, const Point& x) {
  const Mat mixed = g.block(0, s.n1, s.n1, s.n2);
  if (mixed.size() > 0 && mixed.cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, g.cwiseAbs().maxCoeff())) {
    throw InvalidArgument("metric is not block diagonal; no adapted frame");
  }
  return orthonormal_frame(g, x);
}

struct IdentityResiduals {
  double lhs = 0.0;
  double rhs = 0.0;
  double residual() const { return std::abs(lhs - rhs); }
};

/// Sum over mixed frame pairs of sectional curvatures, against n2 * Laplacian(f) / f.
inline IdentityResiduals warping_identity(const MetricField& g, const BlockSplit& s, const Expr& f, const Point& x,
                                          std::span<const double> params = {}) {
  const MetricDerivs d = metric_derivs(g, x);
  const OrthoFrame frame = adapted_frame(d.g, s, x);
  const Curvature4 r = curvature(d, x);
  IdentityResiduals out;
  for (int a = 0; a < s.n1; ++a)
    for (int b = s.n1; b < s.dim(); ++b) out.lhs += r.eval(frame[a], frame[b], frame[b], frame[a]);
  const double fv = eval_value(f, x.coords().first(static_cast<std::size_t>(s.n1)), params);
  out.rhs = s.n2 * leaf_laplacian(g, s, f, x, params) / fv;
  return out;
}

inline double mixed_sectional_sum(const WarpedMetric& w, const Point& x) {
  return warping_identity(w.metric(), w.split(), w.f(), x, w.params()).lhs;
}

inline double warping_identity_residual(const WarpedMetric& w, const Point& x) {
  return warping_identity(w.metric(), w.split(), w.f(), x, w.params()).residual();
}

/// Deviation of a metric from warped form at x:
///   mixed   max |g_aA|
///   leaf    max |d_A g_ab|             (leaf block independent of the fiber)
///   fiber   max |d_a (g_AB / f^2)|     (fiber block is f^2 times a fiber metric)
struct WarpedFormResiduals {
  double mixed = 0.0;
  double leaf = 0.0;
  double fiber = 0.0;
  double max() const { return std::max({mixed, leaf, fiber}); }
};

inline WarpedFormResiduals warped_form_residuals(const MetricField& g, const BlockSplit& s, const Expr& f,
                                                 const Point& x, std::span<const double> params = {}) {
  const int n = s.dim();
  if (g.dim() != n) throw InvalidArgument("block split does not match the metric dimension");
  const auto vars = jet_vars(x);
  const auto gj = g.jets(std::span<const Jet3>(vars));
  const Jet3 fj = leaf_jet(f, std::span<const Jet3>(vars), s.n1, params);
  const Jet3 inv_f2 = recip(fj * fj);
  auto at = [&](int i, int j) -> const Jet3& { return gj[static_cast<std::size_t>(i * n + j)]; };
  WarpedFormResiduals r;
  for (int a = 0; a < s.n1; ++a) {
    for (int A = s.n1; A < n; ++A) r.mixed = std::max(r.mixed, std::abs(at(a, A).value()));
    for (int b = 0; b < s.n1; ++b)
      for (int A = s.n1; A < n; ++A) r.leaf = std::max(r.leaf, std::abs(at(a, b).d1(A)));
  }
  for (int A = s.n1; A < n; ++A)
    for (int B = s.n1; B < n; ++B) {
      const Jet3 q = at(A, B) * inv_f2;
      for (int a = 0; a < s.n1; ++a) r.fiber = std::max(r.fiber, std::abs(q.d1(a)));
    }
  return r;
}

/// Second fundamental forms of the factor foliations inside a warped metric:
///   leaf_geodesic    max over leaf frame pairs of |fiber part of nabla_X Y|
///   fiber_umbilical  max over fiber frame pairs of
///                    |leaf part of nabla_Z W + g(Z,W) grad(f) / f|
struct FactorGeometry {
  double leaf_geodesic = 0.0;
  double fiber_umbilical = 0.0;
};

inline FactorGeometry factor_geometry(const MetricField& g, const BlockSplit& s, const Expr& f, const Point& x,
                                      std::span<const double> params = {}) {
  const MetricDerivs d = metric_derivs(g, x);
  const Array3 gamma = christoffel(d);
  const OrthoFrame frame = adapted_frame(d.g, s, x);
  const int n = s.dim();

  // Tensorial part of nabla_X Y for X, Y in the frame; the derivative of the
  // frame coefficients stays inside the block of Y and drops out of the
  // projections below.
  auto connection = [&](const Vec& X, const Vec& Y) {
    Vec out = Vec::Zero(n);
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) out(k) += gamma(k, i, j) * X(i) * Y(j);
    return out;
  };

  const Jet3 fj = leaf_jet(f, x, s.n1, params);
  const Vec grad = gradient(d, fj);

  FactorGeometry out;
  const Mat gl = d.g.topLeftCorner(s.n1, s.n1);
  const Mat gf = d.g.bottomRightCorner(s.n2, s.n2);
  for (int a = 0; a < s.n1; ++a)
    for (int b = 0; b < s.n1; ++b) {
      const Vec v = connection(frame[a], frame[b]);
      out.leaf_geodesic = std::max(out.leaf_geodesic, norm(gf, v.tail(s.n2)));
    }
  for (int A = s.n1; A < n; ++A)
    for (int B = s.n1; B < n; ++B) {
      const Vec v = connection(frame[A], frame[B]);
      const double gZW = inner(d.g, frame[A], frame[B]);
      const Vec dev = v.head(s.n1) + (gZW / fj.value()) * grad.head(s.n1);
      out.fiber_umbilical = std::max(out.fiber_umbilical, norm(gl, dev));
    }
  return out;
}

}  // namespace warpcheck
