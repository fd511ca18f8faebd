#pragma once

// Submanifolds given by an immersion into a Riemannian ambient: induced
// metric, second fundamental form, shape operators, the Gauss equation,
// relative null space, classification residuals and CR-warped-product checks.
//
// Conventions
//   h(X,Y) = normal part of the ambient derivative nabla~_X Y.
//   H = (1/n) trace h; partial means H1, H2 are block traces over the leaf
//   and fiber frame vectors.
//   Gauss: R(X,Y,Z,W) = R~(X,Y,Z,W) + g(h(X,W),h(Y,Z)) - g(h(X,Z),h(Y,W)).

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/SVD>

#include "warpcheck/riemann.hpp"
#include "warpcheck/structures.hpp"
#include "warpcheck/warped.hpp"

namespace warpcheck {

/// Smallest singular value of the pushforward (ambient norm) below which an
/// immersion is considered degenerate.
inline constexpr double kRankTol = 1e-8;

/// Relative tolerance on the tangential part of a vector passed as a normal.
inline constexpr double kNormalTol = 1e-8;

/// Warped-product declaration on the chart of an immersion: the first n1
/// coordinates are the leaf, the last n2 the fiber, f is an expression over
/// the leaf coordinates.
struct WarpedDecl {
  int n1 = 0;
  int n2 = 0;
  Expr f;
  BlockSplit split() const noexcept { return {n1, n2}; }
};

class Immersion {
 public:
  /// Receives n jets of the chart (any common variables) and returns the m
  /// ambient coordinates as jets in the same variables.
  using MapEvaluator = std::function<std::vector<Jet3>(std::span<const Jet3>)>;

  Immersion(int n, MapEvaluator map, MetricField ambient, DomainBox domain, std::vector<double> params = {},
            std::string label = {})
      : n_(n), map_(std::move(map)), ambient_(std::move(ambient)), domain_(std::move(domain)),
        params_(std::move(params)), label_(std::move(label)) {
    if (n <= 0 || n > ambient_.dim()) throw InvalidArgument("immersion dimension must lie in 1..ambient dimension");
    if (domain_.dim() != n) throw InvalidArgument("immersion domain dimension mismatch");
  }

  /// Immersion with coordinate expressions x^a(u) over the n chart variables.
  static Immersion from_exprs(int n, std::vector<Expr> comps, MetricField ambient, DomainBox domain,
                              std::vector<double> params = {}, std::string label = {}) {
    if (static_cast<int>(comps.size()) != ambient.dim()) throw InvalidArgument("immersion needs m components");
    for (auto& e : comps)
      if (e.empty()) e = Expr::number(0.0, n);
    auto map = [comps, params](std::span<const Jet3> vars) {
      std::vector<Jet3> out;
      out.reserve(comps.size());
      for (const Expr& e : comps) out.push_back(eval_expr(e, vars, params));
      return out;
    };
    return Immersion(n, std::move(map), std::move(ambient), std::move(domain), std::move(params), std::move(label));
  }

  int dim() const noexcept { return n_; }
  int ambient_dim() const noexcept { return ambient_.dim(); }
  const MetricField& ambient() const noexcept { return ambient_; }
  const DomainBox& domain() const noexcept { return domain_; }
  std::span<const double> params() const noexcept { return params_; }
  const std::string& label() const noexcept { return label_; }

  void set_warped(WarpedDecl w) {
    if (w.n1 <= 0 || w.n2 <= 0 || w.n1 + w.n2 != n_) throw InvalidArgument("warped split must cover the chart");
    warped_ = std::move(w);
  }
  const std::optional<WarpedDecl>& warped() const noexcept { return warped_; }

  void set_complex(AlmostComplexStructure s) {
    if (s.dim() != ambient_dim()) throw InvalidArgument("structure dimension mismatch");
    complex_ = std::move(s);
  }
  void set_contact(AlmostContactStructure s) {
    if (s.dim() != ambient_dim()) throw InvalidArgument("structure dimension mismatch");
    contact_ = std::move(s);
  }
  const std::optional<AlmostComplexStructure>& complex_structure() const noexcept { return complex_; }
  const std::optional<AlmostContactStructure>& contact_structure() const noexcept { return contact_; }

  std::vector<Jet3> map_jets(std::span<const Jet3> vars) const {
    if (static_cast<int>(vars.size()) != n_) throw InvalidArgument("immersion evaluated with wrong arity");
    auto out = map_(vars);
    if (static_cast<int>(out.size()) != ambient_dim()) throw InvalidArgument("immersion map returned wrong arity");
    return out;
  }
  std::vector<Jet3> map_jets(const Point& x) const {
    const auto vars = jet_vars(x);
    return map_jets(std::span<const Jet3>(vars));
  }

  Point image(const Point& x) const {
    const auto vars = jet_vars(x, 0);
    return values_of(map_jets(std::span<const Jet3>(vars)));
  }

  /// Jacobian d x^a / d u^i (m x n).
  Mat jacobian(const Point& x) const {
    const auto vars = jet_vars(x, 1);
    const auto phi = map_jets(std::span<const Jet3>(vars));
    Mat jac(ambient_dim(), n_);
    for (int a = 0; a < ambient_dim(); ++a)
      for (int i = 0; i < n_; ++i) jac(a, i) = phi[static_cast<std::size_t>(a)].d1(i);
    return jac;
  }

  /// Pullback metric g_ij = G_ab(x(u)) d_i x^a d_j x^b as a metric field on the chart.
  MetricField induced_metric() const {
    auto eval = [map = map_, ambient = ambient_, n = n_](std::span<const Jet3> vars) {
      const Point u = values_of(vars);
      const auto local = jet_vars(u);
      const auto phi = map(std::span<const Jet3>(local));
      const int m = ambient.dim();
      const auto G = ambient.jets(std::span<const Jet3>(phi));
      std::vector<Jet3> d;
      d.reserve(static_cast<std::size_t>(m * n));
      for (int a = 0; a < m; ++a)
        for (int i = 0; i < n; ++i) d.push_back(phi[static_cast<std::size_t>(a)].partial(i));
      auto D = [&](int a, int i) -> const Jet3& { return d[static_cast<std::size_t>(a * n + i)]; };
      std::vector<Jet3> g(static_cast<std::size_t>(n * n));
      for (int i = 0; i < n; ++i) {
        std::vector<Jet3> gd;  // G_ab d_i x^a, indexed by b
        for (int b = 0; b < m; ++b) {
          Jet3 s(0.0, n, Jet3::kMaxOrder);
          for (int a = 0; a < m; ++a) s += G[static_cast<std::size_t>(a * m + b)] * D(a, i);
          gd.push_back(std::move(s));
        }
        for (int j = i; j < n; ++j) {
          Jet3 s(0.0, n, Jet3::kMaxOrder);
          for (int b = 0; b < m; ++b) s += gd[static_cast<std::size_t>(b)] * D(b, j);
          g[static_cast<std::size_t>(j * n + i)] = s;
          g[static_cast<std::size_t>(i * n + j)] = std::move(s);
        }
      }
      if (is_coordinate_jets(vars)) return g;
      for (auto& e : g) e = compose(e, vars);
      return g;
    };
    return MetricField(n_, std::move(eval), domain_, label_.empty() ? "induced" : label_ + "/induced");
  }

  /// Restriction to the leaf (or fiber) through x: the other block is frozen.
  /// The result carries the ambient and structures but no warped declaration.
  Immersion restricted(bool leaf, const Point& x) const {
    if (!warped_) throw InvalidArgument("restriction needs a warped split");
    const int n1 = warped_->n1, n2 = warped_->n2;
    const int k = leaf ? n1 : n2;
    const int offset = leaf ? 0 : n1;
    const std::vector<double> frozen(x.coords().begin(), x.coords().end());
    auto map = [map = map_, frozen, k, offset](std::span<const Jet3> vars) {
      std::vector<Jet3> full;
      for (int i = 0; i < static_cast<int>(frozen.size()); ++i) {
        if (i >= offset && i < offset + k) {
          full.push_back(vars[static_cast<std::size_t>(i - offset)]);
        } else {
          full.emplace_back(frozen[static_cast<std::size_t>(i)], vars[0].dim(), vars[0].order());
        }
      }
      return map(std::span<const Jet3>(full));
    };
    std::vector<double> lo, hi;
    for (int i = offset; i < offset + k; ++i) lo.push_back(domain_.lower(i)), hi.push_back(domain_.upper(i));
    Immersion out(k, std::move(map), ambient_, DomainBox(std::move(lo), std::move(hi)), params_,
                  label_ + (leaf ? "/leaf" : "/fiber"));
    out.complex_ = complex_;
    out.contact_ = contact_;
    return out;
  }

  /// Point of the restricted chart corresponding to x.
  Point restricted_point(bool leaf, const Point& x) const {
    if (!warped_) throw InvalidArgument("restriction needs a warped split");
    const auto c = x.coords();
    return leaf ? Point(std::vector<double>(c.begin(), c.begin() + warped_->n1))
                : Point(std::vector<double>(c.begin() + warped_->n1, c.end()));
  }

 private:
  int n_ = 0;
  MapEvaluator map_;
  MetricField ambient_;
  DomainBox domain_;
  std::vector<double> params_;
  std::string label_;
  std::optional<WarpedDecl> warped_;
  std::optional<AlmostComplexStructure> complex_;
  std::optional<AlmostContactStructure> contact_;
};

// ---------------------------------------------------------------------------
// Second fundamental form
// ---------------------------------------------------------------------------

/// Second fundamental form at a point in an orthonormal tangent frame and an
/// orthonormal normal frame.
struct SecondFundamentalForm {
  Point base;
  Point image;
  Mat ambient_g;           // G at the image point
  Mat jac;                 // m x n Jacobian
  Mat frame;               // n x n, columns orthonormal for the induced metric
  Mat push;                // m x n, pushforward of the frame
  Mat normal;              // m x k, orthonormal normal frame
  int n_fperp = 0;         // leading normal vectors spanning F(D_perp)
  int xi_index = -1;       // frame index of the unit Reeb direction, if tangent
  std::optional<BlockSplit> split;
  std::vector<Mat> h;      // h[r](i,j) = G(h(e_i,e_j), nu_r)

  int n() const noexcept { return static_cast<int>(frame.cols()); }
  int codim() const noexcept { return static_cast<int>(normal.cols()); }

  /// Normal-frame coefficients of h(e_i, e_j).
  Vec at(int i, int j) const {
    Vec v(codim());
    for (int r = 0; r < codim(); ++r) v(r) = h[static_cast<std::size_t>(r)](i, j);
    return v;
  }

  /// Normal-frame coefficients of h(X, Y) for frame coefficient vectors X, Y.
  Vec apply(const Vec& X, const Vec& Y) const {
    Vec v(codim());
    for (int r = 0; r < codim(); ++r) v(r) = X.dot(h[static_cast<std::size_t>(r)] * Y);
    return v;
  }

  Vec trace_over(int begin, int end) const {
    Vec v = Vec::Zero(codim());
    for (int i = begin; i < end; ++i) v += at(i, i);
    return v;
  }
  Vec mean_curvature() const { return trace_over(0, n()) / n(); }
  Vec leaf_mean_curvature() const {
    if (!split) return Vec::Zero(codim());
    return trace_over(0, split->n1) / split->n1;
  }
  Vec fiber_mean_curvature() const {
    if (!split) return Vec::Zero(codim());
    return trace_over(split->n1, n()) / split->n2;
  }

  double norm_sq() const {
    double s = 0.0;
    for (const Mat& m : h) s += m.squaredNorm();
    return s;
  }

  /// Ambient vector with the given normal-frame coefficients.
  Vec normal_vector(const Vec& coeffs) const { return normal * coeffs; }
};

namespace detail {

inline std::vector<Vec> unit_vectors(int n, int begin, int end) {
  std::vector<Vec> out;
  for (int i = begin; i < end; ++i) out.push_back(Vec::Unit(n, i));
  return out;
}

/// Least-squares coordinates of an ambient vector on the tangent space.
inline Vec tangent_coordinates(const Mat& G, const Mat& jac, const Vec& v) {
  const Mat g = jac.transpose() * G * jac;
  return g.ldlt().solve(jac.transpose() * G * v);
}

/// Part of v orthogonal (for G) to the span of the orthonormal columns of B.
inline Vec residual_from_span(const Mat& G, const Mat& B, const Vec& v) {
  Vec r = v;
  for (int k = 0; k < B.cols(); ++k) r -= inner(G, B.col(k), v) * B.col(k);
  return r;
}

inline void check_rank(const Mat& G, const Mat& jac) {
  Eigen::LLT<Mat> llt(G);
  if (llt.info() != Eigen::Success) throw DegenerateMetric("ambient metric is not positive definite");
  const Mat scaled = Mat(llt.matrixU()) * jac;
  Eigen::JacobiSVD<Mat> svd(scaled);
  const auto& s = svd.singularValues();
  if (s(s.size() - 1) <= kRankTol * std::max(1.0, s(0))) {
    throw ImmersionDegenerate("pushforward is rank deficient at the sample point");
  }
}

}  // namespace detail

/// Second fundamental form of an immersion at x.
///
/// The tangent frame is Gram-Schmidt in coordinate order; with a warped split
/// the leaf block is completed before the fiber block, and with a contact
/// ambient the tangent Reeb direction is placed first. The normal frame starts
/// with J (or phi) of the fiber frame vectors when a structure and a split are
/// present, then coordinate vectors of the ambient.
inline SecondFundamentalForm second_fundamental_form(const Immersion& im, const Point& x) {
  const int n = im.dim(), m = im.ambient_dim();
  SecondFundamentalForm s;
  s.base = x;
  const auto phi = im.map_jets(x);
  s.image = values_of(phi);
  const MetricDerivs amb = metric_derivs(im.ambient(), s.image);
  s.ambient_g = amb.g;
  const Mat& G = s.ambient_g;
  s.jac = Mat(m, n);
  for (int a = 0; a < m; ++a)
    for (int i = 0; i < n; ++i) s.jac(a, i) = phi[static_cast<std::size_t>(a)].d1(i);
  detail::check_rank(G, s.jac);
  const Mat g = s.jac.transpose() * G * s.jac;
  if (im.warped()) s.split = im.warped()->split();

  std::optional<Vec> xi_sub;
  std::optional<ContactAlgebra> contact;
  if (im.contact_structure()) {
    contact = im.contact_structure()->at(s.image);
    Vec c = detail::tangent_coordinates(G, s.jac, contact->xi);
    if (norm(G, s.jac * c - contact->xi) <= 1e-8 * std::max(1.0, norm(G, contact->xi))) {
      if (s.split) c.tail(s.split->n2).setZero();
      xi_sub = c;
    }
  }

  Mat basis(n, 0);
  if (xi_sub) {
    extend_orthonormal(g, basis, {*xi_sub}, n);
    if (basis.cols() == 1) s.xi_index = 0;
  }
  if (s.split) extend_orthonormal(g, basis, detail::unit_vectors(n, 0, s.split->n1), s.split->n1);
  extend_orthonormal(g, basis, coordinate_vectors(n), n);
  if (basis.cols() != n) throw ImmersionDegenerate("tangent frame could not be completed");
  s.frame = basis;
  s.push = s.jac * s.frame;

  Mat B = s.push;
  if (s.split && (im.complex_structure() || contact)) {
    const Mat F = contact ? contact->phi : im.complex_structure()->j_at(s.image);
    std::vector<Vec> seeds;
    for (int A = s.split->n1; A < n; ++A) seeds.push_back(F * s.push.col(A));
    extend_orthonormal(G, B, seeds, m);
    s.n_fperp = static_cast<int>(B.cols()) - n;
  }
  extend_orthonormal(G, B, coordinate_vectors(m), m);
  if (B.cols() != m) throw ImmersionDegenerate("normal frame could not be completed");
  s.normal = B.rightCols(m - n);

  const Array3 gamma = christoffel(amb);
  std::vector<Vec> hess(static_cast<std::size_t>(n * n), Vec::Zero(m));  // nabla~_{d_i} d_j
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Vec v(m);
      for (int a = 0; a < m; ++a) {
        double t = phi[static_cast<std::size_t>(a)].d2(i, j);
        for (int b = 0; b < m; ++b)
          for (int c = 0; c < m; ++c) t += gamma(a, b, c) * s.jac(b, i) * s.jac(c, j);
        v(a) = t;
      }
      hess[static_cast<std::size_t>(i * n + j)] = v;
    }
  s.h.assign(static_cast<std::size_t>(m - n), Mat::Zero(n, n));
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l) {
      Vec v = Vec::Zero(m);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) v += s.frame(i, k) * s.frame(j, l) * hess[static_cast<std::size_t>(i * n + j)];
      for (int r = 0; r < m - n; ++r) s.h[static_cast<std::size_t>(r)](k, l) = inner(G, v, s.normal.col(r));
    }
  return s;
}

// ---------------------------------------------------------------------------
// Shape operator through the Weingarten formula
// ---------------------------------------------------------------------------

namespace detail {

/// Solves M c = b for jets by Gaussian elimination with partial pivoting on values.
inline std::vector<Jet3> solve_jets(std::vector<Jet3> M, std::vector<Jet3> b) {
  const int n = static_cast<int>(b.size());
  auto at = [&](int i, int j) -> Jet3& { return M[static_cast<std::size_t>(i * n + j)]; };
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(at(r, col).value()) > std::abs(at(piv, col).value())) piv = r;
    if (std::abs(at(piv, col).value()) < 1e-300) throw DegenerateMetric("singular jet system");
    if (piv != col) {
      for (int j = 0; j < n; ++j) std::swap(at(col, j), at(piv, j));
      std::swap(b[static_cast<std::size_t>(col)], b[static_cast<std::size_t>(piv)]);
    }
    const Jet3 inv = recip(at(col, col));
    for (int r = col + 1; r < n; ++r) {
      const Jet3 factor = at(r, col) * inv;
      for (int j = col; j < n; ++j) at(r, j) -= factor * at(col, j);
      b[static_cast<std::size_t>(r)] -= factor * b[static_cast<std::size_t>(col)];
    }
  }
  std::vector<Jet3> c(static_cast<std::size_t>(n));
  for (int r = n - 1; r >= 0; --r) {
    Jet3 t = b[static_cast<std::size_t>(r)];
    for (int j = r + 1; j < n; ++j) t -= at(r, j) * c[static_cast<std::size_t>(j)];
    c[static_cast<std::size_t>(r)] = t * recip(at(r, r));
  }
  return c;
}

}  // namespace detail

struct ShapeOperator {
  Mat A;                       // g(A e_i, e_j) in the tangent frame
  double asymmetry = 0.0;      // max |A_ij - A_ji|
  double duality_residual = 0.0;  // max |g(A e_i, e_j) - g(h(e_i,e_j), zeta)|
};

/// Shape operator A_zeta at x for an ambient vector zeta normal to the image.
/// zeta is extended to a normal field by subtracting the tangential part of
/// the constant field, and A is read off from the ambient derivative of that
/// extension. Throws InvalidNormal if zeta is not normal at x.
inline ShapeOperator shape_operator(const Immersion& im, const Point& x, const Vec& zeta,
                                    const SecondFundamentalForm& sff) {
  const int n = im.dim(), m = im.ambient_dim();
  if (zeta.size() != m) throw InvalidArgument("normal vector has wrong dimension");
  const Mat& G0 = sff.ambient_g;
  const Vec tangential = sff.jac * detail::tangent_coordinates(G0, sff.jac, zeta);
  if (norm(G0, tangential) > kNormalTol * std::max(1.0, norm(G0, zeta))) {
    throw InvalidNormal("vector is not normal to the submanifold");
  }

  const auto phi = im.map_jets(x);
  const auto G = im.ambient().jets(std::span<const Jet3>(phi));
  std::vector<Jet3> d;  // d[a*n+i] = d_i x^a
  for (int a = 0; a < m; ++a)
    for (int i = 0; i < n; ++i) d.push_back(phi[static_cast<std::size_t>(a)].partial(i));
  auto D = [&](int a, int i) -> const Jet3& { return d[static_cast<std::size_t>(a * n + i)]; };
  auto Gab = [&](int a, int b) -> const Jet3& { return G[static_cast<std::size_t>(a * m + b)]; };

  std::vector<Jet3> gd;  // (G D)_{b i}
  for (int b = 0; b < m; ++b)
    for (int i = 0; i < n; ++i) {
      Jet3 s(0.0, n);
      for (int a = 0; a < m; ++a) s += Gab(b, a) * D(a, i);
      gd.push_back(std::move(s));
    }
  std::vector<Jet3> M(static_cast<std::size_t>(n * n)), rhs(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    Jet3 r(0.0, n);
    for (int b = 0; b < m; ++b) r += gd[static_cast<std::size_t>(b * n + i)] * zeta(b);
    rhs[static_cast<std::size_t>(i)] = r;
    for (int j = 0; j < n; ++j) {
      Jet3 s(0.0, n);
      for (int b = 0; b < m; ++b) s += D(b, i) * gd[static_cast<std::size_t>(b * n + j)];
      M[static_cast<std::size_t>(i * n + j)] = s;
    }
  }
  const auto c = detail::solve_jets(M, rhs);
  std::vector<Jet3> field;  // normal extension of zeta
  for (int a = 0; a < m; ++a) {
    Jet3 z(zeta(a), n);
    for (int i = 0; i < n; ++i) z -= D(a, i) * c[static_cast<std::size_t>(i)];
    field.push_back(std::move(z));
  }

  const Array3 gamma = christoffel(im.ambient(), sff.image);
  Mat S(n, n);  // S(k,l) = -G(nabla~_{d_k} zeta, d_l x)
  for (int k = 0; k < n; ++k) {
    Vec dz(m);
    for (int a = 0; a < m; ++a) {
      double t = field[static_cast<std::size_t>(a)].d1(k);
      for (int b = 0; b < m; ++b)
        for (int cc = 0; cc < m; ++cc) t += gamma(a, b, cc) * sff.jac(b, k) * field[static_cast<std::size_t>(cc)].value();
      dz(a) = t;
    }
    for (int l = 0; l < n; ++l) S(k, l) = -inner(G0, dz, sff.jac.col(l));
  }

  ShapeOperator out;
  out.A = sff.frame.transpose() * S * sff.frame;
  out.asymmetry = (out.A - out.A.transpose()).cwiseAbs().maxCoeff();
  Vec z(sff.codim());
  for (int r = 0; r < sff.codim(); ++r) z(r) = inner(G0, sff.normal.col(r), zeta);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      out.duality_residual = std::max(out.duality_residual, std::abs(out.A(i, j) - sff.at(i, j).dot(z)));
  return out;
}

// ---------------------------------------------------------------------------
// Gauss equation
// ---------------------------------------------------------------------------

/// Ambient curvature on the pushed-forward tangent frame.
inline Curvature4 ambient_tangent_curvature(const Immersion& im, const SecondFundamentalForm& sff) {
  return curvature(im.ambient(), sff.image).in_frame(sff.push);
}

/// Model curvature on the pushed-forward tangent frame.
inline Curvature4 model_tangent_curvature(const SpaceFormModel& model, const SecondFundamentalForm& sff) {
  const int n = sff.n();
  Array4 r(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
          r(i, j, k, l) = model_curvature(model, sff.push.col(i), sff.push.col(j), sff.push.col(k), sff.push.col(l));
  return Curvature4(sff.base, std::move(r), Basis::Frame);
}

/// Sum over i<j of R(e_i,e_j,e_j,e_i) for frame components.
inline double frame_scalar(const Curvature4& r, int begin, int end) {
  double t = 0.0;
  for (int i = begin; i < end; ++i)
    for (int j = i + 1; j < end; ++j) t += r(i, j, j, i);
  return t;
}

struct GaussCheck {
  double residual = 0.0;          // max over frame indices of the Gauss equation defect
  double tau = 0.0;               // intrinsic scalar curvature
  double tau_ambient = 0.0;       // ambient scalar curvature of the tangent plane section
  double h_norm_sq = 0.0;
  double mean_norm_sq = 0.0;      // |H|^2
  double scalar_residual = 0.0;   // |2 tau - (2 tau~ + n^2 |H|^2 - |h|^2)|
};

/// Gauss equation and its trace against the ambient curvature in the tangent frame.
inline GaussCheck gauss_check(const Immersion& im, const Point& x, const SecondFundamentalForm& sff,
                              const Curvature4& ambient_frame) {
  const int n = sff.n();
  const Curvature4 intrinsic = curvature(im.induced_metric(), x).in_frame(sff.frame);
  GaussCheck out;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          const double rhs = ambient_frame(i, j, k, l) + sff.at(i, l).dot(sff.at(j, k)) - sff.at(i, k).dot(sff.at(j, l));
          out.residual = std::max(out.residual, std::abs(intrinsic(i, j, k, l) - rhs));
        }
  out.tau = frame_scalar(intrinsic, 0, n);
  out.tau_ambient = frame_scalar(ambient_frame, 0, n);
  out.h_norm_sq = sff.norm_sq();
  out.mean_norm_sq = sff.mean_curvature().squaredNorm();
  out.scalar_residual =
      std::abs(2.0 * out.tau - (2.0 * out.tau_ambient + n * n * out.mean_norm_sq - out.h_norm_sq));
  return out;
}

inline GaussCheck gauss_check(const Immersion& im, const Point& x, const SecondFundamentalForm& sff) {
  return gauss_check(im, x, sff, ambient_tangent_curvature(im, sff));
}

// ---------------------------------------------------------------------------
// Relative null space and classification
// ---------------------------------------------------------------------------

/// Vectors X with h(X, Y) = 0 for all Y, as frame coefficient columns.
inline Mat relative_null_space(const SecondFundamentalForm& sff, double threshold = 1e-8) {
  const int n = sff.n(), k = sff.codim();
  if (k == 0) return Mat::Identity(n, n);
  Mat M(n * k, n);
  for (int r = 0; r < k; ++r)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) M(r * n + j, i) = sff.h[static_cast<std::size_t>(r)](i, j);
  Eigen::JacobiSVD<Mat> svd(M, Eigen::ComputeFullV);
  const Vec sv = svd.singularValues();
  const double scale = std::max(1.0, sv.size() > 0 ? sv(0) : 0.0);
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > threshold * scale) ++rank;
  return svd.matrixV().rightCols(n - rank);
}

struct Classification {
  double totally_geodesic = 0.0;        // max |h(e_i,e_j)|
  double totally_umbilical = 0.0;       // max |h(e_i,e_j) - delta_ij H|
  double minimal = 0.0;                 // |H|
  double mixed_totally_geodesic = 0.0;  // max |h(leaf, fiber)|
  double leaf_totally_geodesic = 0.0;   // max |h(leaf, leaf)|
  double leaf_minimal = 0.0;            // |H1|
  double fiber_minimal = 0.0;           // |H2|
  double fiber_totally_umbilical = 0.0; // max |h(e_A,e_B) - delta_AB H2|
};

inline Classification classify(const SecondFundamentalForm& sff) {
  Classification c;
  const int n = sff.n();
  const Vec H = sff.mean_curvature();
  c.minimal = H.norm();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Vec v = sff.at(i, j);
      c.totally_geodesic = std::max(c.totally_geodesic, v.norm());
      c.totally_umbilical = std::max(c.totally_umbilical, (i == j ? Vec(v - H) : v).norm());
    }
  if (!sff.split) return c;
  const int n1 = sff.split->n1;
  const Vec H2 = sff.fiber_mean_curvature();
  c.leaf_minimal = sff.leaf_mean_curvature().norm();
  c.fiber_minimal = H2.norm();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double v = sff.at(i, j).norm();
      const bool li = i < n1, lj = j < n1;
      if (li && lj) c.leaf_totally_geodesic = std::max(c.leaf_totally_geodesic, v);
      if (li != lj) c.mixed_totally_geodesic = std::max(c.mixed_totally_geodesic, v);
      if (!li && !lj) {
        const Vec d = i == j ? Vec(sff.at(i, j) - H2) : sff.at(i, j);
        c.fiber_totally_umbilical = std::max(c.fiber_totally_umbilical, d.norm());
      }
    }
  return c;
}

/// Geometry of the two factors as submanifolds of the ambient.
struct FactorsInAmbient {
  double leaf_totally_geodesic = 0.0;   // max |h_leaf|
  double fiber_totally_umbilical = 0.0; // max |h_fiber(e_A,e_B) - delta_AB H_fiber|
};

inline FactorsInAmbient factors_in_ambient(const Immersion& im, const Point& x) {
  FactorsInAmbient out;
  const auto leaf = second_fundamental_form(im.restricted(true, x), im.restricted_point(true, x));
  out.leaf_totally_geodesic = classify(leaf).totally_geodesic;
  const auto fiber = second_fundamental_form(im.restricted(false, x), im.restricted_point(false, x));
  out.fiber_totally_umbilical = classify(fiber).totally_umbilical;
  return out;
}

// ---------------------------------------------------------------------------
// CR-warped-product checks
// ---------------------------------------------------------------------------

/// Preconditions of a CR-warped product, as residual norms.
/// Kaehler ambient: J(leaf) lies in the leaf, J(fiber) is normal.
/// Contact ambient: additionally xi is tangent to the leaf, and phi replaces J.
struct CRResiduals {
  double xi_tangent = 0.0;
  double xi_in_leaf = 0.0;
  double leaf_invariant = 0.0;
  double fiber_anti_invariant = 0.0;
  double max() const { return std::max({xi_tangent, xi_in_leaf, leaf_invariant, fiber_anti_invariant}); }
};

inline CRResiduals cr_residuals(const Immersion& im, const SecondFundamentalForm& sff) {
  if (!sff.split) throw InvalidArgument("CR checks need a warped split");
  if (!im.complex_structure() && !im.contact_structure()) throw InvalidArgument("CR checks need an ambient structure");
  const Mat& G = sff.ambient_g;
  const int n = sff.n(), n1 = sff.split->n1;
  const Mat leaf_push = sff.push.leftCols(n1);
  CRResiduals out;
  Mat F;
  if (im.contact_structure()) {
    const ContactAlgebra a = im.contact_structure()->at(sff.image);
    F = a.phi;
    out.xi_tangent = norm(G, detail::residual_from_span(G, sff.push, a.xi));
    out.xi_in_leaf = norm(G, detail::residual_from_span(G, leaf_push, a.xi));
  } else {
    F = im.complex_structure()->j_at(sff.image);
  }
  for (int i = 0; i < n; ++i) {
    const Vec v = F * sff.push.col(i);
    if (i < n1) {
      out.leaf_invariant = std::max(out.leaf_invariant, norm(G, detail::residual_from_span(G, leaf_push, v)));
    } else {
      const Vec tangential = v - detail::residual_from_span(G, sff.push, v);
      out.fiber_anti_invariant = std::max(out.fiber_anti_invariant, norm(G, tangential));
    }
  }
  return out;
}

/// Second fundamental form identities of a contact CR-warped product, for X
/// in the leaf, Z in the fiber and zeta in the complement nu of F(D_perp):
///   h(xi, xi) = 0, h(X, xi) = 0, g(h(X,X), phi Z) = 0,
///   g(h(X,X), zeta) = -g(h(phi X, phi X), zeta).
/// Quadratic identities are tested on leaf frame vectors and their pairwise
/// normalized sums.
struct ContactCRChecks {
  double h_xi_xi = 0.0;
  double h_leaf_xi = 0.0;
  double h_leaf_fperp = 0.0;
  double h_leaf_nu = 0.0;
  int nu_dim = 0;
  double max() const { return std::max({h_xi_xi, h_leaf_xi, h_leaf_fperp, h_leaf_nu}); }
};

inline ContactCRChecks contact_cr_checks(const Immersion& im, const SecondFundamentalForm& sff) {
  if (!sff.split || !im.contact_structure()) throw InvalidArgument("contact CR checks need a split and a contact structure");
  if (sff.xi_index < 0) throw InvalidArgument("contact CR checks need xi tangent to the leaf");
  const ContactAlgebra a = im.contact_structure()->at(sff.image);
  const Mat& G = sff.ambient_g;
  const int n = sff.n(), n1 = sff.split->n1, k = sff.codim();
  ContactCRChecks out;
  out.nu_dim = k - sff.n_fperp;
  const int xi = sff.xi_index;
  out.h_xi_xi = sff.at(xi, xi).norm();
  for (int i = 0; i < n1; ++i) out.h_leaf_xi = std::max(out.h_leaf_xi, sff.at(i, xi).norm());

  std::vector<Vec> probes;
  for (int i = 0; i < n1; ++i) probes.push_back(Vec::Unit(n, i));
  for (int i = 0; i < n1; ++i)
    for (int j = i + 1; j < n1; ++j) probes.push_back((Vec::Unit(n, i) + Vec::Unit(n, j)) / std::sqrt(2.0));

  std::vector<Vec> fperp;  // normal-frame coefficients of phi Z
  for (int A = n1; A < n; ++A) {
    const Vec v = a.phi * sff.push.col(A);
    Vec c(k);
    for (int r = 0; r < k; ++r) c(r) = inner(G, v, sff.normal.col(r));
    fperp.push_back(c);
  }
  for (const Vec& X : probes) {
    const Vec hxx = sff.apply(X, X);
    for (const Vec& z : fperp) out.h_leaf_fperp = std::max(out.h_leaf_fperp, std::abs(hxx.dot(z)));
    const Vec px = a.phi * (sff.push * X);
    Vec pc(n);
    for (int i = 0; i < n; ++i) pc(i) = inner(G, px, sff.push.col(i));
    const Vec hpp = sff.apply(pc, pc);
    for (int r = sff.n_fperp; r < k; ++r) out.h_leaf_nu = std::max(out.h_leaf_nu, std::abs(hxx(r) + hpp(r)));
  }
  return out;
}

}  // namespace warpcheck
