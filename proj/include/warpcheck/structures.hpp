#pragma once

// Ambient structures: almost complex (J) and almost contact metric
// (phi, xi, eta) tensor fields on a chart, their structure equations, and
// closed-form curvature tensors of the constant-curvature model spaces.
//
// The almost contact convention is the one where the Sasakian condition reads
// (nabla_X phi) Y = -g(X,Y) xi + eta(Y) X; this phi is minus the one used in
// much of the contact literature. The fundamental 2-form is
// Phi(X,Y) = g(phi X, Y) and exterior derivatives use the convention
// d eta(X,Y) = X eta(Y) - Y eta(X) - eta([X,Y]) (no factor 1/2).

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "warpcheck/riemann.hpp"

namespace warpcheck {

namespace detail {

inline Mat matrix_value(const std::vector<Jet3>& j, int m) {
  Mat out(m, m);
  for (int i = 0; i < m; ++i)
    for (int k = 0; k < m; ++k) out(i, k) = j[static_cast<std::size_t>(i * m + k)].value();
  return out;
}

inline Vec vector_value(const std::vector<Jet3>& j) {
  Vec out(static_cast<int>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) out(static_cast<int>(i)) = j[i].value();
  return out;
}

inline std::vector<Jet3> eval_all(const std::vector<Expr>& es, const Point& x, std::span<const double> params) {
  const auto vars = jet_vars(x);
  std::vector<Jet3> out;
  out.reserve(es.size());
  for (const auto& e : es) out.push_back(eval_expr(e, std::span<const Jet3>(vars), params));
  return out;
}

/// Covariant derivative of a (1,1) tensor: out[k](i,j) = (nabla_k T)^i_j.
inline std::vector<Mat> covariant_derivative(const std::vector<Jet3>& t, const Array3& gamma, int m) {
  std::vector<Mat> out(static_cast<std::size_t>(m), Mat::Zero(m, m));
  for (int k = 0; k < m; ++k)
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        double s = t[static_cast<std::size_t>(i * m + j)].d1(k);
        for (int l = 0; l < m; ++l) {
          s += gamma(i, k, l) * t[static_cast<std::size_t>(l * m + j)].value();
          s -= gamma(l, k, j) * t[static_cast<std::size_t>(i * m + l)].value();
        }
        out[static_cast<std::size_t>(k)](i, j) = s;
      }
  return out;
}

/// (nabla_X T) Y from the covariant derivative arrays.
inline Vec apply_derivative(const std::vector<Mat>& dt, const Vec& x, const Vec& y) {
  Vec out = Vec::Zero(y.size());
  for (int k = 0; k < x.size(); ++k) out += x(k) * (dt[static_cast<std::size_t>(k)] * y);
  return out;
}

/// Lie bracket [U, V] of vector fields given by component jets at a point.
inline Vec bracket(const std::vector<Jet3>& u, const std::vector<Jet3>& v) {
  const int m = static_cast<int>(u.size());
  Vec out = Vec::Zero(m);
  for (int i = 0; i < m; ++i)
    for (int k = 0; k < m; ++k) out(i) += u[static_cast<std::size_t>(k)].value() * v[static_cast<std::size_t>(i)].d1(k) -
                                          v[static_cast<std::size_t>(k)].value() * u[static_cast<std::size_t>(i)].d1(k);
  return out;
}

/// Components of T X as jets, for a (1,1) tensor field T and a constant vector X.
inline std::vector<Jet3> apply_field(const std::vector<Jet3>& t, const Vec& x, int dim_jet) {
  const int m = static_cast<int>(x.size());
  std::vector<Jet3> out;
  for (int i = 0; i < m; ++i) {
    Jet3 s(0.0, dim_jet);
    for (int j = 0; j < m; ++j) s += t[static_cast<std::size_t>(i * m + j)] * x(j);
    out.push_back(s);
  }
  return out;
}

inline std::vector<Jet3> constant_field(const Vec& x, int dim_jet) {
  std::vector<Jet3> out;
  for (int i = 0; i < x.size(); ++i) out.emplace_back(x(i), dim_jet);
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Almost complex structures
// ---------------------------------------------------------------------------

class AlmostComplexStructure {
 public:
  AlmostComplexStructure(MetricField g, std::vector<Expr> j, std::vector<double> params = {})
      : g_(std::move(g)), j_(std::move(j)), params_(std::move(params)) {
    const int m = g_.dim();
    if (static_cast<int>(j_.size()) != m * m) throw ConfigError("J needs m*m entries");
    for (auto& e : j_)
      if (e.empty()) e = Expr::number(0.0, m);
  }

  const MetricField& metric() const noexcept { return g_; }
  int dim() const noexcept { return g_.dim(); }
  std::span<const double> params() const noexcept { return params_; }

  std::vector<Jet3> j_jets(const Point& x) const { return detail::eval_all(j_, x, params_); }
  Mat j_at(const Point& x) const { return detail::matrix_value(j_jets(x), dim()); }

 private:
  MetricField g_;
  std::vector<Expr> j_;
  std::vector<double> params_;
};

struct ComplexResiduals {
  double square = 0.0;      // |J^2 + I|
  double compatible = 0.0;  // |g(JX,JY) - g(X,Y)|
  double parallel = 0.0;    // |nabla J|, the Kaehler condition
  double max() const { return std::max({square, compatible, parallel}); }
};

inline ComplexResiduals complex_residuals(const AlmostComplexStructure& s, const Point& x) {
  const int m = s.dim();
  const MetricDerivs d = metric_derivs(s.metric(), x);
  const auto jj = s.j_jets(x);
  const Mat j = detail::matrix_value(jj, m);
  ComplexResiduals r;
  r.square = (j * j + Mat::Identity(m, m)).cwiseAbs().maxCoeff();
  r.compatible = (j.transpose() * d.g * j - d.g).cwiseAbs().maxCoeff();
  for (const Mat& dj : detail::covariant_derivative(jj, christoffel(d), m))
    r.parallel = std::max(r.parallel, dj.cwiseAbs().maxCoeff());
  return r;
}

// ---------------------------------------------------------------------------
// Almost contact metric structures
// ---------------------------------------------------------------------------

enum class ContactClass { Sasakian, Kenmotsu, Cosymplectic, NearlyCosymplectic };

inline std::optional<ContactClass> contact_class_from_name(std::string_view name) {
  if (name == "sasakian") return ContactClass::Sasakian;
  if (name == "kenmotsu") return ContactClass::Kenmotsu;
  if (name == "cosymplectic") return ContactClass::Cosymplectic;
  if (name == "nearly_cosymplectic") return ContactClass::NearlyCosymplectic;
  return std::nullopt;
}

inline const char* contact_class_name(ContactClass c) {
  switch (c) {
    case ContactClass::Sasakian: return "sasakian";
    case ContactClass::Kenmotsu: return "kenmotsu";
    case ContactClass::Cosymplectic: return "cosymplectic";
    case ContactClass::NearlyCosymplectic: return "nearly_cosymplectic";
  }
  return "?";
}

/// Values of (g, phi, xi, eta) at a point.
struct ContactAlgebra {
  Mat g;
  Mat phi;
  Vec xi;
  Vec eta;
};

class AlmostContactStructure {
 public:
  AlmostContactStructure(MetricField g, std::vector<Expr> phi, std::vector<Expr> xi, std::vector<Expr> eta,
                         std::vector<double> params = {})
      : g_(std::move(g)), phi_(std::move(phi)), xi_(std::move(xi)), eta_(std::move(eta)), params_(std::move(params)) {
    const int m = g_.dim();
    if (m % 2 != 1) throw ConfigError("almost contact structures need an odd-dimensional ambient");
    if (static_cast<int>(phi_.size()) != m * m) throw ConfigError("phi needs m*m entries");
    if (static_cast<int>(xi_.size()) != m || static_cast<int>(eta_.size()) != m) {
      throw ConfigError("xi and eta need m entries");
    }
    for (auto* list : {&phi_, &xi_, &eta_})
      for (auto& e : *list)
        if (e.empty()) e = Expr::number(0.0, m);
  }

  const MetricField& metric() const noexcept { return g_; }
  int dim() const noexcept { return g_.dim(); }
  std::span<const double> params() const noexcept { return params_; }

  std::vector<Jet3> phi_jets(const Point& x) const { return detail::eval_all(phi_, x, params_); }
  std::vector<Jet3> xi_jets(const Point& x) const { return detail::eval_all(xi_, x, params_); }
  std::vector<Jet3> eta_jets(const Point& x) const { return detail::eval_all(eta_, x, params_); }

  ContactAlgebra at(const Point& x) const {
    return {g_.value(x), detail::matrix_value(phi_jets(x), dim()), detail::vector_value(xi_jets(x)),
            detail::vector_value(eta_jets(x))};
  }

 private:
  MetricField g_;
  std::vector<Expr> phi_;
  std::vector<Expr> xi_;
  std::vector<Expr> eta_;
  std::vector<double> params_;
};

/// Structure equations of an almost contact metric structure, each as a max
/// absolute residual:
///   phi^2 = -I + eta (x) xi, phi xi = 0, eta o phi = 0, eta(xi) = 1,
///   eta(X) = g(X, xi), g(phi X, phi Y) = g(X,Y) - eta(X) eta(Y).
struct ContactResiduals {
  double phi_square = 0.0;
  double phi_xi = 0.0;
  double eta_phi = 0.0;
  double eta_xi = 0.0;
  double eta_dual = 0.0;
  double metric_compat = 0.0;
  double max() const { return std::max({phi_square, phi_xi, eta_phi, eta_xi, eta_dual, metric_compat}); }
  void merge(const ContactResiduals& o) {
    phi_square = std::max(phi_square, o.phi_square);
    phi_xi = std::max(phi_xi, o.phi_xi);
    eta_phi = std::max(eta_phi, o.eta_phi);
    eta_xi = std::max(eta_xi, o.eta_xi);
    eta_dual = std::max(eta_dual, o.eta_dual);
    metric_compat = std::max(metric_compat, o.metric_compat);
  }
};

inline ContactResiduals contact_residuals(const ContactAlgebra& a) {
  const auto m = a.g.rows();
  ContactResiduals r;
  r.phi_square = (a.phi * a.phi + Mat::Identity(m, m) - a.xi * a.eta.transpose()).cwiseAbs().maxCoeff();
  r.phi_xi = (a.phi * a.xi).cwiseAbs().maxCoeff();
  r.eta_phi = (a.eta.transpose() * a.phi).cwiseAbs().maxCoeff();
  r.eta_xi = std::abs(a.eta.dot(a.xi) - 1.0);
  r.eta_dual = (a.eta - a.g * a.xi).cwiseAbs().maxCoeff();
  r.metric_compat = (a.phi.transpose() * a.g * a.phi - a.g + a.eta * a.eta.transpose()).cwiseAbs().maxCoeff();
  return r;
}

inline ContactResiduals validate_almost_contact(const AlmostContactStructure& s, const std::vector<Point>& points) {
  ContactResiduals worst;
  for (const Point& p : points) worst.merge(contact_residuals(s.at(p)));
  return worst;
}

/// |(nabla_X phi) Y - rhs| in the metric norm, rhs as set by the class; the
/// nearly cosymplectic residual is |(nabla_X phi) Y + (nabla_Y phi) X|.
inline double structure_class_residual(const AlmostContactStructure& s, ContactClass cls, const Vec& X, const Vec& Y,
                                       const Point& x) {
  const int m = s.dim();
  const MetricDerivs d = metric_derivs(s.metric(), x);
  const auto pj = s.phi_jets(x);
  const auto dphi = detail::covariant_derivative(pj, christoffel(d), m);
  const ContactAlgebra a{d.g, detail::matrix_value(pj, m), detail::vector_value(s.xi_jets(x)),
                         detail::vector_value(s.eta_jets(x))};
  Vec lhs = detail::apply_derivative(dphi, X, Y);
  Vec rhs = Vec::Zero(m);
  switch (cls) {
    case ContactClass::Sasakian: rhs = -inner(a.g, X, Y) * a.xi + a.eta.dot(Y) * X; break;
    case ContactClass::Kenmotsu: rhs = inner(a.g, a.phi * X, Y) * a.xi - a.eta.dot(Y) * (a.phi * X); break;
    case ContactClass::Cosymplectic: break;
    case ContactClass::NearlyCosymplectic: lhs += detail::apply_derivative(dphi, Y, X); break;
  }
  return norm(a.g, lhs - rhs);
}

/// |[phi,phi](X,Y) + d eta(X,Y) xi| for constant coordinate fields X, Y, with
/// [phi,phi](X,Y) = phi^2[X,Y] + [phi X, phi Y] - phi[phi X, Y] - phi[X, phi Y].
inline double normality_residual(const AlmostContactStructure& s, const Vec& X, const Vec& Y, const Point& x) {
  const int m = s.dim();
  const auto pj = s.phi_jets(x);
  const auto ej = s.eta_jets(x);
  const Mat phi = detail::matrix_value(pj, m);
  const Vec xi = detail::vector_value(s.xi_jets(x));
  const auto fx = detail::constant_field(X, m), fy = detail::constant_field(Y, m);
  const auto px = detail::apply_field(pj, X, m), py = detail::apply_field(pj, Y, m);
  const Vec nij = phi * phi * detail::bracket(fx, fy) + detail::bracket(px, py) - phi * detail::bracket(px, fy) -
                  phi * detail::bracket(fx, py);
  double deta = 0.0;
  for (int k = 0; k < m; ++k)
    for (int j = 0; j < m; ++j) deta += X(k) * Y(j) * (ej[static_cast<std::size_t>(j)].d1(k) - ej[static_cast<std::size_t>(k)].d1(j));
  return norm(s.metric().value(x), nij + deta * xi);
}

/// max over coordinate pairs |Phi(e_i,e_j) - d eta(e_i,e_j) / 2| with Phi(X,Y) = g(phi X, Y).
inline double contact_form_residual(const AlmostContactStructure& s, const Point& x) {
  const int m = s.dim();
  const Mat g = s.metric().value(x);
  const Mat phi = detail::matrix_value(s.phi_jets(x), m);
  const auto ej = s.eta_jets(x);
  const Mat fundamental = phi.transpose() * g;
  double worst = 0.0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      const double deta = ej[static_cast<std::size_t>(j)].d1(i) - ej[static_cast<std::size_t>(i)].d1(j);
      worst = std::max(worst, std::abs(fundamental(i, j) - 0.5 * deta));
    }
  return worst;
}

// ---------------------------------------------------------------------------
// Space-form curvature models
// ---------------------------------------------------------------------------

enum class ModelKind { Complex, Sasakian, Kenmotsu, Cosymplectic, GeneralizedComplex };

/// Closed-form curvature of a model space. `c` is the holomorphic or
/// phi-sectional constant; `gamma` is the second constant of the generalized
/// complex family and is ignored otherwise. For complex kinds `phi` holds J
/// and xi, eta are unused.
struct SpaceFormModel {
  ModelKind kind = ModelKind::Complex;
  double c = 0.0;
  double gamma = 0.0;
  ContactAlgebra algebra;

  bool is_contact() const {
    return kind == ModelKind::Sasakian || kind == ModelKind::Kenmotsu || kind == ModelKind::Cosymplectic;
  }
};

/// Flat algebra on R^{2l} with J(e_{2k}) = e_{2k+1}.
inline ContactAlgebra standard_complex_algebra(int l) {
  const int m = 2 * l;
  ContactAlgebra a{Mat::Identity(m, m), Mat::Zero(m, m), Vec::Zero(m), Vec::Zero(m)};
  for (int k = 0; k < l; ++k) {
    a.phi(2 * k + 1, 2 * k) = 1.0;
    a.phi(2 * k, 2 * k + 1) = -1.0;
  }
  return a;
}

/// Orthonormal algebra on R^{2l+1}: phi acts as J on the first 2l coordinates, xi = eta = e_{2l}.
inline ContactAlgebra standard_contact_algebra(int l) {
  const int m = 2 * l + 1;
  ContactAlgebra a{Mat::Identity(m, m), Mat::Zero(m, m), Vec::Unit(m, m - 1), Vec::Unit(m, m - 1)};
  a.phi.topLeftCorner(2 * l, 2 * l) = standard_complex_algebra(l).phi;
  return a;
}

inline double model_curvature(const SpaceFormModel& model, const Vec& X, const Vec& Y, const Vec& Z, const Vec& W) {
  const ContactAlgebra& a = model.algebra;
  if (a.g.size() == 0 || a.phi.size() == 0) throw ConfigError("space-form model needs its structure tensors");
  auto g = [&](const Vec& u, const Vec& v) { return inner(a.g, u, v); };
  const double r1 = g(Y, Z) * g(X, W) - g(X, Z) * g(Y, W);
  if (model.kind == ModelKind::Complex || model.kind == ModelKind::GeneralizedComplex) {
    const Mat& J = a.phi;
    const double r2 = g(J * X, W) * g(J * Y, Z) - g(J * X, Z) * g(J * Y, W) - 2.0 * g(J * X, Y) * g(J * Z, W);
    const double gam = model.kind == ModelKind::GeneralizedComplex ? model.gamma : 0.0;
    return (model.c + 3.0 * gam) / 4.0 * r1 + (model.c - gam) / 4.0 * r2;
  }
  if (a.xi.size() == 0 || a.eta.size() == 0) throw ConfigError("contact model needs xi and eta");
  auto eta = [&](const Vec& u) { return a.eta.dot(u); };
  auto fund = [&](const Vec& u, const Vec& v) { return g(a.phi * u, v); };
  const double r2 = eta(X) * eta(Z) * g(Y, W) - eta(Y) * eta(Z) * g(X, W) + g(X, Z) * eta(Y) * eta(W) -
                    g(Y, Z) * eta(X) * eta(W) - fund(Z, Y) * fund(X, W) + fund(Z, X) * fund(Y, W) -
                    2.0 * fund(X, Y) * fund(Z, W);
  double k1 = 0.0, k2 = 0.0;
  switch (model.kind) {
    case ModelKind::Sasakian: k1 = (model.c + 3.0) / 4.0, k2 = (model.c - 1.0) / 4.0; break;
    case ModelKind::Kenmotsu: k1 = (model.c - 3.0) / 4.0, k2 = (model.c + 1.0) / 4.0; break;
    default: k1 = k2 = model.c / 4.0; break;
  }
  return k1 * r1 + k2 * r2;
}

/// Sectional curvature of span(X, Y) under a model.
inline double model_sectional(const SpaceFormModel& model, const Vec& X, const Vec& Y) {
  const Mat& g = model.algebra.g;
  const double gram = inner(g, X, X) * inner(g, Y, Y) - inner(g, X, Y) * inner(g, X, Y);
  if (!(gram > 1e-12)) throw DegeneratePlane("sectional curvature of a degenerate plane");
  return model_curvature(model, X, Y, Y, X) / gram;
}

/// Sectional curvature of span(X, phi X) (or span(X, J X)).
inline double phi_sectional(const SpaceFormModel& model, const Vec& X) {
  return model_sectional(model, X, model.algebra.phi * X);
}

/// Full component array of a model in the standard basis.
inline Curvature4 model_tensor(const SpaceFormModel& model) {
  const int m = static_cast<int>(model.algebra.g.rows());
  Array4 r(m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k)
        for (int l = 0; l < m; ++l)
          r(i, j, k, l) = model_curvature(model, Vec::Unit(m, i), Vec::Unit(m, j), Vec::Unit(m, k), Vec::Unit(m, l));
  return Curvature4(Point(std::vector<double>(static_cast<std::size_t>(m), 0.0)), std::move(r), Basis::Coordinate);
}

}  // namespace warpcheck
