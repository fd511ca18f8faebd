#pragma once

// Truncated multivariate Taylor arithmetic through order 3.
//
// A Jet3 carries the value of a scalar quantity together with every partial
// derivative of order 1, 2 and 3 at a point of an n-dimensional chart. Second
// and third derivative arrays are stored densely and filled symmetrically, so
// d2(i, j) == d2(j, i) and d3 is invariant under index permutations bit for
// bit. A jet also tracks how many derivative levels are valid: taking a
// partial derivative of a jet lowers its order by one, and arithmetic keeps
// the minimum order of its operands.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "warpcheck/errors.hpp"

namespace warpcheck {

/// Chart coordinates of a point.
class Point {
 public:
  Point() = default;
  explicit Point(std::vector<double> coords) : coords_(std::move(coords)) {
    for (double c : coords_) {
      if (!std::isfinite(c)) throw InvalidArgument("point coordinates must be finite");
    }
  }
  Point(std::initializer_list<double> coords) : Point(std::vector<double>(coords)) {}

  int dim() const noexcept { return static_cast<int>(coords_.size()); }
  double operator[](int i) const { return coords_[static_cast<std::size_t>(i)]; }
  std::span<const double> coords() const noexcept { return coords_; }

  Point with(int i, double v) const {
    Point p = *this;
    p.coords_[static_cast<std::size_t>(i)] = v;
    return p;
  }

  friend bool operator==(const Point&, const Point&) = default;

 private:
  std::vector<double> coords_;
};

class Jet3 {
 public:
  static constexpr int kMaxOrder = 3;

  Jet3() = default;

  Jet3(double value, int dim, int order = kMaxOrder) : dim_(dim), order_(order), value_(value) {
    if (dim <= 0) throw InvalidArgument("jet dimension must be positive");
    const auto n = static_cast<std::size_t>(dim);
    d1_.assign(n, 0.0);
    d2_.assign(n * n, 0.0);
    d3_.assign(n * n * n, 0.0);
  }

  int dim() const noexcept { return dim_; }
  /// Number of valid derivative levels (0..3).
  int order() const noexcept { return order_; }

  double value() const noexcept { return value_; }
  double d1(int i) const { return d1_[idx(i)]; }
  double d2(int i, int j) const { return d2_[idx(i, j)]; }
  double d3(int i, int j, int k) const { return d3_[idx(i, j, k)]; }

  std::span<const double> gradient() const noexcept { return d1_; }

  /// Partial derivative along coordinate i, as a jet one order lower.
  Jet3 partial(int i) const {
    if (i < 0 || i >= dim_) throw InvalidArgument("jet partial index out of range");
    if (order_ < 1) throw InvalidArgument("jet has no derivative information left");
    Jet3 r(d1(i), dim_, order_ - 1);
    for (int j = 0; j < dim_; ++j) {
      r.d1_[idx(j)] = d2(i, j);
      for (int k = 0; k < dim_; ++k) r.d2_[idx(j, k)] = d3(i, j, k);
    }
    return r;
  }

  bool is_finite() const {
    auto finite = [](double v) { return std::isfinite(v); };
    return std::isfinite(value_) && std::all_of(d1_.begin(), d1_.end(), finite) &&
           std::all_of(d2_.begin(), d2_.end(), finite) &&
           std::all_of(d3_.begin(), d3_.end(), finite);
  }

  Jet3& operator+=(const Jet3& o) { return combine(o, 1.0); }
  Jet3& operator-=(const Jet3& o) { return combine(o, -1.0); }
  Jet3& operator*=(double s) {
    value_ *= s;
    for (auto& v : d1_) v *= s;
    for (auto& v : d2_) v *= s;
    for (auto& v : d3_) v *= s;
    return *this;
  }
  Jet3& operator+=(double c) {
    value_ += c;
    return *this;
  }

  friend Jet3 operator+(Jet3 a, const Jet3& b) { return a += b; }
  friend Jet3 operator-(Jet3 a, const Jet3& b) { return a -= b; }
  friend Jet3 operator-(Jet3 a) { return a *= -1.0; }
  friend Jet3 operator*(Jet3 a, double s) { return a *= s; }
  friend Jet3 operator*(double s, Jet3 a) { return a *= s; }
  friend Jet3 operator+(Jet3 a, double c) { return a += c; }
  friend Jet3 operator+(double c, Jet3 a) { return a += c; }
  friend Jet3 operator-(Jet3 a, double c) { return a += -c; }
  friend Jet3 operator-(double c, Jet3 a) { return (a *= -1.0) += c; }

  friend Jet3 operator*(const Jet3& f, const Jet3& g) {
    f.require_same_dim(g);
    Jet3 r(f.value_ * g.value_, f.dim_, std::min(f.order_, g.order_));
    const int n = f.dim_;
    for (int i = 0; i < n; ++i) r.d1_[r.idx(i)] = f.d1(i) * g.value_ + f.value_ * g.d1(i);
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        r.set2(i, j, f.d2(i, j) * g.value_ + f.d1(i) * g.d1(j) + f.d1(j) * g.d1(i) +
                         f.value_ * g.d2(i, j));
        for (int k = j; k < n; ++k) {
          r.set3(i, j, k,
                 f.d3(i, j, k) * g.value_ + f.d2(i, j) * g.d1(k) + f.d2(i, k) * g.d1(j) +
                     f.d2(j, k) * g.d1(i) + f.d1(i) * g.d2(j, k) + f.d1(j) * g.d2(i, k) +
                     f.d1(k) * g.d2(i, j) + f.value_ * g.d3(i, j, k));
        }
      }
    }
    return r.truncated(r.order_);
  }

  friend Jet3 operator/(const Jet3& f, const Jet3& g);
  friend Jet3 operator/(const Jet3& f, double c) {
    if (c == 0.0) throw JetDomainError("/", c);
    return f * (1.0 / c);
  }
  friend Jet3 operator/(double c, const Jet3& g);

  /// Chain rule for a scalar function with derivatives (f0, f1, f2, f3) at value().
  Jet3 compose(double f0, double f1, double f2, double f3) const {
    Jet3 r(f0, dim_, order_);
    const int n = dim_;
    for (int i = 0; i < n; ++i) r.d1_[idx(i)] = f1 * d1(i);
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        r.set2(i, j, f2 * d1(i) * d1(j) + f1 * d2(i, j));
        for (int k = j; k < n; ++k) {
          r.set3(i, j, k,
                 f3 * d1(i) * d1(j) * d1(k) +
                     f2 * (d2(i, j) * d1(k) + d2(i, k) * d1(j) + d2(j, k) * d1(i)) +
                     f1 * d3(i, j, k));
        }
      }
    }
    return r.truncated(order_);
  }

  /// Returns a copy whose derivatives beyond `order` are cleared.
  Jet3 truncated(int order) const {
    Jet3 r = *this;
    r.order_ = std::min(order_, order);
    if (r.order_ < 3) std::fill(r.d3_.begin(), r.d3_.end(), 0.0);
    if (r.order_ < 2) std::fill(r.d2_.begin(), r.d2_.end(), 0.0);
    if (r.order_ < 1) std::fill(r.d1_.begin(), r.d1_.end(), 0.0);
    return r;
  }

  // Direct setters for constructing jets from known derivatives (tests, oracles).
  void set_d1(int i, double v) { d1_[idx(i)] = v; }
  void set_d2(int i, int j, double v) { set2(std::min(i, j), std::max(i, j), v); }
  void set_d3(int i, int j, int k, double v) {
    int a[3] = {i, j, k};
    std::sort(a, a + 3);
    set3(a[0], a[1], a[2], v);
  }

 private:
  std::size_t idx(int i) const { return static_cast<std::size_t>(i); }
  std::size_t idx(int i, int j) const { return static_cast<std::size_t>(i * dim_ + j); }
  std::size_t idx(int i, int j, int k) const {
    return static_cast<std::size_t>((i * dim_ + j) * dim_ + k);
  }

  void set2(int i, int j, double v) {
    d2_[idx(i, j)] = v;
    d2_[idx(j, i)] = v;
  }
  void set3(int i, int j, int k, double v) {
    d3_[idx(i, j, k)] = v;
    d3_[idx(i, k, j)] = v;
    d3_[idx(j, i, k)] = v;
    d3_[idx(j, k, i)] = v;
    d3_[idx(k, i, j)] = v;
    d3_[idx(k, j, i)] = v;
  }

  void require_same_dim(const Jet3& o) const {
    if (dim_ != o.dim_) throw InvalidArgument("jet dimension mismatch");
  }

  Jet3& combine(const Jet3& o, double sign) {
    require_same_dim(o);
    order_ = std::min(order_, o.order_);
    value_ += sign * o.value_;
    for (std::size_t i = 0; i < d1_.size(); ++i) d1_[i] += sign * o.d1_[i];
    for (std::size_t i = 0; i < d2_.size(); ++i) d2_[i] += sign * o.d2_[i];
    for (std::size_t i = 0; i < d3_.size(); ++i) d3_[i] += sign * o.d3_[i];
    return *this;
  }

  int dim_ = 0;
  int order_ = kMaxOrder;
  double value_ = 0.0;
  std::vector<double> d1_;
  std::vector<double> d2_;
  std::vector<double> d3_;
};

inline Jet3 jet_const(double c, int dim) {
  if (dim <= 0) throw InvalidArgument("jet_const: dim must be >= 1");
  return Jet3(c, dim);
}

inline Jet3 jet_var(int i, const Point& x, int order = Jet3::kMaxOrder) {
  if (i < 0 || i >= x.dim()) throw InvalidArgument("jet_var: index out of range");
  Jet3 r(x[i], x.dim(), order);
  if (order >= 1) r.set_d1(i, 1.0);
  return r;
}

/// Coordinate jets (x_1, ..., x_n) at a point, carrying `order` derivative levels.
inline std::vector<Jet3> jet_vars(const Point& x, int order = Jet3::kMaxOrder) {
  std::vector<Jet3> vars;
  vars.reserve(static_cast<std::size_t>(x.dim()));
  for (int i = 0; i < x.dim(); ++i) vars.push_back(jet_var(i, x, order));
  return vars;
}

namespace detail {

inline Jet3 checked(Jet3 r, const char* op, double at) {
  if (!r.is_finite()) throw JetDomainError(op, at);
  return r;
}

}  // namespace detail

inline Jet3 recip(const Jet3& g) {
  const double v = g.value();
  if (v == 0.0) throw JetDomainError("/", v);
  const double inv = 1.0 / v;
  return detail::checked(g.compose(inv, -inv * inv, 2.0 * inv * inv * inv, -6.0 * inv * inv * inv * inv),
                         "/", v);
}

inline Jet3 operator/(const Jet3& f, const Jet3& g) { return f * recip(g); }
inline Jet3 operator/(double c, const Jet3& g) { return recip(g) * c; }

inline Jet3 sin(const Jet3& a) {
  const double s = std::sin(a.value()), c = std::cos(a.value());
  return a.compose(s, c, -s, -c);
}

inline Jet3 cos(const Jet3& a) {
  const double s = std::sin(a.value()), c = std::cos(a.value());
  return a.compose(c, -s, -c, s);
}

inline Jet3 exp(const Jet3& a) {
  const double e = std::exp(a.value());
  return detail::checked(a.compose(e, e, e, e), "exp", a.value());
}

inline Jet3 log(const Jet3& a) {
  const double v = a.value();
  if (!(v > 0.0)) throw JetDomainError("ln", v);
  const double inv = 1.0 / v;
  return detail::checked(a.compose(std::log(v), inv, -inv * inv, 2.0 * inv * inv * inv), "ln", v);
}

inline Jet3 sqrt(const Jet3& a) {
  const double v = a.value();
  if (!(v > 0.0)) throw JetDomainError("sqrt", v);
  const double s = std::sqrt(v);
  return detail::checked(a.compose(s, 0.5 / s, -0.25 / (s * v), 0.375 / (s * v * v)), "sqrt", v);
}

/// a^p for a constant exponent. Integer exponents accept any base; other
/// exponents need a positive base.
inline Jet3 pow(const Jet3& a, double p) {
  const double v = a.value();
  const bool integral = std::floor(p) == p;
  if (!integral && !(v > 0.0)) throw JetDomainError("pow", v);
  double f[4];
  double falling = 1.0;
  for (int k = 0; k < 4; ++k) {
    f[k] = falling == 0.0 ? 0.0 : falling * std::pow(v, p - k);
    falling *= (p - k);
  }
  return detail::checked(a.compose(f[0], f[1], f[2], f[3]), "pow", v);
}

/// a^b with a jet exponent; constant exponents defer to the constant overload.
inline Jet3 pow(const Jet3& a, const Jet3& b) {
  bool constant_exponent = true;
  for (int i = 0; i < b.dim() && constant_exponent; ++i) {
    if (b.d1(i) != 0.0) constant_exponent = false;
    for (int j = 0; j < b.dim() && constant_exponent; ++j) {
      if (b.d2(i, j) != 0.0) constant_exponent = false;
      for (int k = 0; k < b.dim() && constant_exponent; ++k) {
        if (b.d3(i, j, k) != 0.0) constant_exponent = false;
      }
    }
  }
  if (constant_exponent) return pow(a, b.value()).truncated(b.order());
  if (!(a.value() > 0.0)) throw JetDomainError("pow", a.value());
  return exp(b * log(a));
}

/// Multivariate chain rule: the jet of f o u, where f is a jet in n variables
/// and `inner` holds n jets (u^1..u^n) in a common set of variables whose
/// values are the expansion point of f.
inline Jet3 compose(const Jet3& f, std::span<const Jet3> inner) {
  const int n = f.dim();
  if (static_cast<int>(inner.size()) != n) throw InvalidArgument("compose: arity mismatch");
  const int d = inner.front().dim();
  int order = f.order();
  for (const Jet3& u : inner) {
    if (u.dim() != d) throw InvalidArgument("compose: inner jets differ in dimension");
    order = std::min(order, u.order());
  }
  Jet3 r(f.value(), d, order);
  for (int a = 0; a < d; ++a) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += f.d1(i) * inner[static_cast<std::size_t>(i)].d1(a);
    r.set_d1(a, s);
  }
  auto u = [&](int i) -> const Jet3& { return inner[static_cast<std::size_t>(i)]; };
  for (int a = 0; a < d; ++a)
    for (int b = a; b < d; ++b) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) {
        s += f.d1(i) * u(i).d2(a, b);
        for (int j = 0; j < n; ++j) s += f.d2(i, j) * u(i).d1(a) * u(j).d1(b);
      }
      r.set_d2(a, b, s);
      for (int c = b; c < d; ++c) {
        double t = 0.0;
        for (int i = 0; i < n; ++i) {
          t += f.d1(i) * u(i).d3(a, b, c);
          for (int j = 0; j < n; ++j) {
            t += f.d2(i, j) * (u(i).d2(a, b) * u(j).d1(c) + u(i).d2(a, c) * u(j).d1(b) + u(i).d2(b, c) * u(j).d1(a));
            for (int k = 0; k < n; ++k) t += f.d3(i, j, k) * u(i).d1(a) * u(j).d1(b) * u(k).d1(c);
          }
        }
        r.set_d3(a, b, c, t);
      }
    }
  return r.truncated(order);
}

/// True when `vars` are exactly the coordinate jets x_1..x_n of some point.
inline bool is_coordinate_jets(std::span<const Jet3> vars) {
  const int n = static_cast<int>(vars.size());
  for (int i = 0; i < n; ++i) {
    const Jet3& v = vars[static_cast<std::size_t>(i)];
    if (v.dim() != n || v.order() != Jet3::kMaxOrder) return false;
    for (int a = 0; a < n; ++a) {
      if (v.d1(a) != (a == i ? 1.0 : 0.0)) return false;
      for (int b = 0; b < n; ++b) {
        if (v.d2(a, b) != 0.0) return false;
        for (int c = 0; c < n; ++c)
          if (v.d3(a, b, c) != 0.0) return false;
      }
    }
  }
  return true;
}

/// Values of a list of jets as a point.
inline Point values_of(std::span<const Jet3> vars) {
  std::vector<double> c;
  c.reserve(vars.size());
  for (const Jet3& v : vars) c.push_back(v.value());
  return Point(std::move(c));
}

/// Largest absolute difference over all slots of two jets of equal dimension.
inline double max_abs_diff(const Jet3& a, const Jet3& b) {
  if (a.dim() != b.dim()) throw InvalidArgument("jet dimension mismatch");
  const int n = a.dim();
  double m = std::abs(a.value() - b.value());
  for (int i = 0; i < n; ++i) {
    m = std::max(m, std::abs(a.d1(i) - b.d1(i)));
    for (int j = 0; j < n; ++j) {
      m = std::max(m, std::abs(a.d2(i, j) - b.d2(i, j)));
      for (int k = 0; k < n; ++k) m = std::max(m, std::abs(a.d3(i, j, k) - b.d3(i, j, k)));
    }
  }
  return m;
}

// ---------------------------------------------------------------------------
// Sampling region
// ---------------------------------------------------------------------------

/// Ball removed from a DomainBox. When `axes` is non-empty the distance is
/// measured in those coordinates only, which excludes a tube around a
/// coordinate subspace (e.g. the axis r = 0 of a cylindrical chart).
struct ExcludedBall {
  std::vector<double> center;
  double radius = 0.0;
  std::vector<int> axes;
};

class DomainBox {
 public:
  DomainBox() = default;
  DomainBox(std::vector<double> lower, std::vector<double> upper,
            std::vector<ExcludedBall> excluded = {})
      : lower_(std::move(lower)), upper_(std::move(upper)), excluded_(std::move(excluded)) {
    if (lower_.size() != upper_.size() || lower_.empty()) {
      throw InvalidArgument("domain box bounds must be non-empty and of equal length");
    }
    for (std::size_t i = 0; i < lower_.size(); ++i) {
      if (!(lower_[i] < upper_[i])) throw InvalidArgument("domain box has empty interior");
    }
    for (auto& ball : excluded_) {
      if (ball.axes.empty()) {
        for (int i = 0; i < dim(); ++i) ball.axes.push_back(i);
      }
      if (ball.center.size() != ball.axes.size()) {
        throw InvalidArgument("excluded ball center does not match its axes");
      }
      for (int a : ball.axes) {
        if (a < 0 || a >= dim()) throw InvalidArgument("excluded ball axis out of range");
      }
      if (!(ball.radius > 0.0)) throw InvalidArgument("excluded ball radius must be positive");
      if (covers_box(ball)) throw InvalidArgument("excluded ball covers the whole box");
    }
  }

  int dim() const noexcept { return static_cast<int>(lower_.size()); }
  double lower(int i) const { return lower_[static_cast<std::size_t>(i)]; }
  double upper(int i) const { return upper_[static_cast<std::size_t>(i)]; }
  const std::vector<ExcludedBall>& excluded() const noexcept { return excluded_; }

  bool contains(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != dim()) return false;
    for (int i = 0; i < dim(); ++i) {
      if (x[static_cast<std::size_t>(i)] < lower(i) || x[static_cast<std::size_t>(i)] > upper(i)) {
        return false;
      }
    }
    for (const auto& ball : excluded_) {
      if (distance(ball, x) <= ball.radius) return false;
    }
    return true;
  }
  bool contains(const Point& p) const { return contains(p.coords()); }

  /// Maps a unit-cube sample u in [0,1)^n to the box.
  Point map_unit(std::span<const double> u) const {
    std::vector<double> x(lower_.size());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = lower_[i] + (upper_[i] - lower_[i]) * u[i];
    return Point(std::move(x));
  }

 private:
  static double distance(const ExcludedBall& ball, std::span<const double> x) {
    double s = 0.0;
    for (std::size_t k = 0; k < ball.axes.size(); ++k) {
      const double d = x[static_cast<std::size_t>(ball.axes[k])] - ball.center[k];
      s += d * d;
    }
    return std::sqrt(s);
  }

  // A ball covers the (convex) box iff it contains every projected corner.
  bool covers_box(const ExcludedBall& ball) const {
    const std::size_t m = ball.axes.size();
    for (std::size_t mask = 0; mask < (std::size_t{1} << m); ++mask) {
      double s = 0.0;
      for (std::size_t k = 0; k < m; ++k) {
        const auto a = static_cast<std::size_t>(ball.axes[k]);
        const double c = (mask >> k) & 1U ? upper_[a] : lower_[a];
        s += (c - ball.center[k]) * (c - ball.center[k]);
      }
      if (std::sqrt(s) > ball.radius) return false;
    }
    return true;
  }

  std::vector<double> lower_;
  std::vector<double> upper_;
  std::vector<ExcludedBall> excluded_;
};

// ---------------------------------------------------------------------------
// Finite-difference oracle
// ---------------------------------------------------------------------------

/// Default central-difference steps: 1e-4 for orders 1-2, 1e-2 for order 3.
inline double default_fd_step(std::size_t order) { return order >= 3 ? 1e-2 : 1e-4; }

/// Scalar map on a chart with the region where it may be evaluated.
struct ScalarField {
  std::function<double(const Point&)> eval;
  DomainBox domain;
};

/// Central-difference estimate of the partial derivative along the coordinate
/// indices in `multi_index` (length 1..3). The stencil is the product of
/// first-order central differences with offsets +-step, so the truncation
/// error is O(step^2) for every order.
inline double fd_partial(const ScalarField& field, const Point& x, std::span<const int> multi_index,
                         double step) {
  if (!(step > 0.0)) throw InvalidArgument("fd_partial: step must be positive");
  const std::size_t order = multi_index.size();
  if (order == 0) return field.eval(x);
  if (order > 3) throw InvalidArgument("fd_partial: order must be at most 3");
  for (int i : multi_index) {
    if (i < 0 || i >= x.dim()) throw InvalidArgument("fd_partial: index out of range");
  }
  double sum = 0.0;
  for (std::size_t mask = 0; mask < (std::size_t{1} << order); ++mask) {
    std::vector<double> p(x.coords().begin(), x.coords().end());
    double sign = 1.0;
    for (std::size_t k = 0; k < order; ++k) {
      const bool minus = (mask >> k) & 1U;
      p[static_cast<std::size_t>(multi_index[k])] += minus ? -step : step;
      if (minus) sign = -sign;
    }
    if (!field.domain.contains(p)) throw DomainError("fd_partial: stencil leaves the domain");
    sum += sign * field.eval(Point(std::move(p)));
  }
  return sum / std::pow(2.0 * step, static_cast<double>(order));
}

inline double fd_partial(const ScalarField& field, const Point& x, std::initializer_list<int> multi_index,
                         double step) {
  return fd_partial(field, x, std::span<const int>(multi_index.begin(), multi_index.size()), step);
}

inline double fd_partial(const ScalarField& field, const Point& x, std::initializer_list<int> multi_index) {
  return fd_partial(field, x, multi_index, default_fd_step(multi_index.size()));
}

}  // namespace warpcheck
