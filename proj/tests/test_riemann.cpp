#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "warpcheck/riemann.hpp"

namespace warpcheck {
namespace {

using std::numbers::pi;

MetricField metric(int n, const std::vector<std::string>& entries, DomainBox box) {
  std::vector<Expr> exprs;
  for (const auto& s : entries) exprs.push_back(s.empty() ? Expr() : parse(s, n));
  return MetricField::from_exprs(n, std::move(exprs), std::move(box));
}

MetricField polar() { return metric(2, {"1", "0", "0", "x1^2"}, DomainBox({0.1, -4.0}, {5.0, 4.0})); }
MetricField sphere2() { return metric(2, {"1", "0", "0", "sin(x1)^2"}, DomainBox({0.1, -4.0}, {3.0, 4.0})); }
MetricField hyperbolic() { return metric(2, {"1", "0", "0", "exp(2*x1)"}, DomainBox({-2.0, -2.0}, {2.0, 2.0})); }
MetricField sphere3() {
  return metric(3, {"1", "0", "0", "0", "sin(x1)^2", "0", "0", "0", "sin(x1)^2*sin(x2)^2"},
                DomainBox({0.1, 0.1, -4.0}, {3.0, 3.0, 4.0}));
}

/// Pullback of g under the linear map y -> A y.
MetricField linear_pullback(const MetricField& g, const Mat& a) {
  const int n = g.dim();
  auto eval = [g, a, n](std::span<const Jet3> y) {
    std::vector<Jet3> x;
    for (int i = 0; i < n; ++i) {
      Jet3 xi = y[0] * a(i, 0);
      for (int j = 1; j < n; ++j) xi += y[static_cast<std::size_t>(j)] * a(i, j);
      x.push_back(xi);
    }
    const auto gx = g.jets(std::span<const Jet3>(x));
    std::vector<Jet3> out;
    for (int p = 0; p < n; ++p)
      for (int q = 0; q < n; ++q) {
        Jet3 s(0.0, n);
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) s += gx[static_cast<std::size_t>(i * n + j)] * (a(i, p) * a(j, q));
        out.push_back(s);
      }
    return out;
  };
  return MetricField(n, eval, DomainBox(std::vector<double>(n, -10.0), std::vector<double>(n, 10.0)));
}

TEST(MetricField, RejectsAsymmetricEntries) {
  EXPECT_THROW(metric(2, {"1", "x1", "x2", "1"}, DomainBox({0.0, 0.0}, {1.0, 1.0})), InvalidArgument);
  EXPECT_NO_THROW(metric(2, {"1", "x1", "", "1"}, DomainBox({0.0, 0.0}, {1.0, 1.0})));
}

TEST(MetricField, DegenerateMetricDetected) {
  const auto g = metric(2, {"1", "0", "0", "x1"}, DomainBox({-1.0, -1.0}, {1.0, 1.0}));
  EXPECT_THROW(metric_derivs(g, Point{-0.5, 0.0}), DegenerateMetric);
  EXPECT_LT(positive_definiteness_margin(g, Point{-0.5, 0.0}), 0.0);
  EXPECT_GT(positive_definiteness_margin(g, Point{0.5, 0.0}), 0.0);
}

TEST(Christoffel, PolarCoordinates) {
  for (double r : {0.5, 1.0, 3.0}) {
    const Array3 G = christoffel(polar(), Point{r, 0.7});
    EXPECT_NEAR(G(0, 1, 1), -r, 1e-14);
    EXPECT_NEAR(G(1, 0, 1), 1.0 / r, 1e-14);
    EXPECT_NEAR(G(1, 1, 0), 1.0 / r, 1e-14);
    EXPECT_NEAR(G(0, 0, 0), 0.0, 1e-14);
    EXPECT_NEAR(G(1, 1, 1), 0.0, 1e-14);
  }
}

TEST(Christoffel, Sphere) {
  const double t = 0.9;
  const Array3 G = christoffel(sphere2(), Point{t, 0.2});
  EXPECT_NEAR(G(0, 1, 1), -std::sin(t) * std::cos(t), 1e-14);
  EXPECT_NEAR(G(1, 0, 1), std::cos(t) / std::sin(t), 1e-14);
}

TEST(Curvature, SphereComponents) {
  for (double t : {0.3, 1.0, 2.5}) {
    const Curvature4 R = curvature(sphere2(), Point{t, 1.0});
    const double s2 = std::sin(t) * std::sin(t);
    EXPECT_NEAR(R(0, 1, 1, 0), s2, 1e-12);
    EXPECT_NEAR(R(0, 1, 0, 1), -s2, 1e-12);
    EXPECT_NEAR(R.symmetry_residuals().max(), 0.0, 1e-12);
    EXPECT_NEAR(sectional(sphere2(), Point{t, 1.0}, Vec::Unit(2, 0), Vec::Unit(2, 1)), 1.0, 1e-12);
  }
}

TEST(Curvature, ConstantCurvatureModels) {
  EXPECT_NEAR(sectional(hyperbolic(), Point{0.4, -1.0}, Vec::Unit(2, 0), Vec::Unit(2, 1)), -1.0, 1e-12);
  EXPECT_NEAR(sectional(polar(), Point{1.3, 0.1}, Vec::Unit(2, 0), Vec::Unit(2, 1)), 0.0, 1e-12);
  for (double a : {0.4, 1.2}) EXPECT_NEAR(scalar_curvature(sphere3(), Point{a, 0.8, 0.0}), 3.0, 1e-11);
}

TEST(Curvature, DegeneratePlaneRejected) {
  const Vec x = Vec::Unit(2, 0);
  EXPECT_THROW(sectional(polar(), Point{1.0, 0.0}, x, 2.0 * x), DegeneratePlane);
}

TEST(Laplacian, FlatExamples) {
  const auto flat = metric(2, {"1", "0", "0", "1"}, DomainBox({-2.0, -2.0}, {2.0, 2.0}));
  EXPECT_NEAR(laplacian(flat, parse("x1^2", 2), Point{0.3, 0.4}), -2.0, 1e-14);
  EXPECT_NEAR(laplacian(flat, parse("ln(sqrt(x1^2 + x2^2))", 2), Point{0.3, 0.4}), 0.0, 1e-12);
  // ln r is harmonic in polar coordinates as well.
  EXPECT_NEAR(laplacian(polar(), parse("ln(x1)", 2), Point{0.7, 0.2}), 0.0, 1e-13);
  // r^2 has Laplacian -4 on the plane.
  EXPECT_NEAR(laplacian(polar(), parse("x1^2", 2), Point{0.7, 0.2}), -4.0, 1e-13);
}

TEST(Laplacian, SphereEigenfunction) {
  // cos(theta) is a first eigenfunction: Laplacian = 2 cos(theta).
  const Point x{0.8, 0.3};
  EXPECT_NEAR(laplacian(sphere2(), parse("cos(x1)", 2), x), 2.0 * std::cos(0.8), 1e-13);
}

TEST(Frames, DiagonalMetric) {
  const Mat g = Vec(Eigen::Vector2d(4.0, 9.0)).asDiagonal();
  const OrthoFrame f = orthonormal_frame(g, Point{0.0, 0.0});
  EXPECT_NEAR(f.vectors(0, 0), 0.5, 1e-15);
  EXPECT_NEAR(f.vectors(1, 1), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(f.vectors(1, 0), 0.0, 1e-15);
  EXPECT_LT(f.orthonormality_residual(), 1e-14);
}

TEST(Frames, PolarAndSeeds) {
  const OrthoFrame f = orthonormal_frame(polar(), Point{2.0, 0.0});
  EXPECT_NEAR(f.vectors(0, 0), 1.0, 1e-15);
  EXPECT_NEAR(f.vectors(1, 1), 0.5, 1e-15);
  const OrthoFrame s = orthonormal_frame(polar(), Point{2.0, 0.0}, {Vec(Eigen::Vector2d(1.0, 1.0))});
  EXPECT_LT(s.orthonormality_residual(), 1e-14);
  EXPECT_NEAR(s.vectors(0, 0) / s.vectors(1, 0), 1.0, 1e-14);
  EXPECT_THROW(orthonormal_frame(polar(), Point{2.0, 0.0}, {Vec::Unit(2, 0), Vec::Unit(2, 0)}), DegeneratePlane);
}

// Random smooth metric: I + small symmetric perturbation.
MetricField random_metric(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-0.3, 0.3);
  auto coef = [&] {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", u(rng));
    return std::string(buf);
  };
  std::vector<std::string> e(9);
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) {
      const std::string pert = coef() + "*sin(" + coef() + "*x1 + " + coef() + "*x2*x3) + " + coef() + "*x" +
                               std::to_string(1 + (i + j) % 3) + "^2";
      e[static_cast<std::size_t>(i * 3 + j)] = (i == j ? "2 + " : "0.2*(") + pert + (i == j ? "" : ")");
    }
  return metric(3, e, DomainBox({-1.0, -1.0, -1.0}, {1.0, 1.0, 1.0}));
}

TEST(CurvatureProperties, AlgebraicSymmetries) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-0.7, 0.7);
  for (int trial = 0; trial < 25; ++trial) {
    const MetricField g = random_metric(rng);
    const Point x{u(rng), u(rng), u(rng)};
    const Curvature4 R = curvature(g, x);
    EXPECT_LT(R.symmetry_residuals().max(), 1e-12);
  }
}

TEST(CurvatureProperties, SectionalDependsOnlyOnPlane) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-0.7, 0.7);
  for (int trial = 0; trial < 25; ++trial) {
    const MetricField g = random_metric(rng);
    const Point x{u(rng), u(rng), u(rng)};
    const Vec X = Vec::Random(3), Y = Vec::Random(3);
    const double a = 1.0 + u(rng), b = u(rng), c = u(rng), d = 1.0 + u(rng);
    const double k1 = sectional(g, x, X, Y);
    const double k2 = sectional(g, x, a * X + b * Y, c * X + d * Y);
    EXPECT_NEAR(k1, k2, 1e-10 * std::max(1.0, std::abs(k1)));
  }
}

TEST(CurvatureProperties, ScalarCurvatureInvariantUnderLinearChange) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-0.4, 0.4);
  for (int trial = 0; trial < 15; ++trial) {
    const MetricField g = random_metric(rng);
    Mat a = Mat::Identity(3, 3);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) a(i, j) += u(rng);
    const Point y{u(rng), u(rng), u(rng)};
    const Vec xv = a * Vec(Eigen::Vector3d(y[0], y[1], y[2]));
    const Point x{xv(0), xv(1), xv(2)};
    const double tau_x = scalar_curvature(g, x);
    const double tau_y = scalar_curvature(linear_pullback(g, a), y);
    EXPECT_NEAR(tau_x, tau_y, 1e-10 * std::max(1.0, std::abs(tau_x)));
  }
}

TEST(LaplacianProperties, FrameAndCoordinateFormsAgree) {
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> u(-0.7, 0.7);
  const Expr psi = parse("sin(x1)*exp(0.5*x2) + x3^3 - x1*x2*x3", 3);
  for (int trial = 0; trial < 25; ++trial) {
    const MetricField g = random_metric(rng);
    const Point x{u(rng), u(rng), u(rng)};
    const MetricDerivs d = metric_derivs(g, x);
    const Jet3 j = eval_expr(psi, x);
    const Vec seed = Vec::Random(3);
    const double frame_form = laplacian(d, orthonormal_frame(d.g, x, {seed}), j);
    EXPECT_NEAR(frame_form, laplacian_coordinate(d, j), 1e-11);
    EXPECT_NEAR(grad_norm_sq(d, j), grad_norm_sq_frame(orthonormal_frame(d.g, x, {seed}), j), 1e-12);
  }
}

}  // namespace
}  // namespace warpcheck
