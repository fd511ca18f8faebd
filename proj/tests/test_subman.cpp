#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "test_support.hpp"
#include "warpcheck/subman.hpp"

namespace warpcheck {
namespace {

using testing::flat_metric;
using testing::box;
using testing::parse_all;
using testing::chen_cr;
using testing::sasakian_cr;
using testing::sphere;

Immersion circle(double radius) {
  const std::string r = std::to_string(radius);
  return Immersion::from_exprs(1, parse_all({r + "*cos(x1)", r + "*sin(x1)"}, 1), flat_metric(2, box({-9, -9}, {9, 9})),
                               box({-3}, {3}));
}

TEST(Immersion, ImageAndJacobian) {
  const Immersion im = sphere();
  const Point x{0.7, 0.3};
  const Point y = im.image(x);
  EXPECT_DOUBLE_EQ(y[2], std::cos(0.7));
  const Mat jac = im.jacobian(x);
  EXPECT_DOUBLE_EQ(jac(2, 0), -std::sin(0.7));
  EXPECT_DOUBLE_EQ(jac(2, 1), 0.0);
}

TEST(Immersion, InducedMetricOfSphere) {
  const Mat g = sphere().induced_metric().value(Point{0.7, 0.3});
  EXPECT_NEAR(g(0, 0), 1.0, 1e-15);
  EXPECT_NEAR(g(0, 1), 0.0, 1e-15);
  EXPECT_NEAR(g(1, 1), std::sin(0.7) * std::sin(0.7), 1e-15);
  // Intrinsic curvature of the induced metric is that of the unit sphere.
  EXPECT_NEAR(scalar_curvature(sphere().induced_metric(), Point{0.7, 0.3}), 1.0, 1e-12);
}

// Composed evaluation: the leaf metric freezes the fiber and feeds non-coordinate jets.
TEST(Immersion, InducedMetricComposesWithLeafRestriction) {
  const Immersion im = chen_cr();
  const Point x{0.6, -0.8, 0.7};
  const MetricField g = im.induced_metric();
  EXPECT_NEAR(g.value(x)(2, 2), 1.0, 1e-14);
  // Leaf is flat R^2, so the Laplacian of r is -1/r.
  EXPECT_NEAR(leaf_laplacian(g, {2, 1}, parse("sqrt(x1^2 + x2^2)", 2), x), -1.0, 1e-12);
  EXPECT_LT(warping_identity(g, {2, 1}, parse("sqrt(x1^2 + x2^2)", 2), x).residual(), 1e-10);
}

TEST(Immersion, RejectsRankDeficientMaps) {
  const Immersion im = Immersion::from_exprs(2, parse_all({"x1", "x1", "0"}, 2),
                                             flat_metric(3, box({-1, -1, -1}, {1, 1, 1})), box({-1, -1}, {1, 1}));
  EXPECT_THROW(second_fundamental_form(im, Point{0.1, 0.2}), ImmersionDegenerate);
}

TEST(SecondFundamentalForm, CircleHasCurvatureOneOverRadius) {
  for (double r : {0.5, 1.0, 2.0}) {
    const auto s = second_fundamental_form(circle(r), Point{0.4});
    EXPECT_EQ(s.codim(), 1);
    EXPECT_NEAR(std::abs(s.h[0](0, 0)), 1.0 / r, 1e-13);
  }
}

TEST(SecondFundamentalForm, UnitSphere) {
  const Immersion im = sphere();
  const Point x{1.1, -0.4};
  const auto s = second_fundamental_form(im, x);
  EXPECT_NEAR(s.mean_curvature().norm(), 1.0, 1e-13);
  EXPECT_NEAR(s.norm_sq(), 2.0, 1e-13);
  EXPECT_EQ(relative_null_space(s).cols(), 0);

  // Outward normal: the position vector, with A = -Id.
  const Vec outward = Vec(Eigen::Map<const Vec>(im.image(x).coords().data(), 3));
  const ShapeOperator A = shape_operator(im, x, outward, s);
  EXPECT_NEAR((A.A + Mat::Identity(2, 2)).cwiseAbs().maxCoeff(), 0.0, 1e-12);
  EXPECT_LT(A.duality_residual, 1e-12);
  const ShapeOperator B = shape_operator(im, x, -outward, s);
  EXPECT_NEAR((B.A - Mat::Identity(2, 2)).cwiseAbs().maxCoeff(), 0.0, 1e-12);
}

TEST(SecondFundamentalForm, PlaneIsTotallyGeodesic) {
  const Immersion plane = Immersion::from_exprs(2, parse_all({"x1", "x2", "x1 + 2*x2"}, 2),
                                                flat_metric(3, box({-5, -5, -5}, {5, 5, 5})), box({-1, -1}, {1, 1}));
  const auto s = second_fundamental_form(plane, Point{0.3, 0.2});
  EXPECT_LT(classify(s).totally_geodesic, 1e-14);
  EXPECT_EQ(relative_null_space(s).cols(), 2);
}

TEST(SecondFundamentalForm, CylinderNullSpaceIsTheRuling) {
  const Immersion cyl = Immersion::from_exprs(2, parse_all({"cos(x1)", "sin(x1)", "x2"}, 2),
                                              flat_metric(3, box({-2, -2, -2}, {2, 2, 2})), box({-3, -1}, {3, 1}));
  const auto s = second_fundamental_form(cyl, Point{0.5, 0.1});
  const Mat null = relative_null_space(s);
  ASSERT_EQ(null.cols(), 1);
  // Frame coordinates of the ruling d/dx2 in the orthonormal frame.
  const Vec ruling = s.frame.fullPivLu().solve(Vec::Unit(2, 1));
  EXPECT_NEAR(std::abs(null.col(0).dot(ruling.normalized())), 1.0, 1e-12);
}

TEST(ShapeOperator, RejectsNonNormalVectors) {
  const Immersion im = sphere();
  const Point x{1.1, -0.4};
  const auto s = second_fundamental_form(im, x);
  EXPECT_THROW(shape_operator(im, x, s.push.col(0), s), InvalidNormal);
}

TEST(Gauss, SphereAndScalarIdentity) {
  const Immersion im = sphere();
  const Point x{0.9, 1.0};
  const auto s = second_fundamental_form(im, x);
  const GaussCheck g = gauss_check(im, x, s);
  EXPECT_LT(g.residual, 1e-11);
  EXPECT_NEAR(g.tau, 1.0, 1e-11);
  EXPECT_NEAR(g.tau_ambient, 0.0, 1e-15);
  EXPECT_LT(g.scalar_residual, 1e-11);
}

TEST(Gauss, ChenExample) {
  const Immersion im = chen_cr();
  for (const Point& x : {Point{0.5, 0.0, 0.3}, Point{0.6, 0.8, 1.0}, Point{-1.2, 1.6, 0.7}}) {
    const double r2 = x[0] * x[0] + x[1] * x[1];
    const auto s = second_fundamental_form(im, x);
    EXPECT_NEAR(s.norm_sq(), 2.0 / r2, 1e-11);
    const GaussCheck g = gauss_check(im, x, s);
    EXPECT_LT(g.residual, 1e-10);
    EXPECT_LT(g.scalar_residual, 1e-10);
  }
}

// Submanifolds of a curved ambient: graphs in a conformally deformed R^3.
TEST(Gauss, HoldsForRandomGraphsInCurvedAmbient) {
  testing::SmoothExprGen gen(2, 99);
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-0.5, 0.5), c(0.05, 0.3);
  for (int trial = 0; trial < 15; ++trial) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "exp(%.3f*x3 + %.3f*x1*x2)", c(rng), c(rng));
    const std::string w = buf;
    const MetricField amb = MetricField::from_exprs(
        3, parse_all({w, "0", "0", "", w, "0", "", "", "1 + " + std::to_string(c(rng)) + "*x1^2"}, 3),
        box({-3, -3, -3}, {3, 3, 3}));
    const std::string height = "0.3*(" + gen(2) + ")";
    const Immersion im = Immersion::from_exprs(2, parse_all({"x1", "x2", height}, 2), amb, box({-1, -1}, {1, 1}));
    const Point x{u(rng), u(rng)};
    const auto s = second_fundamental_form(im, x);
    const GaussCheck g = gauss_check(im, x, s);
    const double scale = std::max(1.0, s.norm_sq());
    EXPECT_LT(g.residual, 1e-8 * scale) << height;
    EXPECT_LT(g.scalar_residual, 1e-8 * scale) << height;
    const ShapeOperator A = shape_operator(im, x, s.normal.col(0), s);
    EXPECT_LT(A.duality_residual, 1e-9 * scale) << height;
    EXPECT_LT(A.asymmetry, 1e-9 * scale) << height;
  }
}

TEST(Classify, SphereWithWarpedSplit) {
  const auto s = second_fundamental_form(sphere(), Point{0.8, 0.2});
  const Classification c = classify(s);
  EXPECT_LT(c.totally_umbilical, 1e-13);
  EXPECT_LT(c.mixed_totally_geodesic, 1e-13);
  EXPECT_NEAR(c.leaf_totally_geodesic, 1.0, 1e-13);
  EXPECT_NEAR(c.leaf_minimal, 1.0, 1e-13);
  EXPECT_LT(c.fiber_totally_umbilical, 1e-13);
}

TEST(Classify, ChenExampleFactors) {
  const Immersion im = chen_cr();
  const Point x{0.6, 0.8, 0.7};
  const Classification c = classify(second_fundamental_form(im, x));
  EXPECT_LT(c.leaf_totally_geodesic, 1e-12);
  EXPECT_GT(c.mixed_totally_geodesic, 0.1);
  const FactorsInAmbient f = factors_in_ambient(im, x);
  EXPECT_LT(f.leaf_totally_geodesic, 1e-12);
  EXPECT_LT(f.fiber_totally_umbilical, 1e-12);
}

TEST(CR, KaehlerPreconditionsHold) {
  const Immersion im = chen_cr();
  const auto s = second_fundamental_form(im, Point{0.6, 0.8, 0.7});
  EXPECT_LT(cr_residuals(im, s).max(), 1e-13);
  EXPECT_EQ(s.n_fperp, 1);
}

TEST(CR, ContactPreconditionsAndIdentities) {
  const Immersion im = sasakian_cr();
  for (const Point& x : {Point{0.5, 0.7, 0.2, 0.4}, Point{1.2, 0.3, -0.6, 1.1}}) {
    const auto s = second_fundamental_form(im, x);
    EXPECT_EQ(s.xi_index, 0);
    EXPECT_LT(cr_residuals(im, s).max(), 1e-13);
    const ContactCRChecks c = contact_cr_checks(im, s);
    EXPECT_EQ(c.nu_dim, 0);
    EXPECT_LT(c.max(), 1e-12);
    EXPECT_LT(classify(s).leaf_minimal, 1e-12);
    EXPECT_LT(gauss_check(im, x, s).residual, 1e-10);
  }
}

TEST(CR, NonTangentReebFieldIsReported) {
  const AlmostContactStructure st = testing::standard_sasakian(5.0);
  Immersion im = Immersion::from_exprs(4, parse_all({"x1", "x2", "x3", "x4", "0"}, 4), st.metric(),
                                       box({-1, -1, -1, -1}, {1, 1, 1, 1}));
  im.set_warped({3, 1, parse("1", 3)});
  im.set_contact(st);
  const auto s = second_fundamental_form(im, Point{0.1, 0.2, 0.3, 0.4});
  EXPECT_EQ(s.xi_index, -1);
  EXPECT_GT(cr_residuals(im, s).xi_tangent, 0.1);
  EXPECT_THROW(contact_cr_checks(im, s), InvalidArgument);
}

}  // namespace
}  // namespace warpcheck
