#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "warpcheck/ineq.hpp"

namespace warpcheck {
namespace {

using testing::chen_cr;

double radius_sq(const Point& x) { return x[0] * x[0] + x[1] * x[1]; }

const std::vector<Point>& chen_points() {
  static const std::vector<Point> pts = {Point{0.5, 0.0, 0.3}, Point{0.6, 0.8, 0.7}, Point{0.0, 2.0, 1.2},
                                         Point{-0.3, 0.2, 0.5}, Point{1.1, -1.3, 1.0}};
  return pts;
}

TEST(WarpingData, ChenExampleClosedForms) {
  const Immersion im = chen_cr();
  for (const Point& x : chen_points()) {
    const double r2 = radius_sq(x);
    const WarpingData wd = warping_data(im, x);
    EXPECT_NEAR(wd.f, std::sqrt(r2), 1e-14);
    EXPECT_NEAR(wd.lap_f, -1.0 / std::sqrt(r2), 1e-10);
    EXPECT_NEAR(wd.grad_ln_f_sq, 1.0 / r2, 1e-10);
    EXPECT_NEAR(wd.lap_ln_f, 0.0, 1e-10);
  }
}

TEST(ScalarDecomposition, HoldsOnGalleryShapes) {
  for (const Immersion& im : {chen_cr(), chen_cr(0.1), testing::trivial_product()}) {
    for (const Point& x : {Point{0.5, 0.1, 0.3}, Point{-0.6, 0.8, 0.9}}) {
      const auto s = second_fundamental_form(im, x);
      EXPECT_LT(scalar_decomposition_residual(im, x, s, ambient_tangent_curvature(im, s), warping_data(im, x)), 1e-9);
    }
  }
  const Immersion s2 = testing::sphere();
  for (const Point& x : {Point{0.4, 0.1}, Point{2.0, -1.0}}) {
    const auto s = second_fundamental_form(s2, x);
    EXPECT_LT(scalar_decomposition_residual(s2, x, s, ambient_tangent_curvature(s2, s), warping_data(s2, x)), 1e-10);
  }
}

TEST(FiberLemma, HoldsOnChenExample) {
  const Immersion im = chen_cr();
  for (const Point& x : chen_points()) {
    const auto c = fiber_lemma_check(im, x, second_fundamental_form(im, x));
    EXPECT_TRUE(c.hypotheses_hold(1e-8));
    EXPECT_LT(c.fiber_block, 1e-8);
    EXPECT_TRUE(c.passes(1e-8));
  }
}

TEST(FiberLemma, TorusFiberIsNotMinimal) {
  const Immersion im = testing::torus();
  const Point x{0.3, 1.0};
  const auto c = fiber_lemma_check(im, x, second_fundamental_form(im, x));
  // Parallel circle: |H_2| = cos(theta) / (2 + cos(theta)).
  EXPECT_NEAR(c.fiber_minimal, std::cos(0.3) / (2.0 + std::cos(0.3)), 1e-12);
  EXPECT_FALSE(c.hypotheses_hold(1e-8));
  EXPECT_TRUE(c.passes(1e-8));
}

TEST(MainInequality, EqualityOnChenExample) {
  const Immersion im = chen_cr();
  for (const Point& x : chen_points()) {
    const InequalityResult r = main_inequality(im, x);
    EXPECT_NEAR(r.lhs, 1.0 / radius_sq(x), 1e-10);
    EXPECT_NEAR(r.rhs, 1.0 / radius_sq(x), 1e-10);
    EXPECT_LT(std::abs(r.slack()), 1e-8);
    EXPECT_LT(r.diag.max(), 1e-8);
    EXPECT_LT(r.diag.leaf_geodesic_in_ambient, 1e-8);
    EXPECT_LT(r.diag.fiber_umbilical_in_ambient, 1e-8);
    EXPECT_TRUE(r.equality(1e-8));
  }
}

TEST(MainInequality, TrivialProductIsExactlyZero) {
  const InequalityResult r = main_inequality(testing::trivial_product(), Point{0.2, -0.4, 0.6});
  EXPECT_LT(std::abs(r.lhs), 1e-14);
  EXPECT_LT(std::abs(r.rhs), 1e-14);
  EXPECT_TRUE(r.equality(1e-10));
}

TEST(MainInequality, StrictOnBentExample) {
  const Immersion im = chen_cr(0.1);
  for (const Point& x : chen_points()) {
    const InequalityResult r = main_inequality(im, x);
    EXPECT_GT(r.slack(), 1e-3) << r.lhs << " vs " << r.rhs;
    EXPECT_FALSE(r.equality(1e-8));
    EXPECT_GT(r.diag.leaf_block, 1e-3);
  }
}

// Diagnostics (a), (b) and |H| vanish exactly when the slack does.
TEST(MainInequality, EqualityCharacterization) {
  const double tol = 1e-8;
  for (const Immersion& im : {chen_cr(), chen_cr(0.1), chen_cr(0.01), testing::trivial_product()}) {
    for (const Point& x : chen_points()) {
      if (x[0] > 1.0 || x[1] > 1.0) continue;
      const InequalityResult r = main_inequality(im, x);
      if (r.diag.max() < tol) {
        EXPECT_LT(std::abs(r.slack()), 10 * tol);
      }
      if (std::abs(r.slack()) < tol) {
        EXPECT_LT(r.diag.leaf_block, 10 * tol);
        EXPECT_LT(r.diag.fiber_block, 10 * tol);
      }
    }
  }
}

// Re-orthonormalizing the frame inside the leaf block leaves the bound unchanged.
TEST(MainInequality, RhsInvariantUnderBlockRotation) {
  const Immersion im = chen_cr();
  const Point x{0.6, 0.8, 0.7};
  const auto s = second_fundamental_form(im, x);
  const WarpingData wd = warping_data(im, x);
  const SpaceFormModel model{ModelKind::GeneralizedComplex, 2.0, 0.7, standard_complex_algebra(2)};
  const double base = main_inequality(im, x, s, model_tangent_curvature(model, s), wd).rhs;
  for (double angle : {0.3, 1.7, -2.4}) {
    Mat Q = Mat::Identity(3, 3);
    Q(0, 0) = Q(1, 1) = std::cos(angle);
    Q(1, 0) = std::sin(angle);
    Q(0, 1) = -std::sin(angle);
    SecondFundamentalForm rot = s;
    rot.frame = s.frame * Q;
    rot.push = s.jac * rot.frame;
    for (auto& h : rot.h) h = Q.transpose() * h * Q;
    const InequalityResult r = main_inequality(im, x, rot, model_tangent_curvature(model, rot), wd);
    EXPECT_NEAR(r.rhs, base, 1e-10);
    EXPECT_NEAR(r.lhs, 0.5 * s.norm_sq(), 1e-12);
  }
}

TEST(ComplexSpaceForm, DifferenceMatchesModelSummation) {
  const Immersion im = chen_cr();
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> cd(-4.0, 4.0);
  for (const Point& x : chen_points()) {
    const auto s = second_fundamental_form(im, x);
    const double c = cd(rng);
    const SpaceFormModel model{ModelKind::Complex, c, 0.0, standard_complex_algebra(2)};
    const Curvature4 r = model_tangent_curvature(model, s);
    const double direct = frame_scalar(r, 0, 3) - frame_scalar(r, 0, 2) - frame_scalar(r, 2, 3);
    EXPECT_NEAR(direct, complex_space_form_difference(c, 2, 1), 1e-10);
  }
}

TEST(ComplexSpaceForm, FlatBoundOnChenExample) {
  const Immersion im = chen_cr();
  const std::vector<std::pair<Point, double>> cases = {
      {Point{0.5, 0.0, 0.7}, 4.0}, {Point{0.6, 0.8, 0.7}, 1.0}, {Point{0.0, 2.0, 0.7}, 0.25}};
  for (const auto& [x, expected] : cases) {
    const auto s = second_fundamental_form(im, x);
    const WarpingData wd = warping_data(im, x);
    const CsfResult r = csf_inequality(im, x, s, 0.0, wd);
    EXPECT_NEAR(r.reduced.lhs, expected, 1e-8);
    EXPECT_NEAR(r.reduced.rhs, expected, 1e-8);
    EXPECT_NEAR(r.printed_rhs, expected, 1e-8);
    EXPECT_NEAR(r.reduced.rhs, main_inequality(im, x).rhs, 1e-8);
  }
}

TEST(Variants, GammaZeroReducesToComplexSpaceForm) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-5.0, 5.0), pos(0.0, 5.0);
  std::uniform_int_distribution<int> dim(1, 6);
  for (int trial = 0; trial < 1000; ++trial) {
    const double c = u(rng);
    const int n1 = 2 * dim(rng), n2 = dim(rng);
    const WarpingData wd{1.0, u(rng), pos(rng), u(rng)};
    EXPECT_NEAR(0.5 * generalized_bound(c, 0.0, n1, n2, wd), csf_bound(c, n1, n2, wd), 1e-12);
  }
}

TEST(Variants, ClosedFormEvaluation) {
  const WarpingData wd{2.0, -0.5, 0.25, 0.1};
  // n1 (c + 3 gamma)/4 = 2 * 7/4 = 7/2.
  EXPECT_DOUBLE_EQ(generalized_bound(4.0, 1.0, 2, 1, wd), 2.0 * (0.25 - 0.1 + 3.5));
  EXPECT_DOUBLE_EQ(nearly_kaehler_bound(5.0, 1.0, 2, wd), 4.0 * (1.0 - 0.1));
  EXPECT_DOUBLE_EQ(dp_bound_as_printed(1.0, 1.0, 1, wd), 2.0 * (0.25 - 0.1 + 2.0 + 1.0));
  EXPECT_DOUBLE_EQ(csf_bound_as_printed(2.0, 2, 1, wd), 2.0 + 0.15);
  EXPECT_DOUBLE_EQ(csf_bound(2.0, 2, 1, wd), 1.0 + 0.15);
}

TEST(Variants, ChenExampleEqualityAtGammaZero) {
  const Immersion im = chen_cr();
  for (const Point& x : chen_points()) {
    const auto s = second_fundamental_form(im, x);
    EXPECT_NEAR(s.norm_sq(), generalized_bound(0.0, 0.0, 2, 1, warping_data(im, x)), 1e-8);
  }
}

TEST(WarpingData, RequiresDeclaration) {
  Immersion im = Immersion::from_exprs(1, testing::parse_all({"x1", "0"}, 1),
                                       testing::flat_metric(2, testing::box({-1, -1}, {1, 1})), testing::box({-1}, {1}));
  EXPECT_THROW(warping_data(im, Point{0.0}), ConfigError);
}

}  // namespace
}  // namespace warpcheck
