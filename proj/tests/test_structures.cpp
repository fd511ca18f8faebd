#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "warpcheck/structures.hpp"

namespace warpcheck {
namespace {

using testing::parse_all;
using testing::standard_sasakian;

std::vector<Point> sample_points(int count, int dim, double half_width, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-half_width, half_width);
  std::vector<Point> out;
  for (int k = 0; k < count; ++k) {
    std::vector<double> c(static_cast<std::size_t>(dim));
    for (auto& v : c) v = u(rng);
    out.emplace_back(std::move(c));
  }
  return out;
}

Vec random_vec(std::mt19937_64& rng, int m) {
  std::normal_distribution<double> n(0.0, 1.0);
  Vec v(m);
  for (int i = 0; i < m; ++i) v(i) = n(rng);
  return v;
}

TEST(AlmostContact, StandardSasakianSatisfiesStructureEquations) {
  const auto s = standard_sasakian();
  EXPECT_LT(validate_almost_contact(s, sample_points(64, 5, 1.5, 1)).max(), 1e-12);
}

TEST(AlmostContact, DegenerateInputFailsEtaXi) {
  const auto zero = parse_all(std::vector<std::string>(25, "0"), 3 + 2);
  const auto s = AlmostContactStructure(testing::flat_metric(5, DomainBox(std::vector<double>(5, -1.0),
                                                                          std::vector<double>(5, 1.0))),
                                        zero, parse_all({"0", "0", "0", "0", "0"}, 5),
                                        parse_all({"0", "0", "0", "0", "0"}, 5));
  const auto r = validate_almost_contact(s, {Point{0, 0, 0, 0, 0}});
  EXPECT_EQ(r.eta_xi, 1.0);
}

TEST(AlmostContact, PerturbationIsReportedAtItsSize) {
  auto phi = std::vector<std::string>{"0", "0", "-1", "0", "0", "0", "0", "0", "-1", "0", "1", "0", "0", "0",
                                      "0", "0", "1",  "0", "0", "0", "0", "0", "-x3", "-x4", "0"};
  phi[0] = "0.001";
  const auto base = standard_sasakian();
  const AlmostContactStructure s(base.metric(), parse_all(phi, 5), parse_all({"0", "0", "0", "0", "2"}, 5),
                                 parse_all({"-x3/2", "-x4/2", "0", "0", "1/2"}, 5));
  const double r = validate_almost_contact(s, {Point{0.3, -0.2, 0.1, 0.4, 0.0}}).max();
  EXPECT_GT(r, 0.5e-3);
  EXPECT_LT(r, 5e-3);
}

TEST(AlmostContact, RejectsEvenDimension) {
  EXPECT_THROW(AlmostContactStructure(testing::flat_metric(4, DomainBox({-1, -1, -1, -1}, {1, 1, 1, 1})),
                                      parse_all(std::vector<std::string>(16, "0"), 4),
                                      parse_all({"0", "0", "0", "1"}, 4), parse_all({"0", "0", "0", "1"}, 4)),
               ConfigError);
}

TEST(ContactClass, StandardSasakianIsSasakianNotCosymplectic) {
  const auto s = standard_sasakian();
  std::mt19937_64 rng(2);
  double sasakian = 0.0, cosymplectic = 0.0;
  for (const Point& p : sample_points(20, 5, 1.5, 3)) {
    const Vec X = random_vec(rng, 5), Y = random_vec(rng, 5);
    sasakian = std::max(sasakian, structure_class_residual(s, ContactClass::Sasakian, X, Y, p));
    cosymplectic = std::max(cosymplectic, structure_class_residual(s, ContactClass::Cosymplectic, X, Y, p));
  }
  EXPECT_LT(sasakian, 1e-10);
  EXPECT_GT(cosymplectic, 0.1);
}

TEST(ContactClass, FlatTrivialStructureIsCosymplectic) {
  const AlmostContactStructure s(testing::flat_metric(3, DomainBox({-1, -1, -1}, {1, 1, 1})),
                                 parse_all({"0", "-1", "0", "1", "0", "0", "0", "0", "0"}, 3),
                                 parse_all({"0", "0", "1"}, 3), parse_all({"0", "0", "1"}, 3));
  const Point p{0.2, 0.1, -0.3};
  EXPECT_LT(validate_almost_contact(s, {p}).max(), 1e-15);
  EXPECT_EQ(structure_class_residual(s, ContactClass::Cosymplectic, Vec::Unit(3, 0), Vec::Unit(3, 1), p), 0.0);
  EXPECT_EQ(structure_class_residual(s, ContactClass::NearlyCosymplectic, Vec::Unit(3, 0), Vec::Unit(3, 2), p), 0.0);
  EXPECT_EQ(normality_residual(s, Vec::Unit(3, 0), Vec::Unit(3, 1), p), 0.0);
}

TEST(Normality, StandardSasakianIsNormalAndContactMetric) {
  const auto s = standard_sasakian();
  for (const Point& p : sample_points(16, 5, 1.5, 4)) {
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j) EXPECT_LT(normality_residual(s, Vec::Unit(5, i), Vec::Unit(5, j), p), 1e-12);
    EXPECT_LT(contact_form_residual(s, p), 1e-14);
  }
}

TEST(Normality, NonClosedFormGivesResidual) {
  // Constant phi, eta = dz + x1 dy1: d eta(d/dx1, d/dy1) = 1.
  const AlmostContactStructure s(
      testing::flat_metric(5, DomainBox(std::vector<double>(5, -1.0), std::vector<double>(5, 1.0))),
      parse_all({"0", "0", "-1", "0", "0", "0", "0", "0", "-1", "0", "1", "0", "0", "0", "0", "0", "1", "0", "0",
                 "0", "0", "0", "0", "0", "0"},
                5),
      parse_all({"0", "0", "0", "0", "1"}, 5), parse_all({"0", "0", "x1", "0", "1"}, 5));
  EXPECT_NEAR(normality_residual(s, Vec::Unit(5, 0), Vec::Unit(5, 2), Point{0.1, 0, 0, 0, 0}), 1.0, 1e-15);
}

TEST(Complex, FlatStandardJIsKaehler) {
  const AlmostComplexStructure j(testing::flat_metric(4, DomainBox({-1, -1, -1, -1}, {1, 1, 1, 1})),
                                 parse_all({"0", "-1", "0", "0", "1", "0", "0", "0", "0", "0", "0", "-1", "0", "0",
                                            "1", "0"},
                                           4));
  EXPECT_EQ(complex_residuals(j, Point{0.1, 0.2, 0.3, 0.4}).max(), 0.0);
  // A rotating J on flat space is almost Hermitian but not parallel.
  const AlmostComplexStructure rot(
      testing::flat_metric(2, DomainBox({-1, -1}, {1, 1})), parse_all({"0", "-1", "1", "0"}, 2));
  EXPECT_EQ(complex_residuals(rot, Point{0.0, 0.0}).max(), 0.0);
  const AlmostComplexStructure bad(
      testing::flat_metric(2, DomainBox({-1, -1}, {1, 1})), parse_all({"x1", "-1", "1 + x1^2", "-x1"}, 2));
  const auto r = complex_residuals(bad, Point{0.5, 0.0});
  EXPECT_LT(r.square, 1e-15);
  EXPECT_GT(r.compatible, 0.1);
  EXPECT_GT(r.parallel, 0.1);
}

// ---------------------------------------------------------------------------
// Space-form models
// ---------------------------------------------------------------------------

/// Standard algebra transported by a random linear change of basis, so the
/// model formulas are exercised with a non-identity metric.
ContactAlgebra transported(const ContactAlgebra& a, std::mt19937_64& rng) {
  const int m = static_cast<int>(a.g.rows());
  Mat p = Mat::Identity(m, m);
  std::uniform_real_distribution<double> u(-0.3, 0.3);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) p(i, j) += u(rng);
  const Mat pinv = p.inverse();
  return {p.transpose() * a.g * p, pinv * a.phi * p, pinv * a.xi, p.transpose() * a.eta};
}

std::vector<SpaceFormModel> all_models(std::mt19937_64& rng) {
  return {
      {ModelKind::Complex, 1.7, 0.0, transported(standard_complex_algebra(2), rng)},
      {ModelKind::GeneralizedComplex, -0.8, 0.6, transported(standard_complex_algebra(3), rng)},
      {ModelKind::Sasakian, -3.0, 0.0, transported(standard_contact_algebra(2), rng)},
      {ModelKind::Kenmotsu, 0.5, 0.0, transported(standard_contact_algebra(2), rng)},
      {ModelKind::Cosymplectic, 2.0, 0.0, transported(standard_contact_algebra(3), rng)},
  };
}

/// Random unit vector orthogonal to xi (any vector for complex models).
Vec horizontal_unit(const SpaceFormModel& m, std::mt19937_64& rng) {
  Vec x = random_vec(rng, static_cast<int>(m.algebra.g.rows()));
  if (m.is_contact()) x -= m.algebra.eta.dot(x) * m.algebra.xi;
  return x / norm(m.algebra.g, x);
}

TEST(SpaceForm, AlgebraicSymmetries) {
  std::mt19937_64 rng(5);
  for (const auto& model : all_models(rng)) EXPECT_LT(model_tensor(model).symmetry_residuals().max(), 1e-12);
}

TEST(SpaceForm, TransportedAlgebrasAreValid) {
  std::mt19937_64 rng(6);
  for (const auto& model : all_models(rng)) {
    if (model.is_contact()) {
      EXPECT_LT(contact_residuals(model.algebra).max(), 1e-12);
    }
  }
}

TEST(SpaceForm, PhiSectionalIsTheModelConstant) {
  std::mt19937_64 rng(7);
  for (const auto& model : all_models(rng)) {
    // Holomorphic sectional curvature of the generalized family is c for every gamma.
    const double expected = model.c;
    double sum = 0.0, sum_sq = 0.0;
    for (int k = 0; k < 100; ++k) {
      const double v = phi_sectional(model, horizontal_unit(model, rng));
      EXPECT_NEAR(v, expected, 1e-12);
      sum += v, sum_sq += v * v;
    }
    EXPECT_LT(sum_sq / 100 - (sum / 100) * (sum / 100), 1e-12);
  }
}

TEST(SpaceForm, SectionsContainingXi) {
  std::mt19937_64 rng(8);
  const std::pair<ModelKind, double> cases[] = {
      {ModelKind::Sasakian, 1.0}, {ModelKind::Kenmotsu, -1.0}, {ModelKind::Cosymplectic, 0.0}};
  for (const auto& [kind, expected] : cases) {
    for (double c : {-3.0, 0.0, 2.5}) {
      const SpaceFormModel model{kind, c, 0.0, transported(standard_contact_algebra(2), rng)};
      for (int k = 0; k < 10; ++k)
        EXPECT_NEAR(model_sectional(model, horizontal_unit(model, rng), model.algebra.xi), expected, 1e-10);
    }
  }
}

TEST(SpaceForm, FlatComplexModelVanishes) {
  const SpaceFormModel flat{ModelKind::Complex, 0.0, 0.0, standard_complex_algebra(2)};
  std::mt19937_64 rng(9);
  for (int k = 0; k < 10; ++k)
    EXPECT_EQ(model_curvature(flat, random_vec(rng, 4), random_vec(rng, 4), random_vec(rng, 4), random_vec(rng, 4)),
              0.0);
}

TEST(SpaceForm, GeneralizedReducesToComplexAtZeroGamma) {
  std::mt19937_64 rng(10);
  const ContactAlgebra a = transported(standard_complex_algebra(2), rng);
  const SpaceFormModel gen{ModelKind::GeneralizedComplex, 1.3, 0.0, a};
  const SpaceFormModel cpx{ModelKind::Complex, 1.3, 0.0, a};
  for (int k = 0; k < 10; ++k) {
    const Vec X = random_vec(rng, 4), Y = random_vec(rng, 4), Z = random_vec(rng, 4), W = random_vec(rng, 4);
    EXPECT_EQ(model_curvature(gen, X, Y, Z, W), model_curvature(cpx, X, Y, Z, W));
  }
}

TEST(SpaceForm, GeneralizedTotallyRealPlanes) {
  const SpaceFormModel gen{ModelKind::GeneralizedComplex, 1.0, 1.0, standard_complex_algebra(2)};
  EXPECT_NEAR(model_sectional(gen, Vec::Unit(4, 0), Vec::Unit(4, 2)), 1.0, 1e-15);
}

TEST(SpaceForm, ComplexTotallyRealPlanesHaveQuarterCurvature) {
  const SpaceFormModel cpx{ModelKind::Complex, 4.0, 0.0, standard_complex_algebra(2)};
  EXPECT_NEAR(model_sectional(cpx, Vec::Unit(4, 0), Vec::Unit(4, 2)), 1.0, 1e-15);
  EXPECT_THROW(model_sectional(cpx, Vec::Unit(4, 0), Vec::Unit(4, 0)), DegeneratePlane);
}

}  // namespace
}  // namespace warpcheck
