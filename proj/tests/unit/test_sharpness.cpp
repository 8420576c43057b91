#include "carnot_hardy/sharpness.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace carnot_hardy;

TEST(Minimizer, QuadraticInsideBox) {
  std::vector<FamilyParam> box{{"x", -2, 2, 1.5}, {"y", -2, 2, -1.5}};
  auto r = minimize_in_box([](std::span<const double> p) { return std::pow(p[0] - 0.3, 2) + 2 * std::pow(p[1] + 0.7, 2); },
                           box, 120);
  EXPECT_NEAR(r.x[0], 0.3, 1e-3);
  EXPECT_NEAR(r.x[1], -0.7, 1e-3);
  EXPECT_LE(r.evaluations, 120);
}

TEST(Minimizer, ClampsToBox) {
  std::vector<FamilyParam> box{{"x", 0, 1, 0.5}, {"y", 0, 1, 0.5}};
  auto r = minimize_in_box([](std::span<const double> p) { return -p[0] - p[1]; }, box, 60);
  EXPECT_NEAR(r.x[0], 1, 1e-9);
  EXPECT_NEAR(r.x[1], 1, 1e-9);
  EXPECT_GT(r.clamped, 0);
}

TEST(Minimizer, GoldenSectionInOneDimension) {
  std::vector<FamilyParam> box{{"x", 0, 4, 2}};
  auto r = minimize_in_box([](std::span<const double> p) { return std::cosh(p[0] - 1.25); }, box, 40);
  EXPECT_NEAR(r.x[0], 1.25, 1e-5);
  EXPECT_LE(r.evaluations, 40);
}

TEST(Rayleigh, ScalingInvariance) {
  auto p = sharpness_problem("hardy_euclid3");
  auto f = log_radial_bump(GroupModel::euclidean(3), 1.0, 0.5);
  auto spec = default_quadrature(f, 24);
  auto a = rayleigh(p.numerator, p.denominator, f, spec);
  auto b = rayleigh(p.numerator, p.denominator, f.scaled(3), spec);
  EXPECT_NEAR(a.quotient, b.quotient, 1e-13 * a.quotient);
}

TEST(Rayleigh, PolarMatchesTensorOnModerateMember) {
  auto p = sharpness_problem("hardy_euclid3");
  const double eps = 0.3, s = 1.0;
  std::vector<double> params{eps, s};
  auto polar = rayleigh(p, params);
  auto f = hardy_family_member(GroupModel::euclidean(3), eps, s);
  auto tensor = rayleigh(p.numerator, p.denominator, f, default_quadrature(f, 48));
  EXPECT_NEAR(polar.quotient, tensor.quotient, 10 * (polar.err + tensor.err));
  EXPECT_LT(polar.err, 1e-8 * polar.quotient);
}

TEST(Rayleigh, MonotoneInCutoffWidth) {
  auto p = sharpness_problem("hardy_euclid3");
  double prev = INFINITY, prev_err = 0;
  for (double s : {1.0, 2.0, 3.0, 4.0}) {
    std::vector<double> params{0.05, s};
    auto v = rayleigh(p, params);
    EXPECT_LE(v.quotient, prev + 10 * (v.err + prev_err)) << s;
    EXPECT_GE(v.quotient, p.target - 10 * v.err) << s;
    prev = v.quotient;
    prev_err = v.err;
  }
  // eps = 0.05, s = 3 sits near 0.59, well above 1.15 * 1/4
  std::vector<double> params{0.05, 3.0};
  EXPECT_NEAR(rayleigh(p, params).quotient, 0.5948, 5e-4);
}

TEST(Rayleigh, ParameterValidation) {
  auto p = sharpness_problem("hardy_euclid3");
  std::vector<double> short_params{0.1};
  EXPECT_THROW(rayleigh(p, short_params), std::invalid_argument);
  std::vector<double> outside{0.1, 100.0};
  EXPECT_THROW(rayleigh(p, outside), std::invalid_argument);
}

TEST(RefinedVsPlain, RadialFieldQuotientsEqual) {
  auto f = log_radial_bump(GroupModel::euclidean(3), 1.0, 0.5);
  auto r = refined_vs_plain(f, default_quadrature(f, 32));
  EXPECT_NEAR(r.q_refined, r.q_plain, 1e-10 * r.q_plain);
  EXPECT_TRUE(r.ordered);
  EXPECT_DOUBLE_EQ(r.target, 0.25);
}

TEST(RefinedVsPlain, NonRadialFieldOrdered) {
  auto f = default_fields(GroupModel::euclidean(3))[1].field;
  auto r = refined_vs_plain(f, default_quadrature(f, 24));
  EXPECT_TRUE(r.ordered);
  EXPECT_LT(r.q_refined, r.q_plain);
}

TEST(Problems, CatalogAndTargets) {
  const auto& ids = sharpness_problem_ids();
  ASSERT_EQ(ids.size(), 5u);
  EXPECT_DOUBLE_EQ(sharpness_problem("hardy_euclid3").target, 0.25);
  EXPECT_DOUBLE_EQ(sharpness_problem("hardy_heis2").target, 1.0);
  EXPECT_DOUBLE_EQ(sharpness_problem("weighted_hardy_euclid3").target, 0.0625);
  EXPECT_DOUBLE_EQ(sharpness_problem("critical_euclid3").target, 0.25);
  EXPECT_THROW(sharpness_problem("nope"), std::invalid_argument);
}

TEST(Probe, DeterministicAndRespectsLowerBound) {
  auto p = sharpness_problem("weighted_hardy_euclid3");
  auto a = probe(p, 12);
  auto b = probe(p, 12);
  EXPECT_EQ(a.to_json().dump(), b.to_json().dump());
  EXPECT_TRUE(a.lower_bound_respected());
  EXPECT_LE(a.evaluations, 12);
  EXPECT_GE(a.best_quotient, p.target - 10 * a.best_err);
}

TEST(Probe, HardyEuclidReachesTarget) {
  auto p = sharpness_problem("hardy_euclid3");
  auto r = probe(p, 60);
  EXPECT_LE(r.best_quotient, 1.05 * 0.25);
  EXPECT_TRUE(r.lower_bound_respected());
  EXPECT_NEAR(r.crosscheck_quotient, r.best_quotient, 10 * (r.crosscheck_err + r.best_err) + 1e-12);
}
