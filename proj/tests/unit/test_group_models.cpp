#include "carnot_hardy/fields.hpp"
#include "carnot_hardy/group_models.hpp"
#include "carnot_hardy/opalgebra.hpp"
#include "carnot_hardy/quadrature.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace carnot_hardy;

TEST(GroupModels, HeisenbergDimensions) {
  for (int n = 1; n <= 3; ++n) {
    auto m = GroupModel::heisenberg(n);
    EXPECT_EQ(m.ambient_dim(), 2 * n + 1);
    EXPECT_EQ(m.first_stratum_dim(), 2 * n);
    EXPECT_EQ(m.q_hom(), Rational(2 * n + 2));
    EXPECT_EQ(m.step(), 2);
  }
}

TEST(GroupModels, EuclideanHomogeneousDimension) {
  auto m = GroupModel::parse("aniso:1,2");
  EXPECT_EQ(m.q_hom(), Rational(3));
  EXPECT_EQ(m.first_stratum_dim(), 2);
  EXPECT_EQ(GroupModel::euclidean(3).q_hom(), Rational(3));
  EXPECT_EQ(GroupModel::euclidean(3).step(), 1);
}

TEST(GroupModels, Dilate) {
  auto iso = DilationStructure::isotropic(2);
  std::vector<double> x{1, 1};
  EXPECT_EQ(dilate(iso, 2, x), (std::vector<double>{2, 2}));
  DilationStructure d({Rational(1), Rational(2)});
  EXPECT_EQ(dilate(d, 3, x), (std::vector<double>{3, 9}));
  std::vector<double> y{5, 7};
  EXPECT_EQ(dilate(d, 1, y), y);
  EXPECT_THROW(dilate(d, 0, y), std::invalid_argument);
  EXPECT_THROW(dilate(d, -1, y), std::invalid_argument);
}

TEST(GroupModels, QuasiNormValues) {
  std::vector<double> x{3, 4, 0};
  EXPECT_DOUBLE_EQ(quasi_norm(GroupModel::euclidean(3), x), 5.0);
  auto a = GroupModel::parse("aniso:1,2");
  std::vector<double> y{0, 4};
  EXPECT_NEAR(quasi_norm(a, y), 2.0, 1e-15);
  std::vector<double> z{1, 1};
  auto dz = dilate(a.dilations(), 2, z);
  EXPECT_NEAR(quasi_norm(a, dz), 2 * quasi_norm(a, z), 1e-14);
}

TEST(GroupModels, KoranyiGauge) {
  auto h = GroupModel::heisenberg(1);
  std::vector<double> x{1, 2, 3};
  EXPECT_NEAR(quasi_norm(h, x), std::pow(169.0, 0.25), 1e-14);
  EXPECT_NEAR(stratum_norm(h, x), std::sqrt(5.0), 1e-15);
}

TEST(GroupModels, EuclideanNormRejectsNonUnitWeights) {
  DilationStructure d({Rational(1), Rational(2)});
  EXPECT_THROW(QuasiNormSpec::euclidean().validate(d), std::invalid_argument);
  EXPECT_THROW(GroupModel::euclidean(d, QuasiNormSpec::euclidean()), std::invalid_argument);
}

TEST(GroupModels, HomogeneityProperty) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-3, 3), l(0.1, 5);
  for (const char* name : {"euclid:3", "aniso:1,2", "aniso:1,3", "heis:1", "heis:2"}) {
    auto m = GroupModel::parse(name);
    for (int k = 0; k < 100; ++k) {
      std::vector<double> x(m.ambient_dim());
      for (auto& v : x) v = u(rng);
      double lam = l(rng);
      std::vector<double> dx;
      if (m.is_heisenberg()) {
        dx = x;
        for (int i = 0; i < m.first_stratum_dim(); ++i) dx[i] *= lam;
        dx[m.t_index()] *= lam * lam;
      } else {
        dx = dilate(m.dilations(), lam, x);
      }
      double ref = lam * quasi_norm(m, x);
      EXPECT_LE(std::abs(quasi_norm(m, dx) - ref), 1e-12 * ref) << name;
    }
  }
}

TEST(GroupModels, ConfigRoundTrip) {
  for (const char* name : {"euclid:3", "aniso:1,2", "heis:2"}) {
    auto m = GroupModel::parse(name);
    auto back = GroupModel::from_config(m.to_config());
    EXPECT_EQ(back, m);
    EXPECT_EQ(back.q_hom(), m.q_hom());
  }
  auto j = GroupModel::parse("aniso:1,2").to_config();
  EXPECT_EQ(j["weights"][1], "2");
}

TEST(GroupModels, ParseRejectsGarbage) {
  EXPECT_THROW(GroupModel::parse("heis:0"), std::invalid_argument);
  EXPECT_THROW(GroupModel::parse("torus:2"), std::invalid_argument);
}

namespace {

ScalarField poly_field(const GroupModel& m, Expr e, double half = 10) {
  Box b;
  for (int i = 0; i < m.ambient_dim(); ++i) b.axes.push_back({-half, half});
  return ScalarField(m, std::move(e), std::nullopt, b, 0);
}

}  // namespace

TEST(RadialDerivative, Examples) {
  auto e3 = GroupModel::euclidean(3);
  auto r2 = poly_field(e3, ex::pow(ex::norm(), 2));
  std::vector<double> x{0.3, -1.2, 0.7};
  EXPECT_NEAR(radial_derivative(e3, r2, x).real(), 2 * quasi_norm(e3, x), 1e-13);

  auto gauss = poly_field(e3, ex::exp(ex::neg(ex::pow(ex::norm(), 2))));
  std::vector<double> e1{1, 0, 0};
  EXPECT_NEAR(radial_derivative(e3, gauss, e1).real(), -2 * std::exp(-1.0), 1e-14);

  auto a = GroupModel::parse("aniso:1,2");
  auto r = poly_field(a, ex::norm());
  for (auto p : {std::vector<double>{1, 1}, std::vector<double>{-0.4, 2.5}, std::vector<double>{2, -0.1}})
    EXPECT_NEAR(radial_derivative(a, r, p).real(), 1.0, 1e-13);
}

TEST(RadialDerivative, AnnihilatesZeroHomogeneous) {
  auto e3 = GroupModel::euclidean(3);
  auto f = poly_field(e3, ex::mul({ex::pow(ex::coord(0), 2), ex::pow(ex::norm(), -2)}));
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int k = 0; k < 50; ++k) {
    std::vector<double> x{u(rng), u(rng), u(rng)};
    if (quasi_norm(e3, x) < 0.1) continue;
    EXPECT_NEAR(radial_derivative(e3, f, x).real(), 0.0, 1e-12);
  }
}

TEST(RadialDerivative, PowerRule) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-2, 2);
  for (const char* name : {"euclid:3", "aniso:1,2"}) {
    auto m = GroupModel::parse(name);
    for (int g : {-2, -1, 1, 2, 3}) {
      auto f = poly_field(m, ex::pow(ex::norm(), g));
      for (int k = 0; k < 20; ++k) {
        std::vector<double> x(m.ambient_dim());
        for (auto& v : x) v = u(rng);
        double r = quasi_norm(m, x);
        if (r < 0.1) continue;
        double want = g * std::pow(r, g - 1);
        EXPECT_LE(std::abs(radial_derivative(m, f, x).real() - want), 1e-12 * std::abs(want)) << name << " " << g;
      }
    }
  }
}

TEST(RadialDerivative, RejectsOrigin) {
  auto e3 = GroupModel::euclidean(3);
  auto f = poly_field(e3, ex::coord(0));
  std::vector<double> zero{0, 0, 0};
  EXPECT_THROW(radial_derivative(e3, f, zero), std::domain_error);
  std::vector<double> h{0, 0, 0};
  EXPECT_THROW(radial_derivative(GroupModel::heisenberg(1), poly_field(GroupModel::heisenberg(1), ex::coord(0)), h),
               std::exception);
}

namespace {

RadialProfile smooth_bump(double a, double b) {
  return {[a, b](double r) {
            double u = (2 * r - a - b) / (b - a);
            return std::abs(u) < 1 ? std::exp(-1 / (1 - u * u)) : 0.0;
          },
          a, b};
}

}  // namespace

TEST(PolarConsistency, EuclideanSphereAreas) {
  auto p = smooth_bump(0.5, 1.5);
  auto r3 = polar_consistency_ratio(GroupModel::euclidean(3), p, 64);
  EXPECT_NEAR(r3.ratio, 4 * std::numbers::pi, std::max(10 * r3.err, 1e-6));
  auto r2 = polar_consistency_ratio(GroupModel::euclidean(2), p, 96);
  EXPECT_NEAR(r2.ratio, 2 * std::numbers::pi, std::max(10 * r2.err, 1e-6));
}

TEST(PolarConsistency, AnisotropicProfileIndependence) {
  auto m = GroupModel::parse("aniso:1,2");
  auto a = polar_consistency_ratio(m, smooth_bump(0.2, 0.8), 96);
  auto b = polar_consistency_ratio(m, smooth_bump(1.0, 2.0), 96);
  EXPECT_LE(std::abs(a.ratio - b.ratio), a.err + b.err);
  // Q |{x1^4 + x2^2 <= 1}| = 3 * 4 int_0^1 sqrt(1 - x^4) dx = 3 B(1/4, 3/2)
  double sigma = 3 * std::tgamma(0.25) * std::tgamma(1.5) / std::tgamma(1.75);
  EXPECT_NEAR(a.ratio, sigma, 10 * a.err);
  EXPECT_NEAR(b.ratio, sigma, 10 * b.err);
}

TEST(PolarConsistency, Rejections) {
  EXPECT_THROW(polar_consistency_ratio(GroupModel::heisenberg(1), smooth_bump(1, 2)), std::invalid_argument);
  EXPECT_THROW(polar_consistency_ratio(GroupModel::euclidean(3), smooth_bump(0, 2)), std::invalid_argument);
}
