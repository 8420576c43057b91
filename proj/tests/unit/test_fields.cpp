#include "carnot_hardy/fields.hpp"
#include "carnot_hardy/quadrature.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace carnot_hardy;

namespace {

Box cube(int dim, double half) {
  Box b;
  for (int i = 0; i < dim; ++i) b.axes.push_back({-half, half});
  return b;
}

ScalarField plain(const GroupModel& m, Expr e, double half = 10) {
  return ScalarField(m, std::move(e), std::nullopt, cube(m.ambient_dim(), half), 0);
}

double coeff(const Jet<double>& j, std::vector<int> alpha) { return j.coeff(alpha); }

}  // namespace

TEST(Jets, TaylorCoefficients) {
  auto e1 = GroupModel::euclidean(1);
  std::vector<double> x3{3};
  auto j = eval_jet<double>(plain(e1, ex::pow(ex::coord(0), 2)), x3, 2);
  EXPECT_EQ(j.re.value(), 9);
  EXPECT_EQ(coeff(j.re, {1}), 6);
  EXPECT_EQ(coeff(j.re, {2}), 1);

  std::vector<double> x0{0};
  auto e = eval_jet<double>(plain(e1, ex::exp(ex::coord(0))), x0, 3);
  EXPECT_DOUBLE_EQ(coeff(e.re, {0}), 1);
  EXPECT_DOUBLE_EQ(coeff(e.re, {1}), 1);
  EXPECT_DOUBLE_EQ(coeff(e.re, {2}), 0.5);
  EXPECT_DOUBLE_EQ(coeff(e.re, {3}), 1.0 / 6);

  auto e2 = GroupModel::euclidean(2);
  std::vector<Rational> p{Rational(2), Rational(5)};
  auto q = eval_jet<Rational>(plain(e2, ex::mul({ex::coord(0), ex::coord(1)})), p, 2);
  std::vector<int> a00{0, 0}, a10{1, 0}, a01{0, 1}, a11{1, 1}, a20{2, 0}, a02{0, 2};
  EXPECT_EQ(q.re.coeff(a00), 10);
  EXPECT_EQ(q.re.coeff(a10), 5);
  EXPECT_EQ(q.re.coeff(a01), 2);
  EXPECT_EQ(q.re.coeff(a11), 1);
  EXPECT_EQ(q.re.coeff(a20), 0);
  EXPECT_EQ(q.re.coeff(a02), 0);
}

TEST(Jets, MatchCentralDifferences) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> c(-1, 1);
  auto m = GroupModel::euclidean(3);
  const double h = 1e-4;
  int checked = 0;
  for (int k = 0; k < 50; ++k) {
    // bump(|x|) * (c0 + c1 x0 + c2 x1 x2 + c3 x0^2) * exp(c4 x2)
    Expr poly = ex::add({ex::constant(Number::real(c(rng))), ex::mul({ex::constant(Number::real(c(rng))), ex::coord(0)}),
                         ex::mul({ex::constant(Number::real(c(rng))), ex::coord(1), ex::coord(2)}),
                         ex::mul({ex::constant(Number::real(c(rng))), ex::pow(ex::coord(0), 2)})});
    Expr e = ex::mul({ex::bump(ex::norm(), Number::real(1.0), Number::real(0.6)), poly,
                      ex::exp(ex::mul({ex::constant(Number::real(c(rng))), ex::coord(2)}))});
    auto f = plain(m, e, 2);
    std::vector<double> x(3);
    do {
      for (auto& v : x) v = 1.4 * c(rng);
    } while (std::abs(std::log(quasi_norm(m, x))) > 0.45);
    auto j = eval_jet<double>(f, x, 2);
    auto val = [&](std::vector<double> y) { return eval_jet<double>(f, y, 0).re.value(); };
    double scale = 0;
    for (int i = 0; i < j.re.size(); ++i) scale = std::max(scale, std::abs(j.re[i]));
    for (int i = 0; i < 3; ++i) {
      auto xp = x, xm = x;
      xp[i] += h;
      xm[i] -= h;
      double d1 = (val(xp) - val(xm)) / (2 * h);
      std::vector<int> ai(3, 0);
      ai[i] = 1;
      EXPECT_NEAR(j.re.coeff(ai), d1, 1e-6 * scale);
      for (int l = i; l < 3; ++l) {
        double d2;
        if (l == i) {
          d2 = (val(xp) - 2 * val(x) + val(xm)) / (h * h) / 2;
        } else {
          auto pp = x, pm = x, mp = x, mm = x;
          pp[i] += h, pp[l] += h;
          pm[i] += h, pm[l] -= h;
          mp[i] -= h, mp[l] += h;
          mm[i] -= h, mm[l] -= h;
          d2 = (val(pp) - val(pm) - val(mp) + val(mm)) / (4 * h * h);
        }
        std::vector<int> al(3, 0);
        al[i] += 1;
        al[l] += 1;
        EXPECT_NEAR(j.re.coeff(al), d2, 1e-6 * scale) << "trial " << k;
      }
    }
    ++checked;
  }
  EXPECT_EQ(checked, 50);
}

TEST(Jets, ZeroOutsideSupport) {
  auto m = GroupModel::euclidean(3);
  auto f = log_radial_bump(m, 1.0, 0.5);
  std::vector<double> far{5, 5, 5};
  EXPECT_TRUE(eval_jet<double>(f, far, 4).re.is_zero());
  std::vector<double> inner{0.1, 0, 0};  // |x| < e^-0.5
  EXPECT_TRUE(eval_jet<double>(f, inner, 4).re.is_zero());
}

TEST(Jets, FlushedAtSupportBoundary) {
  auto m = GroupModel::euclidean(3);
  auto f = log_radial_bump(m, 1.0, 0.5);
  for (double u : {1 - 1e-3, -(1 - 1e-3)}) {
    double r = std::exp(0.5 * u);
    std::vector<double> x{r, 0, 0};
    auto j = eval_jet<double>(f, x, 4);
    for (int i = 0; i < j.re.size(); ++i) EXPECT_LT(std::abs(j.re[i]), 1e-30);
  }
}

TEST(Jets, ConjugationCommutesWithDifferentiation) {
  auto m = GroupModel::euclidean(2);
  auto fs = default_fields(m);
  const auto& f = fs[2].field;
  ASSERT_TRUE(f.is_complex());
  std::vector<double> x{0.9, -0.5};
  auto a = eval_jet<double>(f, x, 3);
  auto b = eval_jet<double>(f.conj(), x, 3);
  for (int i = 0; i < a.re.size(); ++i) {
    EXPECT_EQ(a.re[i], b.re[i]);
    EXPECT_EQ(a.im[i], -b.im[i]);
  }
}

TEST(Bumps, LogRadialValues) {
  auto m = GroupModel::euclidean(3);
  auto f = log_radial_bump(m, 1.0, 0.5);
  std::vector<double> at_r0{1, 0, 0};
  EXPECT_NEAR(eval_jet<double>(f, at_r0, 0).re.value(), std::exp(-1.0), 1e-16);
  std::vector<double> x{0, std::exp(0.25), 0};
  EXPECT_NEAR(eval_jet<double>(f, x, 0).re.value(), std::exp(-1 / 0.75), 1e-16);
  std::vector<double> edge{std::exp(0.5), 0, 0};
  EXPECT_TRUE(eval_jet<double>(f, edge, 4).re.is_zero());
  EXPECT_THROW(log_radial_bump(m, 1.0, 0.0), std::invalid_argument);
  EXPECT_THROW(log_radial_bump(GroupModel::heisenberg(1), 1.0, 0.5), std::invalid_argument);
}

TEST(Bumps, IntegralOfSquareMatchesOneDimensionalOracle) {
  // 4 pi int bump(r)^2 r^2 dr by adaptive 1-D quadrature, frozen
  const double oracle_s1 = 2.7247793576397097;
  const double oracle_s05 = 0.9497268768759147;
  auto m = GroupModel::euclidean(3);
  for (auto [s, want] : {std::pair{1.0, oracle_s1}, std::pair{0.5, oracle_s05}}) {
    auto f = log_radial_bump(m, 1.0, s);
    QuadratureSpec spec;
    spec.box = f.support_box();
    spec.nodes_per_axis = 48;
    auto q = weighted_l2_sq(f, 0, false, spec);
    EXPECT_NEAR(q.value.real(), want, 10 * q.err_estimate) << s;
    EXPECT_LT(std::abs(q.value.real() - want) / want, 1e-2) << s;
  }
}

TEST(Bumps, QuasiRadial) {
  auto a = GroupModel::parse("aniso:1,2");
  auto f = quasi_radial_bump(a, 1.0, 0.5);
  std::vector<double> x{0, 1};  // |x| = 1
  EXPECT_NEAR(eval_jet<double>(f, x, 0).re.value(), std::exp(-1.0), 1e-16);
  EXPECT_THROW(quasi_radial_bump(GroupModel::heisenberg(1), 1.0, 0.5), std::invalid_argument);
}

TEST(ExtremizerFamily, ExponentCancels) {
  auto m = GroupModel::euclidean(3);
  auto cut = log_radial_bump(m, 1.0, 0.5);
  auto f = hardy_extremizer_family(m, 0.5, cut);
  for (auto x : {std::vector<double>{1.1, 0.2, 0}, std::vector<double>{0.3, -0.7, 0.4}}) {
    auto a = eval_jet<double>(f, x, 2);
    auto b = eval_jet<double>(cut, x, 2);
    for (int i = 0; i < a.re.size(); ++i) EXPECT_NEAR(a.re[i], b.re[i], 1e-15);
  }
  EXPECT_THROW(hardy_extremizer_family(m, 0.0, cut), std::invalid_argument);
  EXPECT_THROW(hardy_extremizer_family(GroupModel::euclidean(2), 0.1, log_radial_bump(GroupModel::euclidean(2), 1, 0.5)),
               std::invalid_argument);
}

TEST(ExtremizerFamily, HeisenbergExponent) {
  auto h = GroupModel::heisenberg(2);
  auto cut = tensor_with_t_bump(log_radial_bump(GroupModel::euclidean(4), 1.0, 0.5), t_bump(0, 1));
  double eps = 0.2;
  auto f = hardy_extremizer_family(h, eps, cut);
  std::vector<double> x{1.2, 0.1, -0.3, 0.2, 0.4};
  double r = stratum_norm(h, x);
  double got = eval_jet<double>(f, x, 0).re.value();
  double want = std::pow(r, -1 + eps) * eval_jet<double>(cut, x, 0).re.value();
  EXPECT_NEAR(got, want, 1e-15);
}

TEST(TensorWithTBump, ProductAndContract) {
  auto base = log_radial_bump(GroupModel::euclidean(2), 1.0, 0.5);
  auto tb = t_bump(0.5, 1.0);
  auto f = tensor_with_t_bump(base, tb);
  EXPECT_EQ(f.model(), GroupModel::heisenberg(1));
  std::vector<double> x{0.8, 0.6, 0.9};
  std::vector<double> xy{0.8, 0.6}, t{0.9};
  EXPECT_NEAR(eval_jet<double>(f, x, 0).re.value(),
              eval_jet<double>(base, xy, 0).re.value() * eval_jet<double>(tb, t, 0).re.value(), 1e-16);
  EXPECT_EQ(f.symmetry(), Symmetry::stratum_radial);

  Box unbounded;
  unbounded.axes.push_back({-INFINITY, INFINITY});
  ScalarField one(GroupModel::euclidean(1), ex::constant(1), std::nullopt, unbounded, 0);
  EXPECT_THROW(tensor_with_t_bump(base, one), std::invalid_argument);
  EXPECT_THROW(t_bump(0, 0), std::invalid_argument);
}

TEST(DefaultFields, ThreeKinds) {
  for (const char* name : {"euclid:3", "euclid:2", "aniso:1,2", "heis:1", "heis:2"}) {
    auto fs = default_fields(GroupModel::parse(name));
    ASSERT_EQ(fs.size(), 3u);
    EXPECT_EQ(fs[0].name, "radial");
    EXPECT_EQ(fs[1].name, "nonradial");
    EXPECT_EQ(fs[2].name, "complex");
    EXPECT_FALSE(fs[0].field.is_complex());
    EXPECT_FALSE(fs[1].field.is_complex());
    EXPECT_TRUE(fs[2].field.is_complex());
    for (const auto& f : fs) EXPECT_TRUE(f.field.support_box().bounded()) << name;
  }
}

TEST(Expressions, PrefixRoundTrip) {
  Expr e = ex::mul({ex::bump(ex::stratum_norm(), Number::real(1.0), Number(Rational(1, 2))),
                    ex::add({ex::constant(1), ex::pow(ex::coord(2), 3)})});
  auto back = parse_prefix(to_prefix(e));
  EXPECT_EQ(to_prefix(back), to_prefix(e));
}
