#include "carnot_hardy/opalgebra.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace carnot_hardy;

namespace {

ScalarField poly(const GroupModel& m, Expr e) {
  Box b;
  for (int i = 0; i < m.ambient_dim(); ++i) b.axes.push_back({-100, 100});
  return ScalarField(m, std::move(e), std::nullopt, b, 0);
}

std::vector<Rational> pt(std::initializer_list<Rational> v) { return v; }

const GroupModel h1 = GroupModel::heisenberg(1);

}  // namespace

TEST(Primitives, HandValuesOnH1) {
  auto p = heisenberg_primitives(1);
  Expr x = ex::coord(0), y = ex::coord(1), t = ex::coord(2);
  EXPECT_EQ(apply_exact(p.X[0], poly(h1, t), pt({2, 6, 0})), Rational(-3));
  auto r2 = poly(h1, ex::add({ex::pow(x, 2), ex::pow(y, 2)}));
  EXPECT_EQ(apply_exact(p.L, r2, pt({Rational(1, 3), 7, -2})), Rational(4));
  EXPECT_EQ(apply_exact(p.L, poly(h1, t), pt({5, -1, 2})), Rational(0));
  // L t^2 = (x^2 + y^2) / 2
  EXPECT_EQ(apply_exact(p.L, poly(h1, ex::pow(t, 2)), pt({3, 4, 1})), Rational(25, 2));
  // Z T (x t) = Z x = -y
  EXPECT_EQ(apply_exact(op::compose({p.Z, p.T}), poly(h1, ex::mul({x, t})), pt({2, 5, 9})), Rational(-5));
}

TEST(Primitives, SublaplacianSquaredAgainstHandExpansion) {
  // L^2 (x^2 y^2 t) = 8 t, expanded by hand
  auto p = heisenberg_primitives(1);
  auto f = poly(h1, ex::mul({ex::pow(ex::coord(0), 2), ex::pow(ex::coord(1), 2), ex::coord(2)}));
  auto L2 = op::compose({p.L, p.L});
  EXPECT_EQ(apply_exact(L2, f, pt({1, 1, 1})), Rational(8));
  EXPECT_EQ(apply_exact(L2, f, pt({Rational(2, 3), -5, Rational(3, 7)})), Rational(24, 7));
}

TEST(Primitives, TangentialSumSpotValue) {
  auto f = poly(h1, ex::coord(2));
  EXPECT_EQ(apply_exact(tangential_sum(h1), f, pt({1, 2, 3})), Rational(5, 2));
}

TEST(ApplyExact, BasicNodes) {
  auto e1 = GroupModel::euclidean(3);
  auto cube = poly(e1, ex::pow(ex::coord(0), 3));
  EXPECT_EQ(apply_exact(op::compose({op::partial(0), op::partial(0)}), cube, pt({2, 9, 9})), Rational(12));
  auto one = poly(h1, ex::constant(1));
  EXPECT_EQ(apply_exact(op::mul_stratum_norm_pow(-2), one, pt({1, 2, 0})), Rational(1, 5));
  EXPECT_THROW(apply_exact(op::mul_stratum_norm_pow(-1), one, pt({1, 2, 0})), std::exception);
}

TEST(ApplyExact, LinearityAndLeibniz) {
  std::mt19937_64 rng(17);
  auto p = heisenberg_primitives(1);
  std::vector<Op> prims{p.X[0], p.Y[0], p.T, p.Z, p.L, op::partial(0), op::mul_coord(2), op::mul_stratum_norm_pow(-2)};
  std::uniform_int_distribution<int> pick(0, static_cast<int>(prims.size()) - 1), c(-9, 9);
  for (int k = 0; k < 30; ++k) {
    auto poly_in = random_polynomial(3, 5, rng);
    std::vector<Rational> x{Rational(c(rng), 7), Rational(c(rng) + 10, 3), Rational(c(rng), 5)};
    auto j = poly_in.jet_at(x, 4);
    Op a = prims[pick(rng)], b = prims[pick(rng)];
    EXPECT_EQ(apply_exact(op::sum({a, b}), j, h1, x), apply_exact(a, j, h1, x) + apply_exact(b, j, h1, x));
    for (int i = 0; i < 3; ++i) {
      Rational lhs = apply_exact(op::compose({op::partial(i), op::mul_coord(i)}), j, h1, x);
      Rational rhs = j.value() + x[i] * apply_exact(op::partial(i), j, h1, x);
      EXPECT_EQ(lhs, rhs);
    }
  }
}

TEST(FactorizationPair, ZeroParametersGiveMinusSublaplacian) {
  for (const char* name : {"heis:1", "heis:2", "euclid:3"}) {
    auto m = GroupModel::parse(name);
    auto [t, tp] = factorization_pair(m, 0, 0);
    auto minus_l = op::neg(sublaplacian(m));
    EXPECT_TRUE(check_operator_identity("T00", t, minus_l, m, 5, 1).pass) << name;
    EXPECT_TRUE(check_operator_identity("T+00", tp, minus_l, m, 5, 1).pass) << name;
  }
}

TEST(Commutator, Basics) {
  auto p = heisenberg_primitives(1);
  EXPECT_TRUE(check_operator_identity("XY", op::commutator(p.X[0], p.Y[0]), p.T, h1, 10, 4).pass);
  EXPECT_FALSE(check_operator_identity("YX", op::commutator(p.Y[0], p.X[0]), p.T, h1, 10, 4).pass);
  auto r = check_operator_identity("XT", op::commutator(p.X[0], p.T), op::scale(0), h1, 10, 4);
  EXPECT_TRUE(r.pass);
}

TEST(CommutationRelations, HeisenbergBasis) {
  for (int n : {1, 2}) {
    auto rs = check_commutation_relations(GroupModel::heisenberg(n), 20, 0);
    int basis = 2 * n + 1;
    EXPECT_EQ(rs.size(), static_cast<std::size_t>(basis * (basis - 1) / 2));
    for (const auto& r : rs) EXPECT_TRUE(r.pass) << r.id;
  }
}

TEST(Identities, CatalogPassesOnH1) {
  auto m = GroupModel::heisenberg(1);
  for (const auto& c : identity_catalog()) {
    for (const auto& p : c.default_params) {
      if (c.reject && c.reject(m, p)) continue;
      auto r = check_identity(c, m, p, 8, 0);
      EXPECT_TRUE(r.pass) << c.id << " " << r.to_json().dump();
    }
  }
}

TEST(Identities, CatalogCoversProofExpansions) {
  std::vector<std::string> want{"formula1",   "formula2",       "formula3", "formula4",     "strat_tt_sum",
                                "heis_tt",    "heis_ttstar",    "lap_decomp", "lap3",       "tangential_sum",
                                "zt_commute", "hardy_ttilde"};
  for (const auto& id : want) EXPECT_NO_THROW(identity_case(id)) << id;
  EXPECT_THROW(identity_case("no_such_identity"), std::out_of_range);
}

TEST(Identities, NegativeControlFails) {
  auto c = heis_tt_without_commutator();
  IdentityParams p;
  p.alpha = 1;
  auto r = check_identity(c, GroupModel::heisenberg(1), p, 20, 0);
  EXPECT_FALSE(r.pass);
  ASSERT_TRUE(r.witness.has_value());
  EXPECT_NE(r.witness->lhs_value, r.witness->rhs_value);
  // with alpha = 0 the deleted term vanishes
  p.alpha = 0;
  EXPECT_TRUE(check_identity(c, GroupModel::heisenberg(1), p, 5, 0).pass);
}

TEST(Identities, SeedDeterminism) {
  const auto& c = identity_case("heis_tt");
  IdentityParams p;
  p.alpha = 1;
  auto a = check_identity(c, h1, p, 3, 7).to_json().dump();
  auto b = check_identity(c, h1, p, 3, 7).to_json().dump();
  EXPECT_EQ(a, b);
}

TEST(Identities, FormulaTwoVanishesAtCriticalGamma) {
  // div_H(x' / |x'|^2) = 0 when N = gamma = 2
  IdentityParams p;
  p.gamma = 2;
  EXPECT_TRUE(check_identity(identity_case("formula2"), h1, p, 10, 3).pass);
}

TEST(Identities, UnknownSymbolsRejected) {
  EXPECT_THROW(heisenberg_primitives(0), std::invalid_argument);
  EXPECT_THROW(radial_derivative_op(h1), std::invalid_argument);
}
