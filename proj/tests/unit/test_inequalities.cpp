#include "carnot_hardy/inequalities.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

using namespace carnot_hardy;

namespace {

InequalityParams ab(double a, double b) {
  InequalityParams p;
  p.alpha = a;
  p.beta = b;
  return p;
}

const WeightedTerm& term(const std::vector<WeightedTerm>& side, const std::string& name) {
  for (const auto& t : side)
    if (t.term.name == name) return t;
  throw std::out_of_range(name);
}

QuadratureSpec nodes(const ScalarField& f, int p) { return default_quadrature(f, p); }

}  // namespace

TEST(Catalog, AllEntriesPresent) {
  std::set<std::string> want{"hardy_euclid",      "gl_rellich",         "gl_counterpart", "hom_fac1",
                             "hom_fac2",          "hom_power",          "hom_weighted_hardy", "hom_log",
                             "hom_log_critical_pre", "hom_critical",    "strat_rellich",  "strat_rellich_cs",
                             "euclid_rellich_ab", "hardy_strat",        "refined_hardy_strat", "heis_1",
                             "heis_11",           "heis_2",             "heis_22",        "heis_1_rewrite",
                             "heis_11_rewrite"};
  std::set<std::string> got;
  for (const auto& e : inequality_catalog()) {
    got.insert(e.id);
    EXPECT_FALSE(e.default_models.empty()) << e.id;
    EXPECT_FALSE(e.description.empty()) << e.id;
  }
  EXPECT_EQ(got, want);
  EXPECT_THROW(inequality_entry("nope"), std::invalid_argument);
}

TEST(Catalog, CoefficientSpotValues) {
  auto s = build_instance("strat_rellich", GroupModel::heisenberg(1), ab(0, 0));
  EXPECT_EQ(term(s.rhs, "||f/|x'|^2||^2").coeff, 0.0);
  auto h = build_instance("heis_1", GroupModel::heisenberg(2), ab(1, 0));
  EXPECT_EQ(term(h.rhs, "||grad_H f/|x'|||^2").coeff, 0.0);
  EXPECT_EQ(term(h.rhs, "||x'.grad_H f/|x'|^2||^2").coeff, 3.0);
  auto e = build_instance("hardy_euclid", GroupModel::euclidean(3), {});
  EXPECT_EQ(term(e.rhs, "||f/|x'|||^2").coeff, 0.25);
}

TEST(Catalog, InadmissibleParameters) {
  try {
    build_instance("heis_2", GroupModel::heisenberg(1), ab(2, 0));
    FAIL() << "expected Inadmissible";
  } catch (const Inadmissible& e) {
    EXPECT_EQ(std::string(e.what()), "inadmissible: α(α−4) < 0");
  }
  EXPECT_THROW(build_instance("heis_22", GroupModel::heisenberg(1), ab(-2, 0)), Inadmissible);
  EXPECT_NO_THROW(build_instance("heis_2", GroupModel::heisenberg(1), ab(5, 0)));
  EXPECT_THROW(build_instance("heis_1", GroupModel::euclidean(3), ab(1, 0)), std::invalid_argument);
}

TEST(BestAlpha, Vertices) {
  EXPECT_EQ(best_alpha_hardy(4), std::make_pair(1.0, 1.0));
  EXPECT_EQ(best_alpha_hardy(3), std::make_pair(0.5, 0.25));
  EXPECT_EQ(best_alpha_critical(), std::make_pair(0.5, 0.25));
}

TEST(DefaultNodes, PerModel) {
  EXPECT_EQ(default_nodes(GroupModel::euclidean(3)), 48);
  EXPECT_EQ(default_nodes(GroupModel::heisenberg(1)), 48);
  EXPECT_EQ(default_nodes(GroupModel::heisenberg(2)), 16);
}

TEST(Evaluate, HardyEuclidAgainstOneDimensionalOracles) {
  // ||grad f||^2 and ||f/|x|||^2 for logbump(1, 0.5) on R^3 by adaptive 1-D quadrature
  const double grad_sq = 10.891724879534722, inv_sq = 0.8482827995243521;
  auto m = GroupModel::euclidean(3);
  auto f = log_radial_bump(m, 1.0, 0.5);
  auto r = evaluate(build_instance("hardy_euclid", m, {}), f, nodes(f, 48));
  EXPECT_TRUE(r.pass);
  EXPECT_GE(r.deficit, 0);
  EXPECT_NEAR(r.lhs, grad_sq, 10 * r.total_err);
  EXPECT_NEAR(r.rhs, 0.25 * inv_sq, 10 * r.total_err);
  EXPECT_LT(std::abs(r.lhs - grad_sq) / grad_sq, 0.02);
  EXPECT_DOUBLE_EQ(r.tolerance(), std::max(10 * r.total_err, 1e-8 * r.scale));
}

TEST(Evaluate, ZTermVanishesOnRadialHeisenbergField) {
  auto m = GroupModel::heisenberg(1);
  auto f = default_fields(m)[0].field;
  auto r = evaluate(build_instance("heis_1", m, ab(1, 0)), f, nodes(f, 16));
  bool seen = false;
  for (const auto& t : r.terms)
    if (t.name.rfind("Re(Zf", 0) == 0) {
      seen = true;
      EXPECT_LE(std::abs(t.value), 10 * t.err + 1e-14);
    }
  EXPECT_TRUE(seen);
  EXPECT_TRUE(r.pass);
}

TEST(Evaluate, RewriteAgrees) {
  auto m = GroupModel::heisenberg(1);
  for (const auto& nf : default_fields(m)) {
    auto spec = nodes(nf.field, 16);
    auto rs = evaluate_many({build_instance("heis_1", m, ab(1, 0.5)), build_instance("heis_1_rewrite", m, ab(1, 0.5))},
                            nf.field, spec);
    EXPECT_LE(std::abs(rs[0].deficit - rs[1].deficit), 10 * (rs[0].total_err + rs[1].total_err)) << nf.name;
  }
}

TEST(Evaluate, ComplexFieldDeficitIsReal) {
  auto m = GroupModel::euclidean(3);
  auto f = default_fields(m)[2].field;
  auto r = evaluate(build_instance("euclid_rellich_ab", m, ab(1, 0.5)), f, nodes(f, 24));
  EXPECT_TRUE(std::isfinite(r.deficit));
  EXPECT_TRUE(r.pass);
}

TEST(Evaluate, ErrorCapRaises) {
  auto m = GroupModel::euclidean(3);
  auto f = log_radial_bump(m, 1.0, 0.5);
  EXPECT_THROW(evaluate(build_instance("hardy_euclid", m, {}), f, nodes(f, 8), 1e-12), QuadratureCapExceeded);
}

TEST(Sweep, StratifiedRellichOnH1) {
  auto m = GroupModel::heisenberg(1);
  auto f = default_fields(m)[1].field;
  auto grid = ab_grid({-2, -1, 0, 1, 2}, {-2, -1, 0, 1, 2});
  auto s = sweep("strat_rellich", m, grid, f, nodes(f, 16));
  ASSERT_EQ(s.cells.size(), 25u);
  for (const auto& c : s.cells) {
    ASSERT_TRUE(c.report.has_value());
    EXPECT_GE(c.report->deficit, -c.report->tolerance());
  }
  EXPECT_TRUE(s.pass);
}

TEST(Sweep, InadmissibleCellsCarryReason) {
  auto m = GroupModel::heisenberg(1);
  auto f = default_fields(m)[0].field;
  auto s = sweep("heis_2", m, ab_grid({1, 5}, {0}), f, nodes(f, 12));
  ASSERT_EQ(s.cells.size(), 2u);
  ASSERT_TRUE(s.cells[0].inadmissible.has_value());
  EXPECT_NE(s.cells[0].inadmissible->find("α(α−4) < 0"), std::string::npos);
  EXPECT_FALSE(s.cells[0].report.has_value());
  EXPECT_TRUE(s.cells[1].report.has_value());
  auto j = s.to_json();
  EXPECT_EQ(j["cells"].size(), 2u);
}

TEST(IntegralChecks, DominanceOnEuclid) {
  auto m = GroupModel::euclidean(3);
  for (const auto& nf : default_fields(m)) {
    auto spec = nodes(nf.field, 24);
    auto rs = run_integral_checks({{&integral_check("cauchy_schwarz"), {}}, {&integral_check("refinement_dominance"), {}}},
                                  m, nf.field, nf.field, spec);
    for (const auto& r : rs) EXPECT_TRUE(r.pass) << r.id << " " << nf.name << " " << r.to_json().dump();
  }
}

TEST(IntegralChecks, RealTermOnComplexField) {
  auto m = GroupModel::heisenberg(1);
  auto f = default_fields(m)[2].field;
  auto r = run_integral_check(integral_check("real_term"), m, {}, f, f, nodes(f, 16));
  EXPECT_TRUE(r.pass) << r.to_json().dump();
  EXPECT_LE(std::abs(r.lhs.imag()), std::max(10 * r.err, identity_rounding_floor * r.scale));
}

TEST(IntegralChecks, MixingOneAndTwoFieldChecksThrows) {
  auto m = GroupModel::euclidean(3);
  auto f = default_fields(m)[0].field;
  InequalityParams p = ab(1, 0);
  EXPECT_THROW(run_integral_checks({{&integral_check("ibp_grad_r2"), {}}, {&integral_check("adjoint_t_ab"), p}}, m, f, f,
                                   nodes(f, 8)),
               std::invalid_argument);
}

TEST(Reductions, HardyFromFactorization) {
  auto m = GroupModel::euclidean(3);
  auto f = default_fields(m)[1].field;
  auto r = check_reduction("hom_fac1->hardy_euclid", m, f, nodes(f, 24));
  EXPECT_TRUE(r.pass) << r.to_json().dump();
  EXPECT_NEAR(r.rhs_from, r.rhs_to, 10 * r.err + 1e-12);
}

TEST(Reductions, CatalogIds) {
  auto ids = reduction_ids();
  EXPECT_NE(std::find(ids.begin(), ids.end(), "hom_power->hom_weighted_hardy"), ids.end());
  EXPECT_NE(std::find(ids.begin(), ids.end(), "hom_log_critical_pre->hom_critical"), ids.end());
  EXPECT_THROW(check_reduction("a->b", GroupModel::euclidean(3), default_fields(GroupModel::euclidean(3))[0].field,
                               QuadratureSpec{}),
               std::exception);
}

TEST(LogPowerProfile, Derivatives) {
  LogPowerProfile p{0.5, 2};
  const double r = 1.7, h = 1e-5;
  EXPECT_NEAR(p.d1(r), (p.value(r + h) - p.value(r - h)) / (2 * h), 1e-8);
  EXPECT_NEAR(p.d2(r), (p.d1(r + h) - p.d1(r - h)) / (2 * h), 1e-8);
  EXPECT_NEAR(p.value(r), std::pow(r, -0.5) * std::pow(std::log(r), 2), 1e-15);
}
