#include "carnot_hardy/sharpness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

namespace carnot_hardy {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

constexpr double degenerate_denominator = 1e-30;

RayleighValue quotient_of(const QuadResult& num, const QuadResult& den) {
  double d = den.value.real();
  if (!(std::abs(d) >= degenerate_denominator))
    throw DegenerateFamilyMember("denominator " + fmt(d) + " below " + fmt(degenerate_denominator));
  RayleighValue v;
  v.numerator = num.value.real();
  v.denominator = d;
  v.quotient = v.numerator / d;
  v.err = std::abs(v.quotient) * (num.err_estimate / std::max(std::abs(v.numerator), degenerate_denominator) +
                                  den.err_estimate / std::abs(d));
  v.nodes_used = num.nodes_used;
  return v;
}

Box cube(int dim, double half) { return Box{std::vector<std::pair<double, double>>(dim, {-half, half})}; }

// r^e * logbump(1, s) in |x'|, optionally times a t bump of half-width w
ScalarField power_bump(const GroupModel& m, double e, double s, std::optional<double> t_width, std::string label) {
  Expr r = ex::stratum_norm();
  Expr re = ex::bump(r, Number(1), Number::real(s));
  if (e != 0) re = ex::mul({ex::pow(r, Number::real(e)), re});
  double lo = std::exp(-s), hi = std::exp(s);
  Box box = cube(m.first_stratum_dim(), hi);
  if (m.is_heisenberg()) {
    double w = t_width.value_or(1.0);
    re = ex::mul({re, ex::tbump(ex::coord(m.t_index()), Number(0), Number::real(w))});
    box.axes.push_back({-w, w});
  }
  return ScalarField(m, re, std::nullopt, box, lo, Annulus{true, lo, hi}, Symmetry::stratum_radial, std::move(label));
}

double heis_t_width(double s) { return std::exp(2 * s + 4); }

FunctionalTerm grad_sq(const GroupModel& m) {
  return FunctionalTerm::l2("||grad_H f||^2", horizontal_gradient(m), RadialWeight::one());
}
FunctionalTerm f_over_r_sq() {
  return FunctionalTerm::l2("||f/|x'|||^2", {nullptr}, RadialWeight::stratum_power(-2));
}
FunctionalTerm euler_over_r_sq(const GroupModel& m) {
  return FunctionalTerm::l2("||x'.grad_H f/|x'|||^2", {euler_horizontal(m)}, RadialWeight::stratum_power(-2));
}

RadialDomain log_domain(const GroupModel& m, double s) {
  RadialDomain d{std::exp(-s), std::exp(s), std::nullopt};
  if (m.is_heisenberg()) d.t_range = std::pair{-heis_t_width(s), heis_t_width(s)};
  return d;
}

constexpr double critical_log_top = 150;  // largest log|x| reached by the critical family

RayleighProblem hardy_problem(const std::string& id, const GroupModel& m, bool refined, double s_hi) {
  int N = m.first_stratum_dim();
  double c = (N - 2) / 2.0;
  RayleighProblem p{id,
                    std::string(refined ? "refined " : "") + "Hardy constant ((N-2)/2)^2 on " + m.name(),
                    m,
                    refined ? euler_over_r_sq(m) : grad_sq(m),
                    f_over_r_sq(),
                    {{"eps", 1e-3, 0.5, 0.1}, {"s", 1, s_hi, 0.5 * (1 + s_hi)}},
                    [m](std::span<const double> x) { return hardy_family_member(m, x[0], x[1]); },
                    [m](std::span<const double> x) { return log_domain(m, x[1]); },
                    c * c,
                    "((N-2)/2)^2",
                    {}};
  return p;
}

}  // namespace

ScalarField hardy_family_member(const GroupModel& m, double eps, double s) {
  if (!m.is_heisenberg() && !m.is_isotropic_euclidean())
    throw std::invalid_argument("Hardy family needs isotropic R^n or the Heisenberg group");
  if (!(s > 0)) throw std::invalid_argument("Hardy family needs s > 0");
  int N = m.first_stratum_dim();
  return power_bump(m, -(N - 2) / 2.0 + eps, s, heis_t_width(s), "hardy_family:" + fmt(eps) + "," + fmt(s));
}

RayleighValue rayleigh(const RayleighProblem& p, std::span<const double> params) {
  return rayleigh(p, params, p.radial);
}

RayleighValue rayleigh(const RayleighProblem& p, std::span<const double> params, const RadialSpec& spec) {
  if (params.size() != p.params.size()) throw std::invalid_argument("wrong number of family parameters");
  for (std::size_t i = 0; i < params.size(); ++i)
    if (!(params[i] >= p.params[i].lo && params[i] <= p.params[i].hi))
      throw std::invalid_argument("parameter " + p.params[i].name + " = " + fmt(params[i]) + " outside [" +
                                  fmt(p.params[i].lo) + ", " + fmt(p.params[i].hi) + "]");
  ScalarField f = p.family(params);
  if (f.symmetry() != Symmetry::stratum_radial) throw std::invalid_argument("polar reduction needs a radial family");
  RadialDomain d = p.domain(params);
  auto k = term_kernel({p.numerator, p.denominator}, f, f);
  auto r = combine_term_channels(integrate_radial_channels(k.kernel, k.channels, p.model, d.rho_lo, d.rho_hi,
                                                           d.t_range, spec));
  return quotient_of(r[0], r[1]);
}

RayleighValue rayleigh(const FunctionalTerm& numerator, const FunctionalTerm& denominator, const ScalarField& f,
                       const QuadratureSpec& spec) {
  auto r = evaluate_terms({numerator, denominator}, f, f, spec);
  return quotient_of(r[0], r[1]);
}

// ---------------------------------------------------------------- optimizer

MinimizeResult minimize_in_box(const std::function<double(std::span<const double>)>& fn,
                               const std::vector<FamilyParam>& box, int budget) {
  if (budget < 1) throw std::invalid_argument("optimizer budget must be at least 1");
  const int n = static_cast<int>(box.size());
  MinimizeResult res;
  res.value = std::numeric_limits<double>::infinity();
  auto eval = [&](std::vector<double> x) {
    for (int i = 0; i < n; ++i) {
      double c = std::clamp(x[i], box[i].lo, box[i].hi);
      if (c != x[i]) ++res.clamped;
      x[i] = c;
    }
    double v = fn(x);
    ++res.evaluations;
    if (v < res.value) {
      res.value = v;
      res.x = x;
    }
    return std::pair{x, v};
  };

  if (n == 1) {
    const double g = (std::sqrt(5.0) - 1) / 2;
    double a = box[0].lo, b = box[0].hi;
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = eval({c}).second;
    if (res.evaluations >= budget) return res;
    double fd = eval({d}).second;
    while (res.evaluations < budget) {
      if (fc < fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - g * (b - a);
        fc = eval({c}).second;
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + g * (b - a);
        fd = eval({d}).second;
      }
    }
    return res;
  }

  // fixed initial simplex: the start point plus a quarter-width step on each axis toward the far side
  std::vector<std::pair<std::vector<double>, double>> simplex;
  std::vector<double> x0(n);
  for (int i = 0; i < n; ++i) x0[i] = box[i].start;
  simplex.push_back(eval(x0));
  for (int i = 0; i < n && res.evaluations < budget; ++i) {
    auto x = x0;
    double w = box[i].hi - box[i].lo;
    x[i] += (box[i].hi - x0[i] >= x0[i] - box[i].lo ? 0.25 : -0.25) * w;
    simplex.push_back(eval(x));
  }
  auto by_value = [](const auto& p, const auto& q) { return p.second < q.second; };
  while (res.evaluations < budget && static_cast<int>(simplex.size()) == n + 1) {
    std::stable_sort(simplex.begin(), simplex.end(), by_value);
    std::vector<double> centroid(n, 0.0);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) centroid[i] += simplex[j].first[i] / n;
    auto along = [&](double t) {
      std::vector<double> x(n);
      for (int i = 0; i < n; ++i) x[i] = centroid[i] + t * (simplex[n].first[i] - centroid[i]);
      return x;
    };
    auto refl = eval(along(-1));
    if (refl.second < simplex[0].second) {
      if (res.evaluations >= budget) break;
      auto exp = eval(along(-2));
      simplex[n] = exp.second < refl.second ? exp : refl;
      continue;
    }
    if (refl.second < simplex[n - 1].second) {
      simplex[n] = refl;
      continue;
    }
    if (res.evaluations >= budget) break;
    auto con = refl.second < simplex[n].second ? eval(along(-0.5)) : eval(along(0.5));
    if (con.second < std::min(refl.second, simplex[n].second)) {
      simplex[n] = con;
      continue;
    }
    for (int j = 1; j <= n && res.evaluations < budget; ++j) {
      std::vector<double> x(n);
      for (int i = 0; i < n; ++i) x[i] = simplex[0].first[i] + 0.5 * (simplex[j].first[i] - simplex[0].first[i]);
      simplex[j] = eval(x);
    }
  }
  return res;
}

// ---------------------------------------------------------------- probes

nlohmann::json ProbeResult::to_json() const {
  nlohmann::json bp = nlohmann::json::object();
  for (std::size_t i = 0; i < param_names.size(); ++i) bp[param_names[i]] = best_params[i];
  return {{"problem_id", problem_id},
          {"target", target},
          {"best_params", bp},
          {"best_quotient", best_quotient},
          {"best_err", best_err},
          {"gap", gap},
          {"crosscheck_quotient", crosscheck_quotient},
          {"crosscheck_err", crosscheck_err},
          {"budget", budget},
          {"evaluations", evaluations},
          {"clamped", clamped},
          {"lower_bound_margin", lower_bound_margin},
          {"node_counts", node_counts}};
}

ProbeResult probe(const RayleighProblem& p, int budget) {
  ProbeResult r;
  r.problem_id = p.id;
  r.target = p.target;
  r.budget = budget;
  for (const auto& fp : p.params) r.param_names.push_back(fp.name);
  r.lower_bound_margin = std::numeric_limits<double>::infinity();
  std::vector<RayleighValue> seen;
  auto fn = [&](std::span<const double> x) {
    auto v = rayleigh(p, x);
    r.lower_bound_margin = std::min(r.lower_bound_margin, v.quotient - p.target + 10 * v.err);
    return v.quotient;
  };
  auto m = minimize_in_box(fn, p.params, budget);
  r.best_params = m.x;
  r.evaluations = m.evaluations;
  r.clamped = m.clamped;
  auto best = rayleigh(p, r.best_params);
  r.best_quotient = best.quotient;
  r.best_err = best.err;
  r.gap = r.best_quotient - r.target;
  RadialSpec fine = p.radial;
  fine.nodes_per_panel *= 2;
  fine.t_nodes *= 2;
  auto cross = rayleigh(p, r.best_params, fine);
  r.crosscheck_quotient = cross.quotient;
  r.crosscheck_err = cross.err;
  r.node_counts = {{"radial", p.radial.to_json()}, {"crosscheck", fine.to_json()}, {"nodes_per_evaluation", best.nodes_used}};
  return r;
}

const std::vector<std::string>& sharpness_problem_ids() {
  static const std::vector<std::string> ids = {"hardy_euclid3", "hardy_heis2", "refined_hardy_heis2",
                                               "weighted_hardy_euclid3", "critical_euclid3"};
  return ids;
}

RayleighProblem sharpness_problem(const std::string& id) {
  if (id == "hardy_euclid3") return hardy_problem(id, GroupModel::euclidean(3), false, 20);
  if (id == "hardy_heis2") return hardy_problem(id, GroupModel::heisenberg(2), false, 12);
  if (id == "refined_hardy_heis2") return hardy_problem(id, GroupModel::heisenberg(2), true, 12);
  if (id == "weighted_hardy_euclid3") {
    GroupModel m = GroupModel::euclidean(3);
    const double a = 0.25, Q = 3;
    const double e = -(Q - 2 * a - 2) / 2;
    auto R = radial_derivative_op(m);
    RayleighProblem p{id,
                      "weighted Hardy constant (Q-2a-2)^2/4 on R^3, a = 1/4",
                      m,
                      FunctionalTerm::l2("int |x|^(-2a) |Rf|^2", {R},
                                         RadialWeight::quasi([a](double r) { return std::pow(r, -2 * a); },
                                                             "|x|^(" + fmt(-2 * a) + ")")),
                      FunctionalTerm::l2("int |x|^(-2a-2) |f|^2", {nullptr},
                                         RadialWeight::quasi([a](double r) { return std::pow(r, -2 * a - 2); },
                                                             "|x|^(" + fmt(-2 * a - 2) + ")")),
                      {{"eps", 1e-3, 0.5, 0.1}, {"s", 1, 30, 15.5}},
                      [m, e](std::span<const double> x) {
                        return power_bump(m, e + x[0], x[1], std::nullopt,
                                          "weighted_family:" + fmt(x[0]) + "," + fmt(x[1]));
                      },
                      [m](std::span<const double> x) { return log_domain(m, x[1]); },
                      (Q - 2 * a - 2) * (Q - 2 * a - 2) / 4,
                      "(Q-2a-2)^2/4",
                      {}};
    return p;
  }
  if (id == "critical_euclid3") {
    GroupModel m = GroupModel::euclidean(3);
    const double Q = 3;
    auto R = radial_derivative_op(m);
    // (log r)^(-1/2+eps) times a bump in v = log log r on [top - 2s, top], top = log 150
    auto member = [m](double eps, double s) {
      double top = std::log(critical_log_top), v0 = top - s;
      Expr L = ex::log(ex::stratum_norm());
      Expr re = ex::mul({ex::pow(L, Number::real(-0.5 + eps)), ex::tbump(ex::log(L), Number::real(v0), Number::real(s))});
      double lo = std::exp(std::exp(v0 - s)), hi = std::exp(critical_log_top);
      return ScalarField(m, re, std::nullopt, cube(3, hi), lo, Annulus{true, lo, hi}, Symmetry::stratum_radial,
                         "critical_family:" + fmt(eps) + "," + fmt(s));
    };
    RayleighProblem p{id,
                      "critical Hardy constant 1/4 on R^3",
                      m,
                      FunctionalTerm::l2("int (log|x|)^2 |x|^(2-Q) |Rf|^2", {R},
                                         RadialWeight::quasi(
                                             [Q](double r) {
                                               double L = std::log(r);
                                               return L * L * std::pow(r, 2 - Q);
                                             },
                                             "(log|x|)^2 |x|^(2-Q)")),
                      FunctionalTerm::l2("int |x|^(-Q) |f|^2", {nullptr},
                                         RadialWeight::quasi([Q](double r) { return std::pow(r, -Q); }, "|x|^(-Q)")),
                      {{"eps", 1e-3, 0.5, 0.1}, {"s", 1, 13, 7}},
                      [member](std::span<const double> x) { return member(x[0], x[1]); },
                      [](std::span<const double> x) {
                        double v0 = std::log(critical_log_top) - x[1];
                        return RadialDomain{std::exp(std::exp(v0 - x[1])), std::exp(critical_log_top), std::nullopt};
                      },
                      0.25,
                      "1/4",
                      {}};
    p.radial.map = RadialSpec::Map::loglog;
    return p;
  }
  throw std::invalid_argument("unknown sharpness problem: " + id);
}

nlohmann::json RefinedVsPlain::to_json() const {
  return {{"q_refined", q_refined}, {"q_plain", q_plain},     {"err_refined", err_refined},
          {"err_plain", err_plain}, {"target", target},       {"ordered", ordered}};
}

RefinedVsPlain refined_vs_plain(const ScalarField& f, const QuadratureSpec& spec) {
  const GroupModel& m = f.model();
  if (!m.is_heisenberg() && !m.is_isotropic_euclidean()) throw std::invalid_argument("needs a stratified model");
  int N = m.first_stratum_dim();
  if (N < 3) throw std::invalid_argument("refined_vs_plain needs N >= 3");
  auto r = evaluate_terms({euler_over_r_sq(m), grad_sq(m), f_over_r_sq()}, f, f, spec);
  RefinedVsPlain out;
  auto refined = quotient_of(r[0], r[2]);
  auto plain = quotient_of(r[1], r[2]);
  out.q_refined = refined.quotient;
  out.err_refined = refined.err;
  out.q_plain = plain.quotient;
  out.err_plain = plain.err;
  out.target = (N - 2) * (N - 2) / 4.0;
  out.ordered = out.q_refined <= out.q_plain + 10 * (out.err_refined + out.err_plain);
  return out;
}

}  // namespace carnot_hardy
