#include "carnot_hardy/inequalities.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <set>

namespace carnot_hardy {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

double q_of(const GroupModel& m) { return to_double(m.q_hom()); }

}  // namespace

// ---------------------------------------------------------------- weights and terms

RadialWeight RadialWeight::one() { return {}; }

RadialWeight RadialWeight::stratum_power(int k) {
  RadialWeight w;
  if (k == 0) return w;
  w.fn = [k](double r) { return std::pow(r, k); };
  w.label = "|x'|^" + std::to_string(k);
  return w;
}

RadialWeight RadialWeight::quasi(std::function<double(double)> fn, std::string label) {
  RadialWeight w;
  w.base = Base::quasi;
  w.fn = std::move(fn);
  w.label = std::move(label);
  return w;
}

RadialWeight RadialWeight::log_stratum_sq() {
  RadialWeight w;
  w.fn = [](double r) { return std::log(r * r); };
  w.label = "log|x'|^2";
  return w;
}

FunctionalTerm FunctionalTerm::l2(std::string name, std::vector<Op> ops, RadialWeight w) {
  FunctionalTerm t{std::move(name), {}, std::move(w)};
  for (auto& o : ops) t.pairs.push_back({o, o});
  return t;
}

FunctionalTerm FunctionalTerm::inner(std::string name, Op a, Op b, RadialWeight w) {
  return {std::move(name), {{std::move(a), std::move(b)}}, std::move(w)};
}

std::string FunctionalTerm::key() const {
  std::string k = (weight.base == RadialWeight::Base::quasi ? "q:" : "s:") + weight.label + "|";
  for (const auto& [a, b] : pairs) k += (a ? describe(a) : "1") + "," + (b ? describe(b) : "1") + ";";
  return k;
}

int FunctionalTerm::jet_order() const {
  int o = 0;
  for (const auto& [a, b] : pairs) {
    if (a) o = std::max(o, carnot_hardy::jet_order(a));
    if (b) o = std::max(o, carnot_hardy::jet_order(b));
  }
  return o;
}

double LogPowerProfile::value(double r) const { return std::pow(r, -a) * std::pow(std::log(r), c); }

namespace {
double lp(double L, int k) { return k < 0 ? 0.0 : std::pow(L, k); }
}  // namespace

double LogPowerProfile::d1(double r) const {
  double L = std::log(r);
  return std::pow(r, -a - 1) * (c * lp(L, c - 1) - a * lp(L, c));
}

double LogPowerProfile::d2(double r) const {
  double L = std::log(r);
  return std::pow(r, -a - 2) * (c * (c - 1) * lp(L, c - 2) - (2 * a + 1) * c * lp(L, c - 1) + a * (a + 1) * lp(L, c));
}

std::string LogPowerProfile::str() const {
  std::string s = a == 0 ? "" : "|x|^" + fmt(-a);
  if (c != 0) s += std::string(s.empty() ? "" : " ") + "(log|x|)^" + std::to_string(c);
  return s.empty() ? "1" : s;
}

nlohmann::json InequalityParams::to_json(const std::vector<std::string>& names) const {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& n : names) {
    if (n == "alpha") j[n] = alpha;
    else if (n == "beta") j[n] = beta;
    else if (n == "a") j[n] = a;
    else if (n == "b") j[n] = b;
    else if (n == "c") j[n] = c;
    else if (n == "d") j[n] = d;
  }
  return j;
}

// ---------------------------------------------------------------- evaluation

namespace {

struct OpTable {
  std::vector<Op> ops;
  std::map<std::string, int> index;
  int order = 0;
  int add(const Op& o) {
    if (!o) return -1;
    auto k = describe(o);
    auto it = index.find(k);
    if (it != index.end()) return it->second;
    ops.push_back(o);
    order = std::max(order, jet_order(o));
    return index[k] = static_cast<int>(ops.size()) - 1;
  }
};

struct FieldValues {
  std::complex<double> id;
  std::vector<std::complex<double>> ops;
};

void field_values(const ScalarField& f, const OpTable& t, std::span<const double> x, FieldValues& out) {
  auto j = eval_jet<double>(f, x, t.order);
  out.id = {j.re.value(), j.complex ? j.im.value() : 0.0};
  out.ops.assign(t.ops.size(), {});
  if (t.ops.empty()) return;
  auto re = apply_jets<double>(t.ops, j.re, f.model(), x);
  for (std::size_t i = 0; i < re.size(); ++i) out.ops[i] = re[i].value();
  if (j.complex) {
    auto im = apply_jets<double>(t.ops, j.im, f.model(), x);
    for (std::size_t i = 0; i < im.size(); ++i) out.ops[i] += std::complex<double>(0, im[i].value());
  }
}

}  // namespace

TermKernel term_kernel(const std::vector<FunctionalTerm>& terms, const ScalarField& f, const ScalarField& g) {
  if (!(f.model() == g.model())) throw std::invalid_argument("fields live on different models");
  const bool same = &f == &g;
  auto tf = std::make_shared<OpTable>();
  auto tg = same ? tf : std::make_shared<OpTable>();
  auto idx = std::make_shared<std::vector<std::vector<std::pair<int, int>>>>(terms.size());
  bool need_quasi = false, need_stratum = false;
  std::vector<RadialWeight> weights;
  for (std::size_t t = 0; t < terms.size(); ++t) {
    for (const auto& [a, b] : terms[t].pairs) (*idx)[t].push_back({tf->add(a), tg->add(b)});
    if (terms[t].weight.fn) (terms[t].weight.base == RadialWeight::Base::quasi ? need_quasi : need_stratum) = true;
    weights.push_back(terms[t].weight);
  }
  if (need_stratum && !(f.stratum_margin() > 0 || g.stratum_margin() > 0))
    throw std::invalid_argument("singular weight needs a field supported away from x' = 0");
  TermKernel k;
  k.channels = 2 * static_cast<int>(terms.size());
  // the kernel holds f and g by reference
  k.kernel = [&f, &g, same, tf, tg, idx, weights, need_quasi, need_stratum](std::span<const double> x,
                                                                            std::span<double> out) {
    if (!f.in_support(x) || (!same && !g.in_support(x))) return;
    const GroupModel& m = f.model();
    FieldValues vf, vg;
    field_values(f, *tf, x, vf);
    if (!same) field_values(g, *tg, x, vg);
    const FieldValues& wg = same ? vf : vg;
    double rs = need_stratum ? stratum_norm(m, x) : 0.0;
    double rq = need_quasi ? quasi_norm(m, x) : 0.0;
    for (std::size_t t = 0; t < weights.size(); ++t) {
      std::complex<double> s = 0;
      for (const auto& [ia, ib] : (*idx)[t]) {
        auto va = ia < 0 ? vf.id : vf.ops[ia];
        auto vb = ib < 0 ? wg.id : wg.ops[ib];
        s += va * std::conj(vb);
      }
      const auto& w = weights[t];
      if (w.fn) s *= w.fn(w.base == RadialWeight::Base::quasi ? rq : rs);
      out[2 * t] = s.real();
      out[2 * t + 1] = s.imag();
    }
  };
  return k;
}

std::vector<QuadResult> combine_term_channels(const std::vector<QuadResult>& raw) {
  std::vector<QuadResult> res(raw.size() / 2);
  for (std::size_t t = 0; t < res.size(); ++t) {
    res[t].value = {raw[2 * t].value.real(), raw[2 * t + 1].value.real()};
    res[t].err_estimate = std::hypot(raw[2 * t].err_estimate, raw[2 * t + 1].err_estimate);
    res[t].nodes_used = raw[2 * t].nodes_used;
  }
  return res;
}

std::vector<QuadResult> evaluate_terms(const std::vector<FunctionalTerm>& terms, const ScalarField& f,
                                       const ScalarField& g, const QuadratureSpec& spec,
                                       std::optional<double> err_cap) {
  if (!spec.box.contains(f.support_box()) && !spec.box.contains(g.support_box()))
    throw std::invalid_argument("integration box does not contain the support");
  auto k = term_kernel(terms, f, g);
  auto res = combine_term_channels(integrate_channels(k.kernel, k.channels, spec));
  for (std::size_t t = 0; t < terms.size(); ++t)
    if (err_cap && res[t].err_estimate > *err_cap)
      throw QuadratureCapExceeded("term '" + terms[t].name + "': error estimate " + fmt(res[t].err_estimate) +
                                  " exceeds cap " + fmt(*err_cap));
  return res;
}

double DeficitReport::tolerance() const { return std::max(10 * total_err, 1e-8 * scale); }

nlohmann::json DeficitReport::to_json() const {
  nlohmann::json t = nlohmann::json::array();
  for (const auto& v : terms)
    t.push_back({{"side", v.side},
                 {"name", v.name},
                 {"formula", v.formula},
                 {"coeff", v.coeff},
                 {"value", v.value.real()},
                 {"imag", v.value.imag()},
                 {"err", v.err}});
  return {{"id", id},          {"model", model},   {"params", params},     {"field", field},
          {"quadrature", quadrature}, {"terms", t},       {"lhs", lhs},           {"rhs", rhs},
          {"deficit", deficit}, {"total_err", total_err}, {"tolerance", tolerance()},
          {"verdict", pass ? "pass" : "fail"}};
}

std::vector<DeficitReport> evaluate_many(const std::vector<InequalityInstance>& insts, const ScalarField& f,
                                         const QuadratureSpec& spec, std::optional<double> err_cap) {
  std::vector<FunctionalTerm> terms;
  std::map<std::string, int> where;
  auto slot = [&](const FunctionalTerm& t) {
    auto k = t.key();
    auto it = where.find(k);
    if (it != where.end()) return it->second;
    terms.push_back(t);
    return where[k] = static_cast<int>(terms.size()) - 1;
  };
  for (const auto& inst : insts) {
    if (inst.inadmissible) throw Inadmissible("inadmissible: " + *inst.inadmissible);
    if (!(inst.model == f.model())) throw std::invalid_argument("field model does not match the instance");
    for (const auto& w : inst.lhs) slot(w.term);
    for (const auto& w : inst.rhs) slot(w.term);
  }
  auto vals = evaluate_terms(terms, f, f, spec, err_cap);
  std::vector<DeficitReport> out;
  for (const auto& inst : insts) {
    DeficitReport r;
    r.id = inst.id;
    r.model = inst.model.name();
    r.params = inst.params.to_json(inst.param_names);
    r.field = f.label();
    r.quadrature = spec.to_json();
    double abs_sum = 0;
    auto side = [&](const std::vector<WeightedTerm>& ws, const char* name, double& total) {
      for (const auto& w : ws) {
        const auto& q = vals[where.at(w.term.key())];
        TermValue tv{name, w.term.name, w.formula, w.coeff, q.value, q.err_estimate};
        total += w.coeff * q.value.real();
        r.total_err += std::abs(w.coeff) * q.err_estimate;
        abs_sum += std::abs(w.coeff * q.value.real());
        r.terms.push_back(std::move(tv));
      }
    };
    side(inst.lhs, "lhs", r.lhs);
    side(inst.rhs, "rhs", r.rhs);
    r.deficit = r.lhs - r.rhs;
    r.scale = std::abs(r.lhs) + abs_sum;
    r.pass = r.deficit >= -r.tolerance();
    out.push_back(std::move(r));
  }
  return out;
}

DeficitReport evaluate(const InequalityInstance& inst, const ScalarField& f, const QuadratureSpec& spec,
                       std::optional<double> err_cap) {
  return evaluate_many({inst}, f, spec, err_cap).front();
}

std::vector<InequalityParams> ab_grid(const std::vector<double>& alphas, const std::vector<double>& betas) {
  std::vector<InequalityParams> g;
  for (double a : alphas)
    for (double b : betas) {
      InequalityParams p;
      p.alpha = a;
      p.beta = b;
      g.push_back(p);
    }
  return g;
}

nlohmann::json SweepResult::to_json() const {
  nlohmann::json c = nlohmann::json::array();
  for (const auto& cell : cells) {
    if (cell.report) {
      c.push_back(cell.report->to_json());
    } else {
      nlohmann::json p = {{"alpha", cell.params.alpha}, {"beta", cell.params.beta}};
      c.push_back({{"params", p}, {"verdict", "inadmissible"}, {"reason", *cell.inadmissible}});
    }
  }
  return {{"id", id}, {"model", model}, {"field", field}, {"cells", c}, {"min_deficit", min_deficit},
          {"verdict", pass ? "pass" : "fail"}};
}

SweepResult sweep(const std::string& id, const GroupModel& m, const std::vector<InequalityParams>& grid,
                  const ScalarField& f, const QuadratureSpec& spec, std::optional<double> err_cap) {
  const auto& entry = inequality_entry(id);
  if (auto why = entry.unsupported(m)) throw std::invalid_argument(id + " on " + m.name() + ": " + *why);
  SweepResult s{id, m.name(), f.label(), {}, 0, true};
  std::vector<InequalityInstance> admissible;
  std::vector<std::size_t> cell_of;
  for (const auto& p : grid) {
    auto inst = entry.build(m, p);
    SweepCell cell{p, inst.inadmissible, std::nullopt};
    if (!inst.inadmissible) {
      admissible.push_back(std::move(inst));
      cell_of.push_back(s.cells.size());
    }
    s.cells.push_back(std::move(cell));
  }
  auto reports = evaluate_many(admissible, f, spec, err_cap);
  bool first = true;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    if (first || reports[i].deficit < s.min_deficit) s.min_deficit = reports[i].deficit;
    first = false;
    s.pass = s.pass && reports[i].pass;
    s.cells[cell_of[i]].report = std::move(reports[i]);
  }
  return s;
}

std::pair<double, double> best_alpha_hardy(int N) {
  if (N < 3) throw std::invalid_argument("best_alpha_hardy needs N >= 3");
  double a = (N - 2) / 2.0;
  return {a, a * a};
}

std::pair<double, double> best_alpha_critical() { return {0.5, 0.25}; }

int default_nodes(const GroupModel& m) {
  if (m.ambient_dim() <= 3) return 48;
  if (m.ambient_dim() == 4) return 24;
  return 16;
}

QuadratureSpec default_quadrature(const ScalarField& f, std::optional<int> nodes) {
  QuadratureSpec s;
  s.box = f.support_box();
  s.nodes_per_axis = nodes.value_or(default_nodes(f.model()));
  s.refinement_factor = 2;
  return s;
}

// ---------------------------------------------------------------- catalog

namespace {

struct Ops {
  Op L, E, Z, T, D, R, S;
  std::vector<Op> grad;
};

Ops ops_for(const GroupModel& m) {
  Ops o;
  if (m.is_heisenberg() || m.is_isotropic_euclidean()) {
    o.L = sublaplacian(m);
    o.E = euler_horizontal(m);
    o.D = stratum_laplacian(m);
    o.S = double_sum(m);
    o.grad = horizontal_gradient(m);
  }
  if (m.is_heisenberg()) {
    auto p = heisenberg_primitives(m.heisenberg_n());
    o.Z = p.Z;
    o.T = p.T;
  } else {
    o.R = radial_derivative_op(m);
  }
  return o;
}

namespace terms {
FunctionalTerm lap_sq(const Ops& o) { return FunctionalTerm::l2("||Lf||^2", {o.L}, RadialWeight::one()); }
FunctionalTerm grad_r2(const Ops& o) {
  return FunctionalTerm::l2("||grad_H f/|x'|||^2", o.grad, RadialWeight::stratum_power(-2));
}
FunctionalTerm euler_r4(const Ops& o) {
  return FunctionalTerm::l2("||x'.grad_H f/|x'|^2||^2", {o.E}, RadialWeight::stratum_power(-4));
}
FunctionalTerm f_r4() { return FunctionalTerm::l2("||f/|x'|^2||^2", {nullptr}, RadialWeight::stratum_power(-4)); }
FunctionalTerm zt(const Ops& o) {
  return FunctionalTerm::inner("Re(Zf/|x'|, Tf/|x'|)", o.Z, o.T, RadialWeight::stratum_power(-2));
}
FunctionalTerm t_sq(const Ops& o) { return FunctionalTerm::l2("||Tf||^2", {o.T}, RadialWeight::one()); }
FunctionalTerm lap_pair(const Ops& o) {
  return FunctionalTerm::inner("Re(Lf/|x'|, f/|x'|)", o.L, nullptr, RadialWeight::stratum_power(-2));
}
FunctionalTerm delta_pair(const Ops& o) {
  return FunctionalTerm::inner("Re(Delta' f/|x'|, f/|x'|)", o.D, nullptr, RadialWeight::stratum_power(-2));
}
FunctionalTerm grad_sq(const Ops& o) { return FunctionalTerm::l2("||grad_H f||^2", o.grad, RadialWeight::one()); }
FunctionalTerm f_r2() { return FunctionalTerm::l2("||f/|x'|||^2", {nullptr}, RadialWeight::stratum_power(-2)); }
FunctionalTerm euler_r2(const Ops& o) {
  return FunctionalTerm::l2("||x'.grad_H f/|x'|||^2", {o.E}, RadialWeight::stratum_power(-2));
}
// integral of w(|x|) |Rf|^2 or w(|x|) |f|^2
FunctionalTerm radial_sq(const Ops& o, std::function<double(double)> w, const std::string& wl) {
  return FunctionalTerm::l2("int " + wl + " |Rf|^2", {o.R}, RadialWeight::quasi(std::move(w), wl));
}
FunctionalTerm plain_sq(std::function<double(double)> w, const std::string& wl) {
  return FunctionalTerm::l2("int " + wl + " |f|^2", {nullptr}, RadialWeight::quasi(std::move(w), wl));
}
}  // namespace terms

std::optional<std::string> need_stratified(const GroupModel& m, int min_n) {
  if (!m.is_heisenberg() && !m.is_isotropic_euclidean())
    return "needs a stratified model (isotropic R^n or the Heisenberg group)";
  if (m.first_stratum_dim() < min_n) return "needs first-stratum dimension N >= " + std::to_string(min_n);
  return std::nullopt;
}

std::optional<std::string> need_euclid(const GroupModel& m, int min_n) {
  if (!m.is_isotropic_euclidean()) return "needs isotropic R^n";
  if (m.ambient_dim() < min_n) return "needs n >= " + std::to_string(min_n);
  return std::nullopt;
}

std::optional<std::string> need_heis(const GroupModel& m) {
  if (!m.is_heisenberg()) return "needs the Heisenberg group";
  return std::nullopt;
}

std::optional<std::string> need_homogeneous(const GroupModel& m) {
  if (m.is_heisenberg()) return "the radial derivative is realized on R^n only";
  if (q_of(m) < 3) return "needs homogeneous dimension Q >= 3";
  return std::nullopt;
}

InequalityInstance make(const std::string& id, const GroupModel& m, const InequalityParams& p,
                        std::vector<std::string> names) {
  return {id, m, p, std::move(names), {}, {}, std::nullopt};
}

// the four-term Rellich shape shared by several entries
InequalityInstance rellich_shape(const std::string& id, const GroupModel& m, const InequalityParams& p,
                                 double c_grad, std::string f_grad, std::optional<double> c_euler, std::string f_euler,
                                 double c_zero, std::string f_zero) {
  auto o = ops_for(m);
  auto inst = make(id, m, p, {"alpha", "beta"});
  inst.lhs.push_back({terms::lap_sq(o), 1.0, "1"});
  inst.rhs.push_back({terms::grad_r2(o), c_grad, std::move(f_grad)});
  if (c_euler) inst.rhs.push_back({terms::euler_r4(o), *c_euler, std::move(f_euler)});
  inst.rhs.push_back({terms::f_r4(), c_zero, std::move(f_zero)});
  return inst;
}

double c_strat_zero(double a, double b, double N) {
  return a * (N - 4) * (N - 2) - a * a * (N - 2) + 2 * b * (4 - N) - b * b + a * b * (N - 2);
}
const char* f_strat_zero = "alpha(N-4)(N-2) - alpha^2(N-2) + 2beta(4-N) - beta^2 + alpha beta(N-2)";
double c_tstar_zero(double a, double b, double N) {
  return 2 * (N - 4) * (a * (N - 2) - b) - 2 * a * a * (N - 2) + a * b * N - b * b;
}
const char* f_tstar_zero = "2(N-4)(alpha(N-2)-beta) - 2alpha^2(N-2) + alpha beta N - beta^2";

void add_heis_tail(InequalityInstance& inst, const Ops& o, double a, int sign) {
  inst.rhs.push_back({terms::zt(o), sign * 2 * a, sign > 0 ? "2alpha" : "-2alpha"});
  inst.rhs.push_back({terms::t_sq(o), sign * a, sign > 0 ? "alpha" : "-alpha"});
}

void add_rewrite_tail(InequalityInstance& inst, const Ops& o, double a, int sign) {
  inst.rhs.push_back({terms::lap_pair(o), -sign * 2 * a, sign > 0 ? "-2alpha" : "2alpha"});
  inst.rhs.push_back({terms::delta_pair(o), sign * 2 * a, sign > 0 ? "2alpha" : "-2alpha"});
  inst.rhs.push_back({terms::t_sq(o), sign * a / 2, sign > 0 ? "alpha/2" : "-alpha/2"});
}

std::function<double(double)> power_fn(double p) {
  if (p == 0) return [](double) { return 1.0; };
  return [p](double r) { return std::pow(r, p); };
}
std::string power_label(double p) { return p == 0 ? "1" : "|x|^(" + fmt(p) + ")"; }

std::vector<InequalityParams> alpha_rows(const std::vector<double>& alphas, const std::vector<InequalityParams>& rows) {
  std::vector<InequalityParams> g;
  for (const auto& r : rows)
    for (double a : alphas) {
      auto p = r;
      p.alpha = a;
      g.push_back(p);
    }
  return g;
}

InequalityParams abcd(double a, double b, int c, int d) {
  InequalityParams p;
  p.a = a;
  p.b = b;
  p.c = c;
  p.d = d;
  return p;
}

const std::vector<double> five = {-2, -1, 0, 1, 2};

std::vector<InequalityEntry> build_catalog() {
  std::vector<InequalityEntry> c;
  auto single = [](const GroupModel&) { return std::vector<InequalityParams>{InequalityParams{}}; };
  auto grid5x5 = [](const GroupModel&) { return ab_grid(five, five); };

  c.push_back({"hardy_euclid", "Hardy inequality on R^n, n >= 3", {},
               [](const GroupModel& m) { return need_euclid(m, 3); },
               [](const GroupModel& m, const InequalityParams& p) {
                 auto o = ops_for(m);
                 double n = m.ambient_dim();
                 auto inst = make("hardy_euclid", m, p, {});
                 inst.lhs.push_back({terms::grad_sq(o), 1.0, "1"});
                 inst.rhs.push_back({terms::f_r2(), (n - 2) * (n - 2) / 4, "((n-2)/2)^2"});
                 return inst;
               },
               single, {"euclid:3"}});

  c.push_back({"gl_rellich", "two-parameter Rellich inequality on R^n from T+T", {"alpha", "beta"},
               [](const GroupModel& m) { return need_euclid(m, 2); },
               [](const GroupModel& m, const InequalityParams& p) {
                 double n = m.ambient_dim(), a = p.alpha, b = p.beta;
                 return rellich_shape("gl_rellich", m, p, (n - 4) * a - 2 * b, "(n-4)alpha - 2beta", -a * (a - 4),
                                      "-alpha(alpha-4)", b * ((n - 4) * (a - 2) - b), "beta((n-4)(alpha-2) - beta)");
               },
               grid5x5, {"euclid:3", "euclid:2"}});

  c.push_back({"gl_counterpart", "two-parameter Rellich inequality on R^n from T T+", {"alpha", "beta"},
               [](const GroupModel& m) { return need_euclid(m, 2); },
               [](const GroupModel& m, const InequalityParams& p) {
                 double n = m.ambient_dim(), a = p.alpha, b = p.beta;
                 return rellich_shape("gl_counterpart", m, p, n * a - 2 * b, "n alpha - 2beta", -a * (a + 4),
                                      "-alpha(alpha+4)", c_tstar_zero(a, b, n),
                                      "2(n-4)(alpha(n-2)-beta) - 2alpha^2(n-2) + alpha beta n - beta^2");
               },
               grid5x5, {"euclid:3", "euclid:2"}});

  // weighted Hardy with radial profiles phi = |x|^-a (log|x|)^c, psi = |x|^-b (log|x|)^d
  auto hom_rows = [](const GroupModel&) {
    return alpha_rows(five, {abcd(0, 1, 0, 0), abcd(0.5, 1.5, 0, 0), abcd(0, 1, 1, 0), abcd(1, 0.5, 0, 1),
                             abcd(-0.5, 0.5, 2, 1)});
  };
  auto fac = [](bool second) {
    return [second](const GroupModel& m, const InequalityParams& p) {
      auto o = ops_for(m);
      double Q = q_of(m), al = p.alpha;
      auto inst = make(second ? "hom_fac2" : "hom_fac1", m, p, {"alpha", "a", "b", "c", "d"});
      if (p.c < 0 || p.d < 0) inst.inadmissible = "log exponents c, d must be integers >= 0";
      LogPowerProfile phi{p.a, p.c}, psi{p.b, p.d};
      inst.lhs.push_back({terms::radial_sq(o, [phi](double r) { double v = phi.value(r); return v * v; },
                                           "phi^2[" + phi.str() + "]"),
                          1.0, "1"});
      std::function<double(double)> w1 = [phi, psi, Q, second](double r) {
        double cross = second ? psi.value(r) * phi.d1(r) - phi.value(r) * psi.d1(r)
                              : phi.value(r) * psi.d1(r) + psi.value(r) * phi.d1(r);
        return cross + (Q - 1) * phi.value(r) * psi.value(r) / r;
      };
      std::string tag = "[phi=" + phi.str() + ", psi=" + psi.str() + "]";
      inst.rhs.push_back({terms::plain_sq(w1, std::string(second ? "w2" : "w1") + tag), al, "alpha"});
      inst.rhs.push_back(
          {terms::plain_sq([psi](double r) { double v = psi.value(r); return v * v; }, "psi^2[" + psi.str() + "]"),
           -al * al, "-alpha^2"});
      if (second) {
        std::function<double(double)> w3 = [phi, Q](double r) {
          double v = phi.value(r);
          return -(Q - 1) * v * v / (r * r) + (Q - 1) * v * phi.d1(r) / r + v * phi.d2(r);
        };
        inst.rhs.push_back({terms::plain_sq(w3, "w3[phi=" + phi.str() + "]"), 1.0, "1"});
      }
      return inst;
    };
  };
  c.push_back({"hom_fac1", "weighted Hardy inequality with radial weights phi, psi (from T+T)",
               {"alpha", "a", "b", "c", "d"}, need_homogeneous, fac(false), hom_rows, {"euclid:3", "aniso:1,2"}});
  c.push_back({"hom_fac2", "weighted Hardy inequality with radial weights phi, psi (from T T+)",
               {"alpha", "a", "b", "c", "d"}, need_homogeneous, fac(true), hom_rows, {"euclid:3", "aniso:1,2"}});

  c.push_back({"hom_power", "power-weight Hardy inequality with parameters a, b", {"alpha", "a", "b"},
               need_homogeneous,
               [](const GroupModel& m, const InequalityParams& p) {
                 auto o = ops_for(m);
                 double Q = q_of(m), a = p.a, b = p.b, al = p.alpha;
                 auto inst = make("hom_power", m, p, {"alpha", "a", "b"});
                 inst.lhs.push_back({terms::radial_sq(o, power_fn(-2 * a), power_label(-2 * a)), 1.0, "1"});
                 inst.rhs.push_back({terms::plain_sq(power_fn(-(a + b + 1)), power_label(-(a + b + 1))),
                                     al * (Q - a - b - 1), "alpha(Q-a-b-1)"});
                 inst.rhs.push_back({terms::plain_sq(power_fn(-2 * b), power_label(-2 * b)), -al * al, "-alpha^2"});
                 return inst;
               },
               [](const GroupModel&) {
                 return alpha_rows(five, {abcd(0, 1, 0, 0), abcd(0.25, 1.25, 0, 0), abcd(-0.5, 0.5, 0, 0),
                                          abcd(0, 0.5, 0, 0), abcd(1, 1, 0, 0)});
               },
               {"euclid:3", "aniso:1,2"}});

  c.push_back({"hom_weighted_hardy", "weighted Hardy inequality with constant (Q-2a-2)^2/4", {"a"},
               need_homogeneous,
               [](const GroupModel& m, const InequalityParams& p) {
                 auto o = ops_for(m);
                 double Q = q_of(m), a = p.a;
                 auto inst = make("hom_weighted_hardy", m, p, {"a"});
                 inst.lhs.push_back({terms::radial_sq(o, power_fn(-2 * a), power_label(-2 * a)), 1.0, "1"});
                 inst.rhs.push_back({terms::plain_sq(power_fn(-2 * a - 2), power_label(-2 * a - 2)),
                                     (Q - 2 * a - 2) * (Q - 2 * a - 2) / 4, "(Q-2a-2)^2/4"});
                 return inst;
               },
               [](const GroupModel&) {
                 std::vector<InequalityParams> g;
                 for (double a : {-1.0, -0.5, 0.0, 0.25, 0.5}) g.push_back(abcd(a, 0, 0, 0));
                 return g;
               },
               {"euclid:3", "aniso:1,2"}});

  c.push_back({"hom_log", "Hardy inequality with power-log weights", {"alpha", "a", "b", "c", "d"}, need_homogeneous,
               [](const GroupModel& m, const InequalityParams& p) {
                 auto o = ops_for(m);
                 double Q = q_of(m), a = p.a, b = p.b, al = p.alpha;
                 int c = p.c, d = p.d;
                 auto inst = make("hom_log", m, p, {"alpha", "a", "b", "c", "d"});
                 if (c < 0 || d < 0) inst.inadmissible = "log exponents c, d must be integers >= 0";
                 LogPowerProfile lhs_w{2 * a, 2 * c}, psi2{2 * b, 2 * d};
                 inst.lhs.push_back({terms::radial_sq(o, [lhs_w](double r) { return lhs_w.value(r); }, lhs_w.str()),
                                     1.0, "1"});
                 std::function<double(double)> w = [a, b, c, d, Q](double r) {
                   double L = std::log(r);
                   return ((c + d) * lp(L, c + d - 1) + (Q - 1 - a - b) * lp(L, c + d)) * std::pow(r, -(a + b + 1));
                 };
                 std::string wl = "((c+d)(log|x|)^(c+d-1) + (Q-1-a-b)(log|x|)^(c+d))|x|^(-a-b-1)[a=" + fmt(a) +
                                  ",b=" + fmt(b) + ",c=" + std::to_string(c) + ",d=" + std::to_string(d) + "]";
                 inst.rhs.push_back({terms::plain_sq(w, wl), al, "alpha"});
                 inst.rhs.push_back(
                     {terms::plain_sq([psi2](double r) { return psi2.value(r); }, psi2.str()), -al * al, "-alpha^2"});
                 return inst;
               },
               [](const GroupModel&) {
                 return alpha_rows(five, {abcd(0.5, 1.5, 1, 0), abcd(0, 1, 0, 0), abcd(0, 1, 1, 1), abcd(1, 1, 2, 0),
                                          abcd(0.5, 0.5, 1, 2)});
               },
               {"euclid:3", "aniso:1,2"}});

  auto crit_lhs = [](const GroupModel& m, const Ops& o) {
    double Q = q_of(m);
    LogPowerProfile w{Q - 2, 2};
    return terms::radial_sq(o, [w](double r) { return w.value(r); }, w.str());
  };
  auto crit_rhs = [](const GroupModel& m) {
    double Q = q_of(m);
    return terms::plain_sq(power_fn(-Q), power_label(-Q));
  };
  c.push_back({"hom_log_critical_pre", "critical Hardy inequality before optimizing alpha", {"alpha"},
               need_homogeneous,
               [crit_lhs, crit_rhs](const GroupModel& m, const InequalityParams& p) {
                 auto o = ops_for(m);
                 auto inst = make("hom_log_critical_pre", m, p, {"alpha"});
                 inst.lhs.push_back({crit_lhs(m, o), 1.0, "1"});
                 inst.rhs.push_back({crit_rhs(m), p.alpha - p.alpha * p.alpha, "alpha - alpha^2"});
                 return inst;
               },
               [](const GroupModel&) { return alpha_rows({-1, 0, 0.25, 0.5, 1}, {InequalityParams{}}); },
               {"euclid:3", "aniso:1,2"}});

  c.push_back({"hom_critical", "critical Hardy inequality with constant 1/4", {}, need_homogeneous,
               [crit_lhs, crit_rhs](const GroupModel& m, const InequalityParams& p) {
                 auto o = ops_for(m);
                 auto inst = make("hom_critical", m, p, {});
                 inst.lhs.push_back({crit_lhs(m, o), 1.0, "1"});
                 inst.rhs.push_back({crit_rhs(m), 0.25, "1/4"});
                 return inst;
               },
               single, {"euclid:3", "aniso:1,2"}});

  c.push_back({"strat_rellich", "two-parameter Rellich inequality on stratified groups", {"alpha", "beta"},
               [](const GroupModel& m) { return need_stratified(m, 2); },
               [](const GroupModel& m, const InequalityParams& p) {
                 double N = m.first_stratum_dim(), a = p.alpha, b = p.beta;
                 return rellich_shape("strat_rellich", m, p, a * (N - 2) - 2 * b, "alpha(N-2) - 2beta", -a * a,
                                      "-alpha^2", c_strat_zero(a, b, N), f_strat_zero);
               },
               grid5x5, {"heis:1", "euclid:3"}});

  c.push_back({"strat_rellich_cs", "stratified Rellich inequality with the Euler term absorbed", {"alpha", "beta"},
               [](const GroupModel& m) { return need_stratified(m, 2); },
               [](const GroupModel& m, const InequalityParams& p) {
                 double N = m.first_stratum_dim(), a = p.alpha, b = p.beta;
                 return rellich_shape("strat_rellich_cs", m, p, a * (N - 2) - 2 * b - a * a,
                                      "alpha(N-2) - 2beta - alpha^2", std::nullopt, "", c_strat_zero(a, b, N),
                                      f_strat_zero);
               },
               grid5x5, {"heis:1", "euclid:3"}});

  c.push_back({"euclid_rellich_ab", "abelian case of the stratified Rellich inequality", {"alpha", "beta"},
               [](const GroupModel& m) { return need_euclid(m, 2); },
               [](const GroupModel& m, const InequalityParams& p) {
                 double n = m.ambient_dim(), a = p.alpha, b = p.beta;
                 return rellich_shape("euclid_rellich_ab", m, p, a * (n - 2) - 2 * b, "alpha(n-2) - 2beta", -a * a,
                                      "-alpha^2", c_strat_zero(a, b, n),
                                      "alpha(n-4)(n-2) - alpha^2(n-2) + 2beta(4-n) - beta^2 + alpha beta(n-2)");
               },
               grid5x5, {"euclid:3", "euclid:2"}});

  c.push_back({"hardy_strat", "horizontal Hardy inequality with constant ((N-2)/2)^2", {},
               [](const GroupModel& m) { return need_stratified(m, 3); },
               [](const GroupModel& m, const InequalityParams& p) {
                 auto o = ops_for(m);
                 double N = m.first_stratum_dim();
                 auto inst = make("hardy_strat", m, p, {});
                 inst.lhs.push_back({terms::grad_sq(o), 1.0, "1"});
                 inst.rhs.push_back({terms::f_r2(), (N - 2) * (N - 2) / 4, "((N-2)/2)^2"});
                 return inst;
               },
               single, {"euclid:3"}});

  c.push_back({"refined_hardy_strat", "refined Hardy inequality with the horizontal Euler operator", {},
               [](const GroupModel& m) { return need_stratified(m, 3); },
               [](const GroupModel& m, const InequalityParams& p) {
                 auto o = ops_for(m);
                 double N = m.first_stratum_dim();
                 auto inst = make("refined_hardy_strat", m, p, {});
                 inst.lhs.push_back({terms::euler_r2(o), 1.0, "1"});
                 inst.rhs.push_back({terms::f_r2(), (N - 2) * (N - 2) / 4, "((N-2)/2)^2"});
                 return inst;
               },
               single, {"euclid:3"}});

  auto heis = [](const std::string& id, bool star, bool reduced, bool rewrite) {
    return [id, star, reduced, rewrite](const GroupModel& m, const InequalityParams& p) {
      auto o = ops_for(m);
      double N = m.first_stratum_dim(), a = p.alpha, b = p.beta;
      auto inst = make(id, m, p, {"alpha", "beta"});
      inst.lhs.push_back({terms::lap_sq(o), 1.0, "1"});
      if (!star) {
        if (reduced) {
          inst.rhs.push_back({terms::grad_r2(o), (N - a) * a - 2 * b, "(N-alpha)alpha - 2beta"});
          if (a * (a - 4) < 0) inst.inadmissible = "\xce\xb1(\xce\xb1\xe2\x88\x92" "4) < 0";
        } else {
          inst.rhs.push_back({terms::grad_r2(o), (N - 4) * a - 2 * b, "(N-4)alpha - 2beta"});
          inst.rhs.push_back({terms::euler_r4(o), -a * (a - 4), "-alpha(alpha-4)"});
        }
        inst.rhs.push_back({terms::f_r4(), b * ((N - 4) * (a - 2) - b), "beta((N-4)(alpha-2) - beta)"});
      } else {
        if (reduced) {
          inst.rhs.push_back({terms::grad_r2(o), -2 * b + a * (N - a) - 4 * a, "-2beta + alpha(N-alpha) - 4alpha"});
          if (a * (a + 4) < 0) inst.inadmissible = "\xce\xb1(\xce\xb1+4) < 0";
        } else {
          inst.rhs.push_back({terms::grad_r2(o), N * a - 2 * b, "N alpha - 2beta"});
          inst.rhs.push_back({terms::euler_r4(o), -a * (a + 4), "-alpha(alpha+4)"});
        }
        inst.rhs.push_back({terms::f_r4(), c_tstar_zero(a, b, N), f_tstar_zero});
      }
      if (rewrite)
        add_rewrite_tail(inst, o, a, star ? -1 : 1);
      else
        add_heis_tail(inst, o, a, star ? -1 : 1);
      return inst;
    };
  };
  c.push_back({"heis_1", "Heisenberg Rellich inequality from T+T", {"alpha", "beta"}, need_heis,
               heis("heis_1", false, false, false), grid5x5, {"heis:1"}});
  c.push_back({"heis_11", "Heisenberg Rellich inequality from T T+", {"alpha", "beta"}, need_heis,
               heis("heis_11", true, false, false), grid5x5, {"heis:1"}});
  c.push_back({"heis_2", "Heisenberg Rellich inequality without the Euler term, alpha(alpha-4) >= 0",
               {"alpha", "beta"}, need_heis, heis("heis_2", false, true, false),
               [](const GroupModel&) { return ab_grid({-2, -1, 0, 4, 5}, five); }, {"heis:1"}});
  c.push_back({"heis_22", "Heisenberg Rellich inequality without the Euler term, alpha(alpha+4) >= 0",
               {"alpha", "beta"}, need_heis, heis("heis_22", true, true, false),
               [](const GroupModel&) { return ab_grid({-5, -4, 0, 1, 2}, five); }, {"heis:1"}});
  c.push_back({"heis_1_rewrite", "Heisenberg Rellich inequality from T+T, Z-T term rewritten", {"alpha", "beta"},
               need_heis, heis("heis_1_rewrite", false, false, true), grid5x5, {"heis:1"}});
  c.push_back({"heis_11_rewrite", "Heisenberg Rellich inequality from T T+, Z-T term rewritten", {"alpha", "beta"},
               need_heis, heis("heis_11_rewrite", true, false, true), grid5x5, {"heis:1"}});
  return c;
}

}  // namespace

const std::vector<InequalityEntry>& inequality_catalog() {
  static const std::vector<InequalityEntry> c = build_catalog();
  return c;
}

const InequalityEntry& inequality_entry(const std::string& id) {
  for (const auto& e : inequality_catalog())
    if (e.id == id) return e;
  throw std::invalid_argument("unknown inequality id: " + id);
}

InequalityInstance build_instance(const std::string& id, const GroupModel& m, const InequalityParams& p) {
  const auto& e = inequality_entry(id);
  if (auto why = e.unsupported(m)) throw std::invalid_argument(id + " on " + m.name() + ": " + *why);
  auto inst = e.build(m, p);
  if (inst.inadmissible) throw Inadmissible("inadmissible: " + *inst.inadmissible);
  return inst;
}

// ---------------------------------------------------------------- integral identities

nlohmann::json IntegralCheckReport::to_json() const {
  auto c = [](std::complex<double> z) { return nlohmann::json{z.real(), z.imag()}; };
  nlohmann::json j = {{"id", id},           {"model", model}, {"field", field},
                      {"params", params},   {"lhs", c(lhs)},  {"rhs", c(rhs)},
                      {"err", err},         {"kind", inequality ? "inequality" : "equality"},
                      {"verdict", pass ? "pass" : "fail"}};
  if (!note.empty()) j["note"] = note;
  return j;
}

namespace {

Number as_number(double v) {
  if (v == std::floor(v) && std::abs(v) < 1e9) return Number(static_cast<int>(v));
  return Number::real(v);
}

std::vector<IntegralCheck> build_checks() {
  using Terms = std::vector<WeightedTerm>;
  using Sides = std::pair<Terms, Terms>;
  std::vector<IntegralCheck> c;
  auto strat2 = [](const GroupModel& m) { return need_stratified(m, 2); };
  auto r = [](int k) { return RadialWeight::stratum_power(k); };
  std::vector<InequalityParams> ab_defaults = ab_grid({1}, {0});
  for (auto p : ab_grid({0}, {1})) ab_defaults.push_back(p);
  for (auto p : ab_grid({2}, {-1})) ab_defaults.push_back(p);

  c.push_back({"ibp_grad_r2", "int conj(f) Lf/|x'|^2 = 2 int conj(f) Ef/|x'|^4 - int |grad_H f|^2/|x'|^2", false,
               false, strat2,
               [r](const GroupModel& m, const InequalityParams&) {
                 auto o = ops_for(m);
                 return Sides{{{FunctionalTerm::inner("<Lf, f>_{|x'|^-2}", o.L, nullptr, r(-2)), 1, "1"}},
                              {{FunctionalTerm::inner("<Ef, f>_{|x'|^-4}", o.E, nullptr, r(-4)), 2, "2"},
                               {terms::grad_r2(o), -1, "-1"}}};
               },
               {InequalityParams{}}, {}});

  c.push_back({"ibp_double_sum_r4", "sum_jk int conj(f) x_j x_k X_j X_k f/|x'|^4 = -(N-3)<Ef,f> - ||Ef/|x'|^2||^2",
               false, false, strat2,
               [r](const GroupModel& m, const InequalityParams&) {
                 auto o = ops_for(m);
                 double N = m.first_stratum_dim();
                 return Sides{{{FunctionalTerm::inner("<Sf, f>_{|x'|^-4}", o.S, nullptr, r(-4)), 1, "1"}},
                              {{FunctionalTerm::inner("<Ef, f>_{|x'|^-4}", o.E, nullptr, r(-4)), -(N - 3), "-(N-3)"},
                               {terms::euler_r4(o), -1, "-1"}}};
               },
               {InequalityParams{}}, {}});

  c.push_back({"ibp_double_sum_r2", "sum_jk int conj(f) x_j x_k X_j X_k f/|x'|^2 = -(N-1)<Ef,f> - ||Ef/|x'|||^2",
               false, false, strat2,
               [r](const GroupModel& m, const InequalityParams&) {
                 auto o = ops_for(m);
                 double N = m.first_stratum_dim();
                 return Sides{{{FunctionalTerm::inner("<Sf, f>_{|x'|^-2}", o.S, nullptr, r(-2)), 1, "1"}},
                              {{FunctionalTerm::inner("<Ef, f>_{|x'|^-2}", o.E, nullptr, r(-2)), -(N - 1), "-(N-1)"},
                               {terms::euler_r2(o), -1, "-1"}}};
               },
               {InequalityParams{}}, {}});

  c.push_back({"real_term", "(Zf/|x'|, Tf/|x'|) = -sum_j int log|x'|^2 Re(d_yj f conj(d_t d_xj f))", false, false,
               need_heis,
               [r](const GroupModel& m, const InequalityParams&) {
                 auto o = ops_for(m);
                 FunctionalTerm rt{"sum_j <d_yj f, d_t d_xj f>_{log|x'|^2}", {}, RadialWeight::log_stratum_sq()};
                 for (int j = 0; j < m.heisenberg_n(); ++j)
                   rt.pairs.push_back({op::partial(m.y_index(j)),
                                       op::compose({op::partial(m.t_index()), op::partial(m.x_index(j))})});
                 return Sides{{{FunctionalTerm::inner("(Zf, Tf)_{|x'|^-2}", o.Z, o.T, r(-2)), 1, "1"}},
                              {{rt, -1, "-1"}}};
               },
               {InequalityParams{}}, {}});

  c.push_back({"zt_integration", "int conj(f) ZTf/|x'|^2 = -(Zf/|x'|, Tf/|x'|)", false, false, need_heis,
               [r](const GroupModel& m, const InequalityParams&) {
                 auto o = ops_for(m);
                 return Sides{{{FunctionalTerm::inner("<ZTf, f>_{|x'|^-2}", op::compose({o.Z, o.T}), nullptr, r(-2)),
                                1, "1"}},
                              {{FunctionalTerm::inner("(Zf, Tf)_{|x'|^-2}", o.Z, o.T, r(-2)), -1, "-1"}}};
               },
               {InequalityParams{}}, {}});

  c.push_back({"lap_final", "int conj(f) ZTf/|x'|^2 = (Lf/|x'|, f/|x'|) - (Delta' f/|x'|, f/|x'|) + ||Tf||^2/4", false,
               false, need_heis,
               [r](const GroupModel& m, const InequalityParams&) {
                 auto o = ops_for(m);
                 return Sides{{{FunctionalTerm::inner("<ZTf, f>_{|x'|^-2}", op::compose({o.Z, o.T}), nullptr, r(-2)),
                                1, "1"}},
                              {{FunctionalTerm::inner("<Lf, f>_{|x'|^-2}", o.L, nullptr, r(-2)), 1, "1"},
                               {FunctionalTerm::inner("<Delta' f, f>_{|x'|^-2}", o.D, nullptr, r(-2)), -1, "-1"},
                               {terms::t_sq(o), 0.25, "1/4"}}};
               },
               {InequalityParams{}}, {}});

  c.push_back({"adjoint_t_ab", "<T_ab f, g> = <f, T+_ab g>", false, true, strat2,
               [](const GroupModel& m, const InequalityParams& p) {
                 auto [t, tp] = factorization_pair(m, as_number(p.alpha), as_number(p.beta));
                 return Sides{{{FunctionalTerm::inner("<T_ab f, g>", t, nullptr, RadialWeight::one()), 1, "1"}},
                              {{FunctionalTerm::inner("<f, T+_ab g>", nullptr, tp, RadialWeight::one()), 1, "1"}}};
               },
               ab_defaults, {"alpha", "beta"}});

  c.push_back({"hardy_factorization", "||(grad_H + alpha x'/|x'|^2) f||^2 = ||grad_H f||^2 + alpha(alpha+2-N)||f/|x'|||^2",
               false, false, strat2,
               [](const GroupModel& m, const InequalityParams& p) {
                 auto o = ops_for(m);
                 double N = m.first_stratum_dim(), a = p.alpha;
                 std::vector<Op> comps;
                 for (int j = 0; j < m.first_stratum_dim(); ++j)
                   comps.push_back(op::sum({o.grad[j], op::compose({op::scale(as_number(a)), op::mul_stratum_norm_pow(-2),
                                                                    op::mul_coord(stratum_coord(m, j))})}));
                 return Sides{{{FunctionalTerm::l2("||T~_alpha f||^2", comps, RadialWeight::one()), 1, "1"}},
                              {{terms::grad_sq(o), 1, "1"}, {terms::f_r2(), a * (a + 2 - N), "alpha(alpha+2-N)"}}};
               },
               alpha_rows({0.5, 1, -1}, {InequalityParams{}}), {"alpha"}});

  c.push_back({"refined_factorization", "||(x'.grad_H + alpha) f/|x'|||^2 = ||Ef/|x'|||^2 + alpha(alpha+2-N)||f/|x'|||^2",
               false, false, strat2,
               [](const GroupModel& m, const InequalityParams& p) {
                 auto o = ops_for(m);
                 double N = m.first_stratum_dim(), a = p.alpha;
                 Op th = op::sum({o.E, op::scale(as_number(a))});
                 return Sides{{{FunctionalTerm::l2("||T^_alpha f||^2", {th}, RadialWeight::stratum_power(-2)), 1, "1"}},
                              {{terms::euler_r2(o), 1, "1"}, {terms::f_r2(), a * (a + 2 - N), "alpha(alpha+2-N)"}}};
               },
               alpha_rows({0.5, 1, -1}, {InequalityParams{}}), {"alpha"}});

  c.push_back({"cauchy_schwarz", "||grad_H f/|x'|||^2 >= ||x'.grad_H f/|x'|^2||^2", true, false, strat2,
               [](const GroupModel& m, const InequalityParams&) {
                 auto o = ops_for(m);
                 return Sides{{{terms::grad_r2(o), 1, "1"}}, {{terms::euler_r4(o), 1, "1"}}};
               },
               {InequalityParams{}}, {}});

  c.push_back({"refinement_dominance", "||grad_H f||^2 >= ||x'.grad_H f/|x'|||^2", true, false, strat2,
               [](const GroupModel& m, const InequalityParams&) {
                 auto o = ops_for(m);
                 return Sides{{{terms::grad_sq(o), 1, "1"}}, {{terms::euler_r2(o), 1, "1"}}};
               },
               {InequalityParams{}}, {}});
  return c;
}

}  // namespace

const std::vector<IntegralCheck>& integral_check_catalog() {
  static const std::vector<IntegralCheck> c = build_checks();
  return c;
}

const IntegralCheck& integral_check(const std::string& id) {
  for (const auto& c : integral_check_catalog())
    if (c.id == id) return c;
  throw std::invalid_argument("unknown integral check id: " + id);
}

IntegralCheckReport run_integral_check(const IntegralCheck& c, const GroupModel& m, const InequalityParams& p,
                                       const ScalarField& f, const ScalarField& g, const QuadratureSpec& spec,
                                       std::optional<double> err_cap) {
  return run_integral_checks({{&c, p}}, m, f, g, spec, err_cap).front();
}

std::vector<IntegralCheckReport> run_integral_checks(
    const std::vector<std::pair<const IntegralCheck*, InequalityParams>>& items, const GroupModel& m,
    const ScalarField& f, const ScalarField& g, const QuadratureSpec& spec, std::optional<double> err_cap) {
  if (items.empty()) return {};
  const bool two = items.front().first->two_fields;
  for (const auto& [c, p] : items) {
    if (c->two_fields != two) throw std::invalid_argument("cannot batch one- and two-field checks");
    if (auto why = c->unsupported(m)) throw std::invalid_argument(c->id + " on " + m.name() + ": " + *why);
  }
  using Sides = std::pair<std::vector<WeightedTerm>, std::vector<WeightedTerm>>;
  std::vector<Sides> built;
  std::vector<FunctionalTerm> terms;
  std::map<std::string, int> where;
  for (const auto& [c, p] : items) {
    built.push_back(c->build(m, p));
    for (const auto* side : {&built.back().first, &built.back().second})
      for (const auto& w : *side) {
        auto k = w.term.key();
        if (!where.count(k)) {
          terms.push_back(w.term);
          where[k] = static_cast<int>(terms.size()) - 1;
        }
      }
  }
  auto vals = evaluate_terms(terms, f, two ? g : f, spec, err_cap);
  std::vector<IntegralCheckReport> out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    const IntegralCheck& c = *items[i].first;
    IntegralCheckReport r;
    r.id = c.id;
    r.model = m.name();
    r.field = two ? f.label() + " ; " + g.label() : f.label();
    r.params = items[i].second.to_json(c.param_names);
    r.inequality = c.inequality;
    const bool real_rhs = c.id == "real_term";  // the right side is a real part by definition
    auto add = [&](const std::vector<WeightedTerm>& ws, std::complex<double>& acc, bool real_only) {
      for (const auto& w : ws) {
        const auto& q = vals[where.at(w.term.key())];
        acc += w.coeff * (real_only ? std::complex<double>(q.value.real(), 0) : q.value);
        r.err += std::abs(w.coeff) * q.err_estimate;
        r.scale += std::abs(w.coeff) * std::abs(q.value);
      }
    };
    add(built[i].first, r.lhs, false);
    add(built[i].second, r.rhs, real_rhs);
    double tol = std::max(10 * r.err, identity_rounding_floor * r.scale);
    if (c.inequality) {
      r.pass = r.lhs.real() - r.rhs.real() >= -tol;
    } else if (real_rhs) {
      r.pass = std::abs(r.lhs.real() - r.rhs.real()) <= tol && std::abs(r.lhs.imag()) <= tol;
      r.note = "imaginary part of (Zf/|x'|, Tf/|x'|) = " + fmt(r.lhs.imag());
    } else {
      r.pass = std::abs(r.lhs - r.rhs) <= tol;
    }
    out.push_back(std::move(r));
  }
  return out;
}

// ---------------------------------------------------------------- reductions

nlohmann::json ReductionReport::to_json() const {
  return {{"id", id},           {"model", model},     {"field", field},   {"params", params},
          {"lhs_from", lhs_from}, {"lhs_to", lhs_to}, {"rhs_from", rhs_from}, {"rhs_to", rhs_to},
          {"err", err},         {"verdict", pass ? "pass" : "fail"}};
}

std::vector<std::string> reduction_ids() {
  return {"hom_power->hom_weighted_hardy", "hom_log_critical_pre->hom_critical", "hom_log->hom_log_critical_pre",
          "hom_fac1->hom_power", "hom_fac1->hardy_euclid"};
}

ReductionReport check_reduction(const std::string& id, const GroupModel& m, const ScalarField& f,
                                const QuadratureSpec& spec, double a) {
  double Q = q_of(m);
  InequalityParams from, to;
  std::string from_id, to_id;
  bool compare_lhs = true;
  if (id == "hom_power->hom_weighted_hardy") {
    from_id = "hom_power";
    to_id = "hom_weighted_hardy";
    from = abcd(a, a + 1, 0, 0);
    from.alpha = (Q - 2 * a - 2) / 2;
    to = abcd(a, 0, 0, 0);
  } else if (id == "hom_log_critical_pre->hom_critical") {
    from_id = "hom_log_critical_pre";
    to_id = "hom_critical";
    from.alpha = 0.5;
  } else if (id == "hom_log->hom_log_critical_pre") {
    from_id = "hom_log";
    to_id = "hom_log_critical_pre";
    from = abcd((Q - 2) / 2, Q / 2, 1, 0);
    from.alpha = 0.3;
    to.alpha = 0.3;
  } else if (id == "hom_fac1->hom_power") {
    from_id = "hom_fac1";
    to_id = "hom_power";
    from = abcd(0.25, 1, 0, 0);
    from.alpha = 0.7;
    to = from;
  } else if (id == "hom_fac1->hardy_euclid") {
    from_id = "hom_fac1";
    to_id = "hardy_euclid";
    from = abcd(0, 1, 0, 0);
    from.alpha = (Q - 2) / 2;
    compare_lhs = false;  // |Rf| <= |grad f|, equal only for radial f
  } else {
    throw std::invalid_argument("unknown reduction id: " + id);
  }
  auto r_from = build_instance(from_id, m, from);
  auto r_to = build_instance(to_id, m, to);
  auto reps = evaluate_many({r_from, r_to}, f, spec);
  ReductionReport r;
  r.id = id;
  r.model = m.name();
  r.field = f.label();
  r.params = from.to_json(r_from.param_names);
  r.lhs_from = reps[0].lhs;
  r.lhs_to = reps[1].lhs;
  r.rhs_from = reps[0].rhs;
  r.rhs_to = reps[1].rhs;
  r.err = reps[0].total_err + reps[1].total_err;
  double tol = std::max(10 * r.err, identity_rounding_floor * (reps[0].scale + reps[1].scale));
  r.pass = std::abs(r.rhs_from - r.rhs_to) <= tol && (!compare_lhs || std::abs(r.lhs_from - r.lhs_to) <= tol);
  return r;
}

}  // namespace carnot_hardy
