#include "cli.hpp"

#include "carnot_hardy/fields.hpp"
#include "carnot_hardy/group_models.hpp"
#include "carnot_hardy/inequalities.hpp"
#include "carnot_hardy/opalgebra.hpp"
#include "carnot_hardy/quadrature.hpp"
#include "carnot_hardy/sharpness.hpp"

#include "CLI11.hpp"
#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>

namespace carnot_hardy::cli {

namespace {

using json = nlohmann::json;

struct Options {
  std::string id;
  std::string model;
  std::string field = "radial";
  std::string format = "json";
  std::string output;
  std::optional<std::string> alpha, beta;
  std::optional<std::string> a, b;
  std::optional<int> c, d, gamma;
  std::vector<double> alphas, betas;
  int nodes = 0;  // 0: per-model default
  int refine = 2;
  std::optional<double> err_cap;
  int trials = 20;
  std::uint64_t seed = 0;
  int degree = 6;
  int budget = 60;
};

std::string fmt_num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string utc_now() {
  std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return q + "\"";
}

// Collects results in emission order; every result carries a verdict.
class Report {
 public:
  explicit Report(std::string command) : command_(std::move(command)) {}

  void add(const std::string& kind, json result, bool pass) {
    result["kind"] = kind;
    failures_ += pass ? 0 : 1;
    results_.push_back(std::move(result));
  }
  void touch(const std::string& catalog, const std::string& id) { coverage_[catalog].insert(id); }
  void set_config(json c) { config_ = std::move(c); }
  void set_error(std::string e) { error_ = std::move(e); }
  int failures() const { return failures_; }

  std::string json_text() const {
    json j;
    j["schema"] = report_schema_version();
    j["generated_at"] = utc_now();
    j["command"] = command_;
    j["config"] = config_;
    j["results"] = results_;
    json cov = json::object();
    for (const auto& [k, ids] : coverage_) cov[k] = json(std::vector<std::string>(ids.begin(), ids.end()));
    if (!cov.empty()) j["coverage"] = cov;
    j["summary"] = {{"results", results_.size()}, {"failures", failures_}, {"pass", failures_ == 0 && error_.empty()}};
    if (!error_.empty()) j["error"] = error_;
    // generated_at is kept on its own line so determinism checks can drop it
    return j.dump(2) + "\n";
  }

  std::string csv_text() const {
    std::ostringstream o;
    o << csv_header() << "\n";
    for (const auto& r : results_) {
      auto s = [&](const char* k) -> std::string {
        if (!r.contains(k)) return "";
        const auto& v = r[k];
        if (v.is_string()) return v.get<std::string>();
        if (v.is_number()) return fmt_num(v.get<double>());
        return v.dump();
      };
      std::string kind = r["kind"];
      std::string id = r.contains("id") ? s("id") : s("problem_id");
      std::string params = r.contains("params") ? r["params"].dump() : r.contains("best_params") ? r["best_params"].dump() : "";
      std::string lhs, rhs, deficit, err, verdict;
      if (kind == "identity" || kind == "commutator" || kind == "negative_control") {
        if (r.contains("witness")) {
          lhs = r["witness"]["lhs_value"];
          rhs = r["witness"]["rhs_value"];
        }
        verdict = r["verdict"];
      } else if (kind == "sharpness") {
        lhs = s("best_quotient");
        rhs = s("target");
        deficit = s("gap");
        err = s("best_err");
        verdict = s("verdict");
      } else if (kind == "inequality") {
        lhs = s("lhs");
        rhs = s("rhs");
        deficit = s("deficit");
        err = s("total_err");
        verdict = s("verdict");
      } else if (kind == "integral_check") {
        lhs = fmt_num(r["lhs"][0].get<double>());
        rhs = fmt_num(r["rhs"][0].get<double>());
        deficit = fmt_num(r["lhs"][0].get<double>() - r["rhs"][0].get<double>());
        err = s("err");
        verdict = s("verdict");
      } else if (kind == "reduction") {
        lhs = s("rhs_from");
        rhs = s("rhs_to");
        deficit = fmt_num(r["rhs_from"].get<double>() - r["rhs_to"].get<double>());
        err = s("err");
        verdict = s("verdict");
      } else if (kind == "inadmissible") {
        verdict = "inadmissible";
      }
      o << kind << "," << csv_quote(id) << "," << csv_quote(s("model")) << "," << csv_quote(s("field")) << ","
        << csv_quote(params) << "," << lhs << "," << rhs << "," << deficit << "," << err << "," << verdict << "\n";
    }
    return o.str();
  }

 private:
  std::string command_;
  json config_ = json::object();
  std::vector<json> results_;
  std::map<std::string, std::set<std::string>> coverage_;
  int failures_ = 0;
  std::string error_;
};

// ---------------------------------------------------------------- helpers

ScalarField field_preset(const std::string& spec, const GroupModel& m) {
  if (spec == "radial" || spec == "nonradial" || spec == "complex") {
    for (auto& nf : default_fields(m))
      if (nf.name == spec) return nf.field;
  }
  auto colon = spec.find(':');
  if (colon == std::string::npos) throw std::invalid_argument("unknown field preset: " + spec);
  std::string kind = spec.substr(0, colon);
  std::string rest = spec.substr(colon + 1);
  std::string tpart;
  if (auto star = rest.find("*tbump:"); star != std::string::npos) {
    tpart = rest.substr(star + 7);
    rest = rest.substr(0, star);
  }
  auto pair_of = [&](const std::string& s) {
    auto comma = s.find(',');
    if (comma == std::string::npos) throw std::invalid_argument("field preset needs two parameters: " + spec);
    return std::pair{Number::parse(s.substr(0, comma)).value(), Number::parse(s.substr(comma + 1)).value()};
  };
  auto [p, q] = pair_of(rest);
  if (kind == "hardy") return hardy_family_member(m, p, q);
  if (kind == "qbump") {
    if (m.is_heisenberg()) throw std::invalid_argument("qbump is for Euclidean models");
    return quasi_radial_bump(m, p, q);
  }
  if (kind == "logbump") {
    if (!m.is_heisenberg()) {
      if (!tpart.empty()) throw std::invalid_argument("*tbump applies to Heisenberg models only");
      return m.is_isotropic_euclidean() ? log_radial_bump(m, p, q) : quasi_radial_bump(m, p, q);
    }
    auto [tc, tw] = tpart.empty() ? std::pair{0.0, 1.5} : pair_of(tpart);
    return tensor_with_t_bump(log_radial_bump(GroupModel::euclidean(2 * m.heisenberg_n()), p, q), t_bump(tc, tw));
  }
  throw std::invalid_argument("unknown field preset: " + spec);
}

QuadratureSpec quad_for(const ScalarField& f, const Options& o) {
  auto s = default_quadrature(f, o.nodes > 0 ? std::optional<int>(o.nodes) : std::nullopt);
  s.refinement_factor = o.refine;
  s.validate();
  return s;
}

std::optional<double> cap(const Options& o) { return o.err_cap; }

InequalityParams params_from(const Options& o) {
  InequalityParams p;
  if (o.alpha) p.alpha = Number::parse(*o.alpha).value();
  if (o.beta) p.beta = Number::parse(*o.beta).value();
  if (o.a) p.a = Number::parse(*o.a).value();
  if (o.b) p.b = Number::parse(*o.b).value();
  if (o.c) p.c = *o.c;
  if (o.d) p.d = *o.d;
  return p;
}

IdentityParams identity_params_from(const Options& o, const IdentityParams& base) {
  IdentityParams p = base;
  if (o.alpha) p.alpha = Number::parse(*o.alpha);
  if (o.beta) p.beta = Number::parse(*o.beta);
  if (o.gamma) p.gamma = *o.gamma;
  return p;
}

json verdict(json j, bool pass) {
  j["verdict"] = pass ? "pass" : "fail";
  return j;
}

const std::vector<std::string>& symbolic_models() {
  static const std::vector<std::string> m = {"heis:1", "heis:2", "euclid:2", "euclid:3"};
  return m;
}

// ---------------------------------------------------------------- commands

void run_identities(Report& rep, const GroupModel& m, const std::vector<const IdentityCase*>& cases, const Options& o,
                    bool use_flags) {
  for (const auto* c : cases) {
    rep.touch("identities", c->id);
    std::vector<IdentityParams> ps = c->default_params;
    if (ps.empty()) ps.push_back(IdentityParams{});
    if (use_flags) ps = {identity_params_from(o, ps.front())};
    for (const auto& p : ps) {
      if (c->reject) {
        if (auto why = c->reject(m, p)) {
          if (use_flags) throw std::invalid_argument(c->id + " on " + m.name() + ": " + *why);
          continue;
        }
      }
      auto r = check_identity(*c, m, p, o.trials, o.seed, o.degree);
      rep.add("identity", verdict(r.to_json(), r.pass), r.pass);
    }
  }
}

void run_negative_control(Report& rep, const GroupModel& m, const Options& o) {
  IdentityParams p;
  p.alpha = 1;
  auto r = check_identity(heis_tt_without_commutator(), m, p, o.trials, o.seed, o.degree);
  auto j = r.to_json();
  j["expected"] = "fail";
  // the control passes when the mutilated identity is refuted
  rep.add("negative_control", verdict(j, !r.pass), !r.pass);
}

void run_commutators(Report& rep, const GroupModel& m, const Options& o) {
  for (const auto& r : check_commutation_relations(m, o.trials, o.seed)) {
    rep.touch("commutators", m.name());
    rep.add("commutator", verdict(r.to_json(), r.pass), r.pass);
  }
}

void add_sweep(Report& rep, const SweepResult& s) {
  for (const auto& cell : s.cells) {
    if (cell.report) {
      rep.add("inequality", cell.report->to_json(), cell.report->pass);
    } else {
      json j = {{"id", s.id},
                {"model", s.model},
                {"field", s.field},
                {"params", {{"alpha", cell.params.alpha}, {"beta", cell.params.beta}}},
                {"reason", "inadmissible: " + *cell.inadmissible},
                {"verdict", "inadmissible"}};
      rep.add("inadmissible", j, true);
    }
  }
}

void cmd_symbolic(Report& rep, const Options& o) {
  GroupModel m = GroupModel::parse(o.model.empty() ? "heis:1" : o.model);
  std::vector<const IdentityCase*> cases;
  if (o.id.empty() || o.id == "all") {
    for (const auto& c : identity_catalog()) cases.push_back(&c);
    run_identities(rep, m, cases, o, false);
    if (m.is_heisenberg()) {
      run_negative_control(rep, m, o);
      run_commutators(rep, m, o);
    }
    return;
  }
  if (o.id == "commutators") return run_commutators(rep, m, o);
  if (o.id == "heis_tt_without_commutator") return run_negative_control(rep, m, o);
  // the stripped identity checked as if it were true; reports a failure
  static const IdentityCase stripped = heis_tt_without_commutator();
  cases.push_back(o.id == stripped.id ? &stripped : &identity_case(o.id));
  run_identities(rep, m, cases, o, true);
}

bool is_reduction(const std::string& id) {
  for (const auto& r : reduction_ids())
    if (r == id) return true;
  return false;
}

bool is_integral_check(const std::string& id) {
  for (const auto& c : integral_check_catalog())
    if (c.id == id) return true;
  return false;
}

void cmd_verify(Report& rep, const Options& o) {
  if (o.id.empty()) throw std::invalid_argument("verify needs --id");
  if (is_reduction(o.id)) {
    GroupModel m = GroupModel::parse(o.model.empty() ? "euclid:3" : o.model);
    ScalarField f = field_preset(o.field, m);
    auto r = check_reduction(o.id, m, f, quad_for(f, o), o.a ? Number::parse(*o.a).value() : 0.25);
    rep.add("reduction", r.to_json(), r.pass);
    return;
  }
  if (is_integral_check(o.id)) {
    const auto& c = integral_check(o.id);
    GroupModel m = GroupModel::parse(o.model.empty() ? "heis:1" : o.model);
    ScalarField f = field_preset(o.field, m);
    ScalarField g = field_preset(o.field == "nonradial" ? "complex" : "nonradial", m);
    std::vector<InequalityParams> ps = c.default_params;
    if (o.alpha || o.beta) ps = {params_from(o)};
    for (const auto& p : ps) {
      auto r = run_integral_check(c, m, p, f, g, quad_for(f, o), cap(o));
      rep.add("integral_check", r.to_json(), r.pass);
    }
    return;
  }
  const auto& e = inequality_entry(o.id);
  GroupModel m = GroupModel::parse(o.model.empty() ? e.default_models.front() : o.model);
  auto inst = build_instance(o.id, m, params_from(o));
  ScalarField f = field_preset(o.field, m);
  auto r = evaluate(inst, f, quad_for(f, o), cap(o));
  rep.add("inequality", r.to_json(), r.pass);
}

void cmd_sweep(Report& rep, const Options& o) {
  if (o.id.empty()) throw std::invalid_argument("sweep needs --id");
  const auto& e = inequality_entry(o.id);
  std::vector<std::string> models = o.model.empty() ? e.default_models : std::vector<std::string>{o.model};
  for (const auto& mn : models) {
    GroupModel m = GroupModel::parse(mn);
    auto grid = e.default_grid(m);
    if (!o.alphas.empty() || !o.betas.empty()) {
      grid = ab_grid(o.alphas.empty() ? std::vector<double>{0} : o.alphas,
                     o.betas.empty() ? std::vector<double>{0} : o.betas);
      auto base = params_from(o);
      for (auto& p : grid) {
        p.a = base.a;
        p.b = base.b;
        p.c = base.c;
        p.d = base.d;
      }
    }
    ScalarField f = field_preset(o.field, m);
    add_sweep(rep, sweep(o.id, m, grid, f, quad_for(f, o), cap(o)));
  }
}

void run_probe(Report& rep, const std::string& id, const Options& o) {
  rep.touch("sharpness", id);
  auto p = sharpness_problem(id);
  auto r = probe(p, o.budget);
  json j = r.to_json();
  j["model"] = p.model.name();
  bool pass = r.lower_bound_respected();
  j["verdict"] = pass ? "pass" : "fail";
  rep.add("sharpness", j, pass);
}

void cmd_sharpness(Report& rep, const Options& o) {
  if (o.id.empty() || o.id == "all") {
    for (const auto& id : sharpness_problem_ids()) run_probe(rep, id, o);
    return;
  }
  run_probe(rep, o.id, o);
}

void cmd_all(Report& rep, const Options& o) {
  // exact identities
  for (const auto& mn : symbolic_models()) {
    GroupModel m = GroupModel::parse(mn);
    std::vector<const IdentityCase*> cases;
    for (const auto& c : identity_catalog()) cases.push_back(&c);
    run_identities(rep, m, cases, o, false);
    if (m.is_heisenberg()) {
      run_negative_control(rep, m, o);
      run_commutators(rep, m, o);
    }
  }
  // deficits, one quadrature pass per sweep
  for (const auto& e : inequality_catalog()) {
    rep.touch("inequalities", e.id);
    for (const auto& mn : e.default_models) {
      GroupModel m = GroupModel::parse(mn);
      for (const auto& nf : default_fields(m)) add_sweep(rep, sweep(e.id, m, e.default_grid(m), nf.field, quad_for(nf.field, o), cap(o)));
    }
  }
  // integral identities, batched per (model, field)
  for (std::string mn : {"heis:1", "euclid:3", "euclid:2"}) {
    GroupModel m = GroupModel::parse(mn);
    auto fields = default_fields(m);
    std::vector<std::pair<const IntegralCheck*, InequalityParams>> one, two;
    for (const auto& c : integral_check_catalog()) {
      if (c.unsupported(m)) continue;
      rep.touch("integral_checks", c.id);
      for (const auto& p : c.default_params) (c.two_fields ? two : one).push_back({&c, p});
    }
    for (std::size_t i = 0; i < fields.size(); ++i) {
      const auto& f = fields[i].field;
      const auto& g = fields[(i + 1) % fields.size()].field;
      for (const auto& r : run_integral_checks(one, m, f, f, quad_for(f, o), cap(o)))
        rep.add("integral_check", r.to_json(), r.pass);
      for (const auto& r : run_integral_checks(two, m, f, g, quad_for(f, o), cap(o)))
        rep.add("integral_check", r.to_json(), r.pass);
    }
  }
  // parameter reductions
  for (const auto& id : reduction_ids()) {
    rep.touch("reductions", id);
    for (std::string mn : {"euclid:3", "aniso:1,2"}) {
      GroupModel m = GroupModel::parse(mn);
      if (id == "hom_fac1->hardy_euclid" && !m.is_isotropic_euclidean()) continue;
      for (const auto& nf : default_fields(m)) {
        auto r = check_reduction(id, m, nf.field, quad_for(nf.field, o), o.a ? Number::parse(*o.a).value() : 0.25);
        rep.add("reduction", r.to_json(), r.pass);
      }
    }
  }
  for (const auto& id : sharpness_problem_ids()) run_probe(rep, id, o);
}

json config_json(const std::string& command, const Options& o) {
  json j = {{"command", command}, {"id", o.id},         {"model", o.model},   {"field", o.field},
            {"nodes", o.nodes},   {"refine", o.refine}, {"trials", o.trials}, {"seed", o.seed},
            {"degree", o.degree}, {"budget", o.budget}, {"format", o.format}};
  if (o.alpha) j["alpha"] = *o.alpha;
  if (o.beta) j["beta"] = *o.beta;
  if (o.a) j["a"] = *o.a;
  if (o.b) j["b"] = *o.b;
  if (o.c) j["c"] = *o.c;
  if (o.d) j["d"] = *o.d;
  if (o.gamma) j["gamma"] = *o.gamma;
  if (o.err_cap) j["err_cap"] = *o.err_cap;
  if (!o.alphas.empty()) j["alphas"] = o.alphas;
  if (!o.betas.empty()) j["betas"] = o.betas;
  return j;
}

}  // namespace

std::string report_schema_version() { return "carnot-hardy-report/1"; }

std::string csv_header() { return "kind,id,model,field,params,lhs,rhs,deficit,err,verdict"; }

std::string strip_timestamp(const std::string& report) {
  std::istringstream in(report);
  std::string line, out;
  while (std::getline(in, line))
    if (line.find("\"generated_at\"") == std::string::npos) out += line + "\n";
  return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Numerical and exact checks of Hardy and Rellich inequalities on Euclidean and Heisenberg models",
               "carnot_hardy"};
  app.set_config("--config", "", "TOML/INI config file; command-line flags override it");
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  auto common = [&](CLI::App* s) {
    s->add_option("--id", o.id, "catalog id");
    s->add_option("--model", o.model, "euclid:N, aniso:w1,w2,..., heis:n");
    s->add_option("--field", o.field, "radial | nonradial | complex | logbump:r0,s[*tbump:c,w] | qbump:r0,s | hardy:eps,s");
    s->add_option("--alpha", o.alpha, "alpha (integer, p/q or decimal)");
    s->add_option("--beta", o.beta, "beta");
    s->add_option("--a", o.a, "weight exponent a (p/q or decimal)");
    s->add_option("--b", o.b, "weight exponent b");
    s->add_option("--c", o.c, "log exponent c");
    s->add_option("--d", o.d, "log exponent d");
    s->add_option("--gamma", o.gamma, "power gamma for the formula identities");
    s->add_option("--nodes", o.nodes, "Gauss-Legendre nodes per axis (0: model default)")->check(CLI::NonNegativeNumber);
    s->add_option("--refine", o.refine, "refinement factor for the error estimate")->check(CLI::Range(2, 8));
    s->add_option("--err-cap", o.err_cap, "fail with exit 3 when a term error estimate exceeds this");
    s->add_option("--trials", o.trials, "random trials per identity")->check(CLI::PositiveNumber);
    s->add_option("--seed", o.seed, "random seed");
    s->add_option("--degree", o.degree, "degree of random test polynomials")->check(CLI::Range(1, 12));
    s->add_option("--budget", o.budget, "evaluations per sharpness probe")->check(CLI::PositiveNumber);
    s->add_option("--alphas", o.alphas, "sweep alpha values")->delimiter(',');
    s->add_option("--betas", o.betas, "sweep beta values")->delimiter(',');
    s->add_option("--format", o.format, "json | csv")->check(CLI::IsMember({"json", "csv"}));
    s->add_option("--output,-o", o.output, "write the report here instead of stdout");
  };
  std::map<std::string, std::function<void(Report&, const Options&)>> commands = {
      {"symbolic", cmd_symbolic}, {"verify", cmd_verify}, {"sweep", cmd_sweep},
      {"sharpness", cmd_sharpness}, {"all", cmd_all}};
  std::vector<std::pair<std::string, CLI::App*>> subs;
  for (const auto& [name, help] : std::vector<std::pair<std::string, std::string>>{
           {"symbolic", "exact operator identities with random rational polynomials"},
           {"verify", "evaluate one inequality, integral identity or reduction"},
           {"sweep", "evaluate an inequality over a parameter grid"},
           {"sharpness", "probe the sharp constants with extremizing families"},
           {"all", "every catalog entry at default settings"}}) {
    auto* s = app.add_subcommand(name, help);
    common(s);
    subs.push_back({name, s});
  }

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return exit_pass;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return exit_usage;
  }
  std::string command;
  for (const auto& [name, s] : subs)
    if (s->parsed()) command = name;

  Report rep(command);
  rep.set_config(config_json(command, o));
  int code = exit_pass;
  try {
    commands.at(command)(rep, o);
    if (rep.failures() > 0) code = exit_math_failure;
  } catch (const QuadratureCapExceeded& e) {
    err << "quadrature cap exceeded: " << e.what() << "\n";
    rep.set_error(std::string("quadrature cap exceeded: ") + e.what());
    code = exit_quadrature_cap;
  } catch (const Inadmissible& e) {
    err << e.what() << "\n";
    return exit_usage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_usage;
  }

  std::string text = o.format == "csv" ? rep.csv_text() : rep.json_text();
  if (o.output.empty()) {
    out << text;
  } else {
    std::ofstream f(o.output, std::ios::binary);
    if (!f) {
      err << "error: cannot write " << o.output << "\n";
      return exit_usage;
    }
    f << text;
  }
  return code;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, out, err);
}

}  // namespace carnot_hardy::cli
