// One line per acceptance criterion; exit status 0 only when all pass.
#include "cli.hpp"

#include "carnot_hardy/inequalities.hpp"
#include "carnot_hardy/opalgebra.hpp"
#include "carnot_hardy/sharpness.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

using namespace carnot_hardy;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Criterion {
  int number;
  std::string name;
  double budget_s;
  std::function<Outcome()> body;
};

std::string fmt(const char* f, auto... v) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, v...);
  return buf;
}

Outcome symbolic_suite() {
  Outcome o;
  int checked = 0, failed = 0;
  for (const char* mn : {"heis:1", "heis:2", "euclid:2", "euclid:3"}) {
    auto m = GroupModel::parse(mn);
    for (const auto& c : identity_catalog()) {
      std::vector<IdentityParams> ps = c.default_params;
      if (ps.empty()) ps.push_back({});
      for (const auto& p : ps) {
        if (c.reject && c.reject(m, p)) continue;
        auto r = check_identity(c, m, p, 20, 0, 6);
        ++checked;
        if (!r.pass) {
          ++failed;
          o.detail += " " + c.id + "@" + mn;
        }
      }
    }
  }
  IdentityParams p;
  p.alpha = 1;
  bool control_refuted = true;
  for (const char* mn : {"heis:1", "heis:2"}) {
    auto r = check_identity(heis_tt_without_commutator(), GroupModel::parse(mn), p, 20, 0, 6);
    control_refuted = control_refuted && !r.pass;
  }
  o.pass = failed == 0 && control_refuted;
  o.detail = fmt("%d identity checks, %d failed, negative control %s", checked, failed,
                 control_refuted ? "refuted" : "NOT refuted") +
             o.detail;
  return o;
}

Outcome commutators() {
  Outcome o;
  int n_checked = 0;
  for (int n : {1, 2})
    for (const auto& r : check_commutation_relations(GroupModel::heisenberg(n), 20, 0)) {
      ++n_checked;
      if (!r.pass) {
        o.pass = false;
        o.detail += " " + r.id;
      }
    }
  o.detail = fmt("%d brackets on H1, H2", n_checked) + o.detail;
  return o;
}

Outcome deficit_suite() {
  Outcome o;
  int cells = 0, inadmissible = 0, failed = 0, entries = 0;
  double worst = INFINITY;
  std::string worst_id;
  for (const auto& e : inequality_catalog()) {
    ++entries;
    for (const auto& mn : e.default_models) {
      auto m = GroupModel::parse(mn);
      for (const auto& nf : default_fields(m)) {
        auto s = sweep(e.id, m, e.default_grid(m), nf.field, default_quadrature(nf.field));
        for (const auto& c : s.cells) {
          if (!c.report) {
            ++inadmissible;
            continue;
          }
          ++cells;
          const auto& r = *c.report;
          double margin = r.deficit + r.tolerance();
          double rel = margin / std::max(r.scale, 1e-300);
          if (rel < worst) worst = rel, worst_id = e.id + "@" + mn + "/" + nf.name;
          if (!(r.deficit >= -std::max(10 * r.total_err, 1e-8 * r.scale))) {
            ++failed;
            o.detail += " " + e.id + "@" + mn + "/" + nf.name;
          }
        }
      }
    }
  }
  o.pass = failed == 0;
  o.detail = fmt("%d entries, %d cells, %d inadmissible skipped, %d failed; tightest (deficit+tol)/scale %.3g at %s",
                 entries, cells, inadmissible, failed, worst, worst_id.c_str()) +
             o.detail;
  return o;
}

Outcome sharpness_probes() {
  Outcome o;
  struct Want {
    const char* id;
    double factor;
  };
  for (auto w : {Want{"hardy_euclid3", 1.05}, Want{"hardy_heis2", 1.05}, Want{"weighted_hardy_euclid3", 1.10},
                 Want{"critical_euclid3", 1.10}, Want{"refined_hardy_heis2", 1.05}}) {
    auto t0 = std::chrono::steady_clock::now();
    auto p = sharpness_problem(w.id);
    auto r = probe(p, 60);
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool ok = r.best_quotient <= w.factor * p.target && r.lower_bound_respected() && secs < 300;
    o.pass = o.pass && ok;
    o.detail += fmt("%s%s q=%.6f (<= %.6f) margin=%.3g %.1fs", o.detail.empty() ? "" : "; ", w.id, r.best_quotient,
                    w.factor * p.target, r.lower_bound_margin, secs);
  }
  return o;
}

Outcome reductions() {
  Outcome o;
  int n = 0;
  for (const char* id : {"hom_power->hom_weighted_hardy", "hom_log_critical_pre->hom_critical"})
    for (const char* mn : {"euclid:3", "aniso:1,2"}) {
      auto m = GroupModel::parse(mn);
      for (const auto& nf : default_fields(m)) {
        auto r = check_reduction(id, m, nf.field, default_quadrature(nf.field), 0.25);
        ++n;
        if (!r.pass) {
          o.pass = false;
          o.detail += fmt(" %s@%s/%s", id, mn, nf.name.c_str());
        }
      }
    }
  o.detail = fmt("%d reductions", n) + o.detail;
  return o;
}

Outcome ibp_checks() {
  Outcome o;
  int n = 0;
  double im_complex = 0, im_err = 0;
  for (const char* mn : {"heis:1", "euclid:3"}) {
    auto m = GroupModel::parse(mn);
    std::vector<std::pair<const IntegralCheck*, InequalityParams>> items;
    for (const char* id : {"ibp_grad_r2", "ibp_double_sum_r4", "ibp_double_sum_r2", "real_term"}) {
      const auto& c = integral_check(id);
      if (c.unsupported(m)) continue;
      items.push_back({&c, {}});
    }
    for (const auto& nf : default_fields(m)) {
      for (const auto& r : run_integral_checks(items, m, nf.field, nf.field, default_quadrature(nf.field))) {
        ++n;
        bool ok = r.pass;
        if (r.id == "real_term" && nf.field.is_complex() && m.is_heisenberg()) {
          im_complex = r.lhs.imag();
          im_err = r.err;
          ok = ok && std::abs(r.lhs.imag()) <= 10 * r.err;
        }
        if (!ok) {
          o.pass = false;
          o.detail += fmt(" %s@%s/%s", r.id.c_str(), mn, nf.name.c_str());
        }
      }
    }
  }
  o.detail = fmt("%d checks; complex real_term Im=%.3g, err=%.3g", n, im_complex, im_err) + o.detail;
  return o;
}

Outcome adjointness() {
  Outcome o;
  int n = 0;
  const auto& c = integral_check("adjoint_t_ab");
  std::vector<std::pair<const IntegralCheck*, InequalityParams>> items;
  for (auto [a, b] : {std::pair{1.0, 0.0}, std::pair{0.0, 1.0}, std::pair{2.0, -1.0}}) {
    InequalityParams p;
    p.alpha = a;
    p.beta = b;
    items.push_back({&c, p});
  }
  for (const char* mn : {"heis:1", "euclid:3"}) {
    auto m = GroupModel::parse(mn);
    auto fs = default_fields(m);
    for (std::size_t i = 0; i < fs.size(); ++i) {
      const auto& f = fs[i].field;
      const auto& g = fs[(i + 1) % fs.size()].field;
      for (const auto& r : run_integral_checks(items, m, f, g, default_quadrature(f))) {
        ++n;
        if (!r.pass) {
          o.pass = false;
          o.detail += fmt(" %s@%s/%zu", r.id.c_str(), mn, i);
        }
      }
    }
  }
  o.detail = fmt("%d (f,g,alpha,beta) cases", n) + o.detail;
  return o;
}

Outcome determinism() {
  std::vector<std::string> args{"all", "--nodes", "12", "--budget", "8"};
  std::ostringstream a, b, ea, eb;
  int ca = cli::run(args, a, ea);
  int cb = cli::run(args, b, eb);
  Outcome o;
  bool same = cli::strip_timestamp(a.str()) == cli::strip_timestamp(b.str());
  o.pass = same && ca == cb && ca == cli::exit_pass;
  o.detail = fmt("two `all --nodes 12 --budget 8` runs, exit %d/%d, %zu bytes, %s", ca, cb, a.str().size(),
                 same ? "identical modulo generated_at" : "DIFFER");
  return o;
}

}  // namespace

int main() {
  std::vector<Criterion> cs{
      {1, "symbolic identities", 60, symbolic_suite},
      {2, "commutation relations", 5, commutators},
      {3, "deficit suite", 600, deficit_suite},
      {4, "sharp-constant probes", 5 * 300, sharpness_probes},
      {5, "reduction identities", 60, reductions},
      {6, "integration by parts and real term", 120, ibp_checks},
      {7, "adjointness", 120, adjointness},
      {8, "report determinism", 600, determinism},
  };
  int failed = 0;
  for (const auto& c : cs) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.body();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool in_time = secs <= c.budget_s;
    bool pass = o.pass && in_time;
    failed += pass ? 0 : 1;
    std::printf("criterion %d %s: %s (%.1fs of %.0fs%s) %s\n", c.number, c.name.c_str(), pass ? "PASS" : "FAIL", secs,
                c.budget_s, in_time ? "" : ", over budget", o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
