#include "carnot_hardy/quadrature.hpp"

#include <boost/math/special_functions/legendre.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <mutex>
#include <numbers>
#include <thread>

namespace carnot_hardy {

const GaussLegendreRule& gauss_legendre(int p) {
  static std::mutex mu;
  static std::map<int, std::unique_ptr<GaussLegendreRule>> cache;
  if (p < 1 || p > 4096) throw std::invalid_argument("Gauss-Legendre order out of range");
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[p];
  if (!slot) {
    auto rule = std::make_unique<GaussLegendreRule>();
    auto zeros = boost::math::legendre_p_zeros<double>(p);  // nonnegative zeros, ascending
    std::vector<std::pair<double, double>> nw;
    for (double z : zeros) {
      double dp = boost::math::legendre_p_prime<double>(p, z);
      double w = 2.0 / ((1.0 - z * z) * dp * dp);
      nw.push_back({z, w});
      if (z != 0.0) nw.push_back({-z, w});
    }
    std::sort(nw.begin(), nw.end());
    for (auto& [n, w] : nw) {
      rule->nodes.push_back(n);
      rule->weights.push_back(w);
    }
    slot = std::move(rule);
  }
  return *slot;
}

void QuadratureSpec::validate() const {
  if (nodes_per_axis < 4) throw std::invalid_argument("nodes_per_axis must be >= 4");
  if (refinement_factor < 2) throw std::invalid_argument("refinement_factor must be >= 2");
  if (box.dim() == 0) throw std::invalid_argument("empty integration box");
  for (const auto& [lo, hi] : box.axes)
    if (!(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi)) throw std::invalid_argument("degenerate box axis");
}

nlohmann::json QuadratureSpec::to_json() const {
  nlohmann::json b = nlohmann::json::array();
  for (const auto& [lo, hi] : box.axes) b.push_back({lo, hi});
  return {{"box", b}, {"nodes_per_axis", nodes_per_axis}, {"refinement_factor", refinement_factor}};
}

QuadratureSpec QuadratureSpec::from_json(const nlohmann::json& j) {
  QuadratureSpec s;
  for (const auto& a : j.at("box")) s.box.axes.push_back({a.at(0).get<double>(), a.at(1).get<double>()});
  s.nodes_per_axis = j.value("nodes_per_axis", 48);
  s.refinement_factor = j.value("refinement_factor", 2);
  s.validate();
  return s;
}

nlohmann::json QuadResult::to_json() const {
  nlohmann::json v = value.imag() == 0 ? nlohmann::json(value.real()) : nlohmann::json{value.real(), value.imag()};
  return {{"value", v}, {"err_estimate", err_estimate}, {"nodes_used", nodes_used}};
}

int worker_count() {
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw < 1) hw = 1;
  if (const char* env = std::getenv("CARNOT_HARDY_THREADS")) {
    int cap = std::atoi(env);
    if (cap >= 1) hw = std::min(hw, cap);
  }
  return hw;
}

namespace {

// Evaluates slice i0 (first-axis node index) of the tensor rule; the per-slice
// sums are reduced in index order so the result does not depend on threading.
void run_slices(int count, const std::function<void(int)>& slice) {
  int workers = std::min(worker_count(), count);
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) slice(i);
    return;
  }
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      for (int i = w; i < count; i += workers) slice(i);
    });
  for (auto& t : pool) t.join();
}

}  // namespace

std::vector<double> integrate_rule(const Kernel& g, int channels, const Box& box, int p) {
  const auto& rule = gauss_legendre(p);
  const int d = box.dim();
  std::vector<double> half(d), mid(d);
  double jac = 1;
  for (int i = 0; i < d; ++i) {
    half[i] = 0.5 * (box.axes[i].second - box.axes[i].first);
    mid[i] = 0.5 * (box.axes[i].second + box.axes[i].first);
    jac *= half[i];
  }
  std::vector<std::vector<double>> slice_sums(p, std::vector<double>(channels, 0.0));
  run_slices(p, [&](int i0) {
    std::vector<CompensatedSum> acc(channels);
    std::vector<double> x(d), out(channels);
    std::vector<int> idx(d, 0);
    idx[0] = i0;
    x[0] = mid[0] + half[0] * rule.nodes[i0];
    const double w0 = rule.weights[i0];
    if (d == 1) {
      g(x, out);
      for (int c = 0; c < channels; ++c) acc[c].add(w0 * out[c]);
    } else {
      while (true) {
        double w = w0;
        for (int k = 1; k < d; ++k) {
          x[k] = mid[k] + half[k] * rule.nodes[idx[k]];
          w *= rule.weights[idx[k]];
        }
        std::fill(out.begin(), out.end(), 0.0);
        g(x, out);
        for (int c = 0; c < channels; ++c) acc[c].add(w * out[c]);
        int k = d - 1;
        while (k >= 1 && ++idx[k] == p) idx[k--] = 0;
        if (k < 1) break;
      }
    }
    for (int c = 0; c < channels; ++c) slice_sums[i0][c] = acc[c].value();
  });
  std::vector<double> total(channels);
  for (int c = 0; c < channels; ++c) {
    CompensatedSum s;
    for (int i = 0; i < p; ++i) s.add(slice_sums[i][c]);
    total[c] = s.value() * jac;
  }
  return total;
}

std::vector<QuadResult> integrate_channels(const Kernel& g, int channels, const QuadratureSpec& spec,
                                           std::optional<double> err_cap) {
  spec.validate();
  const int p = spec.nodes_per_axis, q = p * spec.refinement_factor;
  auto coarse = integrate_rule(g, channels, spec.box, p);
  auto fine = integrate_rule(g, channels, spec.box, q);
  std::size_t used = 1, used_fine = 1;
  for (int i = 0; i < spec.box.dim(); ++i) used *= p, used_fine *= q;
  std::vector<QuadResult> out(channels);
  for (int c = 0; c < channels; ++c) {
    out[c].value = coarse[c];
    out[c].err_estimate = std::abs(coarse[c] - fine[c]);
    out[c].nodes_used = used + used_fine;
    if (err_cap && out[c].err_estimate > *err_cap)
      throw QuadratureCapExceeded("quadrature error estimate " + std::to_string(out[c].err_estimate) +
                                  " exceeds cap " + std::to_string(*err_cap));
  }
  return out;
}

QuadResult integrate(const ComplexIntegrand& g, const QuadratureSpec& spec, std::optional<double> err_cap,
                     const Box* support) {
  if (support && !spec.box.contains(*support)) throw std::invalid_argument("integration box does not contain the support");
  auto r = integrate_channels(
      [&](std::span<const double> x, std::span<double> out) {
        auto v = g(x);
        out[0] = v.real();
        out[1] = v.imag();
      },
      2, spec, std::nullopt);
  QuadResult q;
  q.value = {r[0].value.real(), r[1].value.real()};
  q.err_estimate = std::hypot(r[0].err_estimate, r[1].err_estimate);
  q.nodes_used = r[0].nodes_used;
  if (err_cap && q.err_estimate > *err_cap)
    throw QuadratureCapExceeded("quadrature error estimate exceeds cap");
  return q;
}

namespace {

void check_weight(const ScalarField& f, int k, bool stratum) {
  if (k < 0 && !(f.stratum_margin() > 0))
    throw std::invalid_argument("negative weight exponent needs a field supported away from x' = 0");
  if (k < 0 && !stratum && !f.annulus() && !(f.stratum_margin() > 0))
    throw std::invalid_argument("negative weight exponent needs a field supported away from the origin");
}

std::complex<double> applied_value(const AppliedField& a, std::span<const double> x) {
  int order = a.op ? jet_order(a.op) : 0;
  auto j = eval_jet<double>(*a.field, x, order);
  if (!a.op) return {j.re.value(), j.im.value()};
  const auto& m = a.field->model();
  double re = apply_jet<double>(a.op, j.re, m, x).value();
  double im = j.complex ? apply_jet<double>(a.op, j.im, m, x).value() : 0.0;
  return {re, im};
}

}  // namespace

QuadResult weighted_l2_sq(const ScalarField& f, int k, bool stratum, const QuadratureSpec& spec,
                          std::optional<double> err_cap) {
  check_weight(f, k, stratum);
  if (!spec.box.contains(f.support_box())) throw std::invalid_argument("integration box does not contain the support");
  auto r = integrate_channels(
      [&](std::span<const double> x, std::span<double> out) {
        if (!f.in_support(x)) return;
        auto j = eval_jet<double>(f, x, 0);
        double v = j.re.value() * j.re.value() + j.im.value() * j.im.value();
        if (k != 0) {
          double r = stratum ? stratum_norm(f.model(), x) : quasi_norm(f.model(), x);
          v *= std::pow(r, 2 * k);
        }
        out[0] = v;
      },
      1, spec, err_cap);
  return r[0];
}

QuadResult weighted_inner(const AppliedField& f, const AppliedField& g, int k, const QuadratureSpec& spec,
                          std::optional<double> err_cap) {
  check_weight(*f.field, k, true);
  check_weight(*g.field, k, true);
  if (!(f.field->model() == g.field->model())) throw std::invalid_argument("fields live on different models");
  if (!spec.box.contains(f.field->support_box()) && !spec.box.contains(g.field->support_box()))
    throw std::invalid_argument("integration box does not contain the support");
  auto r = integrate_channels(
      [&](std::span<const double> x, std::span<double> out) {
        if (!f.field->in_support(x) || !g.field->in_support(x)) return;
        auto a = applied_value(f, x);
        auto b = applied_value(g, x);
        auto v = a * std::conj(b);
        if (k != 0) v *= std::pow(stratum_norm(f.field->model(), x), 2 * k);
        out[0] = v.real();
        out[1] = v.imag();
      },
      2, spec, std::nullopt);
  QuadResult q;
  q.value = {r[0].value.real(), r[1].value.real()};
  q.err_estimate = std::hypot(r[0].err_estimate, r[1].err_estimate);
  q.nodes_used = r[0].nodes_used;
  if (err_cap && q.err_estimate > *err_cap) throw QuadratureCapExceeded("quadrature error estimate exceeds cap");
  return q;
}

// ---------------------------------------------------------------- polar reduction

double sphere_area(int dim) {
  return 2.0 * std::pow(std::numbers::pi, dim / 2.0) / std::tgamma(dim / 2.0);
}

nlohmann::json RadialSpec::to_json() const {
  return {{"map", map == Map::log ? "log" : "loglog"},
          {"panels", panels},
          {"nodes_per_panel", nodes_per_panel},
          {"refinement_factor", refinement_factor},
          {"t_nodes", t_nodes}};
}

namespace {

std::vector<double> radial_rule(const Kernel& g, int channels, const GroupModel& m, double lo, double hi,
                                std::optional<std::pair<double, double>> t_range, RadialSpec::Map map, int panels,
                                int p, int pt) {
  const auto& rule = gauss_legendre(p);
  const int N = m.first_stratum_dim();
  const double area = sphere_area(N);
  double a, b;
  if (map == RadialSpec::Map::log) {
    a = std::log(lo);
    b = std::log(hi);
  } else {
    if (!(lo > 1)) throw std::invalid_argument("log-log radial map needs rho_lo > 1");
    a = std::log(std::log(lo));
    b = std::log(std::log(hi));
  }
  const GaussLegendreRule* trule = nullptr;
  double t_mid = 0, t_half = 0;
  if (m.is_heisenberg()) {
    if (!t_range) throw std::invalid_argument("Heisenberg radial integrals need a t range");
    trule = &gauss_legendre(pt);
    t_mid = 0.5 * (t_range->first + t_range->second);
    t_half = 0.5 * (t_range->second - t_range->first);
  }
  const double h = (b - a) / panels;
  std::vector<std::vector<double>> panel_sums(panels, std::vector<double>(channels, 0.0));
  run_slices(panels, [&](int k) {
    std::vector<CompensatedSum> acc(channels);
    std::vector<double> x(m.ambient_dim(), 0.0), out(channels);
    for (int i = 0; i < p; ++i) {
      double s = a + h * (k + 0.5 + 0.5 * rule.nodes[i]);
      double rho, drho;
      if (map == RadialSpec::Map::log) {
        rho = std::exp(s);
        drho = rho;
      } else {
        double u = std::exp(s);
        rho = std::exp(u);
        drho = rho * u;
      }
      double w = 0.5 * h * rule.weights[i] * drho * area * std::pow(rho, N - 1);
      x[0] = rho;
      if (!trule) {
        std::fill(out.begin(), out.end(), 0.0);
        g(x, out);
        for (int c = 0; c < channels; ++c) acc[c].add(w * out[c]);
        continue;
      }
      for (int j = 0; j < pt; ++j) {
        x[m.t_index()] = t_mid + t_half * trule->nodes[j];
        std::fill(out.begin(), out.end(), 0.0);
        g(x, out);
        double wt = w * t_half * trule->weights[j];
        for (int c = 0; c < channels; ++c) acc[c].add(wt * out[c]);
      }
    }
    for (int c = 0; c < channels; ++c) panel_sums[k][c] = acc[c].value();
  });
  std::vector<double> total(channels);
  for (int c = 0; c < channels; ++c) {
    CompensatedSum s;
    for (int k = 0; k < panels; ++k) s.add(panel_sums[k][c]);
    total[c] = s.value();
  }
  return total;
}

}  // namespace

std::vector<QuadResult> integrate_radial_channels(const Kernel& g, int channels, const GroupModel& m, double rho_lo,
                                                  double rho_hi, std::optional<std::pair<double, double>> t_range,
                                                  const RadialSpec& spec) {
  if (!m.is_heisenberg() && !m.is_isotropic_euclidean())
    throw std::invalid_argument("polar reduction needs R^n with isotropic dilations or the Heisenberg group");
  if (!(rho_lo > 0) || !(rho_hi > rho_lo)) throw std::invalid_argument("radial range needs 0 < lo < hi");
  if (spec.panels < 1 || spec.nodes_per_panel < 2 || spec.refinement_factor < 2 || spec.t_nodes < 2)
    throw std::invalid_argument("invalid radial quadrature spec");
  auto coarse = radial_rule(g, channels, m, rho_lo, rho_hi, t_range, spec.map, spec.panels, spec.nodes_per_panel,
                            spec.t_nodes);
  auto fine = radial_rule(g, channels, m, rho_lo, rho_hi, t_range, spec.map, spec.panels,
                          spec.nodes_per_panel * spec.refinement_factor, spec.t_nodes * spec.refinement_factor);
  std::size_t used = static_cast<std::size_t>(spec.panels) * spec.nodes_per_panel * (m.is_heisenberg() ? spec.t_nodes : 1);
  std::size_t used_fine = used * spec.refinement_factor * (m.is_heisenberg() ? spec.refinement_factor : 1);
  std::vector<QuadResult> out(channels);
  for (int c = 0; c < channels; ++c) {
    out[c].value = coarse[c];
    out[c].err_estimate = std::abs(coarse[c] - fine[c]);
    out[c].nodes_used = used + used_fine;
  }
  return out;
}

}  // namespace carnot_hardy

namespace carnot_hardy {

namespace {

double radial_moment(const RadialProfile& p, double q_minus_1, int panels, int nodes) {
  const auto& rule = gauss_legendre(nodes);
  double h = (p.r_hi - p.r_lo) / panels;
  CompensatedSum acc;
  for (int k = 0; k < panels; ++k) {
    double mid = p.r_lo + (k + 0.5) * h;
    for (int i = 0; i < nodes; ++i) {
      double r = mid + 0.5 * h * rule.nodes[i];
      acc.add(0.5 * h * rule.weights[i] * p.h(r) * std::pow(r, q_minus_1));
    }
  }
  return acc.value();
}

}  // namespace

PolarRatio polar_consistency_ratio(const GroupModel& m, const RadialProfile& p, int nodes_per_axis,
                                   int refinement_factor) {
  if (m.is_heisenberg()) throw std::invalid_argument("polar consistency ratio is defined on R^n models");
  if (!p.h || !(p.r_lo > 0) || !(p.r_hi > p.r_lo)) throw std::invalid_argument("profile support needs 0 < r_lo < r_hi");
  QuadratureSpec spec;
  for (const auto& w : m.dilations().weights) {
    double half = std::pow(p.r_hi, to_double(w));
    spec.box.axes.push_back({-half, half});
  }
  spec.nodes_per_axis = nodes_per_axis;
  spec.refinement_factor = refinement_factor;
  spec.validate();
  Kernel k = [&](std::span<const double> x, std::span<double> out) {
    double r = quasi_norm(m, x);
    out[0] = (r > p.r_lo && r < p.r_hi) ? p.h(r) : 0.0;
  };
  PolarRatio res;
  res.volume = integrate_channels(k, 1, spec).front();

  const double q1 = to_double(m.q_hom()) - 1;
  const int panels = 64;
  double coarse = radial_moment(p, q1, panels, 16);
  double fine = radial_moment(p, q1, panels, 32);
  res.radial.value = coarse;
  res.radial.err_estimate = std::abs(coarse - fine);
  res.radial.nodes_used = panels * 48;
  if (!(std::abs(coarse) > 0)) throw std::domain_error("profile has zero radial moment");

  double v = res.volume.value.real();
  res.ratio = v / coarse;
  res.err = std::abs(res.ratio) * (res.volume.err_estimate / std::abs(v) + res.radial.err_estimate / std::abs(coarse));
  return res;
}

}  // namespace carnot_hardy
