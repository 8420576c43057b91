#pragma once

#include "carnot_hardy/fields.hpp"
#include "carnot_hardy/group_models.hpp"
#include "carnot_hardy/opalgebra.hpp"

#include <nlohmann/json.hpp>

#include <complex>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace carnot_hardy {

// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double v) {
    double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v))
      comp_ += (sum_ - t) + v;
    else
      comp_ += (v - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0, comp_ = 0;
};

struct GaussLegendreRule {
  std::vector<double> nodes, weights;  // on [-1, 1]
};
const GaussLegendreRule& gauss_legendre(int p);

struct QuadratureSpec {
  Box box;
  int nodes_per_axis = 48;
  int refinement_factor = 2;

  void validate() const;
  nlohmann::json to_json() const;
  static QuadratureSpec from_json(const nlohmann::json& j);
};

struct QuadResult {
  std::complex<double> value;
  double err_estimate = 0;
  std::size_t nodes_used = 0;
  nlohmann::json to_json() const;
};

class QuadratureCapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Fills out[0..channels) with integrand values at x. Must be safe to call
// concurrently.
using Kernel = std::function<void(std::span<const double> x, std::span<double> out)>;

// Tensor Gauss-Legendre at p and refinement_factor * p nodes per axis; returns
// the p-node value per channel with err = |Q(p) - Q(rp)|.
std::vector<QuadResult> integrate_channels(const Kernel& g, int channels, const QuadratureSpec& spec,
                                           std::optional<double> err_cap = std::nullopt);
// single rule, no refinement
std::vector<double> integrate_rule(const Kernel& g, int channels, const Box& box, int p);

using ComplexIntegrand = std::function<std::complex<double>(std::span<const double> x)>;
QuadResult integrate(const ComplexIntegrand& g, const QuadratureSpec& spec, std::optional<double> err_cap = std::nullopt,
                     const Box* support = nullptr);

// worker count: CARNOT_HARDY_THREADS caps the hardware concurrency
int worker_count();

// op applied to a field; a null op is the identity
struct AppliedField {
  const ScalarField* field;
  Op op;
};

// integral of |f|^2 |x'|^(2k) (stratum) or |f|^2 |x|^(2k) (full quasi-norm)
QuadResult weighted_l2_sq(const ScalarField& f, int k, bool stratum, const QuadratureSpec& spec,
                          std::optional<double> err_cap = std::nullopt);
// integral of (A f) conj(B g) |x'|^(2k)
QuadResult weighted_inner(const AppliedField& f, const AppliedField& g, int k, const QuadratureSpec& spec,
                          std::optional<double> err_cap = std::nullopt);

// ---------------------------------------------------------------- polar reduction

// Integrals of U(n)- or O(n)-invariant integrands (fields declared radial in
// |x'|) reduced to the ray x' = (rho, 0, ..., 0), with rho parameterized as
// exp(u) or exp(exp(v)) and composite Gauss-Legendre panels.
struct RadialSpec {
  enum class Map { log, loglog };
  Map map = Map::log;
  int panels = 32;
  int nodes_per_panel = 16;
  int refinement_factor = 2;
  int t_nodes = 24;  // Heisenberg t axis
  nlohmann::json to_json() const;
};

std::vector<QuadResult> integrate_radial_channels(const Kernel& g, int channels, const GroupModel& m, double rho_lo,
                                                  double rho_hi, std::optional<std::pair<double, double>> t_range,
                                                  const RadialSpec& spec);

double sphere_area(int dim);

// h(r), supported in [r_lo, r_hi] with 0 < r_lo
struct RadialProfile {
  std::function<double(double)> h;
  double r_lo = 0, r_hi = 0;
};
struct PolarRatio {
  double ratio = 0, err = 0;
  QuadResult volume, radial;
};
// [int_{R^n} h(|x|) dx] / [int_0^inf h(r) r^(Q-1) dr] on a Euclidean model;
// the ratio is the sphere measure and must not depend on h. The volume
// integral uses tensor Gauss-Legendre on the box |x_i| <= r_hi^(nu_i).
PolarRatio polar_consistency_ratio(const GroupModel& m, const RadialProfile& p, int nodes_per_axis = 48,
                                   int refinement_factor = 2);

}  // namespace carnot_hardy
