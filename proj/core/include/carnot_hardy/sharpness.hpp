#pragma once

#include "carnot_hardy/fields.hpp"
#include "carnot_hardy/group_models.hpp"
#include "carnot_hardy/inequalities.hpp"
#include "carnot_hardy/quadrature.hpp"

#include <nlohmann/json.hpp>

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace carnot_hardy {

struct FamilyParam {
  std::string name;
  double lo = 0, hi = 0;
  double start = 0;
};

// where a family member lives, for the polar reduction
struct RadialDomain {
  double rho_lo = 0, rho_hi = 0;
  std::optional<std::pair<double, double>> t_range;
};

struct RayleighProblem {
  std::string id;
  std::string description;
  GroupModel model;
  FunctionalTerm numerator, denominator;
  std::vector<FamilyParam> params;
  std::function<ScalarField(std::span<const double>)> family;
  std::function<RadialDomain(std::span<const double>)> domain;
  double target = 0;
  std::string target_formula;
  RadialSpec radial;
};

struct RayleighValue {
  double quotient = 0, numerator = 0, denominator = 0;
  double err = 0;  // propagated quotient error
  std::size_t nodes_used = 0;
};

class DegenerateFamilyMember : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// family member at params, integrated with the polar reduction
RayleighValue rayleigh(const RayleighProblem& p, std::span<const double> params);
RayleighValue rayleigh(const RayleighProblem& p, std::span<const double> params, const RadialSpec& spec);
// any field, tensor quadrature
RayleighValue rayleigh(const FunctionalTerm& numerator, const FunctionalTerm& denominator, const ScalarField& f,
                       const QuadratureSpec& spec);

struct ProbeResult {
  std::string problem_id;
  double target = 0;
  std::vector<std::string> param_names;
  std::vector<double> best_params;
  double best_quotient = 0, best_err = 0, gap = 0;
  double crosscheck_quotient = 0, crosscheck_err = 0;  // best member at doubled nodes
  int budget = 0, evaluations = 0, clamped = 0;
  // min over evaluations of quotient - target + 10 err; >= 0 means no member undercut the constant
  double lower_bound_margin = 0;
  nlohmann::json node_counts;
  nlohmann::json to_json() const;
  bool lower_bound_respected() const { return lower_bound_margin >= 0; }
};

ProbeResult probe(const RayleighProblem& p, int budget);

const std::vector<std::string>& sharpness_problem_ids();
RayleighProblem sharpness_problem(const std::string& id);

// members of the Hardy extremizer family r^(-(N-2)/2 + eps) * logbump(1, s)
ScalarField hardy_family_member(const GroupModel& m, double eps, double s);

struct MinimizeResult {
  std::vector<double> x;
  double value = 0;
  int evaluations = 0, clamped = 0;
};
// Nelder-Mead from a fixed simplex inside the box, golden-section in 1-D;
// points are clamped to the box
MinimizeResult minimize_in_box(const std::function<double(std::span<const double>)>& fn,
                               const std::vector<FamilyParam>& box, int budget);

struct RefinedVsPlain {
  double q_refined = 0, q_plain = 0, err_refined = 0, err_plain = 0, target = 0;
  bool ordered = false;  // q_refined <= q_plain within error
  nlohmann::json to_json() const;
};
RefinedVsPlain refined_vs_plain(const ScalarField& f, const QuadratureSpec& spec);

}  // namespace carnot_hardy
