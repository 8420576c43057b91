#pragma once

#include "carnot_hardy/fields.hpp"
#include "carnot_hardy/group_models.hpp"
#include "carnot_hardy/opalgebra.hpp"
#include "carnot_hardy/quadrature.hpp"

#include <nlohmann/json.hpp>

#include <complex>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace carnot_hardy {

// Weight w(r) with r = |x'| (stratum) or the model quasi-norm.
struct RadialWeight {
  enum class Base { stratum, quasi };
  Base base = Base::stratum;
  std::function<double(double)> fn;  // empty means w = 1
  std::string label = "1";

  static RadialWeight one();
  static RadialWeight stratum_power(int k);   // |x'|^k
  static RadialWeight quasi(std::function<double(double)> fn, std::string label);
  static RadialWeight log_stratum_sq();       // log |x'|^2
};

// sum_i  integral (A_i f) conj(B_i g) w ; a null op is the identity
struct FunctionalTerm {
  std::string name;
  std::vector<std::pair<Op, Op>> pairs;
  RadialWeight weight;

  static FunctionalTerm l2(std::string name, std::vector<Op> ops, RadialWeight w);
  static FunctionalTerm inner(std::string name, Op a, Op b, RadialWeight w);
  std::string key() const;
  int jet_order() const;
};

struct WeightedTerm {
  FunctionalTerm term;
  double coeff = 1;
  std::string formula;
};

// r^(-a) (log r)^c with integer c >= 0, and its first two radial derivatives
struct LogPowerProfile {
  double a = 0;
  int c = 0;
  double value(double r) const;
  double d1(double r) const;
  double d2(double r) const;
  std::string str() const;
};

struct InequalityParams {
  double alpha = 0, beta = 0, a = 0, b = 0;
  int c = 0, d = 0;
  nlohmann::json to_json(const std::vector<std::string>& names) const;
};

class Inadmissible : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct InequalityInstance {
  std::string id;
  GroupModel model;
  InequalityParams params;
  std::vector<std::string> param_names;
  std::vector<WeightedTerm> lhs, rhs;
  std::optional<std::string> inadmissible;  // reason, when the hypothesis fails
};

struct TermValue {
  std::string side;  // lhs | rhs
  std::string name;
  std::string formula;
  double coeff = 0;
  std::complex<double> value;
  double err = 0;
};

struct DeficitReport {
  std::string id;
  std::string model;
  nlohmann::json params;
  std::string field;
  nlohmann::json quadrature;
  std::vector<TermValue> terms;
  double lhs = 0, rhs = 0, deficit = 0, total_err = 0, scale = 0;
  bool pass = false;
  nlohmann::json to_json() const;
  double tolerance() const;
};

struct InequalityEntry {
  std::string id;
  std::string description;
  std::vector<std::string> param_names;
  std::function<std::optional<std::string>(const GroupModel&)> unsupported;  // reason when not applicable
  std::function<InequalityInstance(const GroupModel&, const InequalityParams&)> build;
  std::function<std::vector<InequalityParams>(const GroupModel&)> default_grid;
  std::vector<std::string> default_models;
};

const std::vector<InequalityEntry>& inequality_catalog();
const InequalityEntry& inequality_entry(const std::string& id);
// throws Inadmissible or std::invalid_argument
InequalityInstance build_instance(const std::string& id, const GroupModel& m, const InequalityParams& p);

// Integrand of the terms: channels 2t, 2t+1 hold Re and Im of term t.
struct TermKernel {
  Kernel kernel;
  int channels = 0;
};
// f and g must outlive the kernel
TermKernel term_kernel(const std::vector<FunctionalTerm>& terms, const ScalarField& f, const ScalarField& g);
// folds (re, im) channel pairs back into one complex result per term
std::vector<QuadResult> combine_term_channels(const std::vector<QuadResult>& raw);

// One quadrature pass for every distinct term; A ops act on f, B ops on g.
std::vector<QuadResult> evaluate_terms(const std::vector<FunctionalTerm>& terms, const ScalarField& f,
                                       const ScalarField& g, const QuadratureSpec& spec,
                                       std::optional<double> err_cap = std::nullopt);

DeficitReport evaluate(const InequalityInstance& inst, const ScalarField& f, const QuadratureSpec& spec,
                       std::optional<double> err_cap = std::nullopt);
// shares the quadrature pass across instances (all on f's model)
std::vector<DeficitReport> evaluate_many(const std::vector<InequalityInstance>& insts, const ScalarField& f,
                                         const QuadratureSpec& spec, std::optional<double> err_cap = std::nullopt);

struct SweepCell {
  InequalityParams params;
  std::optional<std::string> inadmissible;
  std::optional<DeficitReport> report;
};
struct SweepResult {
  std::string id;
  std::string model;
  std::string field;
  std::vector<SweepCell> cells;
  double min_deficit = 0;
  bool pass = true;
  nlohmann::json to_json() const;
};
SweepResult sweep(const std::string& id, const GroupModel& m, const std::vector<InequalityParams>& grid,
                  const ScalarField& f, const QuadratureSpec& spec, std::optional<double> err_cap = std::nullopt);
// cartesian product of alpha and beta values
std::vector<InequalityParams> ab_grid(const std::vector<double>& alphas, const std::vector<double>& betas);

// alpha* = (N-2)/2 maximizing alpha (N-2-alpha), constant (N-2)^2/4
std::pair<double, double> best_alpha_hardy(int N);
// alpha* = 1/2 maximizing alpha - alpha^2
std::pair<double, double> best_alpha_critical();

// default box covering the support of f, with node count per model
QuadratureSpec default_quadrature(const ScalarField& f, std::optional<int> nodes = std::nullopt);
int default_nodes(const GroupModel& m);

// ---------------------------------------------------------------- integral identities

struct IntegralCheckReport {
  std::string id;
  std::string model;
  std::string field;
  nlohmann::json params;
  std::complex<double> lhs, rhs;
  double err = 0, scale = 0;
  bool inequality = false;  // lhs >= rhs instead of lhs == rhs
  bool pass = false;
  std::string note;
  nlohmann::json to_json() const;
};

struct IntegralCheck {
  std::string id;
  std::string description;
  bool inequality = false;
  bool two_fields = false;
  std::function<std::optional<std::string>(const GroupModel&)> unsupported;
  // params: alpha/beta for the factorization checks
  std::function<std::pair<std::vector<WeightedTerm>, std::vector<WeightedTerm>>(const GroupModel&,
                                                                                 const InequalityParams&)>
      build;
  std::vector<InequalityParams> default_params;
  std::vector<std::string> param_names;
};

const std::vector<IntegralCheck>& integral_check_catalog();
const IntegralCheck& integral_check(const std::string& id);
IntegralCheckReport run_integral_check(const IntegralCheck& c, const GroupModel& m, const InequalityParams& p,
                                       const ScalarField& f, const ScalarField& g, const QuadratureSpec& spec,
                                       std::optional<double> err_cap = std::nullopt);

// several checks on the same field(s) in one quadrature pass; g is used by two-field checks only
std::vector<IntegralCheckReport> run_integral_checks(
    const std::vector<std::pair<const IntegralCheck*, InequalityParams>>& items, const GroupModel& m,
    const ScalarField& f, const ScalarField& g, const QuadratureSpec& spec, std::optional<double> err_cap = std::nullopt);

// equality tolerance: max(10 err, 1e-11 scale)
inline constexpr double identity_rounding_floor = 1e-11;

// Parameter specializations that must reproduce another catalog entry.
struct ReductionReport {
  std::string id;  // "<from> -> <to>"
  std::string model;
  std::string field;
  nlohmann::json params;
  double lhs_from = 0, lhs_to = 0, rhs_from = 0, rhs_to = 0, err = 0;
  bool pass = false;
  nlohmann::json to_json() const;
};
std::vector<std::string> reduction_ids();
ReductionReport check_reduction(const std::string& id, const GroupModel& m, const ScalarField& f,
                                const QuadratureSpec& spec, double a = 0);

}  // namespace carnot_hardy
