#pragma once

#include "carnot_hardy/fields.hpp"
#include "carnot_hardy/group_models.hpp"
#include "carnot_hardy/jet.hpp"
#include "carnot_hardy/rational.hpp"

#include <nlohmann/json.hpp>

#include <complex>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace carnot_hardy {

enum class OpKind {
  partial,
  mul_coord,
  mul_stratum_norm_pow,  // |x'|^k
  mul_norm_pow,          // |x|^k, model quasi-norm; numeric only
  scale,
  sum,
  compose,  // args[0] o args[1] o ... (last applied first)
  commutator,
  named,
};

enum class Primitive { none, x_field, y_field, t_field, tangential, sublaplacian, stratum_laplacian };

struct OpNode;
using Op = std::shared_ptr<const OpNode>;

struct OpNode {
  OpKind kind;
  int index = 0;  // coordinate / power / primitive index
  Number factor;
  std::vector<Op> args;
  Primitive primitive = Primitive::none;
  std::string name;  // named nodes
  int diff_order = 0;
  int jet_order = 0;
};

namespace op {
Op partial(int i);
Op mul_coord(int i);
Op mul_stratum_norm_pow(int k);
Op mul_norm_pow(int k);
Op scale(Number c);
Op identity();
Op sum(std::vector<Op> terms);
Op compose(std::vector<Op> factors);
Op scaled(Number c, Op a);
Op neg(Op a);
Op named(std::string name, Op expansion, Primitive p = Primitive::none, int index = 0);
// AB - BA; both orders <= 3 and jet depth <= 4
Op commutator(Op a, Op b);
}  // namespace op

// true differential order; a commutator of orders a, b counts a + b - 1
inline int order(const Op& o) { return o->diff_order; }
// jet depth needed to apply the AST as written
inline int jet_order(const Op& o) { return o->jet_order; }
std::string describe(const Op& o);

struct HeisenbergPrimitives {
  std::vector<Op> X, Y;
  Op T, Z, L, laplacian_stratum;
};
HeisenbergPrimitives heisenberg_primitives(int n);

// first-stratum coordinate index j (x'_j)
int stratum_coord(const GroupModel& m, int j);
std::vector<Op> horizontal_gradient(const GroupModel& m);
Op sublaplacian(const GroupModel& m);
Op stratum_laplacian(const GroupModel& m);
Op euler_horizontal(const GroupModel& m);  // x' . grad_H
Op radial_derivative_op(const GroupModel& m);
Op tangential_sum(const GroupModel& m);    // sum x_j Y_j - y_j X_j (Heisenberg)
Op double_sum(const GroupModel& m);        // sum_jk x'_j x'_k X_j X_k
std::pair<Op, Op> factorization_pair(const GroupModel& m, Number alpha, Number beta);

// Applies op to a jet of f at x. The result has order f.order() - jet_order(op).
template <class T>
Jet<T> apply_jet(const Op& o, const Jet<T>& f, const GroupModel& m, std::span<const T> x, bool expand_named = false);
// several operators at one point, sharing the weight jets; ops must be non-null
template <class T>
std::vector<Jet<T>> apply_jets(std::span<const Op> ops, const Jet<T>& f, const GroupModel& m, std::span<const T> x);

// (op f)(x) in floating point, complex fields included
std::complex<double> apply_at(const Op& o, const ScalarField& f, std::span<const double> x);
// (sum nu_i x_i d_i f)(x) / |x| on R^n; rejects |x| below radial_threshold
std::complex<double> radial_derivative(const GroupModel& m, const ScalarField& f, std::span<const double> x);

Rational apply_exact(const Op& o, const ScalarField& f, std::span<const Rational> x, bool expand_named = false);
Rational apply_exact(const Op& o, const Jet<Rational>& f, const GroupModel& m, std::span<const Rational> x,
                     bool expand_named = false);

// ---------------------------------------------------------------- identities

struct Polynomial {
  int dim = 0;
  std::vector<std::pair<std::vector<int>, Rational>> terms;
  std::string str() const;
  Jet<Rational> jet_at(std::span<const Rational> x, int order) const;
};
Polynomial random_polynomial(int dim, int degree, std::mt19937_64& rng);

struct IdentityParams {
  Number alpha = 0, beta = 0;
  int gamma = 2;
  nlohmann::json to_json() const;
};

struct IdentityCase {
  std::string id;
  std::string description;
  std::vector<std::string> param_names;  // subset of alpha, beta, gamma
  std::function<std::optional<std::string>(const GroupModel&, const IdentityParams&)> reject;
  std::function<std::pair<Op, Op>(const GroupModel&, const IdentityParams&)> build;
  std::vector<IdentityParams> default_params;
};

struct IdentityWitness {
  std::vector<std::string> point;
  std::string input_poly;
  std::string lhs_value, rhs_value;
};

struct IdentityResult {
  std::string id;
  std::string model;
  IdentityParams params;
  std::vector<std::string> param_names;
  int trials = 0;
  bool pass = false;
  std::optional<IdentityWitness> witness;
  nlohmann::json to_json() const;
};

const std::vector<IdentityCase>& identity_catalog();
const IdentityCase& identity_case(const std::string& id);
// the T+T expansion with its commutator term removed; must fail for alpha != 0
IdentityCase heis_tt_without_commutator();

IdentityResult check_identity(const IdentityCase& c, const GroupModel& m, const IdentityParams& p, int trials,
                              std::uint64_t seed, int degree = 6);
IdentityResult check_operator_identity(const std::string& id, const Op& lhs, const Op& rhs, const GroupModel& m,
                                       int trials, std::uint64_t seed, int degree = 6);

// [X_j, Y_j] = T, every other bracket of X_1..X_n, Y_1..Y_n, T vanishes
std::vector<IdentityResult> check_commutation_relations(const GroupModel& m, int trials, std::uint64_t seed);

// stable string hash used to split random streams
std::uint64_t stable_hash(const std::string& s);

}  // namespace carnot_hardy
