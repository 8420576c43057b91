#pragma once

#include "carnot_hardy/group_models.hpp"
#include "carnot_hardy/jet.hpp"
#include "carnot_hardy/rational.hpp"

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace carnot_hardy {

enum class ExprKind {
  constant,
  coord,
  norm,          // quasi-norm of the model
  stratum_norm,  // |x'|
  add,
  mul,
  neg,
  pow,   // integer exponent
  rpow,  // real exponent, base must be positive
  exp,
  log,
  bump,   // exp(-1/(1-u^2)), u = log(e/r0)/s
  tbump,  // exp(-1/(1-u^2)), u = (e-c)/w
};

struct ExprNode;
using Expr = std::shared_ptr<const ExprNode>;

struct ExprNode {
  ExprKind kind;
  int index = 0;  // coord index or integer exponent
  Number a, b;    // constant value / rpow exponent / bump parameters
  std::vector<Expr> args;
};

namespace ex {
Expr constant(Number v);
Expr coord(int i);
Expr norm();
Expr stratum_norm();
Expr add(std::vector<Expr> terms);
Expr mul(std::vector<Expr> factors);
Expr neg(Expr e);
Expr sub(Expr a, Expr b);
// integer exponents become pow, anything else rpow
Expr pow(Expr base, Number exponent);
Expr exp(Expr e);
Expr log(Expr e);
Expr bump(Expr e, Number r0, Number s);
Expr tbump(Expr e, Number center, Number half_width);
}  // namespace ex

std::string to_prefix(const Expr& e);
Expr parse_prefix(const std::string& text);
// maps coordinate i to remap[i]; norm -> stratum_norm when norm_to_stratum
Expr substitute_coords(const Expr& e, std::span<const int> remap, bool norm_to_stratum);
bool contains_kind(const Expr& e, ExprKind k);

template <class T>
Jet<T> eval_expr_jet(const Expr& e, const GroupModel& model, std::span<const T> x, int order);

struct Box {
  std::vector<std::pair<double, double>> axes;
  int dim() const { return static_cast<int>(axes.size()); }
  bool contains(std::span<const double> x) const;
  bool contains(const Box& other) const;
  bool bounded() const;
};

struct Annulus {
  bool stratum = true;  // |x'| when true, else the model quasi-norm
  double lo = 0, hi = 0;
};

enum class Symmetry { none, stratum_radial };

class ScalarField {
 public:
  ScalarField(GroupModel model, Expr re, std::optional<Expr> im, Box support, double stratum_margin,
              std::optional<Annulus> annulus = std::nullopt, Symmetry symmetry = Symmetry::none,
              std::string label = {});

  const GroupModel& model() const { return model_; }
  int dim() const { return model_.ambient_dim(); }
  const Expr& re() const { return re_; }
  const std::optional<Expr>& im() const { return im_; }
  bool is_complex() const { return im_.has_value(); }
  const Box& support_box() const { return support_; }
  double stratum_margin() const { return margin_; }
  const std::optional<Annulus>& annulus() const { return annulus_; }
  Symmetry symmetry() const { return symmetry_; }
  const std::string& label() const { return label_; }
  std::string to_prefix() const;

  ScalarField conj() const;
  ScalarField scaled(Number c) const;
  ScalarField with_label(std::string label) const;
  // exact support test used by eval_jet
  bool in_support(std::span<const double> x) const;

 private:
  GroupModel model_;
  Expr re_;
  std::optional<Expr> im_;
  Box support_;
  double margin_;
  std::optional<Annulus> annulus_;
  Symmetry symmetry_;
  std::string label_;
};

template <class T>
struct FieldJet {
  Jet<T> re, im;
  bool complex = false;
};

template <class T>
FieldJet<T> eval_jet(const ScalarField& f, std::span<const T> x, int order);

// g(|x'|) with the log-radial bump profile; Euclidean models only (use
// tensor_with_t_bump to reach the Heisenberg group).
ScalarField log_radial_bump(const GroupModel& model, double r0, double s);
ScalarField log_radial_bump(const GroupModel& model, double r0, double s, const Box& box);
// bump in the model quasi-norm (anisotropic homogeneous models)
ScalarField quasi_radial_bump(const GroupModel& model, double r0, double s);
ScalarField t_bump(double center, double half_width);
ScalarField tensor_with_t_bump(const ScalarField& f, const ScalarField& t_profile);
ScalarField hardy_extremizer_family(const GroupModel& model, double eps, const ScalarField& cutoff);
// multiplies by a polynomial-like real factor (support unchanged, radial symmetry dropped)
ScalarField times(const ScalarField& f, const Expr& factor, std::string label);
ScalarField make_complex(const ScalarField& re, const ScalarField& im, std::string label);

struct NamedField {
  std::string name;
  ScalarField field;
};
// real radial, real non-radial, complex
std::vector<NamedField> default_fields(const GroupModel& model);

}  // namespace carnot_hardy
