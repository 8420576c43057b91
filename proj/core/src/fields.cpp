#include "carnot_hardy/fields.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace carnot_hardy {

namespace ex {

namespace {
Expr node(ExprKind k, std::vector<Expr> args = {}, int index = 0, Number a = {}, Number b = {}) {
  auto n = std::make_shared<ExprNode>();
  n->kind = k;
  n->args = std::move(args);
  n->index = index;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}
void require(const Expr& e) {
  if (!e) throw std::invalid_argument("null expression");
}
}  // namespace

Expr constant(Number v) { return node(ExprKind::constant, {}, 0, std::move(v)); }
Expr coord(int i) {
  if (i < 0) throw std::invalid_argument("negative coordinate index");
  return node(ExprKind::coord, {}, i);
}
Expr norm() { return node(ExprKind::norm); }
Expr stratum_norm() { return node(ExprKind::stratum_norm); }
Expr add(std::vector<Expr> terms) {
  if (terms.empty()) return constant(0);
  for (auto& t : terms) require(t);
  if (terms.size() == 1) return terms[0];
  return node(ExprKind::add, std::move(terms));
}
Expr mul(std::vector<Expr> factors) {
  if (factors.empty()) return constant(1);
  for (auto& t : factors) require(t);
  if (factors.size() == 1) return factors[0];
  return node(ExprKind::mul, std::move(factors));
}
Expr neg(Expr e) {
  require(e);
  return node(ExprKind::neg, {std::move(e)});
}
Expr sub(Expr a, Expr b) { return add({std::move(a), neg(std::move(b))}); }
Expr pow(Expr base, Number exponent) {
  require(base);
  if (exponent.exact() && is_integer(exponent.rational())) {
    const auto& q = exponent.rational();
    if (!q.get_num().fits_sint_p()) throw std::invalid_argument("integer exponent too large");
    return node(ExprKind::pow, {std::move(base)}, static_cast<int>(q.get_num().get_si()));
  }
  return node(ExprKind::rpow, {std::move(base)}, 0, std::move(exponent));
}
Expr exp(Expr e) {
  require(e);
  return node(ExprKind::exp, {std::move(e)});
}
Expr log(Expr e) {
  require(e);
  return node(ExprKind::log, {std::move(e)});
}
Expr bump(Expr e, Number r0, Number s) {
  require(e);
  if (!(r0.value() > 0) || !(s.value() > 0)) throw std::invalid_argument("bump needs r0 > 0 and s > 0");
  return node(ExprKind::bump, {std::move(e)}, 0, std::move(r0), std::move(s));
}
Expr tbump(Expr e, Number center, Number half_width) {
  require(e);
  if (!(half_width.value() > 0)) throw std::invalid_argument("bump half-width must be positive");
  return node(ExprKind::tbump, {std::move(e)}, 0, std::move(center), std::move(half_width));
}

}  // namespace ex

// ---------------------------------------------------------------- text form

namespace {

void print(const Expr& e, std::ostringstream& os) {
  auto list = [&](const char* head) {
    os << '(' << head;
    for (const auto& a : e->args) {
      os << ' ';
      print(a, os);
    }
  };
  switch (e->kind) {
    case ExprKind::constant: os << e->a.str(); return;
    case ExprKind::coord: os << 'x' << e->index; return;
    case ExprKind::norm: os << "(norm)"; return;
    case ExprKind::stratum_norm: os << "(norm1)"; return;
    case ExprKind::add: list("add"); break;
    case ExprKind::mul: list("mul"); break;
    case ExprKind::neg: list("neg"); break;
    case ExprKind::pow: list("pow"); os << ' ' << e->index; break;
    case ExprKind::rpow: list("pow"); os << ' ' << e->a.str(); break;
    case ExprKind::exp: list("exp"); break;
    case ExprKind::log: list("log"); break;
    case ExprKind::bump: list("bump"); os << ' ' << e->a.str() << ' ' << e->b.str(); break;
    case ExprKind::tbump: list("tbump"); os << ' ' << e->a.str() << ' ' << e->b.str(); break;
  }
  os << ')';
}

struct Parser {
  std::vector<std::string> tokens;
  std::size_t pos = 0;

  explicit Parser(const std::string& text) {
    std::string cur;
    auto flush = [&] {
      if (!cur.empty()) tokens.push_back(cur), cur.clear();
    };
    for (char c : text) {
      if (c == '(' || c == ')') {
        flush();
        tokens.emplace_back(1, c);
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        flush();
      } else {
        cur += c;
      }
    }
    flush();
  }

  const std::string& next() {
    if (pos >= tokens.size()) throw std::invalid_argument("unexpected end of expression");
    return tokens[pos++];
  }
  void expect_close() {
    if (next() != ")") throw std::invalid_argument("expected ')'");
  }

  Expr atom(const std::string& t) {
    if (t == "norm") return ex::norm();
    if (t == "norm1") return ex::stratum_norm();
    if (t.size() > 1 && t[0] == 'x' && std::all_of(t.begin() + 1, t.end(), ::isdigit))
      return ex::coord(std::stoi(t.substr(1)));
    return ex::constant(Number::parse(t));
  }

  Expr parse() {
    std::string t = next();
    if (t == ")") throw std::invalid_argument("unexpected ')'");
    if (t != "(") return atom(t);
    std::string head = next();
    if (head == "norm" || head == "norm1") {
      expect_close();
      return atom(head);
    }
    std::vector<Expr> args;
    std::vector<std::string> nums;
    auto read_args = [&](std::size_t n_expr, std::size_t n_num) {
      for (std::size_t i = 0; i < n_expr; ++i) args.push_back(parse());
      for (std::size_t i = 0; i < n_num; ++i) nums.push_back(next());
      expect_close();
    };
    if (head == "add" || head == "mul") {
      while (pos < tokens.size() && tokens[pos] != ")") args.push_back(parse());
      expect_close();
      return head == "add" ? ex::add(args) : ex::mul(args);
    }
    if (head == "neg") return read_args(1, 0), ex::neg(args[0]);
    if (head == "exp") return read_args(1, 0), ex::exp(args[0]);
    if (head == "log") return read_args(1, 0), ex::log(args[0]);
    if (head == "pow") return read_args(1, 1), ex::pow(args[0], Number::parse(nums[0]));
    if (head == "bump") return read_args(1, 2), ex::bump(args[0], Number::parse(nums[0]), Number::parse(nums[1]));
    if (head == "tbump")
      return read_args(1, 2), ex::tbump(args[0], Number::parse(nums[0]), Number::parse(nums[1]));
    throw std::invalid_argument("unknown operator '" + head + "'");
  }
};

}  // namespace

std::string to_prefix(const Expr& e) {
  std::ostringstream os;
  print(e, os);
  return os.str();
}

Expr parse_prefix(const std::string& text) {
  Parser p(text);
  Expr e = p.parse();
  if (p.pos != p.tokens.size()) throw std::invalid_argument("trailing tokens in expression");
  return e;
}

Expr substitute_coords(const Expr& e, std::span<const int> remap, bool norm_to_stratum) {
  switch (e->kind) {
    case ExprKind::coord:
      if (e->index >= static_cast<int>(remap.size())) throw std::invalid_argument("coordinate outside remap");
      return ex::coord(remap[e->index]);
    case ExprKind::norm: return norm_to_stratum ? ex::stratum_norm() : e;
    case ExprKind::constant:
    case ExprKind::stratum_norm: return e;
    default: break;
  }
  auto n = std::make_shared<ExprNode>(*e);
  for (auto& a : n->args) a = substitute_coords(a, remap, norm_to_stratum);
  return n;
}

bool contains_kind(const Expr& e, ExprKind k) {
  if (e->kind == k) return true;
  return std::any_of(e->args.begin(), e->args.end(), [k](const Expr& a) { return contains_kind(a, k); });
}

// ---------------------------------------------------------------- jets

namespace {

template <class T>
constexpr bool is_exact = !std::is_same_v<T, double>;

template <class T>
[[noreturn]] void inexact(const char* what) {
  throw std::domain_error(std::string(what) + " is not available in exact rational arithmetic");
}

template <class T>
T from_number(const Number& n) {
  if constexpr (is_exact<T>)
    return n.rational();
  else
    return n.value();
}

template <class T>
Jet<T> squared_radius(const GroupModel& m, std::span<const T> x, int order, int count) {
  const int d = m.ambient_dim();
  Jet<T> r(d, order);
  for (int i = 0; i < count; ++i) {
    r[0] += x[i] * x[i];
    if (order >= 1) r[1 + i] = T(2) * x[i];
  }
  if (order >= 2) {
    std::vector<int> alpha(d, 0);
    for (int i = 0; i < count; ++i) {
      alpha[i] = 2;
      r[r.layout().position(alpha)] = T(1);
      alpha[i] = 0;
    }
  }
  return r;
}

Jet<double> real_power(const Jet<double>& j, double p) {
  double a = j.value();
  if (!(a > 0)) throw std::domain_error("real power of a nonpositive subexpression");
  std::array<double, max_jet_order + 1> tc{};
  double coef = 1, ap = std::pow(a, p);
  for (int m = 0; m <= j.order(); ++m) {
    tc[m] = coef * ap;
    coef *= (p - m) / (m + 1);
    ap /= a;
  }
  return j.compose(std::span<const double>(tc.data(), j.order() + 1));
}

Jet<double> exp_jet(const Jet<double>& j) {
  std::array<double, max_jet_order + 1> tc{};
  double e = std::exp(j.value()), fact = 1;
  for (int m = 0; m <= j.order(); ++m) {
    tc[m] = e / fact;
    fact *= m + 1;
  }
  return j.compose(std::span<const double>(tc.data(), j.order() + 1));
}

Jet<double> log_jet(const Jet<double>& j) {
  double a = j.value();
  if (!(a > 0)) throw std::domain_error("log of a nonpositive subexpression");
  std::array<double, max_jet_order + 1> tc{};
  tc[0] = std::log(a);
  double ap = 1;
  for (int m = 1; m <= j.order(); ++m) {
    ap *= a;
    tc[m] = ((m % 2) ? 1.0 : -1.0) / (m * ap);
  }
  return j.compose(std::span<const double>(tc.data(), j.order() + 1));
}

// exp(-1/(1-u^2)) for |u| < 1, zero jet otherwise
Jet<double> bump_of(const Jet<double>& u) {
  if (std::abs(u.value()) >= 1) return Jet<double>(u.dim(), u.order());
  Jet<double> w = Jet<double>::constant(u.dim(), u.order(), 1.0) - u * u;
  return exp_jet(-w.reciprocal());
}

template <class T>
struct Evaluator {
  const GroupModel& model;
  std::span<const T> x;
  int order;
  int dim;

  Jet<T> stratum_sq() const { return squared_radius<T>(model, x, order, model.first_stratum_dim()); }

  Jet<T> norm_jet() const {
    if constexpr (is_exact<T>) {
      inexact<T>("the quasi-norm");
    } else {
      if (model.is_heisenberg()) {
        Jet<double> r2 = stratum_sq();
        Jet<double> t = Jet<double>::variable(dim, order, model.t_index(), x[model.t_index()]);
        return real_power(r2 * r2 + 16.0 * (t * t), 0.25);
      }
      const auto& qn = model.quasi_norm_spec();
      if (qn.kind == QuasiNormSpec::Kind::euclidean) return real_power(stratum_sq(), 0.5);
      auto e = qn.exponents(model.dilations());
      Jet<double> s(dim, order);
      for (int i = 0; i < dim; ++i) s += Jet<double>::variable(dim, order, i, x[i]).ipow(e[i]);
      return real_power(s, 1.0 / (2 * qn.m));
    }
  }

  Jet<T> eval(const Expr& e) const {
    switch (e->kind) {
      case ExprKind::constant: return Jet<T>::constant(dim, order, from_number<T>(e->a));
      case ExprKind::coord:
        if (e->index >= dim) throw std::out_of_range("coordinate index beyond model dimension");
        return Jet<T>::variable(dim, order, e->index, x[e->index]);
      case ExprKind::norm: return norm_jet();
      case ExprKind::stratum_norm:
        if constexpr (is_exact<T>)
          inexact<T>("|x'|");
        else
          return real_power(stratum_sq(), 0.5);
      case ExprKind::add: {
        Jet<T> r = eval(e->args[0]);
        for (std::size_t i = 1; i < e->args.size(); ++i) r += eval(e->args[i]);
        return r;
      }
      case ExprKind::mul: {
        Jet<T> r = eval(e->args[0]);
        for (std::size_t i = 1; i < e->args.size(); ++i) r = r * eval(e->args[i]);
        return r;
      }
      case ExprKind::neg: return -eval(e->args[0]);
      case ExprKind::pow: {
        const Expr& base = e->args[0];
        int k = e->index;
        // even powers of |x'| (or of the Euclidean norm) stay rational
        bool euclid_norm = base->kind == ExprKind::norm && !model.is_heisenberg() &&
                           model.quasi_norm_spec().kind == QuasiNormSpec::Kind::euclidean;
        if ((base->kind == ExprKind::stratum_norm || euclid_norm) && k % 2 == 0) {
          Jet<T> r2 = stratum_sq();
          if (k < 0 && r2.value() == 0) throw std::domain_error("negative power of |x'| at x' = 0");
          return r2.ipow(k / 2);
        }
        Jet<T> b = eval(base);
        if (k < 0 && b.value() == 0) throw std::domain_error("negative power of a vanishing subexpression");
        return b.ipow(k);
      }
      case ExprKind::rpow:
        if constexpr (is_exact<T>)
          inexact<T>("a real power");
        else
          return real_power(eval(e->args[0]), e->a.value());
      case ExprKind::exp:
        if constexpr (is_exact<T>)
          inexact<T>("exp");
        else
          return exp_jet(eval(e->args[0]));
      case ExprKind::log:
        if constexpr (is_exact<T>)
          inexact<T>("log");
        else
          return log_jet(eval(e->args[0]));
      case ExprKind::bump:
        if constexpr (is_exact<T>) {
          inexact<T>("the bump profile");
        } else {
          Jet<double> inner = eval(e->args[0]);
          if (!(inner.value() > 0)) return Jet<double>(dim, order);
          Jet<double> u = log_jet(inner);
          u[0] -= std::log(e->a.value());
          u *= 1.0 / e->b.value();
          return bump_of(u);
        }
      case ExprKind::tbump:
        if constexpr (is_exact<T>) {
          inexact<T>("the bump profile");
        } else {
          Jet<double> u = eval(e->args[0]);
          u[0] -= e->a.value();
          u *= 1.0 / e->b.value();
          return bump_of(u);
        }
    }
    throw std::logic_error("unhandled expression kind");
  }
};

}  // namespace

template <class T>
Jet<T> eval_expr_jet(const Expr& e, const GroupModel& model, std::span<const T> x, int order) {
  if (static_cast<int>(x.size()) != model.ambient_dim()) throw std::invalid_argument("point dimension mismatch");
  if (order < 0 || order > max_jet_order) throw std::out_of_range("jet order must be in [0, 4]");
  Evaluator<T> ev{model, x, order, model.ambient_dim()};
  return ev.eval(e);
}

template Jet<double> eval_expr_jet<double>(const Expr&, const GroupModel&, std::span<const double>, int);
template Jet<Rational> eval_expr_jet<Rational>(const Expr&, const GroupModel&, std::span<const Rational>, int);

// ---------------------------------------------------------------- fields

bool Box::contains(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dim()) return false;
  for (int i = 0; i < dim(); ++i)
    if (x[i] < axes[i].first || x[i] > axes[i].second) return false;
  return true;
}

bool Box::contains(const Box& other) const {
  if (other.dim() != dim()) return false;
  for (int i = 0; i < dim(); ++i)
    if (other.axes[i].first < axes[i].first || other.axes[i].second > axes[i].second) return false;
  return true;
}

bool Box::bounded() const {
  for (const auto& [lo, hi] : axes)
    if (!std::isfinite(lo) || !std::isfinite(hi)) return false;
  return true;
}

ScalarField::ScalarField(GroupModel model, Expr re, std::optional<Expr> im, Box support, double stratum_margin,
                         std::optional<Annulus> annulus, Symmetry symmetry, std::string label)
    : model_(std::move(model)),
      re_(std::move(re)),
      im_(std::move(im)),
      support_(std::move(support)),
      margin_(stratum_margin),
      annulus_(annulus),
      symmetry_(symmetry),
      label_(std::move(label)) {
  if (!re_) throw std::invalid_argument("field needs a real part");
  if (support_.dim() != model_.ambient_dim()) throw std::invalid_argument("support box dimension mismatch");
  if (!(margin_ >= 0)) throw std::invalid_argument("stratum margin must be nonnegative");
  if (annulus_ && !(annulus_->lo >= 0 && annulus_->hi > annulus_->lo))
    throw std::invalid_argument("annulus needs 0 <= lo < hi");
}

std::string ScalarField::to_prefix() const {
  if (!im_) return carnot_hardy::to_prefix(re_);
  return "(complex " + carnot_hardy::to_prefix(re_) + " " + carnot_hardy::to_prefix(*im_) + ")";
}

ScalarField ScalarField::conj() const {
  ScalarField f = *this;
  if (f.im_) f.im_ = ex::neg(*f.im_);
  return f;
}

ScalarField ScalarField::scaled(Number c) const {
  ScalarField f = *this;
  f.re_ = ex::mul({ex::constant(c), re_});
  if (im_) f.im_ = ex::mul({ex::constant(c), *im_});
  return f;
}

ScalarField ScalarField::with_label(std::string label) const {
  ScalarField f = *this;
  f.label_ = std::move(label);
  return f;
}

bool ScalarField::in_support(std::span<const double> x) const {
  if (!support_.contains(x)) return false;
  if (annulus_) {
    double r = annulus_->stratum ? stratum_norm(model_, x) : quasi_norm(model_, x);
    if (!(r > annulus_->lo && r < annulus_->hi)) return false;
  }
  return true;
}

template <class T>
FieldJet<T> eval_jet(const ScalarField& f, std::span<const T> x, int order) {
  const int d = f.dim();
  if (static_cast<int>(x.size()) != d) throw std::invalid_argument("point dimension mismatch");
  FieldJet<T> out;
  out.complex = f.is_complex();
  std::vector<double> xd(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) xd[i] = to_double(x[i]);
  if (!f.in_support(xd)) {
    out.re = Jet<T>(d, order);
    out.im = Jet<T>(d, order);
    return out;
  }
  out.re = eval_expr_jet<T>(f.re(), f.model(), x, order);
  out.im = f.im() ? eval_expr_jet<T>(*f.im(), f.model(), x, order) : Jet<T>(d, order);
  return out;
}

template FieldJet<double> eval_jet<double>(const ScalarField&, std::span<const double>, int);
template FieldJet<Rational> eval_jet<Rational>(const ScalarField&, std::span<const Rational>, int);

// ---------------------------------------------------------------- presets

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

Box cube(int dim, double half) { return Box{std::vector<std::pair<double, double>>(dim, {-half, half})}; }

}  // namespace

ScalarField log_radial_bump(const GroupModel& model, double r0, double s) {
  if (!(r0 > 0) || !(s > 0)) throw std::invalid_argument("log_radial_bump needs r0 > 0 and s > 0");
  double hi = r0 * std::exp(s);
  return log_radial_bump(model, r0, s, cube(model.ambient_dim(), hi));
}

ScalarField log_radial_bump(const GroupModel& model, double r0, double s, const Box& box) {
  if (!(r0 > 0) || !(s > 0)) throw std::invalid_argument("log_radial_bump needs r0 > 0 and s > 0");
  if (model.is_heisenberg())
    throw std::invalid_argument("a field of |x'| alone is not compactly supported on the Heisenberg group; "
                                "build it on the first stratum and use tensor_with_t_bump");
  double lo = r0 * std::exp(-s), hi = r0 * std::exp(s);
  Box support = cube(model.ambient_dim(), hi);
  for (int i = 0; i < support.dim() && i < box.dim(); ++i) {
    support.axes[i].first = std::max(support.axes[i].first, box.axes[i].first);
    support.axes[i].second = std::min(support.axes[i].second, box.axes[i].second);
  }
  return ScalarField(model, ex::bump(ex::stratum_norm(), Number::real(r0), Number::real(s)), std::nullopt, support,
                     lo, Annulus{true, lo, hi}, Symmetry::stratum_radial, "logbump:" + fmt(r0) + "," + fmt(s));
}

ScalarField quasi_radial_bump(const GroupModel& model, double r0, double s) {
  if (!(r0 > 0) || !(s > 0)) throw std::invalid_argument("quasi_radial_bump needs r0 > 0 and s > 0");
  if (model.is_heisenberg()) throw std::invalid_argument("quasi_radial_bump is for Euclidean models");
  if (model.is_isotropic_euclidean()) return log_radial_bump(model, r0, s).with_label("qbump:" + fmt(r0) + "," + fmt(s));
  double lo = r0 * std::exp(-s), hi = r0 * std::exp(s);
  const auto& d = model.dilations();
  auto e = model.quasi_norm_spec().exponents(d);
  int m = model.quasi_norm_spec().m;
  Box box;
  double margin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < d.dim(); ++i) {
    double h = std::pow(hi, to_double(d.weights[i]));
    box.axes.push_back({-h, h});
    margin = std::min(margin, std::pow(std::pow(lo, 2.0 * m) / d.dim(), 1.0 / e[i]));
  }
  return ScalarField(model, ex::bump(ex::norm(), Number::real(r0), Number::real(s)), std::nullopt, box, margin,
                     Annulus{false, lo, hi}, Symmetry::none, "qbump:" + fmt(r0) + "," + fmt(s));
}

ScalarField t_bump(double center, double half_width) {
  if (!(half_width > 0)) throw std::invalid_argument("t bump needs a positive half-width");
  return ScalarField(GroupModel::euclidean(1), ex::tbump(ex::coord(0), Number::real(center), Number::real(half_width)),
                     std::nullopt, Box{{{center - half_width, center + half_width}}}, 0.0, std::nullopt,
                     Symmetry::none, "tbump:" + fmt(center) + "," + fmt(half_width));
}

ScalarField tensor_with_t_bump(const ScalarField& f, const ScalarField& t_profile) {
  const auto& fm = f.model();
  if (!fm.is_isotropic_euclidean() || fm.ambient_dim() % 2 != 0)
    throw std::invalid_argument("tensor_with_t_bump needs a field on an even-dimensional first stratum");
  if (t_profile.dim() != 1) throw std::invalid_argument("t profile must be one-dimensional");
  if (!t_profile.support_box().bounded())
    throw std::invalid_argument("t profile is not compactly supported");
  if (t_profile.is_complex()) throw std::invalid_argument("t profile must be real");
  if (contains_kind(t_profile.re(), ExprKind::norm) || contains_kind(t_profile.re(), ExprKind::stratum_norm))
    throw std::invalid_argument("t profile must be written in the coordinate only");
  int n = fm.ambient_dim() / 2;
  GroupModel h = GroupModel::heisenberg(n);
  std::vector<int> same(2 * n);
  for (int i = 0; i < 2 * n; ++i) same[i] = i;
  std::vector<int> to_t{2 * n};
  Expr b = substitute_coords(t_profile.re(), to_t, false);
  Expr re = ex::mul({substitute_coords(f.re(), same, true), b});
  std::optional<Expr> im;
  if (f.im()) im = ex::mul({substitute_coords(*f.im(), same, true), b});
  Box box = f.support_box();
  box.axes.push_back(t_profile.support_box().axes[0]);
  std::optional<Annulus> ann = f.annulus();
  if (ann) ann->stratum = true;
  return ScalarField(h, re, im, box, f.stratum_margin(), ann, f.symmetry(), f.label() + "*" + t_profile.label());
}

ScalarField hardy_extremizer_family(const GroupModel& model, double eps, const ScalarField& cutoff) {
  if (!(eps > 0)) throw std::invalid_argument("extremizer family needs eps > 0");
  int N = model.first_stratum_dim();
  if (model.is_heisenberg() ? N < 4 : (N < 3 || !model.is_isotropic_euclidean()))
    throw std::invalid_argument("extremizer family needs N >= 3 (Euclidean) or N = 2n >= 4 (Heisenberg)");
  if (!(cutoff.model() == model)) throw std::invalid_argument("cutoff lives on a different model");
  if (cutoff.is_complex()) throw std::invalid_argument("cutoff must be real");
  if (!(cutoff.stratum_margin() > 0)) throw std::invalid_argument("cutoff must vanish near x' = 0");
  double e = -(N - 2) / 2.0 + eps;
  Expr re = e == 0 ? cutoff.re() : ex::mul({ex::pow(ex::stratum_norm(), Number::real(e)), cutoff.re()});
  return ScalarField(model, re, std::nullopt, cutoff.support_box(), cutoff.stratum_margin(), cutoff.annulus(),
                     cutoff.symmetry(), "extremizer:" + fmt(eps) + "[" + cutoff.label() + "]");
}

ScalarField times(const ScalarField& f, const Expr& factor, std::string label) {
  std::optional<Expr> im;
  if (f.im()) im = ex::mul({*f.im(), factor});
  return ScalarField(f.model(), ex::mul({f.re(), factor}), im, f.support_box(), f.stratum_margin(), f.annulus(),
                     Symmetry::none, std::move(label));
}

ScalarField make_complex(const ScalarField& re, const ScalarField& im, std::string label) {
  if (!(re.model() == im.model())) throw std::invalid_argument("real and imaginary parts on different models");
  if (re.is_complex() || im.is_complex()) throw std::invalid_argument("parts must be real fields");
  Box box = re.support_box();
  for (int i = 0; i < box.dim(); ++i) {
    box.axes[i].first = std::min(box.axes[i].first, im.support_box().axes[i].first);
    box.axes[i].second = std::max(box.axes[i].second, im.support_box().axes[i].second);
  }
  std::optional<Annulus> ann;
  if (re.annulus() && im.annulus() && re.annulus()->stratum == im.annulus()->stratum)
    ann = Annulus{re.annulus()->stratum, std::min(re.annulus()->lo, im.annulus()->lo),
                  std::max(re.annulus()->hi, im.annulus()->hi)};
  return ScalarField(re.model(), re.re(), im.re(), box, std::min(re.stratum_margin(), im.stratum_margin()), ann,
                     Symmetry::none, std::move(label));
}

std::vector<NamedField> default_fields(const GroupModel& model) {
  using namespace ex;
  auto c = [](int p, int q) { return constant(Number(Rational(p, q))); };
  if (model.is_heisenberg()) {
    int n = model.heisenberg_n();
    ScalarField base = tensor_with_t_bump(log_radial_bump(GroupModel::euclidean(2 * n), 1.0, 0.5), t_bump(0.0, 1.5));
    Expr x1 = coord(model.x_index(0)), y1 = coord(model.y_index(0)), t = coord(model.t_index());
    ScalarField nonradial =
        times(base, add({c(1, 1), mul({c(1, 2), x1}), mul({c(1, 3), y1, t})}), "nonradial[" + base.label() + "]");
    ScalarField re = times(base, add({c(1, 1), mul({c(1, 3), x1, t})}), "re");
    ScalarField im = times(base, add({mul({c(1, 2), y1}), mul({c(-1, 4), x1, t}), mul({c(1, 5), t})}), "im");
    return {{"radial", base.with_label("radial[" + base.label() + "]")},
            {"nonradial", nonradial},
            {"complex", make_complex(re, im, "complex[" + base.label() + "]")}};
  }
  ScalarField base = model.is_isotropic_euclidean() ? log_radial_bump(model, 1.0, 0.5)
                                                    : quasi_radial_bump(model, 1.0, 0.5);
  int last = model.ambient_dim() - 1;
  Expr x0 = coord(0), xl = coord(last), x1 = coord(std::min(1, last));
  ScalarField nonradial =
      times(base, add({c(1, 1), mul({c(1, 2), x0}), mul({c(1, 3), x1, xl})}), "nonradial[" + base.label() + "]");
  ScalarField re = times(base, add({c(1, 1), mul({c(1, 3), x0})}), "re");
  ScalarField im = times(base, add({mul({c(1, 2), xl}), mul({c(-1, 4), x0, x0})}), "im");
  return {{"radial", base.with_label("radial[" + base.label() + "]")},
          {"nonradial", nonradial},
          {"complex", make_complex(re, im, "complex[" + base.label() + "]")}};
}

}  // namespace carnot_hardy
