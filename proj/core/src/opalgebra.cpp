#include "carnot_hardy/opalgebra.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <stdexcept>

namespace carnot_hardy {

namespace op {

namespace {
std::shared_ptr<OpNode> make(OpKind k) {
  auto n = std::make_shared<OpNode>();
  n->kind = k;
  return n;
}
void require(const Op& o) {
  if (!o) throw std::invalid_argument("null operator");
}
}  // namespace

Op partial(int i) {
  auto n = make(OpKind::partial);
  n->index = i;
  n->diff_order = n->jet_order = 1;
  return n;
}
Op mul_coord(int i) {
  auto n = make(OpKind::mul_coord);
  n->index = i;
  return n;
}
Op mul_stratum_norm_pow(int k) {
  auto n = make(OpKind::mul_stratum_norm_pow);
  n->index = k;
  return n;
}
Op mul_norm_pow(int k) {
  auto n = make(OpKind::mul_norm_pow);
  n->index = k;
  return n;
}
Op scale(Number c) {
  auto n = make(OpKind::scale);
  n->factor = std::move(c);
  return n;
}
Op identity() { return scale(1); }
Op sum(std::vector<Op> terms) {
  if (terms.empty()) return scale(0);
  if (terms.size() == 1) return terms[0];
  auto n = make(OpKind::sum);
  for (auto& t : terms) {
    require(t);
    n->diff_order = std::max(n->diff_order, t->diff_order);
    n->jet_order = std::max(n->jet_order, t->jet_order);
  }
  n->args = std::move(terms);
  return n;
}
Op compose(std::vector<Op> factors) {
  if (factors.empty()) return identity();
  if (factors.size() == 1) return factors[0];
  auto n = make(OpKind::compose);
  for (auto& t : factors) {
    require(t);
    n->diff_order += t->diff_order;
    n->jet_order += t->jet_order;
  }
  n->args = std::move(factors);
  return n;
}
Op scaled(Number c, Op a) { return compose({scale(std::move(c)), std::move(a)}); }
Op neg(Op a) { return scaled(-1, std::move(a)); }
Op named(std::string name, Op expansion, Primitive p, int index) {
  require(expansion);
  auto n = make(OpKind::named);
  n->name = std::move(name);
  n->primitive = p;
  n->index = index;
  n->diff_order = expansion->diff_order;
  n->jet_order = expansion->jet_order;
  n->args = {std::move(expansion)};
  return n;
}
Op commutator(Op a, Op b) {
  require(a);
  require(b);
  if (a->diff_order > 3 || b->diff_order > 3 || a->jet_order + b->jet_order > max_jet_order)
    throw std::invalid_argument("commutator order overflow");
  auto n = make(OpKind::commutator);
  n->diff_order = std::max(0, a->diff_order + b->diff_order - 1);
  n->jet_order = a->jet_order + b->jet_order;
  n->args = {std::move(a), std::move(b)};
  return n;
}

}  // namespace op

std::string describe(const Op& o) {
  std::ostringstream os;
  auto list = [&](const char* head) {
    os << '(' << head;
    for (const auto& a : o->args) os << ' ' << describe(a);
    os << ')';
  };
  switch (o->kind) {
    case OpKind::partial: os << "d" << o->index; break;
    case OpKind::mul_coord: os << "x" << o->index; break;
    case OpKind::mul_stratum_norm_pow: os << "|x'|^" << o->index; break;
    case OpKind::mul_norm_pow: os << "|x|^" << o->index; break;
    case OpKind::scale: os << o->factor.str(); break;
    case OpKind::sum: list("+"); break;
    case OpKind::compose: list("o"); break;
    case OpKind::commutator: list("comm"); break;
    case OpKind::named: os << o->name; break;
  }
  return os.str();
}

// ---------------------------------------------------------------- primitives

HeisenbergPrimitives heisenberg_primitives(int n) {
  if (n < 1) throw std::invalid_argument("Heisenberg primitives need n >= 1");
  using namespace op;
  HeisenbergPrimitives p;
  int t = 2 * n;
  Op dt = partial(t);
  for (int j = 0; j < n; ++j) {
    int x = j, y = n + j;
    std::string k = std::to_string(j + 1);
    p.X.push_back(named("X" + k, sum({partial(x), compose({scale(Rational(-1, 2)), mul_coord(y), dt})}),
                        Primitive::x_field, j));
    p.Y.push_back(named("Y" + k, sum({partial(y), compose({scale(Rational(1, 2)), mul_coord(x), dt})}),
                        Primitive::y_field, j));
  }
  p.T = named("T", dt, Primitive::t_field);
  std::vector<Op> z, l, d;
  for (int j = 0; j < n; ++j) {
    z.push_back(compose({mul_coord(j), partial(n + j)}));
    z.push_back(neg(compose({mul_coord(n + j), partial(j)})));
    l.push_back(compose({p.X[j], p.X[j]}));
    l.push_back(compose({p.Y[j], p.Y[j]}));
  }
  for (int i = 0; i < 2 * n; ++i) d.push_back(compose({partial(i), partial(i)}));
  p.Z = named("Z", sum(z), Primitive::tangential);
  p.L = named("L", sum(l), Primitive::sublaplacian);
  p.laplacian_stratum = named("Delta'", sum(d), Primitive::stratum_laplacian);
  return p;
}

int stratum_coord(const GroupModel& m, int j) {
  if (j < 0 || j >= m.first_stratum_dim()) throw std::out_of_range("stratum coordinate index");
  return j;  // x_1..x_n, y_1..y_n on the Heisenberg model; all coordinates on R^n
}

namespace {
void require_stratified(const GroupModel& m) {
  if (!m.is_heisenberg() && !m.is_isotropic_euclidean())
    throw std::invalid_argument("horizontal operators need R^n with isotropic dilations or the Heisenberg group");
}
}  // namespace

std::vector<Op> horizontal_gradient(const GroupModel& m) {
  require_stratified(m);
  if (m.is_heisenberg()) {
    auto p = heisenberg_primitives(m.heisenberg_n());
    std::vector<Op> g = p.X;
    g.insert(g.end(), p.Y.begin(), p.Y.end());
    return g;
  }
  std::vector<Op> g;
  for (int i = 0; i < m.ambient_dim(); ++i) g.push_back(op::partial(i));
  return g;
}

Op sublaplacian(const GroupModel& m) {
  if (m.is_heisenberg()) return heisenberg_primitives(m.heisenberg_n()).L;
  return stratum_laplacian(m);
}

Op stratum_laplacian(const GroupModel& m) {
  if (m.is_heisenberg()) return heisenberg_primitives(m.heisenberg_n()).laplacian_stratum;
  require_stratified(m);
  std::vector<Op> d;
  for (int i = 0; i < m.ambient_dim(); ++i) d.push_back(op::compose({op::partial(i), op::partial(i)}));
  return op::named("Delta", op::sum(d));
}

Op euler_horizontal(const GroupModel& m) {
  auto g = horizontal_gradient(m);
  std::vector<Op> terms;
  for (int j = 0; j < m.first_stratum_dim(); ++j) terms.push_back(op::compose({op::mul_coord(stratum_coord(m, j)), g[j]}));
  return op::named("E", op::sum(terms));
}

Op radial_derivative_op(const GroupModel& m) {
  if (m.is_heisenberg()) throw std::invalid_argument("the radial derivative operator is realized on R^n only");
  const auto& w = m.dilations().weights;
  std::vector<Op> terms;
  for (int i = 0; i < m.ambient_dim(); ++i)
    terms.push_back(op::compose({op::scale(w[i]), op::mul_coord(i), op::partial(i)}));
  return op::named("R", op::compose({op::mul_norm_pow(-1), op::sum(terms)}));
}

std::complex<double> apply_at(const Op& o, const ScalarField& f, std::span<const double> x) {
  auto j = eval_jet<double>(f, x, o ? jet_order(o) : 0);
  if (!o) return {j.re.value(), j.complex ? j.im.value() : 0.0};
  double re = apply_jet(o, j.re, f.model(), x).value();
  double im = j.complex ? apply_jet(o, j.im, f.model(), x).value() : 0.0;
  return {re, im};
}

std::complex<double> radial_derivative(const GroupModel& m, const ScalarField& f, std::span<const double> x) {
  if (quasi_norm(m, x) < radial_threshold) throw std::domain_error("radial derivative needs |x| away from 0");
  return apply_at(radial_derivative_op(m), f, x);
}

Op tangential_sum(const GroupModel& m) {
  if (!m.is_heisenberg()) throw std::invalid_argument("tangential sum is defined on the Heisenberg group");
  int n = m.heisenberg_n();
  auto p = heisenberg_primitives(n);
  std::vector<Op> terms;
  for (int j = 0; j < n; ++j) {
    terms.push_back(op::compose({op::mul_coord(m.x_index(j)), p.Y[j]}));
    terms.push_back(op::neg(op::compose({op::mul_coord(m.y_index(j)), p.X[j]})));
  }
  return op::named("tan", op::sum(terms));
}

Op double_sum(const GroupModel& m) {
  auto g = horizontal_gradient(m);
  int N = m.first_stratum_dim();
  std::vector<Op> terms;
  for (int j = 0; j < N; ++j)
    for (int k = 0; k < N; ++k)
      terms.push_back(op::compose({op::mul_coord(stratum_coord(m, j)), op::mul_coord(stratum_coord(m, k)), g[j], g[k]}));
  return op::named("S", op::sum(terms));
}

std::pair<Op, Op> factorization_pair(const GroupModel& m, Number alpha, Number beta) {
  using namespace op;
  Op L = sublaplacian(m);
  Op E = euler_horizontal(m);
  Op inv2 = mul_stratum_norm_pow(-2);
  Number N(m.first_stratum_dim());
  Op t = named("T_ab", sum({neg(L), compose({scale(alpha), inv2, E}), compose({scale(beta), inv2})}));
  Number zero_order = -(alpha * (N + Number(-2)) + -beta);
  Op tp = named("T+_ab", sum({neg(L), compose({scale(-alpha), inv2, E}), compose({scale(zero_order), inv2})}));
  return {t, tp};
}

// ---------------------------------------------------------------- application

namespace {

template <class T>
T number_as(const Number& n) {
  if constexpr (std::is_same_v<T, double>)
    return n.value();
  else
    return n.rational();
}

template <class T>
struct Applier {
  const GroupModel& m;
  std::span<const T> x;
  bool expand;
  std::map<std::pair<int, int>, Jet<T>> weights;  // (power, order) -> |x'|^power jet
  std::map<std::pair<int, int>, Jet<T>> norm_weights;

  const Jet<T>& weight(int k, int order, bool stratum) {
    auto& cache = stratum ? weights : norm_weights;
    auto key = std::make_pair(k, order);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    Expr e = ex::pow(stratum ? ex::stratum_norm() : ex::norm(), Number(k));
    return cache.emplace(key, eval_expr_jet<T>(e, m, x, order)).first->second;
  }

  Jet<T> direct(const OpNode& o, const Jet<T>& f) {
    int n = m.heisenberg_n();
    int t = m.t_index();
    const T half = number_as<T>(Number(Rational(1, 2)));
    auto xf = [&](int j, const Jet<T>& g) {
      return g.partial(j) - g.partial(t).mul_coord(n + j, x[n + j]) * half;
    };
    auto yf = [&](int j, const Jet<T>& g) {
      return g.partial(n + j) + g.partial(t).mul_coord(j, x[j]) * half;
    };
    switch (o.primitive) {
      case Primitive::x_field: return xf(o.index, f);
      case Primitive::y_field: return yf(o.index, f);
      case Primitive::t_field: return f.partial(t);
      case Primitive::tangential: {
        Jet<T> r(f.dim(), f.order() - 1);
        for (int j = 0; j < n; ++j) r += f.partial(n + j) * x[j] - f.partial(j) * x[n + j];
        return r;
      }
      case Primitive::sublaplacian: {
        Jet<T> r(f.dim(), f.order() - 2);
        for (int j = 0; j < n; ++j) {
          r += xf(j, xf(j, f));
          r += yf(j, yf(j, f));
        }
        return r;
      }
      case Primitive::stratum_laplacian: {
        Jet<T> r(f.dim(), f.order() - 2);
        for (int i = 0; i < 2 * n; ++i) r += f.partial(i).partial(i);
        return r;
      }
      case Primitive::none: break;
    }
    throw std::logic_error("no direct rule for primitive");
  }

  Jet<T> apply(const Op& o, const Jet<T>& f) {
    if (f.order() < o->jet_order) throw std::invalid_argument("jet too shallow for operator");
    switch (o->kind) {
      case OpKind::partial:
        if (o->index >= f.dim()) throw std::out_of_range("partial index beyond model dimension");
        return f.partial(o->index);
      case OpKind::mul_coord:
        if (o->index >= f.dim()) throw std::out_of_range("coordinate index beyond model dimension");
        return f.mul_coord(o->index, x[o->index]);
      case OpKind::mul_stratum_norm_pow:
        if (o->index == 0) return f;
        return f * weight(o->index, f.order(), true);
      case OpKind::mul_norm_pow:
        if (o->index == 0) return f;
        return f * weight(o->index, f.order(), false);
      case OpKind::scale: return f * number_as<T>(o->factor);
      case OpKind::sum: {
        Jet<T> r = apply(o->args[0], f);
        for (std::size_t i = 1; i < o->args.size(); ++i) r += apply(o->args[i], f);
        return r;
      }
      case OpKind::compose: {
        Jet<T> r = f;
        for (auto it = o->args.rbegin(); it != o->args.rend(); ++it) r = apply(*it, r);
        return r;
      }
      case OpKind::commutator:
        return apply(o->args[0], apply(o->args[1], f)) - apply(o->args[1], apply(o->args[0], f));
      case OpKind::named:
        if (!expand && o->primitive != Primitive::none && m.is_heisenberg()) return direct(*o, f);
        return apply(o->args[0], f);
    }
    throw std::logic_error("unhandled operator kind");
  }
};

}  // namespace

template <class T>
Jet<T> apply_jet(const Op& o, const Jet<T>& f, const GroupModel& m, std::span<const T> x, bool expand_named) {
  if (static_cast<int>(x.size()) != m.ambient_dim() || f.dim() != m.ambient_dim())
    throw std::invalid_argument("point or jet dimension does not match the model");
  Applier<T> a{m, x, expand_named, {}, {}};
  return a.apply(o, f);
}

template <class T>
std::vector<Jet<T>> apply_jets(std::span<const Op> ops, const Jet<T>& f, const GroupModel& m, std::span<const T> x) {
  if (static_cast<int>(x.size()) != m.ambient_dim() || f.dim() != m.ambient_dim())
    throw std::invalid_argument("point or jet dimension does not match the model");
  Applier<T> a{m, x, false, {}, {}};
  std::vector<Jet<T>> out;
  out.reserve(ops.size());
  for (const auto& o : ops) out.push_back(a.apply(o, f));
  return out;
}

template std::vector<Jet<double>> apply_jets<double>(std::span<const Op>, const Jet<double>&, const GroupModel&,
                                                     std::span<const double>);
template Jet<double> apply_jet<double>(const Op&, const Jet<double>&, const GroupModel&, std::span<const double>, bool);
template Jet<Rational> apply_jet<Rational>(const Op&, const Jet<Rational>&, const GroupModel&,
                                           std::span<const Rational>, bool);

namespace {
void check_exact_point(const Op& o, const GroupModel& m, std::span<const Rational> x) {
  if (jet_order(o) > max_jet_order) throw std::invalid_argument("operator order exceeds 4");
  Rational r2 = 0;
  for (int i = 0; i < m.first_stratum_dim(); ++i) r2 += x[i] * x[i];
  std::function<void(const Op&)> walk = [&](const Op& n) {
    if (n->kind == OpKind::mul_stratum_norm_pow) {
      if (n->index % 2 != 0) throw std::domain_error("odd power of |x'| is irrational at rational points");
      if (n->index < 0 && r2 == 0) throw std::domain_error("singular multiplier at x' = 0");
    }
    if (n->kind == OpKind::mul_norm_pow) throw std::domain_error("quasi-norm multiplier is not exact");
    for (const auto& a : n->args) walk(a);
  };
  walk(o);
}
}  // namespace

Rational apply_exact(const Op& o, const Jet<Rational>& f, const GroupModel& m, std::span<const Rational> x,
                     bool expand_named) {
  check_exact_point(o, m, x);
  return apply_jet<Rational>(o, f, m, x, expand_named).value();
}

Rational apply_exact(const Op& o, const ScalarField& f, std::span<const Rational> x, bool expand_named) {
  check_exact_point(o, f.model(), x);
  auto j = eval_jet<Rational>(f, x, jet_order(o));
  if (f.is_complex()) throw std::domain_error("apply_exact takes real fields");
  return apply_jet<Rational>(o, j.re, f.model(), x, expand_named).value();
}

// ---------------------------------------------------------------- polynomials

std::string Polynomial::str() const {
  std::ostringstream os;
  bool first = true;
  for (const auto& [alpha, c] : terms) {
    if (c == 0) continue;
    os << (first ? "" : " + ") << to_string(c);
    for (int i = 0; i < dim; ++i) {
      if (alpha[i] == 0) continue;
      os << "*x" << i;
      if (alpha[i] > 1) os << '^' << alpha[i];
    }
    first = false;
  }
  return first ? "0" : os.str();
}

Jet<Rational> Polynomial::jet_at(std::span<const Rational> x, int order) const {
  // Taylor shift one variable at a time: p(x + h) as a polynomial in h
  std::map<std::vector<int>, Rational> cur;
  for (const auto& [a, c] : terms) cur[a] += c;
  for (int i = 0; i < dim; ++i) {
    std::map<std::vector<int>, Rational> next;
    for (const auto& [a, c] : cur) {
      if (c == 0) continue;
      int k = a[i];
      mpz_class binom = 1;
      std::vector<Rational> xp(k + 1, Rational(1));
      for (int e = 1; e <= k; ++e) xp[e] = xp[e - 1] * x[i];
      std::vector<int> b = a;
      for (int j = 0; j <= k; ++j) {
        // coefficient C(k, j) x^(k - j) of h^j
        b[i] = j;
        next[b] += Rational(binom) * xp[k - j] * c;
        binom = binom * (k - j) / (j + 1);
      }
    }
    cur = std::move(next);
  }
  Jet<Rational> jet(dim, order);
  for (const auto& [a, c] : cur) {
    int deg = 0;
    for (int v : a) deg += v;
    if (deg <= order) jet[jet.layout().position(a)] = c;
  }
  return jet;
}

namespace {
void monomials(int dim, int degree, int var, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (var == dim) {
    out.push_back(cur);
    return;
  }
  for (int k = 0; k <= degree; ++k) {
    cur[var] = k;
    monomials(dim, degree - k, var + 1, cur, out);
  }
  cur[var] = 0;
}
}  // namespace

Polynomial random_polynomial(int dim, int degree, std::mt19937_64& rng) {
  Polynomial p;
  p.dim = dim;
  std::vector<std::vector<int>> all;
  std::vector<int> cur(dim, 0);
  monomials(dim, degree, 0, cur, all);
  std::uniform_int_distribution<int> num(-9, 9), den(1, 4);
  for (auto& a : all) {
    Rational c(num(rng), den(rng));
    c.canonicalize();
    p.terms.emplace_back(a, c);
  }
  return p;
}

// ---------------------------------------------------------------- identity catalog

std::uint64_t stable_hash(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

nlohmann::json IdentityParams::to_json() const {
  return {{"alpha", alpha.str()}, {"beta", beta.str()}, {"gamma", gamma}};
}

nlohmann::json IdentityResult::to_json() const {
  nlohmann::json p = nlohmann::json::object();
  auto full = params.to_json();
  for (const auto& n : param_names) p[n] = full[n];
  nlohmann::json j = {{"id", id}, {"model", model}, {"params", p}, {"trials", trials}, {"pass", pass}};
  if (witness)
    j["witness"] = {{"point", witness->point},
                    {"input_poly", witness->input_poly},
                    {"lhs_value", witness->lhs_value},
                    {"rhs_value", witness->rhs_value}};
  return j;
}

namespace {

using namespace op;

std::optional<std::string> stratified_only(const GroupModel& m, const IdentityParams&) {
  if (m.is_heisenberg() || m.is_isotropic_euclidean()) return std::nullopt;
  return "needs R^n with isotropic dilations or the Heisenberg group";
}

std::optional<std::string> heisenberg_only(const GroupModel& m, const IdentityParams&) {
  if (m.is_heisenberg()) return std::nullopt;
  return "defined on the Heisenberg group only";
}

std::optional<std::string> even_gamma(const GroupModel& m, const IdentityParams& p) {
  if (auto r = stratified_only(m, p)) return r;
  if (p.gamma % 2 != 0) return "gamma must be even for exact checking";
  return std::nullopt;
}

Op inv(int k) { return mul_stratum_norm_pow(-k); }

Op tt_expansion(const GroupModel& m, const IdentityParams& p, bool with_commutator) {
  Number a = p.alpha, b = p.beta, N(m.first_stratum_dim());
  Op L = sublaplacian(m), E = euler_horizontal(m), S = double_sum(m);
  auto n = [](int v) { return Number(v); };
  std::vector<Op> t = {
      compose({L, L}),
      compose({scale(-(n(2) * b + -((N + n(-4)) * a))), inv(2), L}),
      compose({scale(n(2) * (N + n(-2)) * a + n(4) * b + -((N + n(-3)) * a * a)), inv(4), E}),
      compose({scale(b * b + n(2) * (N + n(-4)) * b + -((N + n(-4)) * a * b)), inv(4)}),
      compose({scale(-(a * (a + n(-4)))), inv(4), S}),
  };
  if (with_commutator && m.is_heisenberg())
    t.push_back(compose({scale(n(2) * a), inv(2), tangential_sum(m), heisenberg_primitives(m.heisenberg_n()).T}));
  return sum(t);
}

Op ttstar_expansion(const GroupModel& m, const IdentityParams& p) {
  Number a = p.alpha, b = p.beta, N(m.first_stratum_dim());
  Op L = sublaplacian(m), E = euler_horizontal(m), S = double_sum(m);
  auto n = [](int v) { return Number(v); };
  std::vector<Op> t = {
      compose({L, L}),
      compose({scale(-(n(2) * b + -(N * a))), inv(2), L}),
      compose({scale(n(6) * (n(2) + -N) * a + n(4) * b + -((N + n(-3)) * a * a)), inv(4), E}),
      compose({scale(b * b + n(2) * (N + n(-4)) * b + -(N * a * b) + n(2) * a * a * (N + n(-2)) +
                     -(n(2) * a * (N + n(-4)) * (N + n(-2)))),
               inv(4)}),
      compose({scale(-(a * (a + n(4)))), inv(4), S}),
  };
  if (m.is_heisenberg())
    t.push_back(compose({scale(n(-2) * a), inv(2), tangential_sum(m), heisenberg_primitives(m.heisenberg_n()).T}));
  return sum(t);
}

std::vector<IdentityParams> ab_grid() {
  return {{1, 0, 2}, {0, 1, 2}, {2, -3, 2}, {Rational(1, 2), Rational(5, 3), 2}};
}

std::vector<IdentityCase> build_catalog() {
  std::vector<IdentityCase> c;
  auto none = std::vector<IdentityParams>{IdentityParams{}};

  c.push_back({"formula1", "sum_j (X_j |x'|^g)^2 = g^2 |x'|^(2g-2), as squared commutators with |x'|^g", {"gamma"},
               even_gamma,
               [](const GroupModel& m, const IdentityParams& p) {
                 std::vector<Op> terms;
                 for (const auto& g : horizontal_gradient(m)) {
                   Op k = commutator(g, mul_stratum_norm_pow(p.gamma));
                   terms.push_back(compose({k, k}));
                 }
                 return std::make_pair(sum(terms),
                                       compose({scale(p.gamma * p.gamma), mul_stratum_norm_pow(2 * p.gamma - 2)}));
               },
               {{0, 0, 2}, {0, 0, 4}, {0, 0, -2}}});

  c.push_back({"formula2", "div_H(x'/|x'|^g) = (N-g)/|x'|^g", {"gamma"}, even_gamma,
               [](const GroupModel& m, const IdentityParams& p) {
                 auto g = horizontal_gradient(m);
                 std::vector<Op> terms;
                 for (int j = 0; j < m.first_stratum_dim(); ++j)
                   terms.push_back(commutator(g[j], compose({mul_coord(stratum_coord(m, j)),
                                                             mul_stratum_norm_pow(-p.gamma)})));
                 return std::make_pair(sum(terms), compose({scale(m.first_stratum_dim() - p.gamma),
                                                            mul_stratum_norm_pow(-p.gamma)}));
               },
               {{0, 0, 2}, {0, 0, 4}, {0, 0, -2}}});

  c.push_back({"formula3", "L(f/|x'|^2) = Lf/|x'|^2 - 4 x'.grad_H f/|x'|^4 - (2N-8) f/|x'|^4", {}, stratified_only,
               [](const GroupModel& m, const IdentityParams&) {
                 Op L = sublaplacian(m), E = euler_horizontal(m);
                 int N = m.first_stratum_dim();
                 return std::make_pair(compose({L, inv(2)}),
                                       sum({compose({inv(2), L}), compose({scale(-4), inv(4), E}),
                                            compose({scale(8 - 2 * N), inv(4)})}));
               },
               none});

  c.push_back({"formula4", "(x'.grad_H/|x'|^2)(f/|x'|^2) = -2f/|x'|^4 + x'.grad_H f/|x'|^4", {}, stratified_only,
               [](const GroupModel& m, const IdentityParams&) {
                 Op E = euler_horizontal(m);
                 return std::make_pair(compose({inv(2), E, inv(2)}),
                                       sum({compose({scale(-2), inv(4)}), compose({inv(4), E})}));
               },
               none});

  c.push_back({"strat_tt_sum", "T+T + TT+ expanded without commutator terms", {"alpha", "beta"}, stratified_only,
               [](const GroupModel& m, const IdentityParams& p) {
                 auto [t, tp] = factorization_pair(m, p.alpha, p.beta);
                 Number a = p.alpha, b = p.beta, N(m.first_stratum_dim());
                 Op L = sublaplacian(m), E = euler_horizontal(m), S = double_sum(m);
                 auto n = [](int v) { return Number(v); };
                 Op rhs = sum({
                     compose({scale(2), L, L}),
                     compose({scale(n(2) * a * (N + n(-2)) + n(-4) * b), inv(2), L}),
                     compose({scale(n(-4) * a * (N + n(-2)) + -(n(2) * a * a * (N + n(-3))) + n(8) * b), inv(4), E}),
                     compose({scale(n(2) * a * (N + n(-2)) * (n(4) + -N) + n(2) * a * a * (N + n(-2)) +
                                    -(n(2) * a * b * (N + n(-2))) + (n(4) * N + n(-16)) * b + n(2) * b * b),
                              inv(4)}),
                     compose({scale(n(-2) * a * a), inv(4), S}),
                 });
                 return std::make_pair(sum({compose({tp, t}), compose({t, tp})}), rhs);
               },
               ab_grid()});

  c.push_back({"heis_tt", "T+T expansion including the tangential-commutator term", {"alpha", "beta"}, stratified_only,
               [](const GroupModel& m, const IdentityParams& p) {
                 auto [t, tp] = factorization_pair(m, p.alpha, p.beta);
                 return std::make_pair(compose({tp, t}), tt_expansion(m, p, true));
               },
               ab_grid()});

  c.push_back({"heis_ttstar", "TT+ expansion including the tangential-commutator term", {"alpha", "beta"},
               stratified_only,
               [](const GroupModel& m, const IdentityParams& p) {
                 auto [t, tp] = factorization_pair(m, p.alpha, p.beta);
                 return std::make_pair(compose({t, tp}), ttstar_expansion(m, p));
               },
               ab_grid()});

  c.push_back({"lap_decomp", "L = Delta' + |x'|^2/4 T^2 + ZT", {}, heisenberg_only,
               [](const GroupModel& m, const IdentityParams&) {
                 auto h = heisenberg_primitives(m.heisenberg_n());
                 return std::make_pair(h.L, sum({h.laplacian_stratum,
                                                 compose({scale(Rational(1, 4)), mul_stratum_norm_pow(2), h.T, h.T}),
                                                 compose({h.Z, h.T})}));
               },
               none});

  c.push_back({"lap3", "ZT = L - Delta' - |x'|^2/4 T^2", {}, heisenberg_only,
               [](const GroupModel& m, const IdentityParams&) {
                 auto h = heisenberg_primitives(m.heisenberg_n());
                 return std::make_pair(
                     compose({h.Z, h.T}),
                     sum({h.L, neg(h.laplacian_stratum),
                          compose({scale(Rational(-1, 4)), mul_stratum_norm_pow(2), h.T, h.T})}));
               },
               none});

  c.push_back({"tangential_sum", "sum x_j Y_j - y_j X_j = Z + |x'|^2/2 T", {}, heisenberg_only,
               [](const GroupModel& m, const IdentityParams&) {
                 auto h = heisenberg_primitives(m.heisenberg_n());
                 return std::make_pair(tangential_sum(m),
                                       sum({h.Z, compose({scale(Rational(1, 2)), mul_stratum_norm_pow(2), h.T})}));
               },
               none});

  c.push_back({"zt_commute", "ZT = TZ", {}, heisenberg_only,
               [](const GroupModel& m, const IdentityParams&) {
                 auto h = heisenberg_primitives(m.heisenberg_n());
                 return std::make_pair(compose({h.Z, h.T}), compose({h.T, h.Z}));
               },
               none});

  c.push_back({"hardy_ttilde", "sum_j (-X_j + a x'_j/|x'|^2)(X_j + a x'_j/|x'|^2) = -L + a(a+2-N)/|x'|^2",
               {"alpha"}, stratified_only,
               [](const GroupModel& m, const IdentityParams& p) {
                 auto g = horizontal_gradient(m);
                 std::vector<Op> terms;
                 for (int j = 0; j < m.first_stratum_dim(); ++j) {
                   Op w = compose({scale(p.alpha), mul_coord(stratum_coord(m, j)), inv(2)});
                   terms.push_back(compose({sum({neg(g[j]), w}), sum({g[j], w})}));
                 }
                 Number c = p.alpha * (p.alpha + Number(2 - m.first_stratum_dim()));
                 return std::make_pair(sum(terms), sum({neg(sublaplacian(m)), compose({scale(c), inv(2)})}));
               },
               {{1, 0, 2}, {Rational(-3, 2), 0, 2}, {Rational(7, 5), 0, 2}}});
  return c;
}

}  // namespace

const std::vector<IdentityCase>& identity_catalog() {
  static const std::vector<IdentityCase> catalog = build_catalog();
  return catalog;
}

const IdentityCase& identity_case(const std::string& id) {
  for (const auto& c : identity_catalog())
    if (c.id == id) return c;
  throw std::out_of_range("unknown identity id '" + id + "'");
}

IdentityCase heis_tt_without_commutator() {
  IdentityCase c = identity_case("heis_tt");
  c.id = "heis_tt_no_commutator";
  c.description = "T+T expansion with the tangential-commutator term removed";
  c.build = [](const GroupModel& m, const IdentityParams& p) {
    auto [t, tp] = factorization_pair(m, p.alpha, p.beta);
    return std::make_pair(op::compose({tp, t}), tt_expansion(m, p, false));
  };
  return c;
}

IdentityResult check_operator_identity(const std::string& id, const Op& lhs, const Op& rhs, const GroupModel& m,
                                       int trials, std::uint64_t seed, int degree) {
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  IdentityResult res;
  res.id = id;
  res.model = m.name();
  res.trials = trials;
  res.pass = true;
  const int d = m.ambient_dim();
  const int order = std::max(jet_order(lhs), jet_order(rhs));
  if (order > max_jet_order) throw std::invalid_argument("identity needs jets beyond order 4");
  std::uniform_int_distribution<int> num(-64, 64), den(1, 16);
  for (int trial = 0; trial < trials; ++trial) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(stable_hash(id)),
                      static_cast<std::uint32_t>(stable_hash(m.name()))};
    std::mt19937_64 rng(seq);
    std::vector<Rational> x(d);
    bool zero_stratum = true;
    while (zero_stratum) {
      for (auto& v : x) {
        v = Rational(num(rng), den(rng));
        v.canonicalize();
      }
      zero_stratum = true;
      for (int i = 0; i < m.first_stratum_dim(); ++i) zero_stratum = zero_stratum && x[i] == 0;
    }
    Polynomial poly = random_polynomial(d, degree, rng);
    Jet<Rational> jet = poly.jet_at(x, order);
    Rational l = apply_exact(lhs, jet, m, x);
    Rational r = apply_exact(rhs, jet, m, x);
    if (l != r) {
      res.pass = false;
      IdentityWitness w;
      for (const auto& v : x) w.point.push_back(to_string(v));
      w.input_poly = poly.str();
      w.lhs_value = to_string(l);
      w.rhs_value = to_string(r);
      res.witness = std::move(w);
      break;
    }
  }
  return res;
}

IdentityResult check_identity(const IdentityCase& c, const GroupModel& m, const IdentityParams& p, int trials,
                              std::uint64_t seed, int degree) {
  if (auto why = c.reject(m, p)) throw std::invalid_argument(c.id + " on " + m.name() + ": " + *why);
  auto [lhs, rhs] = c.build(m, p);
  IdentityResult r = check_operator_identity(c.id, lhs, rhs, m, trials, seed, degree);
  r.params = p;
  r.param_names = c.param_names;
  return r;
}

std::vector<IdentityResult> check_commutation_relations(const GroupModel& m, int trials, std::uint64_t seed) {
  if (!m.is_heisenberg()) throw std::invalid_argument("commutation relations are checked on the Heisenberg group");
  const int n = m.heisenberg_n();
  auto h = heisenberg_primitives(n);
  std::vector<std::pair<std::string, Op>> basis;
  for (int j = 0; j < n; ++j) basis.push_back({"X" + std::to_string(j + 1), h.X[j]});
  for (int j = 0; j < n; ++j) basis.push_back({"Y" + std::to_string(j + 1), h.Y[j]});
  basis.push_back({"T", h.T});
  std::vector<IdentityResult> out;
  Op zero = op::scale(0);
  for (std::size_t a = 0; a < basis.size(); ++a)
    for (std::size_t b = a + 1; b < basis.size(); ++b) {
      bool pair = a < static_cast<std::size_t>(n) && b == a + n;
      out.push_back(check_operator_identity("[" + basis[a].first + "," + basis[b].first + "]",
                                            op::commutator(basis[a].second, basis[b].second), pair ? h.T : zero, m,
                                            trials, seed));
    }
  return out;
}

}  // namespace carnot_hardy
