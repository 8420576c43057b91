#include "carnot_hardy/group_models.hpp"

#include <cmath>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>

namespace carnot_hardy {

DilationStructure::DilationStructure(std::vector<Rational> w) : weights(std::move(w)), q_hom(0) {
  if (weights.empty()) throw std::invalid_argument("dilation structure needs at least one weight");
  for (const auto& v : weights) {
    if (v <= 0) throw std::invalid_argument("dilation weights must be positive, got " + to_string(v));
    q_hom += v;
  }
}

DilationStructure DilationStructure::isotropic(int n) {
  if (n < 1) throw std::invalid_argument("dimension must be positive");
  return DilationStructure(std::vector<Rational>(n, Rational(1)));
}

bool DilationStructure::is_isotropic() const {
  for (const auto& v : weights)
    if (v != 1) return false;
  return true;
}

QuasiNormSpec QuasiNormSpec::smallest_anisotropic(const DilationStructure& d) {
  // m / (p/q) = m q / p integer for all i  <=>  m divisible by p / gcd(p, q) = p (canonical)
  mpz_class m = 1;
  for (const auto& v : d.weights) {
    mpz_class p = v.get_num();
    mpz_lcm(m.get_mpz_t(), m.get_mpz_t(), p.get_mpz_t());
  }
  if (!m.fits_sint_p()) throw std::invalid_argument("anisotropic exponent too large");
  return anisotropic(static_cast<int>(m.get_si()));
}

void QuasiNormSpec::validate(const DilationStructure& d) const {
  if (kind == Kind::euclidean) {
    if (!d.is_isotropic()) throw std::invalid_argument("Euclidean quasi-norm requires unit dilation weights");
    return;
  }
  if (m < 1) throw std::invalid_argument("anisotropic quasi-norm needs m >= 1");
  for (const auto& v : d.weights) {
    Rational e = Rational(2 * m) / v;
    if (!is_integer(e) || e.get_num() % 2 != 0)
      throw std::invalid_argument("exponent 2m/nu = " + to_string(e) + " is not an even integer");
  }
}

std::vector<int> QuasiNormSpec::exponents(const DilationStructure& d) const {
  std::vector<int> e;
  for (const auto& v : d.weights) {
    if (kind == Kind::euclidean) {
      e.push_back(2);
    } else {
      Rational r = Rational(2 * m) / v;
      e.push_back(static_cast<int>(r.get_num().get_si()));
    }
  }
  return e;
}

GroupModel GroupModel::euclidean(int n) {
  return GroupModel(Variant::euclidean, DilationStructure::isotropic(n), QuasiNormSpec::euclidean(), n);
}

GroupModel GroupModel::euclidean(DilationStructure d, QuasiNormSpec q) {
  q.validate(d);
  int n = d.dim();
  return GroupModel(Variant::euclidean, std::move(d), q, n);
}

GroupModel GroupModel::heisenberg(int n) {
  if (n < 1) throw std::invalid_argument("Heisenberg model needs n >= 1");
  std::vector<Rational> w(2 * n, Rational(1));
  w.push_back(Rational(2));
  return GroupModel(Variant::heisenberg, DilationStructure(std::move(w)), QuasiNormSpec::euclidean(), n);
}

namespace {

int parse_positive_int(const std::string& s) {
  std::size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || v < 1) throw std::invalid_argument("expected a positive integer, got '" + s + "'");
  return v;
}

}  // namespace

GroupModel GroupModel::parse(const std::string& text) {
  auto colon = text.find(':');
  if (colon == std::string::npos) throw std::invalid_argument("model must look like euclid:3, aniso:1,2 or heis:1");
  std::string kind = text.substr(0, colon);
  std::string rest = text.substr(colon + 1);
  if (kind == "euclid") return euclidean(parse_positive_int(rest));
  if (kind == "heis") return heisenberg(parse_positive_int(rest));
  if (kind == "aniso") {
    std::optional<int> m;
    auto semi = rest.find(';');
    if (semi != std::string::npos) {
      std::string opt = rest.substr(semi + 1);
      rest = rest.substr(0, semi);
      if (opt.rfind("m=", 0) != 0) throw std::invalid_argument("unknown quasi-norm option '" + opt + "'");
      m = parse_positive_int(opt.substr(2));
    }
    std::vector<Rational> w;
    std::stringstream ss(rest);
    std::string item;
    while (std::getline(ss, item, ',')) w.push_back(parse_rational(item));
    DilationStructure d(std::move(w));
    QuasiNormSpec q = m ? QuasiNormSpec::anisotropic(*m) : QuasiNormSpec::smallest_anisotropic(d);
    return euclidean(std::move(d), q);
  }
  throw std::invalid_argument("unknown model kind '" + kind + "'");
}

nlohmann::json GroupModel::to_config() const {
  nlohmann::json j;
  j["variant"] = is_heisenberg() ? "heisenberg" : "euclidean";
  std::vector<std::string> w;
  for (const auto& v : dil_.weights) w.push_back(to_string(v));
  j["weights"] = w;
  j["quasi_norm"] = {{"kind", qn_.kind == QuasiNormSpec::Kind::euclidean ? "euclidean" : "anisotropic"},
                     {"m", qn_.m}};
  j["n"] = n_;
  return j;
}

GroupModel GroupModel::from_config(const nlohmann::json& j) {
  std::string variant = j.at("variant").get<std::string>();
  int n = j.at("n").get<int>();
  if (variant == "heisenberg") return heisenberg(n);
  if (variant != "euclidean") throw std::invalid_argument("unknown model variant '" + variant + "'");
  std::vector<Rational> w;
  for (const auto& s : j.at("weights")) w.push_back(parse_rational(s.get<std::string>()));
  if (static_cast<int>(w.size()) != n) throw std::invalid_argument("weights length does not match n");
  const auto& qn = j.at("quasi_norm");
  std::string kind = qn.at("kind").get<std::string>();
  QuasiNormSpec q;
  if (kind == "euclidean")
    q = QuasiNormSpec::euclidean();
  else if (kind == "anisotropic")
    q = QuasiNormSpec::anisotropic(qn.at("m").get<int>());
  else
    throw std::invalid_argument("unknown quasi-norm kind '" + kind + "'");
  return euclidean(DilationStructure(std::move(w)), q);
}

std::string GroupModel::name() const {
  if (is_heisenberg()) return "heis:" + std::to_string(n_);
  if (dil_.is_isotropic() && qn_.kind == QuasiNormSpec::Kind::euclidean) return "euclid:" + std::to_string(n_);
  std::string s = "aniso:";
  for (std::size_t i = 0; i < dil_.weights.size(); ++i) s += (i ? "," : "") + to_string(dil_.weights[i]);
  s += ";m=" + std::to_string(qn_.m);
  return s;
}

std::vector<double> dilate(const DilationStructure& d, double lambda, std::span<const double> x) {
  if (!(lambda > 0)) throw std::invalid_argument("dilation parameter must be positive");
  if (static_cast<int>(x.size()) != d.dim()) throw std::invalid_argument("point dimension mismatch");
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = std::pow(lambda, to_double(d.weights[i])) * x[i];
  return y;
}

double quasi_norm(const DilationStructure& d, const QuasiNormSpec& q, std::span<const double> x) {
  q.validate(d);
  if (static_cast<int>(x.size()) != d.dim()) throw std::invalid_argument("point dimension mismatch");
  if (q.kind == QuasiNormSpec::Kind::euclidean) {
    double s = 0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
  }
  // scale first so large exponents do not overflow
  double big = 0;
  auto e = q.exponents(d);
  for (std::size_t i = 0; i < x.size(); ++i) big = std::max(big, std::pow(std::abs(x[i]), e[i] / (2.0 * q.m)));
  if (big == 0) return 0;
  double s = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double lam = std::pow(big, -to_double(d.weights[i]));
    s += std::pow(std::abs(x[i]) * lam, e[i]);
  }
  return big * std::pow(s, 1.0 / (2 * q.m));
}

double stratum_norm(const GroupModel& m, std::span<const double> x) {
  double s = 0;
  for (int i = 0; i < m.first_stratum_dim(); ++i) s += x[i] * x[i];
  return std::sqrt(s);
}

double quasi_norm(const GroupModel& m, std::span<const double> x) {
  if (static_cast<int>(x.size()) != m.ambient_dim()) throw std::invalid_argument("point dimension mismatch");
  if (!m.is_heisenberg()) return quasi_norm(m.dilations(), m.quasi_norm_spec(), x);
  double r2 = 0;
  for (int i = 0; i < 2 * m.heisenberg_n(); ++i) r2 += x[i] * x[i];
  double t = x[m.t_index()];
  return std::pow(r2 * r2 + 16 * t * t, 0.25);
}

}  // namespace carnot_hardy
