#pragma once

#include "carnot_hardy/rational.hpp"

#include <nlohmann/json.hpp>

#include <span>
#include <string>
#include <vector>

namespace carnot_hardy {

class ScalarField;

struct DilationStructure {
  std::vector<Rational> weights;
  Rational q_hom;

  explicit DilationStructure(std::vector<Rational> w);
  static DilationStructure isotropic(int n);
  bool is_isotropic() const;
  int dim() const { return static_cast<int>(weights.size()); }
};

struct QuasiNormSpec {
  enum class Kind { euclidean, anisotropic };
  Kind kind = Kind::euclidean;
  int m = 1;

  static QuasiNormSpec euclidean() { return {}; }
  static QuasiNormSpec anisotropic(int m) { return {Kind::anisotropic, m}; }
  // smallest m with m / nu_i an integer for every weight
  static QuasiNormSpec smallest_anisotropic(const DilationStructure& d);
  void validate(const DilationStructure& d) const;
  // exponents 2m / nu_i (all even integers for a valid spec)
  std::vector<int> exponents(const DilationStructure& d) const;
};

class GroupModel {
 public:
  enum class Variant { euclidean, heisenberg };

  static GroupModel euclidean(int n);
  static GroupModel euclidean(DilationStructure d, QuasiNormSpec q);
  static GroupModel heisenberg(int n);
  // "euclid:3", "aniso:1,2" (weights; smallest m), "aniso:1,2;m=4", "heis:2"
  static GroupModel parse(const std::string& text);
  static GroupModel from_config(const nlohmann::json& j);
  nlohmann::json to_config() const;
  std::string name() const;

  Variant variant() const { return variant_; }
  bool is_heisenberg() const { return variant_ == Variant::heisenberg; }
  bool is_isotropic_euclidean() const { return !is_heisenberg() && dil_.is_isotropic(); }
  int heisenberg_n() const { return n_; }
  int ambient_dim() const { return is_heisenberg() ? 2 * n_ + 1 : dil_.dim(); }
  int first_stratum_dim() const { return is_heisenberg() ? 2 * n_ : dil_.dim(); }
  const Rational& q_hom() const { return dil_.q_hom; }
  int step() const { return is_heisenberg() ? 2 : 1; }
  const DilationStructure& dilations() const { return dil_; }
  const QuasiNormSpec& quasi_norm_spec() const { return qn_; }
  // coordinate index of x_j, y_j, t on the Heisenberg model
  int x_index(int j) const { return j; }
  int y_index(int j) const { return n_ + j; }
  int t_index() const { return 2 * n_; }

  friend bool operator==(const GroupModel& a, const GroupModel& b) { return a.name() == b.name(); }

 private:
  GroupModel(Variant v, DilationStructure d, QuasiNormSpec q, int n)
      : variant_(v), dil_(std::move(d)), qn_(q), n_(n) {}
  Variant variant_;
  DilationStructure dil_;
  QuasiNormSpec qn_;
  int n_;
};

std::vector<double> dilate(const DilationStructure& d, double lambda, std::span<const double> x);

// Euclidean models use the diagonal quasi-norm; the Heisenberg model uses the
// gauge ((|x'|^2)^2 + 16 t^2)^(1/4).
double quasi_norm(const GroupModel& m, std::span<const double> x);
double quasi_norm(const DilationStructure& d, const QuasiNormSpec& q, std::span<const double> x);
double stratum_norm(const GroupModel& m, std::span<const double> x);

inline constexpr double radial_threshold = 1e-9;

}  // namespace carnot_hardy
