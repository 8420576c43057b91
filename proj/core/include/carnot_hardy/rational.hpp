#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace carnot_hardy {

using Rational = mpq_class;

// Accepts "p", "p/q", "-p/q". Throws std::invalid_argument.
Rational parse_rational(std::string_view text);
std::string to_string(const Rational& q);
inline double to_double(const Rational& q) { return q.get_d(); }
inline double to_double(double v) { return v; }

bool is_integer(const Rational& q);

// Exact rational if representable, otherwise a double. Used for expression
// constants and operator scale factors so printing round-trips.
class Number {
 public:
  Number() : exact_(true), q_(0), d_(0.0) {}
  Number(int v) : exact_(true), q_(v), d_(v) {}  // NOLINT
  Number(const Rational& q) : exact_(true), q_(q), d_(q.get_d()) {}  // NOLINT
  static Number real(double v);
  static Number parse(std::string_view text);

  bool exact() const { return exact_; }
  const Rational& rational() const;
  double value() const { return d_; }
  bool is_zero() const { return exact_ ? q_ == 0 : d_ == 0.0; }
  bool is_one() const { return exact_ ? q_ == 1 : d_ == 1.0; }
  std::string str() const;

  friend Number operator*(const Number& a, const Number& b);
  friend Number operator+(const Number& a, const Number& b);
  friend Number operator-(const Number& a);
  friend bool operator==(const Number& a, const Number& b);

 private:
  bool exact_;
  Rational q_;
  double d_;
};

}  // namespace carnot_hardy
