#include "carnot_hardy/rational.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace carnot_hardy {

namespace {

bool looks_integer(std::string_view s) {
  if (s.empty()) return false;
  std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i)
    if (s[i] < '0' || s[i] > '9') return false;
  return true;
}

mpz_class parse_integer(std::string_view s) {
  if (!looks_integer(s)) throw std::invalid_argument("not an integer: '" + std::string(s) + "'");
  std::string t(s);
  if (t[0] == '+') t.erase(0, 1);
  return mpz_class(t, 10);
}

}  // namespace

Rational parse_rational(std::string_view text) {
  auto slash = text.find('/');
  if (slash == std::string_view::npos) return Rational(parse_integer(text));
  mpz_class p = parse_integer(text.substr(0, slash));
  mpz_class q = parse_integer(text.substr(slash + 1));
  if (q == 0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
  Rational r(p, q);
  r.canonicalize();
  return r;
}

std::string to_string(const Rational& q) { return q.get_str(10); }

bool is_integer(const Rational& q) { return q.get_den() == 1; }

Number Number::real(double v) {
  Number n;
  n.exact_ = false;
  n.d_ = v;
  return n;
}

Number Number::parse(std::string_view text) {
  if (text.find_first_of(".eE") == std::string_view::npos ||
      (text.find('/') != std::string_view::npos)) {
    try {
      return Number(parse_rational(text));
    } catch (const std::invalid_argument&) {
    }
  }
  double v = 0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size())
    throw std::invalid_argument("not a number: '" + std::string(text) + "'");
  return real(v);
}

const Rational& Number::rational() const {
  if (!exact_) throw std::domain_error("inexact number " + str() + " in exact arithmetic");
  return q_;
}

std::string Number::str() const {
  if (exact_) return to_string(q_);
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", d_);
  std::string s(buf);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

Number operator*(const Number& a, const Number& b) {
  if (a.exact_ && b.exact_) return Number(Rational(a.q_ * b.q_));
  return Number::real(a.d_ * b.d_);
}

Number operator+(const Number& a, const Number& b) {
  if (a.exact_ && b.exact_) return Number(Rational(a.q_ + b.q_));
  return Number::real(a.d_ + b.d_);
}

Number operator-(const Number& a) {
  if (a.exact_) return Number(Rational(-a.q_));
  return Number::real(-a.d_);
}

bool operator==(const Number& a, const Number& b) {
  if (a.exact_ && b.exact_) return a.q_ == b.q_;
  return a.d_ == b.d_ && a.exact_ == b.exact_;
}

}  // namespace carnot_hardy
