#pragma once

#include <boost/container/small_vector.hpp>

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace carnot_hardy {

inline constexpr int max_jet_order = 4;
inline constexpr int max_jet_dim = 8;

using MultiIndex = std::array<std::uint8_t, max_jet_dim>;

// Graded ordering of multi-indices up to max_jet_order: the monomials of degree
// <= m form a prefix for every m, so truncation never reindexes.
class JetLayout {
 public:
  struct Triple {
    int a, b, r;
  };

  static const JetLayout& get(int dim);

  int dim() const { return dim_; }
  int size(int order) const { return count_upto_[order]; }
  const MultiIndex& index(int pos) const { return index_[pos]; }
  int degree(int pos) const { return degree_[pos]; }
  int position(std::span<const int> alpha) const;
  // position of alpha + e_i, -1 if beyond max order
  int up(int pos, int i) const { return up_[pos * dim_ + i]; }
  // position of alpha - e_i, -1 if alpha_i == 0
  int down(int pos, int i) const { return down_[pos * dim_ + i]; }
  std::span<const Triple> products(int order) const {
    return {products_.data(), static_cast<std::size_t>(products_upto_[order])};
  }

 private:
  explicit JetLayout(int dim);
  int dim_;
  std::vector<MultiIndex> index_;
  std::vector<int> degree_;
  std::array<int, max_jet_order + 1> count_upto_{};
  std::vector<int> up_, down_;
  std::vector<Triple> products_;
  std::array<int, max_jet_order + 1> products_upto_{};
};

// Truncated Taylor expansion: coefficient of h^alpha is (d^alpha f)(x) / alpha!.
template <class T>
class Jet {
 public:
  using Storage = boost::container::small_vector<T, 24>;

  Jet() = default;
  Jet(int dim, int order) : layout_(&JetLayout::get(dim)), order_(order) {
    if (order < 0 || order > max_jet_order) throw std::out_of_range("jet order out of range");
    c_.assign(layout_->size(order), T(0));
  }

  static Jet constant(int dim, int order, const T& v) {
    Jet j(dim, order);
    j.c_[0] = v;
    return j;
  }
  static Jet variable(int dim, int order, int i, const T& xi) {
    Jet j(dim, order);
    j.c_[0] = xi;
    if (order >= 1) j.c_[1 + i] = T(1);
    return j;
  }

  int dim() const { return layout_->dim(); }
  int order() const { return order_; }
  int size() const { return static_cast<int>(c_.size()); }
  const JetLayout& layout() const { return *layout_; }
  const T& operator[](int pos) const { return c_[pos]; }
  T& operator[](int pos) { return c_[pos]; }
  const T& value() const { return c_[0]; }
  T coeff(std::span<const int> alpha) const {
    int s = 0;
    for (int a : alpha) s += a;
    if (s > order_) throw std::out_of_range("multi-index beyond jet order");
    return c_[layout_->position(alpha)];
  }
  bool is_zero() const {
    for (const auto& v : c_)
      if (v != 0) return false;
    return true;
  }

  Jet truncated(int m) const {
    if (m >= order_) return *this;
    Jet r(dim(), m);
    for (int p = 0; p < r.size(); ++p) r.c_[p] = c_[p];
    return r;
  }

  Jet& operator+=(const Jet& o) {
    if (o.order_ < order_) *this = truncated(o.order_);
    for (int p = 0; p < size(); ++p) c_[p] += o.c_[p];
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    if (o.order_ < order_) *this = truncated(o.order_);
    for (int p = 0; p < size(); ++p) c_[p] -= o.c_[p];
    return *this;
  }
  Jet& operator*=(const T& s) {
    for (auto& v : c_) v *= s;
    return *this;
  }
  Jet operator-() const {
    Jet r = *this;
    for (auto& v : r.c_) v = -v;
    return r;
  }
  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(Jet a, const T& s) { return a *= s; }
  friend Jet operator*(const T& s, Jet a) { return a *= s; }

  friend Jet operator*(const Jet& a, const Jet& b) {
    int m = a.order_ < b.order_ ? a.order_ : b.order_;
    Jet r(a.dim(), m);
    for (const auto& t : a.layout_->products(m)) r.c_[t.r] += a.c_[t.a] * b.c_[t.b];
    return r;
  }

  Jet partial(int i) const {
    if (order_ == 0) throw std::logic_error("cannot differentiate an order-0 jet");
    Jet r(dim(), order_ - 1);
    for (int p = 0; p < r.size(); ++p) {
      int q = layout_->up(p, i);
      r.c_[p] = T(layout_->index(p)[i] + 1) * c_[q];
    }
    return r;
  }

  // (x_i + h_i) * J
  Jet mul_coord(int i, const T& xi) const {
    Jet r(dim(), order_);
    for (int p = 0; p < size(); ++p) {
      r.c_[p] = xi * c_[p];
      int q = layout_->down(p, i);
      if (q >= 0) r.c_[p] += c_[q];
    }
    return r;
  }

  // g(J) from the Taylor coefficients taylor[m] = g^(m)(J.value()) / m!
  Jet compose(std::span<const T> taylor) const {
    Jet r = constant(dim(), order_, taylor[0]);
    if (order_ == 0) return r;
    Jet delta = *this;
    delta.c_[0] = T(0);
    Jet power = delta;
    for (int m = 1; m <= order_; ++m) {
      if (m > 1) power = power * delta;
      for (int p = 0; p < size(); ++p) r.c_[p] += taylor[m] * power.c_[p];
    }
    return r;
  }

  Jet reciprocal() const {
    const T& a = c_[0];
    if (a == 0) throw std::domain_error("reciprocal of a jet with zero value");
    std::array<T, max_jet_order + 1> tc;
    T inv = T(1) / a;
    T term = inv;
    for (int m = 0; m <= order_; ++m) {
      tc[m] = term;
      term = -term * inv;
    }
    return compose(std::span<const T>(tc.data(), order_ + 1));
  }

  Jet ipow(int k) const {
    if (k == 0) return constant(dim(), order_, T(1));
    Jet base = k < 0 ? reciprocal() : *this;
    int e = k < 0 ? -k : k;
    Jet result = constant(dim(), order_, T(1));
    while (e > 0) {
      if (e & 1) result = result * base;
      e >>= 1;
      if (e) base = base * base;
    }
    return result;
  }

 private:
  const JetLayout* layout_ = nullptr;
  int order_ = 0;
  Storage c_;
};

}  // namespace carnot_hardy
