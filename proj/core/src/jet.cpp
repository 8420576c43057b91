#include "carnot_hardy/jet.hpp"

#include <algorithm>
#include <map>
#include <memory>

namespace carnot_hardy {

namespace {

void enumerate(int dim, int degree, int var, MultiIndex& cur, std::vector<MultiIndex>& out) {
  if (var == dim - 1) {
    cur[var] = static_cast<std::uint8_t>(degree);
    out.push_back(cur);
    cur[var] = 0;
    return;
  }
  for (int k = degree; k >= 0; --k) {
    cur[var] = static_cast<std::uint8_t>(k);
    enumerate(dim, degree - k, var + 1, cur, out);
  }
  cur[var] = 0;
}

}  // namespace

JetLayout::JetLayout(int dim) : dim_(dim) {
  for (int deg = 0; deg <= max_jet_order; ++deg) {
    MultiIndex cur{};
    enumerate(dim, deg, 0, cur, index_);
    count_upto_[deg] = static_cast<int>(index_.size());
  }
  std::map<MultiIndex, int> pos;
  for (int p = 0; p < static_cast<int>(index_.size()); ++p) {
    pos[index_[p]] = p;
    int d = 0;
    for (int i = 0; i < dim; ++i) d += index_[p][i];
    degree_.push_back(d);
  }
  const int n = static_cast<int>(index_.size());
  up_.assign(n * dim, -1);
  down_.assign(n * dim, -1);
  for (int p = 0; p < n; ++p) {
    for (int i = 0; i < dim; ++i) {
      MultiIndex a = index_[p];
      if (degree_[p] < max_jet_order) {
        a[i]++;
        up_[p * dim + i] = pos.at(a);
        a[i]--;
      }
      if (a[i] > 0) {
        a[i]--;
        down_[p * dim + i] = pos.at(a);
      }
    }
  }
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      if (degree_[a] + degree_[b] > max_jet_order) continue;
      MultiIndex s{};
      for (int i = 0; i < dim; ++i) s[i] = index_[a][i] + index_[b][i];
      products_.push_back({a, b, pos.at(s)});
    }
  std::stable_sort(products_.begin(), products_.end(),
                   [this](const Triple& x, const Triple& y) { return degree_[x.r] < degree_[y.r]; });
  for (int m = 0; m <= max_jet_order; ++m)
    products_upto_[m] = static_cast<int>(
        std::count_if(products_.begin(), products_.end(), [&](const Triple& t) { return degree_[t.r] <= m; }));
}

const JetLayout& JetLayout::get(int dim) {
  static const auto layouts = [] {
    std::array<std::unique_ptr<JetLayout>, max_jet_dim + 1> all;
    for (int d = 1; d <= max_jet_dim; ++d) all[d].reset(new JetLayout(d));
    return all;
  }();
  if (dim < 1 || dim > max_jet_dim) throw std::out_of_range("jet dimension out of range");
  return *layouts[dim];
}

int JetLayout::position(std::span<const int> alpha) const {
  if (static_cast<int>(alpha.size()) != dim_) throw std::invalid_argument("multi-index dimension mismatch");
  int deg = 0;
  for (int a : alpha) {
    if (a < 0) throw std::invalid_argument("negative multi-index entry");
    deg += a;
  }
  if (deg > max_jet_order) throw std::out_of_range("multi-index beyond maximal order");
  int lo = deg == 0 ? 0 : count_upto_[deg - 1];
  for (int p = lo; p < count_upto_[deg]; ++p) {
    bool eq = true;
    for (int i = 0; i < dim_ && eq; ++i) eq = index_[p][i] == alpha[i];
    if (eq) return p;
  }
  throw std::logic_error("multi-index not found");
}

}  // namespace carnot_hardy
