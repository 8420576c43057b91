#include "carnot_hardy/fields.hpp"
#include "carnot_hardy/inequalities.hpp"
#include "carnot_hardy/opalgebra.hpp"
#include "carnot_hardy/quadrature.hpp"
#include "carnot_hardy/sharpness.hpp"

#include <benchmark/benchmark.h>

#include <array>

using namespace carnot_hardy;

namespace {

void bm_field_jet(benchmark::State& st) {
  auto m = GroupModel::euclidean(3);
  auto f = default_fields(m).front().field;
  std::array<double, 3> x{0.4, -0.3, 0.7};
  int order = static_cast<int>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(eval_jet<double>(f, x, order));
}
BENCHMARK(bm_field_jet)->Arg(1)->Arg(2)->Arg(4);

void bm_identity_check(benchmark::State& st) {
  auto m = GroupModel::heisenberg(1);
  const auto& c = identity_case("heis_tt");
  IdentityParams p;
  p.alpha = 1;
  for (auto _ : st) benchmark::DoNotOptimize(check_identity(c, m, p, 1, 0, 6));
}
BENCHMARK(bm_identity_check)->Unit(benchmark::kMillisecond);

void bm_tensor_norm(benchmark::State& st) {
  auto m = GroupModel::euclidean(3);
  auto f = default_fields(m).front().field;
  auto spec = default_quadrature(f, static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(weighted_l2_sq(f, -1, false, spec));
}
BENCHMARK(bm_tensor_norm)->Arg(12)->Arg(24)->Unit(benchmark::kMillisecond);

void bm_polar_rayleigh(benchmark::State& st) {
  auto p = sharpness_problem("hardy_euclid3");
  std::vector<double> params;
  for (const auto& fp : p.params) params.push_back(fp.start);
  for (auto _ : st) benchmark::DoNotOptimize(rayleigh(p, params));
}
BENCHMARK(bm_polar_rayleigh)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
