#include <benchmark/benchmark.h>

#include "growthlab/nevanlinna.hpp"

namespace {

void BM_ProximityExp(benchmark::State& state) {
  growthlab::EntireFunction f = growthlab::parse_function("exp(z)");
  double r = double(state.range(0));
  for (auto _ : state) {
    double m = growthlab::proximity_m(f, r);
    benchmark::DoNotOptimize(m);
  }
}
BENCHMARK(BM_ProximityExp)->Arg(10)->Arg(100);

void BM_CircleMax(benchmark::State& state) {
  growthlab::EntireFunction f = growthlab::parse_function("exp(z) + exp(0 - z)");
  growthlab::CirclePolicy policy;
  policy.allow_nonneg_shortcut = false;
  for (auto _ : state) {
    auto mm = growthlab::log_max_modulus(f, 20.0, policy);
    benchmark::DoNotOptimize(mm.log_M);
  }
}
BENCHMARK(BM_CircleMax);

}  // namespace
