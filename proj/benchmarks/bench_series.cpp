#include <benchmark/benchmark.h>

#include "growthlab/nevanlinna.hpp"

namespace {

void BM_MaxTermExp(benchmark::State& state) {
  growthlab::EntireFunction f = growthlab::parse_function("exp(z)");
  double r = double(state.range(0));
  for (auto _ : state) {
    auto mt = growthlab::max_term_and_index(f, r);
    benchmark::DoNotOptimize(mt.nu);
  }
}
BENCHMARK(BM_MaxTermExp)->Arg(10)->Arg(100);

void BM_MaxTermSquareExp(benchmark::State& state) {
  growthlab::EntireFunction f = growthlab::parse_function("exp(z^2)");
  for (auto _ : state) {
    auto mt = growthlab::max_term_and_index(f, 8.0);
    benchmark::DoNotOptimize(mt.log_mu);
  }
}
BENCHMARK(BM_MaxTermSquareExp);

}  // namespace
