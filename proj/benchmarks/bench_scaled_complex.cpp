#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "growthlab/scaled_complex.hpp"

using growthlab::ScaledComplex;

namespace {

std::vector<ScaledComplex> sample_values(std::size_t n) {
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> mag(-200.0, 200.0);
  std::uniform_real_distribution<double> ang(-3.0, 3.0);
  std::vector<ScaledComplex> v;
  v.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    v.push_back(ScaledComplex::from_log_polar(mag(rng), ang(rng)));
  return v;
}

void BM_SplitMultiply(benchmark::State& state) {
  auto v = sample_values(1024);
  std::size_t i = 0;
  ScaledComplex acc = ScaledComplex::from_complex(1.0);
  for (auto _ : state) {
    acc *= v[i++ & 1023];
    benchmark::DoNotOptimize(acc);
  }
}
BENCHMARK(BM_SplitMultiply);

void BM_SplitAdd(benchmark::State& state) {
  auto v = sample_values(1024);
  std::size_t i = 0;
  ScaledComplex acc;
  for (auto _ : state) {
    acc += v[i++ & 1023];
    benchmark::DoNotOptimize(acc);
  }
}
BENCHMARK(BM_SplitAdd);

}  // namespace
