#include <benchmark/benchmark.h>

#include <cmath>

#include "growthlab/ode.hpp"

namespace {

// Throughput of the renormalized Dormand-Prince kernel on the doubly
// exponential workhorse equation.
void BM_RaySteps(benchmark::State& state) {
  growthlab::LinearODE ode{2, {growthlab::parse_function("exp(z)"),
                               growthlab::parse_function("0")}};
  growthlab::IntegrationOptions opts;
  opts.tol = 1e-6;
  opts.step_budget = state.range(0);
  std::vector<double> radii;
  for (int i = 0; i < 16; ++i) radii.push_back(2.0 * std::pow(20.0, i / 15.0));
  std::vector<growthlab::ScaledComplex> ics = {growthlab::ScaledComplex::from_complex(1.0),
                                               growthlab::ScaledComplex::zero()};
  long steps = 0;
  for (auto _ : state) {
    growthlab::RayTrace tr = growthlab::integrate_ray(ode, ics, 0.7, radii, opts);
    steps += tr.accepted_steps + tr.rejected_steps;
    benchmark::DoNotOptimize(tr.renorm_count);
  }
  state.SetItemsProcessed(steps);
}
BENCHMARK(BM_RaySteps)->Arg(20000)->Arg(200000)->Unit(benchmark::kMillisecond);

}  // namespace
