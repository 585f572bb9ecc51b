// Serial reference vs OpenMP path for the two data-parallel kernels.
//   bench_kernels --benchmark_counters_tabular=true
// Thread count follows OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include "mudiv/core_model.hpp"
#include "mudiv/kernels.hpp"
#include "mudiv/optimizer.hpp"
#include "mudiv/sim.hpp"

namespace {

using mudiv::Exec;

void BM_Sweep(benchmark::State& state, Exec exec) {
  const std::int64_t L = state.range(0);
  const mudiv::SystemConfig cfg(1.0, 1.0, 0.1, L);
  for (auto _ : state) {
    auto sweep = mudiv::sweep_achievable_rates(cfg, 1, L - 1, exec);
    benchmark::DoNotOptimize(sweep.data());
  }
  state.SetItemsProcessed(state.iterations() * (L - 1));
  state.counters["threads"] = exec == Exec::serial ? 1 : mudiv::parallel_threads();
}

void BM_Simulate(benchmark::State& state, Exec exec) {
  const std::int64_t n = state.range(0);
  const mudiv::SystemConfig cfg(1.0, 1.0, 0.1, 250);
  const mudiv::TrainingPolicy policy = mudiv::optimal_policy(cfg, 13);
  for (auto _ : state) {
    auto out = mudiv::simulate_blocks(policy, cfg, n, 1, exec);
    benchmark::DoNotOptimize(out.mean_rate);
  }
  state.SetItemsProcessed(state.iterations() * n);
  state.counters["threads"] = exec == Exec::serial ? 1 : mudiv::parallel_threads();
}

}  // namespace

BENCHMARK_CAPTURE(BM_Sweep, serial, Exec::serial)->Arg(2000)->Arg(20000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Sweep, parallel, Exec::parallel)->Arg(2000)->Arg(20000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Simulate, serial, Exec::serial)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Simulate, parallel, Exec::parallel)->Arg(100000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
