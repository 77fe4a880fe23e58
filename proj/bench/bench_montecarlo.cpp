#include <benchmark/benchmark.h>

#include "fairmatch/instance.hpp"
#include "fairmatch/montecarlo.hpp"
#include "fairmatch/rounding.hpp"

using namespace fairmatch;

namespace {

const Instance& bench_instance() {
  static const Instance inst = gen_random(120, 150, 4, 0.1, 11);
  return inst;
}

Execution mode(const benchmark::State& state) {
  return state.range(0) == 0 ? Execution::kSerial : Execution::kParallel;
}

void BM_HybridUsw(benchmark::State& state) {
  for (auto _ : state) {
    auto summary = hybrid_usw_monte_carlo(bench_instance(), 0.5, 2000, 0, mode(state));
    benchmark::DoNotOptimize(summary.min_mean_slack);
  }
}
BENCHMARK(BM_HybridUsw)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

void BM_Marking(benchmark::State& state) {
  for (auto _ : state) {
    auto batch = marking_monte_carlo(bench_instance(), 0.5, 0, 1, 2000, 0, mode(state));
    benchmark::DoNotOptimize(batch.mismatched_runs);
  }
}
BENCHMARK(BM_Marking)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

void BM_Rounding(benchmark::State& state) {
  const auto guide = compute_guide(bench_instance(), 0.5);
  for (auto _ : state) {
    auto batch = rounding_monte_carlo(bench_instance(), guide, 2000, 0, mode(state));
    benchmark::DoNotOptimize(batch.all_non_wasteful);
  }
}
BENCHMARK(BM_Rounding)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
