// Serial reference sweep versus the OpenMP sweep over the same grid.

#include <benchmark/benchmark.h>

#include "fracgfm/harness.hpp"

namespace {

fracgfm::ExperimentConfig sweep_config(bool parallel) {
  fracgfm::ExperimentConfig cfg;
  for (std::uint64_t seed = 1; seed <= 2; ++seed) {
    cfg.graphs.push_back({fracgfm::GraphType::Rgg, 20, seed});
    cfg.graphs.push_back({fracgfm::GraphType::Drgg, 20, seed});
  }
  cfg.metrics = {fracgfm::MetricKind::Identity, fracgfm::MetricKind::Degree};
  cfg.ks = {2, 3, 4, 5};
  cfg.starts = {3, 7, 5};
  cfg.parallel = parallel;
  return cfg;
}

void BM_Sweep(benchmark::State& state) {
  const fracgfm::ExperimentConfig cfg = sweep_config(state.range(0) != 0);
  std::size_t runs = 0;
  for (auto _ : state) {
    const auto records = fracgfm::run_experiment(cfg);
    runs += records.size();
    benchmark::DoNotOptimize(records.data());
  }
  state.counters["runs_per_s"] = benchmark::Counter(static_cast<double>(runs), benchmark::Counter::kIsRate);
}

}  // namespace

BENCHMARK(BM_Sweep)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
