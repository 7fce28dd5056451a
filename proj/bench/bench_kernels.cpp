// Serial reference against the OpenMP batch kernel for the two Monte Carlo
// drivers that dominate run time. Run with --benchmark_counters_tabular=true;
// the second argument is the worker count for the parallel variant.
#include <benchmark/benchmark.h>

#include "pdmp/analysis.hpp"
#include "pdmp/parallel.hpp"

namespace {

using pdmp::Execution;
namespace an = pdmp::analysis;

void kernel_estimate(benchmark::State& state, Execution exec) {
  const auto grid = an::default_kernel_grid();
  const auto n = static_cast<std::size_t>(state.range(0));
  pdmp::set_worker_count(static_cast<int>(state.range(1)));
  for (auto _ : state) {
    auto k = an::estimate_kernel(grid, n, 7, exec);
    benchmark::DoNotOptimize(k.mean.data());
  }
  state.counters["paths/s"] = benchmark::Counter(double(n) * state.iterations(), benchmark::Counter::kIsRate);
}

void bps_series(benchmark::State& state, Execution exec) {
  an::SeriesRequest req;
  req.sampler = pdmp::SamplerKind::bps;
  req.d = 256;
  req.rho = 1.424;
  req.stat = pdmp::Statistic::neg_log_density();
  req.scale = an::TimeScale::d;
  req.grid = pdmp::uniform_grid(0.0, 2.0, 0.1);
  req.n_paths = static_cast<std::size_t>(state.range(0));
  req.seed = 1;
  pdmp::set_worker_count(static_cast<int>(state.range(1)));
  for (auto _ : state) {
    auto s = an::sample_series(req, exec);
    benchmark::DoNotOptimize(s.data());
  }
  state.counters["paths/s"] =
      benchmark::Counter(double(req.n_paths) * state.iterations(), benchmark::Counter::kIsRate);
}

}  // namespace

BENCHMARK_CAPTURE(kernel_estimate, serial, Execution::serial)->Args({20000, 1})->Unit(benchmark::kMillisecond)
    ->UseRealTime();
BENCHMARK_CAPTURE(kernel_estimate, parallel, Execution::parallel)
    ->Args({20000, 1})
    ->Args({20000, 2})
    ->Args({20000, 4})
    ->Args({20000, 8})
    ->Unit(benchmark::kMillisecond)
    ->UseRealTime();
BENCHMARK_CAPTURE(bps_series, serial, Execution::serial)->Args({200, 1})->Unit(benchmark::kMillisecond)
    ->UseRealTime();
BENCHMARK_CAPTURE(bps_series, parallel, Execution::parallel)
    ->Args({200, 1})
    ->Args({200, 2})
    ->Args({200, 4})
    ->Args({200, 8})
    ->Unit(benchmark::kMillisecond)
    ->UseRealTime();

BENCHMARK_MAIN();
