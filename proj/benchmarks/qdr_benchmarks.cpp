#include <benchmark/benchmark.h>

#include "qdr/crosscheck.hpp"
#include "qdr/oracle.hpp"
#include "qdr/presets.hpp"
#include "qdr/response.hpp"
#include "qdr/steady.hpp"
#include "qdr/sweep.hpp"

namespace {

using namespace qdr;

void BM_SteadyBranches(benchmark::State& state) {
  Params p = figure_preset("2b").params;
  p.ep0 = 8.0;
  for (auto _ : state) benchmark::DoNotOptimize(solve_steady_branches(p));
}
BENCHMARK(BM_SteadyBranches);

void BM_Sidebands(benchmark::State& state) {
  const Params p = figure_preset("4b").params;
  const SteadyBranch b = solve_steady_branches(p).front();
  for (auto _ : state) benchmark::DoNotOptimize(solve_sidebands(p, b));
}
BENCHMARK(BM_Sidebands);

void BM_ClosedFormChi3(benchmark::State& state) {
  const Params p = figure_preset("9a").params;
  const SteadyBranch b = solve_steady_branches(p).front();
  for (auto _ : state) benchmark::DoNotOptimize(chi3_closed_form(p, b));
}
BENCHMARK(BM_ClosedFormChi3);

void BM_Hysteresis(benchmark::State& state) {
  const FigurePreset& fig = figure_preset("2b");
  for (auto _ : state) benchmark::DoNotOptimize(hysteresis_sweep(fig.params, ContinuationAxis::Ep0, fig.grid));
}
BENCHMARK(BM_Hysteresis)->Unit(benchmark::kMillisecond);

void BM_Spectrum(benchmark::State& state) {
  const FigurePreset& fig = figure_preset("5a");
  SweepConfig cfg = fig.sweep(fig.params);
  cfg.threads = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(run_sweep(cfg));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(cfg.grid.size()));
}
BENCHMARK(BM_Spectrum)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_OracleComparison(benchmark::State& state) {
  Params p = figure_preset("4b").params;
  p.delta0 = 2.5;
  p.es0 = 1e-3 * p.ep0;
  for (auto _ : state) benchmark::DoNotOptimize(compare_with_oracle(p));
}
BENCHMARK(BM_OracleComparison)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
