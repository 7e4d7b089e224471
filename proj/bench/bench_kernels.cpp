// Serial reference against the OpenMP kernel. Set FUNKMEAN_THREADS to cap workers.

#include <benchmark/benchmark.h>

#include "funkmean/bootstrap.hpp"
#include "funkmean/parallel.hpp"
#include "funkmean/presets.hpp"
#include "funkmean/simulate.hpp"

using namespace funkmean;

namespace {

std::vector<ScoreMatrix> centered_scores(int n, int p) {
  RngStream rng(1, {});
  std::vector<ScoreMatrix> groups;
  for (int j = 0; j < 2; ++j) {
    ScoreMatrix g(n, p);
    for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = rng.normal() * (1.0 + j);
    groups.push_back(g.rowwise() - g.colwise().mean());
  }
  return groups;
}

void bootstrap_kernel(benchmark::State& state, Execution exec) {
  const auto groups = centered_scores(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  const int B = 1000;
  for (auto _ : state) {
    auto r = bootstrap_replicates(groups, B, 7, 100, {}, exec);
    benchmark::DoNotOptimize(r.w_star.data());
  }
  state.SetItemsProcessed(state.iterations() * B);
}

void experiment(benchmark::State& state, Execution exec) {
  auto c = table_preset("table1");
  c.sweep_values = {5.0};
  apply_scale(c, static_cast<int>(state.range(0)), 200);
  for (auto _ : state) {
    auto t = run_rejection_experiment(c, exec);
    benchmark::DoNotOptimize(t.rows.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_BootstrapSerial(benchmark::State& s) { bootstrap_kernel(s, Execution::serial); }
void BM_BootstrapParallel(benchmark::State& s) { bootstrap_kernel(s, Execution::parallel); }
void BM_ExperimentSerial(benchmark::State& s) { experiment(s, Execution::serial); }
void BM_ExperimentParallel(benchmark::State& s) { experiment(s, Execution::parallel); }

}  // namespace

BENCHMARK(BM_BootstrapSerial)->Args({100, 3})->Args({500, 11})->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_BootstrapParallel)->Args({100, 3})->Args({500, 11})->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_ExperimentSerial)->Arg(50)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_ExperimentParallel)->Arg(50)->Unit(benchmark::kMillisecond)->UseRealTime();

int main(int argc, char** argv) {
  apply_thread_limit();
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
