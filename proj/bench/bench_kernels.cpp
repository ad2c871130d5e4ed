// Serial reference vs OpenMP kernels for the two replication loops.

#include <benchmark/benchmark.h>

#include <omp.h>

#include "dphide/parallel.hpp"
#include "dphide/robustness.hpp"
#include "dphide/simulation.hpp"

namespace {

dphide::ExperimentConfig mse_config() {
  dphide::ExperimentConfig c;
  c.sample_sizes = {50, 200};
  c.epsilon = 0.2;
  c.replications = 200;
  c.seed = 3;
  return c;
}

dphide::EpsIfProtocol eps_if_protocol() {
  dphide::EpsIfProtocol p;
  p.replications = 50;
  p.grid = dphide::log_spaced_grid(0.01, 25.0, 20);
  return p;
}

void BM_MseSerial(benchmark::State& state) {
  const auto c = mse_config();
  for (auto _ : state) benchmark::DoNotOptimize(dphide::reference::run_mse_experiment(c));
}

void BM_MseOpenMp(benchmark::State& state) {
  const auto c = mse_config();
  dphide::set_thread_count(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(dphide::run_mse_experiment(c));
  dphide::set_thread_count(0);
}

void BM_EpsIfSerial(benchmark::State& state) {
  const auto p = eps_if_protocol();
  for (auto _ : state) benchmark::DoNotOptimize(dphide::reference::empirical_eps_if(p));
}

void BM_EpsIfOpenMp(benchmark::State& state) {
  const auto p = eps_if_protocol();
  dphide::set_thread_count(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(dphide::empirical_eps_if(p));
  dphide::set_thread_count(0);
}

void thread_counts(benchmark::internal::Benchmark* b) {
  for (int t = 1; t <= omp_get_num_procs(); t *= 2) b->Arg(t);
}

}  // namespace

BENCHMARK(BM_MseSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MseOpenMp)->Apply(thread_counts)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_EpsIfSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EpsIfOpenMp)->Apply(thread_counts)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
