#include <benchmark/benchmark.h>

#include "atlas/checkers.hpp"
#include "atlas/executor.hpp"
#include "atlas/linearizability.hpp"
#include "atlas/process.hpp"
#include "atlas/simulator.hpp"

namespace {

using namespace atlas;

SimConfig small_config(double conflict_rate) {
  SimConfig cfg;
  cfg.n = 5;
  cfg.f = 2;
  cfg.latency.base = 10;
  cfg.workload.clients_per_process = 2;
  cfg.workload.commands_per_client = 20;
  cfg.workload.conflict_rate = conflict_rate;
  return cfg;
}

void BM_SimRun(benchmark::State& state) {
  SimConfig cfg = small_config(double(state.range(0)) / 100.0);
  std::uint64_t seed = 1;
  for (auto _ : state) {
    cfg.seed = seed++;
    benchmark::DoNotOptimize(run_simulation(cfg));
  }
}
BENCHMARK(BM_SimRun)->Arg(0)->Arg(50)->Arg(100);

// one coordinator submitting to an ever-growing same-key history: stresses
// the conflict scan that feeds dependency sets
void BM_SubmitConflictScan(benchmark::State& state) {
  for (auto _ : state) {
    state.PauseTiming();
    ProcessState p(1, 3, 1, QuorumSystem::uniform(3, 1));
    for (int i = 0; i < state.range(0); i++)
      p.submit(Command::put("k", "v", 1, std::uint64_t(i + 1)));
    state.ResumeTiming();
    benchmark::DoNotOptimize(
        p.submit(Command::put("k", "v", 1, std::uint64_t(state.range(0) + 1))));
  }
}
BENCHMARK(BM_SubmitConflictScan)->Arg(64)->Arg(512);

void BM_ExecutorChain(benchmark::State& state) {
  const std::uint64_t len = std::uint64_t(state.range(0));
  for (auto _ : state) {
    state.PauseTiming();
    ExecGraph g;
    state.ResumeTiming();
    for (std::uint64_t i = 1; i <= len; i++) {
      DotSet deps;
      if (i > 1) deps.insert(Dot{1, i - 1});
      g.add_committed(Dot{1, i}, Command::put("k", "v", 1, i), deps);
      benchmark::DoNotOptimize(g.try_execute());
    }
  }
}
BENCHMARK(BM_ExecutorChain)->Arg(256)->Arg(1024);

void BM_CheckTrace(benchmark::State& state) {
  SimConfig cfg = small_config(1.0);
  Trace tr = run_simulation(cfg).trace;
  for (auto _ : state) benchmark::DoNotOptimize(check_trace(tr));
}
BENCHMARK(BM_CheckTrace);

void BM_Linearizability(benchmark::State& state) {
  SimConfig cfg = small_config(1.0);
  cfg.workload.commands_per_client = 10;
  cfg.workload.read_ratio = 0.5;
  Trace tr = run_simulation(cfg).trace;
  for (auto _ : state)
    benchmark::DoNotOptimize(check_linearizability(tr));
}
BENCHMARK(BM_Linearizability);

}  // namespace

BENCHMARK_MAIN();
