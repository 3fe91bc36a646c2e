#include <benchmark/benchmark.h>

#include <vector>

#include "geomr/makespan.hpp"
#include "geomr/optimizer.hpp"
#include "geomr/simplex.hpp"
#include "geomr/simulator.hpp"

using namespace geomr;

namespace {

const Scenario& global8() {
  static const Scenario s = make_environment(EnvironmentKind::Global8, 1);
  return s;
}

void BM_Evaluate(benchmark::State& state) {
  const auto& s = global8();
  const auto plan = uniform_plan(s.platform);
  MakespanEvaluator eval(s.platform, s.workload, parse_barriers("G-P-L"));
  for (auto _ : state) benchmark::DoNotOptimize(eval.makespan(plan));
}
BENCHMARK(BM_Evaluate);

void BM_RootRelaxation(benchmark::State& state) {
  const auto& s = global8();
  PiecewiseSpec spec;
  spec.breakpoint_count = static_cast<int>(state.range(0));
  const auto mip = build_mip(s.platform, s.workload, BarrierConfig::all(Barrier::Global), MipObjective::Makespan, spec);
  std::vector<double> values;
  for (auto _ : state) benchmark::DoNotOptimize(lp::solve_lp(mip.mip.lp, values).objective);
}
BENCHMARK(BM_RootRelaxation)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_SimulateFluid(benchmark::State& state) {
  const auto& s = global8();
  const auto plan = uniform_plan(s.platform);
  SimConfig cfg;
  cfg.chunk_size = 0.0;
  cfg.barriers = parse_barriers("P-P-L");
  for (auto _ : state) benchmark::DoNotOptimize(simulate(s.platform, s.workload, plan, cfg).measured_timeline.makespan);
}
BENCHMARK(BM_SimulateFluid)->Unit(benchmark::kMillisecond);

void BM_SimulateChunked(benchmark::State& state) {
  const auto& s = global8();
  const auto plan = uniform_plan(s.platform);
  SimConfig cfg;
  cfg.chunk_size = static_cast<double>(state.range(0)) * kMB;
  cfg.barriers = BarrierConfig::all(Barrier::Pipelined);
  for (auto _ : state) benchmark::DoNotOptimize(simulate(s.platform, s.workload, plan, cfg).measured_timeline.makespan);
}
BENCHMARK(BM_SimulateChunked)->Arg(16)->Arg(4)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
