#include <gtest/gtest.h>

#include <algorithm>
#include <limits>
#include <random>
#include <sstream>

#include "geomr/error.hpp"
#include "geomr/makespan.hpp"
#include "geomr/simulator.hpp"
#include "support.hpp"

using namespace geomr;
using geomr::testing::random_instance;
using geomr::testing::random_plan;
using geomr::testing::unit_instance;

namespace {

SimTrace run(const Scenario& s, const ExecutionPlan& plan, const BarrierConfig& b, double chunk) {
  SimConfig cfg;
  cfg.chunk_size = chunk;
  cfg.barriers = b;
  return simulate(s.platform, s.workload, plan, cfg);
}

void expect_same_timeline(const PhaseTimeline& got, const PhaseTimeline& want) {
  auto near = [](double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b)); };
  for (std::size_t j = 0; j < want.push_end.size(); ++j) {
    EXPECT_TRUE(near(got.push_end[j], want.push_end[j])) << "push_end " << j;
    EXPECT_TRUE(near(got.map_start[j], want.map_start[j])) << "map_start " << j;
    EXPECT_TRUE(near(got.map_end[j], want.map_end[j])) << "map_end " << j;
    EXPECT_TRUE(near(got.shuffle_start[j], want.shuffle_start[j])) << "shuffle_start " << j;
  }
  for (std::size_t k = 0; k < want.shuffle_end.size(); ++k) {
    EXPECT_TRUE(near(got.shuffle_end[k], want.shuffle_end[k])) << "shuffle_end " << k;
    EXPECT_TRUE(near(got.reduce_start[k], want.reduce_start[k])) << "reduce_start " << k;
    EXPECT_TRUE(near(got.reduce_end[k], want.reduce_end[k])) << "reduce_end " << k;
  }
  EXPECT_TRUE(near(got.makespan, want.makespan));
}

}  // namespace

TEST(Simulator, FluidGlobalRunIsTheAnalyticTimeline) {
  const auto s = make_two_cluster_example();
  const auto g = BarrierConfig::all(Barrier::Global);
  for (const auto& plan : {affinity_plan(s.platform), uniform_plan(s.platform)}) {
    const auto trace = run(s, plan, g, 0.0);
    expect_same_timeline(trace.measured_timeline, evaluate(s.platform, s.workload, plan, g));
  }
  EXPECT_EQ(run(s, affinity_plan(s.platform), g, 0.0).measured_timeline.makespan,
            evaluate(s.platform, s.workload, affinity_plan(s.platform), g).makespan);
}

TEST(Simulator, UniformPushEndsAt7500Seconds) {
  const auto s = make_two_cluster_example();
  const auto trace = run(s, uniform_plan(s.platform), BarrierConfig{}, 0.0);
  EXPECT_DOUBLE_EQ(trace.measured_timeline.breakdown.push, 7500.0);
  double last_push = 0.0;
  for (const auto& e : trace.events)
    if (e.kind == SimEventKind::TransferEnd && e.entity.rfind("D", 0) == 0) last_push = std::max(last_push, e.time);
  EXPECT_DOUBLE_EQ(last_push, 7500.0);
}

TEST(Simulator, FluidMatchesModelWithoutLatePipelining) {
  // A pipelined boundary is modelled as max(upstream end, own duration from
  // time zero). Physically the downstream stage cannot begin before its
  // upstream stage does, so identity needs every P boundary to sit in a
  // leading run of P boundaries.
  std::mt19937_64 rng(4);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto s = random_instance(seed, 3, 3, 3, 0.2 + 0.4 * seed);
    const auto plan = random_plan(s.platform, rng);
    for (const char* bars : {"G-G-G", "L-L-L", "P-P-P", "P-P-L", "P-G-L", "G-G-L", "P-L-G", "L-G-L"}) {
      const auto b = parse_barriers(bars);
      SCOPED_TRACE(std::string(bars) + " seed " + std::to_string(seed));
      expect_same_timeline(run(s, plan, b, 0.0).measured_timeline, evaluate(s.platform, s.workload, plan, b));
    }
  }
}

TEST(Simulator, LatePipelinedBoundaryRunsLongerThanModelled) {
  std::mt19937_64 rng(4);
  for (const char* bars : {"G-L-P", "L-P-G", "G-P-L"}) {
    const auto s = random_instance(1, 3, 3, 3, 1.0);
    const auto plan = random_plan(s.platform, rng);
    const auto b = parse_barriers(bars);
    EXPECT_GE(run(s, plan, b, 0.0).measured_timeline.makespan,
              evaluate(s.platform, s.workload, plan, b).makespan * (1 - 1e-12))
        << bars;
  }
}

TEST(Simulator, GlobalPushThenPipelinedShuffleRunsLongerThanModelled) {
  const auto s = make_two_cluster_example();
  const auto b = parse_barriers("G-P-L");
  const auto plan = uniform_plan(s.platform);
  const double measured = run(s, plan, b, 0.0).measured_timeline.makespan;
  const double predicted = evaluate(s.platform, s.workload, plan, b).makespan;
  EXPECT_DOUBLE_EQ(predicted, 9500.0);
  // Map starts at 7500 s; the 5000 s slow shuffle link then ends at 12500 s
  // and the local reduce adds 1000 s.
  EXPECT_DOUBLE_EQ(measured, 13500.0);
}

TEST(Simulator, ChunkedPipelineFillIsBounded) {
  const auto s = unit_instance();
  const auto p = BarrierConfig::all(Barrier::Pipelined);
  const double chunk = 0.1;  // total / 10
  const double analytic = evaluate(s.platform, s.workload, uniform_plan(s.platform), p).makespan;
  const double measured = run(s, uniform_plan(s.platform), p, chunk).measured_timeline.makespan;
  // One chunk of fill latency per downstream stage.
  EXPECT_GE(measured, analytic - 1e-12);
  EXPECT_LE(measured, analytic + 3 * chunk + 1e-12);
  EXPECT_NEAR(measured, 1.3, 1e-12);
}

TEST(Simulator, ChunkedGlobalRunMatchesModel) {
  const auto s = unit_instance();
  const auto g = BarrierConfig::all(Barrier::Global);
  EXPECT_NEAR(run(s, uniform_plan(s.platform), g, 0.1).measured_timeline.makespan, 4.0, 1e-12);
}

TEST(Simulator, ShrinkingChunksApproachTheModel) {
  const auto s = random_instance(3, 2, 2, 2);
  const auto p = BarrierConfig::all(Barrier::Pipelined);
  std::mt19937_64 rng(3);
  const auto plan = random_plan(s.platform, rng);
  const double analytic = evaluate(s.platform, s.workload, plan, p).makespan;
  double previous = std::numeric_limits<double>::infinity();
  for (double chunk : {8 * kGB, 2 * kGB, 512 * kMB, 128 * kMB}) {
    const auto trace = run(s, plan, p, chunk);
    const double err = trace.measured_timeline.makespan - analytic;
    EXPECT_GE(err, -1e-9 * analytic);
    // Jitter allowance of one chunk on the slowest rate.
    EXPECT_LE(err, previous + chunk / (1 * kMB));
    previous = err;
  }
  EXPECT_LT(previous, 0.02 * analytic);
}

TEST(Simulator, MeasuredBarrierMonotonicity) {
  std::mt19937_64 rng(6);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto s = random_instance(50 + seed, 2, 3, 2);
    const auto plan = random_plan(s.platform, rng);
    for (int boundary = 0; boundary < 3; ++boundary) {
      double previous = std::numeric_limits<double>::infinity();
      for (Barrier level : {Barrier::Global, Barrier::Local, Barrier::Pipelined}) {
        BarrierConfig b;
        (boundary == 0 ? b.push_map : boundary == 1 ? b.map_shuffle : b.shuffle_reduce) = level;
        const double m = run(s, plan, b, 0.0).measured_timeline.makespan;
        EXPECT_LE(m, previous * (1 + 1e-12));
        previous = m;
      }
    }
  }
}

TEST(Simulator, ConservationHoldsInBothModes) {
  std::mt19937_64 rng(8);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto s = random_instance(seed, 2, 3, 2, 1.5);
    const auto plan = random_plan(s.platform, rng);
    for (double chunk : {0.0, 1 * kGB}) {
      const auto trace = run(s, plan, parse_barriers("L-P-G"), chunk);
      const auto check = check_conservation(trace, s.platform, s.workload, plan);
      EXPECT_TRUE(check.ok()) << check.describe();
    }
  }
}

TEST(Simulator, ConservationCatchesTampering) {
  const auto s = make_two_cluster_example();
  auto trace = run(s, uniform_plan(s.platform), BarrierConfig{}, 0.0);
  trace.reducer_input[1] *= 1.001;
  const auto check = check_conservation(trace, s.platform, s.workload, uniform_plan(s.platform));
  ASSERT_FALSE(check.ok());
  EXPECT_NE(check.violations.front().where.find("R2"), std::string::npos);
}

TEST(Simulator, EventsAreOrdered) {
  const auto s = random_instance(9, 2, 2, 2);
  const auto trace = run(s, uniform_plan(s.platform), parse_barriers("G-L-P"), 4 * kGB);
  ASSERT_FALSE(trace.events.empty());
  for (std::size_t n = 1; n < trace.events.size(); ++n) {
    const auto& a = trace.events[n - 1];
    const auto& b = trace.events[n];
    EXPECT_TRUE(a.time < b.time || (a.time == b.time && static_cast<int>(a.kind) <= static_cast<int>(b.kind)));
  }
  std::ostringstream csv;
  write_trace_csv(trace, csv);
  EXPECT_EQ(csv.str().substr(0, 25), "time,entity,event,bytes\n0");
}

TEST(Simulator, ChunkChecks) {
  const auto s = unit_instance();
  const auto plan = uniform_plan(s.platform);
  EXPECT_THROW(run(s, plan, BarrierConfig{}, -1.0), Error);
  EXPECT_FALSE(run(s, plan, BarrierConfig{}, 5.0).warnings.empty());
  EXPECT_TRUE(run(s, plan, BarrierConfig{}, 0.25).warnings.empty());
}

TEST(Simulator, RejectsInvalidPlans) {
  const auto s = make_two_cluster_example();
  auto plan = uniform_plan(s.platform);
  plan.reducer_fraction[0] = 0.9;
  EXPECT_THROW(run(s, plan, BarrierConfig{}, 0.0), InvalidPlanError);
}

TEST(Correlate, ExactLines) {
  const auto identity = correlate({{1, 1}, {2, 2}, {5, 5}});
  EXPECT_DOUBLE_EQ(identity.slope, 1.0);
  EXPECT_DOUBLE_EQ(identity.r_squared, 1.0);
  const auto doubled = correlate({{1, 2}, {2, 4}, {3, 6}});
  EXPECT_DOUBLE_EQ(doubled.slope, 2.0);
  EXPECT_DOUBLE_EQ(doubled.intercept, 0.0);
  EXPECT_DOUBLE_EQ(doubled.r_squared, 1.0);
}

TEST(Correlate, NoisyFitMatchesHandComputation) {
  // x = 1..4, y = 1, 3, 2, 5: sxx = 5, sxy = 5.5, syy = 8.75.
  const auto fit = correlate({{1, 1}, {2, 3}, {3, 2}, {4, 5}});
  EXPECT_NEAR(fit.slope, 1.1, 1e-12);
  EXPECT_NEAR(fit.intercept, 2.75 - 1.1 * 2.5, 1e-12);
  EXPECT_NEAR(fit.r_squared, 5.5 * 5.5 / (5 * 8.75), 1e-12);
}

TEST(Correlate, DegenerateInput) {
  EXPECT_THROW(correlate({{1, 2}}), Error);
  EXPECT_THROW(correlate({{3, 1}, {3, 2}}), Error);
}
