// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "geomr/makespan.hpp"
#include "geomr/optimizer.hpp"
#include "geomr/oracle.hpp"
#include "geomr/simulator.hpp"
#include "support.hpp"

using namespace geomr;
using geomr::testing::homogeneous_instance;
using geomr::testing::random_instance;
using geomr::testing::random_plan;

namespace {

// Pinned tolerances.
constexpr double kGoldenRel = 1e-9;
constexpr double kGoldenSeconds = 1.0;
constexpr double kRouteShare = 0.99;
constexpr double kRouteSeconds = 60.0;
constexpr double kOracleRel = 1e-3;
constexpr double kOracleGrid = 0.01;
constexpr double kOracleSeconds = 600.0;
constexpr double kSolverTol = SolveOptions{}.tolerance;
constexpr double kStrictGain = 0.20;
constexpr double kMonotoneRel = 1e-12;
constexpr double kMinRSquared = 0.999;
constexpr double kSlopeLow = 0.99;
constexpr double kSlopeHigh = 1.01;
constexpr double kSweepSeconds = 120.0;
constexpr double kSoundnessSlack = 1e-9;
constexpr double kHomogeneousRel = 0.01;
constexpr long kNodeLimit = 20;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void verdict(int n, bool pass, const std::string& name, const std::string& detail) {
  std::printf("criterion %d: %s %s (%s)\n", n, pass ? "PASS" : "FAIL", name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

SolveOptions limited() {
  SolveOptions o;
  o.node_limit = kNodeLimit;
  return o;
}

const BarrierConfig kGlobal = BarrierConfig::all(Barrier::Global);

// Every makespan program solved in the suite, for the soundness criterion.
// Myopic stages optimize push or shuffle time, so they are not recorded.
struct SoundnessRecord {
  std::string where;
  double mip_objective;
  double exact;
  double bound;
};
std::vector<SoundnessRecord> solved;

void record(const std::string& where, const SolveReport& r) {
  if (r.mip_plan.push_fraction.rows() == 0) return;
  solved.push_back({where, r.mip_objective, r.mip_plan_makespan, r.linearization_bound});
}

void golden() {
  const auto t0 = Clock::now();
  const auto s = make_two_cluster_example();
  const auto aff = evaluate(s.platform, s.workload, affinity_plan(s.platform), kGlobal);
  const auto uni = evaluate(s.platform, s.workload, uniform_plan(s.platform), kGlobal);
  const double map_diff = aff.breakdown.map - uni.breakdown.map;
  auto close = [](double got, double want) { return std::abs(got - want) <= kGoldenRel * want; };
  const double took = seconds_since(t0);
  verdict(1, close(aff.breakdown.push, 1500) && close(uni.breakdown.push, 7500) && close(map_diff, 500) &&
                 took < kGoldenSeconds,
          "two-cluster golden numbers",
          fmt("affinity push %.9g s, uniform push %.9g s, map difference %.9g s, %.3f s", aff.breakdown.push,
              uni.breakdown.push, map_diff, took));
}

void alpha_ten_routing() {
  const auto t0 = Clock::now();
  const auto s = make_two_cluster_example(10.0);
  const auto r = optimize_end_to_end(s.platform, s.workload, kGlobal);
  record("two-cluster alpha 10", r);
  const double took = seconds_since(t0);
  const double share = r.plan.push_fraction(1, 0);
  verdict(2, share >= kRouteShare && took < kRouteSeconds, "alpha 10 routes D2 to M1",
          fmt("x[D2][M1] = %.4f, makespan %.6g s, %.2f s", share, r.predicted_makespan, took));
}

void oracle_equivalence() {
  const auto t0 = Clock::now();
  bool ok = true;
  double worst = -std::numeric_limits<double>::infinity();
  for (std::uint64_t n = 0; n < 20; ++n) {
    const auto s = random_instance(1000 + n, 2, 2, 2, 0.25 * static_cast<double>(n % 8 + 1));
    const auto r = optimize_end_to_end(s.platform, s.workload, kGlobal);
    record("random 2x2x2 #" + std::to_string(n), r);
    const auto o = brute_force_oracle(s.platform, s.workload, kGlobal, kOracleGrid);
    const double tol = std::max(r.epsilon_lin, kOracleRel);
    const double excess = (r.predicted_makespan - o.value) / o.value;
    worst = std::max(worst, excess);
    if (excess > tol) {
      ok = false;
      std::printf("  instance %llu: e2e %.9g s, oracle %.9g s, tolerance %.3g\n", static_cast<unsigned long long>(n),
                  r.predicted_makespan, o.value, tol);
    }
  }
  const double took = seconds_since(t0);
  verdict(3, ok && took < kOracleSeconds, "oracle equivalence on 20 random 2x2x2 instances",
          fmt("largest (e2e - oracle) / oracle = %.3g, %.1f s", worst, took));
}

void dominance() {
  const auto t0 = Clock::now();
  bool ok = true;
  double weakest_gain = 1.0;
  for (const auto kind : {EnvironmentKind::Global4, EnvironmentKind::Global8}) {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      for (double alpha : {0.1, 1.0, 10.0}) {
        const auto s = make_environment(kind, seed, alpha);
        const auto& p = s.platform;
        const auto& w = s.workload;
        const double uniform = evaluate(p, w, uniform_plan(p), kGlobal).makespan;
        const auto e2e = optimize_end_to_end(p, w, kGlobal, {}, limited());
        const auto myopic = optimize_myopic(p, w, kGlobal, {}, limited());
        const auto push = optimize_single_phase(p, w, kGlobal, Phase::Push, {}, limited());
        const auto shuffle = optimize_single_phase(p, w, kGlobal, Phase::Shuffle, {}, limited());
        const std::string where = fmt("%s seed %llu alpha %g", std::string(to_string(kind)).c_str(),
                                      static_cast<unsigned long long>(seed), alpha);
        record(where + " e2e", e2e);
        record(where + " single-push", push);
        record(where + " single-shuffle", shuffle);
        const double slack = 1.0 + e2e.epsilon_lin + kSolverTol;
        const double single = std::min(push.predicted_makespan, shuffle.predicted_makespan);
        const bool order = e2e.predicted_makespan <= single * slack && single <= uniform * slack &&
                           e2e.predicted_makespan <= myopic.predicted_makespan * slack &&
                           myopic.predicted_makespan <= uniform * slack;
        bool strict = true;
        if (kind == EnvironmentKind::Global8) {
          const double gain = 1.0 - e2e.predicted_makespan / uniform;
          weakest_gain = std::min(weakest_gain, gain);
          strict = gain >= kStrictGain;
        }
        if (!order || !strict) {
          ok = false;
          std::printf("  %s: e2e %.6g, single-push %.6g, single-shuffle %.6g, myopic %.6g, uniform %.6g\n",
                      where.c_str(), e2e.predicted_makespan, push.predicted_makespan, shuffle.predicted_makespan,
                      myopic.predicted_makespan, uniform);
        }
      }
    }
  }
  verdict(4, ok, "strategy dominance on global-4 and global-8",
          fmt("18 instances, smallest e2e gain over uniform on global-8 %.3f, %.1f s", weakest_gain,
              seconds_since(t0)));
}

void barrier_monotonicity() {
  std::mt19937_64 rng(2024);
  int violations = 0;
  for (std::uint64_t n = 0; n < 200; ++n) {
    const auto s = random_instance(5000 + n, 1 + n % 3, 1 + (n / 3) % 3, 1 + (n / 9) % 3,
                                   0.1 + 0.05 * static_cast<double>(n % 40));
    const auto plan = random_plan(s.platform, rng);
    for (int boundary = 0; boundary < 3; ++boundary) {
      // Other boundaries drawn per pair so every context is exercised.
      BarrierConfig b;
      b.push_map = static_cast<Barrier>((n + 1) % 3);
      b.map_shuffle = static_cast<Barrier>((n / 3 + 2) % 3);
      b.shuffle_reduce = static_cast<Barrier>((n / 9) % 3);
      double previous = std::numeric_limits<double>::infinity();
      for (Barrier level : {Barrier::Global, Barrier::Local, Barrier::Pipelined}) {
        (boundary == 0 ? b.push_map : boundary == 1 ? b.map_shuffle : b.shuffle_reduce) = level;
        const double m = evaluate(s.platform, s.workload, plan, b).makespan;
        if (m > previous * (1 + kMonotoneRel)) ++violations;
        previous = m;
      }
    }
  }
  verdict(5, violations == 0, "barrier monotonicity on 200 random pairs", fmt("%d violations", violations));
}

struct SweepRun {
  std::string where;
  SimTrace trace;
  double predicted;
  const Scenario* scenario;
  ExecutionPlan plan;
};

std::vector<Scenario> sweep_scenarios;
std::vector<SweepRun> sweep_runs;

void fluid_identity() {
  const auto t0 = Clock::now();
  const std::array<double, 3> alphas{0.1, 1.0, 2.0};
  sweep_scenarios.clear();
  for (double a : alphas) sweep_scenarios.push_back(make_environment(EnvironmentKind::Global8, 1, a));
  std::vector<PredictedMeasured> pairs;
  for (const char* bars : {"G-P-L", "P-P-L", "P-G-L", "G-G-L"}) {
    const auto b = parse_barriers(bars);
    for (const auto& s : sweep_scenarios) {
      const auto e2e = optimize_end_to_end(s.platform, s.workload, b, {}, limited());
      record(fmt("sweep %s alpha %g", bars, s.workload.alpha), e2e);
      for (const auto& plan : {uniform_plan(s.platform), e2e.plan}) {
        SimConfig cfg;
        cfg.chunk_size = 0.0;
        cfg.barriers = b;
        auto trace = simulate(s.platform, s.workload, plan, cfg);
        const double predicted = evaluate(s.platform, s.workload, plan, b).makespan;
        pairs.push_back({predicted, trace.measured_timeline.makespan});
        sweep_runs.push_back({fmt("%s alpha %g fluid", bars, s.workload.alpha), std::move(trace), predicted, &s, plan});
      }
    }
  }
  const auto fit = correlate(pairs);
  const double took = seconds_since(t0);
  verdict(6, fit.r_squared >= kMinRSquared && fit.slope >= kSlopeLow && fit.slope <= kSlopeHigh && took < kSweepSeconds,
          "fluid simulator tracks the model over the validation sweep",
          fmt("%zu runs, slope %.4f, intercept %.4g s, r^2 %.4f, %.1f s", pairs.size(), fit.slope, fit.intercept,
              fit.r_squared, took));
}

void soundness() {
  const auto s = make_environment(EnvironmentKind::Global8, 1);
  const auto fixed = uniform_plan(s.platform);
  const double fixed_exact = evaluate(s.platform, s.workload, fixed, kGlobal).makespan;
  double gap[2];
  double fixed_gap[2];
  int n = 0;
  for (int breakpoints : {10, 20}) {
    PiecewiseSpec spec;
    spec.breakpoint_count = breakpoints;
    const auto r = solve_mip(build_mip(s.platform, s.workload, kGlobal, MipObjective::Makespan, spec), limited());
    record(fmt("global-8 breakpoints %d", breakpoints), r);
    gap[n] = std::abs(r.mip_objective - r.mip_plan_makespan) / r.mip_plan_makespan;
    fixed_gap[n] =
        std::abs(linearized_makespan(s.platform, s.workload, fixed, kGlobal, spec) - fixed_exact) / fixed_exact;
    ++n;
  }
  int violations = 0;
  for (const auto& r : solved) {
    const double g = std::abs(r.mip_objective - r.exact);
    if (g > r.bound + kSoundnessSlack * r.exact) {
      ++violations;
      std::printf("  %s: |mip - exact| = %.6g s exceeds bound %.6g s\n", r.where.c_str(), g, r.bound);
    }
  }
  std::printf("  uniform plan on global-8: linearization gap %.4g at 10 breakpoints, %.4g at 20\n", fixed_gap[0],
              fixed_gap[1]);
  verdict(7, violations == 0 && gap[1] < gap[0], "linearization soundness",
          fmt("%zu solves, %d violations; global-8 incumbent gap %.4g at 10 breakpoints, %.4g at 20",
              solved.size(), violations, gap[0], gap[1]));
}

void homogeneous() {
  const auto s = homogeneous_instance(3);
  const double uniform = evaluate(s.platform, s.workload, uniform_plan(s.platform), kGlobal).makespan;
  const auto r = optimize_end_to_end(s.platform, s.workload, kGlobal);
  record("homogeneous", r);
  const double rel = std::abs(r.predicted_makespan - uniform) / uniform;
  std::mt19937_64 rng(31);
  int beaten = 0;
  for (int n = 0; n < 500; ++n)
    if (evaluate(s.platform, s.workload, random_plan(s.platform, rng), kGlobal).makespan < uniform * (1 - kSolverTol))
      ++beaten;
  verdict(8, rel <= kHomogeneousRel && beaten == 0, "uniform is optimal on a homogeneous platform",
          fmt("e2e within %.3g of uniform, %d of 500 random plans beat uniform", rel, beaten));
}

void conservation() {
  int violations = 0;
  std::size_t traces = 0;
  auto check = [&](const std::string& where, const SimTrace& t, const Scenario& s, const ExecutionPlan& plan) {
    ++traces;
    const auto c = check_conservation(t, s.platform, s.workload, plan);
    if (!c.ok()) {
      ++violations;
      std::printf("  %s:\n%s", where.c_str(), c.describe().c_str());
    }
  };
  for (const auto& run : sweep_runs) {
    check(run.where, run.trace, *run.scenario, run.plan);
    SimConfig cfg;
    cfg.chunk_size = 64 * kMB;
    cfg.barriers = run.trace.measured_timeline.barriers;
    check(run.where + " chunked", simulate(run.scenario->platform, run.scenario->workload, run.plan, cfg),
          *run.scenario, run.plan);
  }
  verdict(9, violations == 0 && traces > 0, "byte conservation in simulation",
          fmt("%zu traces, %d violations", traces, violations));
}

}  // namespace

int main() {
  golden();
  alpha_ten_routing();
  oracle_equivalence();
  dominance();
  barrier_monotonicity();
  fluid_identity();
  homogeneous();
  soundness();
  conservation();
  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
