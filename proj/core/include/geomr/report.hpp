#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "geomr/makespan.hpp"
#include "geomr/optimizer.hpp"
#include "geomr/plan.hpp"
#include "geomr/platform.hpp"

namespace geomr {

enum class Strategy { Uniform, Affinity, Myopic, SinglePush, SingleShuffle, EndToEnd };

// Names: uniform, affinity, myopic, single-push, single-shuffle, e2e.
std::string_view to_string(Strategy s);
Strategy parse_strategy(std::string_view name);

// Worst-case relative deviation quoted for a 10-breakpoint template with no
// stated metric. Printed next to our own certified bound, never used.
inline constexpr double kQuotedWorstCaseDeviation = 0.0415;

// Plan for one strategy. The fixed strategies fill only plan,
// predicted_makespan, status ("fixed") and the timeline.
struct StrategyResult {
  Strategy strategy = Strategy::Uniform;
  SolveReport report;
  PhaseTimeline timeline;
};

StrategyResult run_strategy(const PlatformGraph& p, const Workload& w, const BarrierConfig& b, Strategy s,
                            const PiecewiseSpec& spec = {}, const SolveOptions& options = {});

struct ComparisonRow {
  std::string scenario;
  std::string strategy;
  BarrierConfig barriers;
  double alpha = 1.0;
  double makespan = 0.0;    // seconds
  double normalized = 0.0;  // makespan / uniform makespan, same scenario, barriers and alpha
  PhaseBreakdown breakdown;
  std::string status;
};

// One row per (alpha, strategy), alphas outer, in the order given. An
// empty alpha list uses the scenario's own alpha.
std::vector<ComparisonRow> compare(const Scenario& scenario, const std::vector<Strategy>& strategies,
                                   const std::vector<double>& alphas, const BarrierConfig& b,
                                   const PiecewiseSpec& spec = {}, const SolveOptions& options = {});

struct BarrierSweepRow {
  std::string scenario;
  double alpha = 1.0;
  std::string relaxed;  // none, push/map, map/shuffle, shuffle/reduce, all
  BarrierConfig barriers;
  double makespan = 0.0;
  double normalized = 0.0;  // makespan / all-global optimum
  std::string status;
};

// Per alpha: the end-to-end optimum under all-global barriers, with each
// single boundary relaxed to pipelined, and with every boundary pipelined.
std::vector<BarrierSweepRow> barrier_sweep(const Scenario& scenario, const std::vector<double>& alphas,
                                           const PiecewiseSpec& spec = {}, const SolveOptions& options = {});

enum class OutputFormat { Csv, Table, JsonLines };

OutputFormat parse_output_format(std::string_view name);

// CSV columns:
// scenario,strategy,barriers,alpha,makespan_s,normalized,push_s,map_s,shuffle_s,reduce_s,status
void write_comparison(const std::vector<ComparisonRow>& rows, OutputFormat format, std::ostream& out);

// CSV columns: scenario,alpha,relaxed,barriers,makespan_s,normalized,status
void write_barrier_sweep(const std::vector<BarrierSweepRow>& rows, OutputFormat format, std::ostream& out);

// key,value lines.
void write_solve_report(const StrategyResult& result, std::ostream& out);

}  // namespace geomr
