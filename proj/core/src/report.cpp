#include "geomr/report.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <ostream>

#include "geomr/error.hpp"
#include "geomr/units.hpp"
#include "json.hpp"

namespace geomr {

using nlohmann::json;

namespace {

constexpr std::array<std::pair<Strategy, std::string_view>, 6> kStrategyNames{{
    {Strategy::Uniform, "uniform"},
    {Strategy::Affinity, "affinity"},
    {Strategy::Myopic, "myopic"},
    {Strategy::SinglePush, "single-push"},
    {Strategy::SingleShuffle, "single-shuffle"},
    {Strategy::EndToEnd, "e2e"},
}};

Workload with_alpha(Workload w, double alpha) {
  w.alpha = alpha;
  return w;
}

std::string fixed(double v, int digits) {
  std::array<char, 64> buf{};
  std::snprintf(buf.data(), buf.size(), "%.*f", digits, v);
  return buf.data();
}

// Left-aligned text table with a header rule.
void write_table(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& cells,
                 std::ostream& out) {
  std::vector<std::size_t> width(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) {
    width[c] = header[c].size();
    for (const auto& row : cells) width[c] = std::max(width[c], row[c].size());
  }
  auto line = [&](const std::vector<std::string>& row) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      out << row[c];
      if (c + 1 < row.size()) out << std::string(width[c] - row[c].size() + 2, ' ');
    }
    out << '\n';
  };
  line(header);
  std::size_t total = 0;
  for (std::size_t c = 0; c < width.size(); ++c) total += width[c] + (c + 1 < width.size() ? 2 : 0);
  out << std::string(total, '-') << '\n';
  for (const auto& row : cells) line(row);
}

void write_csv(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& cells,
               std::ostream& out) {
  auto line = [&](const std::vector<std::string>& row) {
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << row[c];
    out << '\n';
  };
  line(header);
  for (const auto& row : cells) line(row);
}

}  // namespace

std::string_view to_string(Strategy s) {
  for (const auto& [k, name] : kStrategyNames)
    if (k == s) return name;
  return "unknown";
}

Strategy parse_strategy(std::string_view name) {
  for (const auto& [k, n] : kStrategyNames)
    if (n == name) return k;
  throw Error("unknown strategy '" + std::string(name) +
              "' (expected uniform, affinity, myopic, single-push, single-shuffle or e2e)");
}

OutputFormat parse_output_format(std::string_view name) {
  if (name == "csv") return OutputFormat::Csv;
  if (name == "table") return OutputFormat::Table;
  if (name == "json-lines") return OutputFormat::JsonLines;
  throw Error("unknown output format '" + std::string(name) + "' (expected csv, table or json-lines)");
}

StrategyResult run_strategy(const PlatformGraph& p, const Workload& w, const BarrierConfig& b, Strategy s,
                            const PiecewiseSpec& spec, const SolveOptions& options) {
  StrategyResult result;
  result.strategy = s;
  switch (s) {
    case Strategy::Uniform:
    case Strategy::Affinity:
      require_valid(p, w);
      result.report.plan = s == Strategy::Uniform ? uniform_plan(p) : affinity_plan(p);
      result.report.status = "fixed";
      break;
    case Strategy::Myopic: result.report = optimize_myopic(p, w, b, spec, options); break;
    case Strategy::SinglePush: result.report = optimize_single_phase(p, w, b, Phase::Push, spec, options); break;
    case Strategy::SingleShuffle:
      result.report = optimize_single_phase(p, w, b, Phase::Shuffle, spec, options);
      break;
    case Strategy::EndToEnd: result.report = optimize_end_to_end(p, w, b, spec, options); break;
  }
  result.timeline = evaluate(p, w, result.report.plan, b);
  result.report.predicted_makespan = result.timeline.makespan;
  return result;
}

std::vector<ComparisonRow> compare(const Scenario& scenario, const std::vector<Strategy>& strategies,
                                   const std::vector<double>& alphas, const BarrierConfig& b,
                                   const PiecewiseSpec& spec, const SolveOptions& options) {
  std::vector<ComparisonRow> rows;
  const std::vector<double> as = alphas.empty() ? std::vector<double>{scenario.workload.alpha} : alphas;
  for (double alpha : as) {
    const Workload w = with_alpha(scenario.workload, alpha);
    const double baseline = evaluate(scenario.platform, w, uniform_plan(scenario.platform), b).makespan;
    for (Strategy s : strategies) {
      const auto r = run_strategy(scenario.platform, w, b, s, spec, options);
      ComparisonRow row;
      row.scenario = scenario.name;
      row.strategy = std::string(to_string(s));
      row.barriers = b;
      row.alpha = alpha;
      row.makespan = r.timeline.makespan;
      row.normalized = s == Strategy::Uniform ? 1.0 : row.makespan / baseline;
      row.breakdown = r.timeline.breakdown;
      row.status = r.report.status;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::vector<BarrierSweepRow> barrier_sweep(const Scenario& scenario, const std::vector<double>& alphas,
                                           const PiecewiseSpec& spec, const SolveOptions& options) {
  const BarrierConfig global = BarrierConfig::all(Barrier::Global);
  BarrierConfig push_map = global, map_shuffle = global, shuffle_reduce = global;
  push_map.push_map = Barrier::Pipelined;
  map_shuffle.map_shuffle = Barrier::Pipelined;
  shuffle_reduce.shuffle_reduce = Barrier::Pipelined;
  const std::array<std::pair<std::string, BarrierConfig>, 5> configs{{
      {"none", global},
      {"push/map", push_map},
      {"map/shuffle", map_shuffle},
      {"shuffle/reduce", shuffle_reduce},
      {"all", BarrierConfig::all(Barrier::Pipelined)},
  }};
  std::vector<BarrierSweepRow> rows;
  const std::vector<double> as = alphas.empty() ? std::vector<double>{scenario.workload.alpha} : alphas;
  for (double alpha : as) {
    const Workload w = with_alpha(scenario.workload, alpha);
    double reference = 0.0;
    for (const auto& [name, b] : configs) {
      const auto r = run_strategy(scenario.platform, w, b, Strategy::EndToEnd, spec, options);
      BarrierSweepRow row;
      row.scenario = scenario.name;
      row.alpha = alpha;
      row.relaxed = name;
      row.barriers = b;
      row.makespan = r.timeline.makespan;
      if (name == "none") reference = row.makespan;
      row.normalized = name == "none" ? 1.0 : row.makespan / reference;
      row.status = r.report.status;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

void write_comparison(const std::vector<ComparisonRow>& rows, OutputFormat format, std::ostream& out) {
  if (format == OutputFormat::JsonLines) {
    for (const auto& r : rows) {
      json j = {{"scenario", r.scenario},
                {"strategy", r.strategy},
                {"barriers", to_string(r.barriers)},
                {"alpha", r.alpha},
                {"makespan_s", r.makespan},
                {"normalized", r.normalized},
                {"push_s", r.breakdown.push},
                {"map_s", r.breakdown.map},
                {"shuffle_s", r.breakdown.shuffle},
                {"reduce_s", r.breakdown.reduce},
                {"status", r.status}};
      out << j.dump() << '\n';
    }
    return;
  }
  const bool csv = format == OutputFormat::Csv;
  auto num = [&](double v, int digits) { return csv ? format_double(v) : fixed(v, digits); };
  std::vector<std::vector<std::string>> cells;
  for (const auto& r : rows) {
    cells.push_back({r.scenario, r.strategy, to_string(r.barriers), format_double(r.alpha), num(r.makespan, 3),
                     num(r.normalized, 4), num(r.breakdown.push, 3), num(r.breakdown.map, 3),
                     num(r.breakdown.shuffle, 3), num(r.breakdown.reduce, 3), r.status});
  }
  const std::vector<std::string> header{"scenario", "strategy", "barriers", "alpha", "makespan_s", "normalized",
                                        "push_s",   "map_s",    "shuffle_s", "reduce_s", "status"};
  csv ? write_csv(header, cells, out) : write_table(header, cells, out);
}

void write_barrier_sweep(const std::vector<BarrierSweepRow>& rows, OutputFormat format, std::ostream& out) {
  if (format == OutputFormat::JsonLines) {
    for (const auto& r : rows) {
      json j = {{"scenario", r.scenario},     {"alpha", r.alpha},           {"relaxed", r.relaxed},
                {"barriers", to_string(r.barriers)}, {"makespan_s", r.makespan}, {"normalized", r.normalized},
                {"status", r.status}};
      out << j.dump() << '\n';
    }
    return;
  }
  const bool csv = format == OutputFormat::Csv;
  auto num = [&](double v, int digits) { return csv ? format_double(v) : fixed(v, digits); };
  std::vector<std::vector<std::string>> cells;
  for (const auto& r : rows) {
    cells.push_back({r.scenario, format_double(r.alpha), r.relaxed, to_string(r.barriers), num(r.makespan, 3),
                     num(r.normalized, 4), r.status});
  }
  const std::vector<std::string> header{"scenario", "alpha", "relaxed", "barriers", "makespan_s", "normalized",
                                        "status"};
  csv ? write_csv(header, cells, out) : write_table(header, cells, out);
}

void write_solve_report(const StrategyResult& result, std::ostream& out) {
  const auto& r = result.report;
  out << "key,value\n";
  out << "strategy," << to_string(result.strategy) << '\n';
  out << "status," << r.status << '\n';
  out << "predicted_makespan_s," << format_double(r.predicted_makespan) << '\n';
  const auto& bd = result.timeline.breakdown;
  out << "push_s," << format_double(bd.push) << '\n';
  out << "map_s," << format_double(bd.map) << '\n';
  out << "shuffle_s," << format_double(bd.shuffle) << '\n';
  out << "reduce_s," << format_double(bd.reduce) << '\n';
  if (r.status == "fixed") return;
  out << "mip_objective_s," << format_double(r.mip_objective) << '\n';
  out << "best_bound_s," << format_double(r.best_bound) << '\n';
  out << "gap," << format_double(r.gap) << '\n';
  out << "nodes," << r.node_count << '\n';
  out << "lp_iterations," << r.lp_iterations << '\n';
  out << "wall_time_s," << format_double(r.wall_time) << '\n';
  out << "mip_plan_makespan_s," << format_double(r.mip_plan_makespan) << '\n';
  out << "linearization_bound_s," << format_double(r.linearization_bound) << '\n';
  out << "epsilon_lin," << format_double(r.epsilon_lin) << '\n';
  out << "quoted_worst_case_deviation," << format_double(kQuotedWorstCaseDeviation) << '\n';
  for (std::size_t i = 0; i < r.stage_objectives.size(); ++i)
    out << "stage" << i + 1 << "_objective_s," << format_double(r.stage_objectives[i]) << '\n';
}

}  // namespace geomr
