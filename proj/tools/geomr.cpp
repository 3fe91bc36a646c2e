// geomr command-line tool: evaluate, optimize, compare and simulate
// execution plans for geo-distributed MapReduce.

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "geomr/error.hpp"
#include "geomr/makespan.hpp"
#include "geomr/optimizer.hpp"
#include "geomr/plan_io.hpp"
#include "geomr/report.hpp"
#include "geomr/scenario_io.hpp"
#include "geomr/simulator.hpp"
#include "geomr/units.hpp"

namespace {

using namespace geomr;

enum Exit { kOk = 0, kValidation = 1, kSolverLimit = 2, kIo = 3 };

struct Common {
  std::string scenario;
  std::string barriers = "G-G-G";
  std::vector<double> alphas;
  int breakpoints = PiecewiseSpec{}.breakpoint_count;
  double tol = SolveOptions{}.tolerance;
  double time_limit = SolveOptions{}.time_limit;
  long node_limit = SolveOptions{}.node_limit;
  std::uint64_t seed = SolveOptions{}.seed;
  std::string format = "table";
};

void add_scenario(CLI::App* cmd, Common& c) {
  cmd->add_option("--scenario", c.scenario, "Scenario JSON file")->required();
}
void add_barriers(CLI::App* cmd, Common& c) {
  cmd->add_option("--barriers", c.barriers, "Barrier at push/map, map/shuffle, shuffle/reduce, e.g. G-P-L")
      ->capture_default_str();
}
void add_alpha(CLI::App* cmd, Common& c, bool repeatable) {
  auto* opt = cmd->add_option("--alpha", c.alphas, repeatable ? "Expansion factor (repeatable)"
                                                              : "Expansion factor (overrides the scenario)");
  if (!repeatable) opt->expected(1);
}
void add_solver(CLI::App* cmd, Common& c) {
  cmd->add_option("--breakpoints", c.breakpoints, "Piecewise breakpoints per quadratic")->capture_default_str();
  cmd->add_option("--tol", c.tol, "Relative optimality gap")->capture_default_str();
  cmd->add_option("--time-limit", c.time_limit, "Solver time limit in seconds")->capture_default_str();
  cmd->add_option("--node-limit", c.node_limit, "Branch-and-bound node limit (negative: none)")
      ->capture_default_str();
  cmd->add_option("--seed", c.seed, "Refiner seed")->capture_default_str();
}
void add_format(CLI::App* cmd, Common& c) {
  cmd->add_option("--format", c.format, "Output format")
      ->check(CLI::IsMember({"csv", "table", "json-lines"}))
      ->capture_default_str();
}

PiecewiseSpec spec_of(const Common& c) { return {c.breakpoints}; }

SolveOptions options_of(const Common& c) {
  SolveOptions o;
  o.tolerance = c.tol;
  o.time_limit = c.time_limit;
  o.node_limit = c.node_limit;
  o.seed = c.seed;
  return o;
}

Scenario load(const Common& c) {
  Scenario s = load_scenario(c.scenario);
  if (c.alphas.size() == 1) s.workload.alpha = c.alphas.front();
  return s;
}

std::ostream& open_output(const std::string& path, std::ofstream& file) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path);
  if (!file) throw IoError("cannot open " + path + " for writing");
  return file;
}

int limit_exit(const std::string& status) {
  if (status == "time-limit") {
    std::cerr << "warning: solver stopped at its time limit; the plan is the best found so far\n";
    return kSolverLimit;
  }
  return kOk;
}

int cmd_evaluate(const Common& c, const std::string& plan_path) {
  const BarrierConfig b = parse_barriers(c.barriers);
  const Scenario s = load(c);
  const ExecutionPlan plan = load_plan(plan_path, s.platform);
  const auto t = evaluate(s.platform, s.workload, plan, b);
  write_timeline_csv(t, s.platform, std::cout);
  std::cout << "makespan_s," << format_double(t.makespan) << '\n';
  return kOk;
}

int cmd_plan(const Common& c, const std::string& strategy, const std::string& out_path,
             const std::string& report_path, const std::string& lp_path) {
  const BarrierConfig b = parse_barriers(c.barriers);
  const Strategy st = parse_strategy(strategy);
  const Scenario s = load(c);
  if (!lp_path.empty()) {
    std::ofstream f;
    auto& out = open_output(lp_path, f);
    lp::write_lp_format(build_mip(s.platform, s.workload, b, MipObjective::Makespan, spec_of(c)).mip, out);
  }
  const auto r = run_strategy(s.platform, s.workload, b, st, spec_of(c), options_of(c));
  {
    std::ofstream f;
    auto& out = open_output(out_path, f);
    write_plan(r.report.plan, s.platform, out);
  }
  if (!report_path.empty() || out_path.empty() || out_path == "-") {
    std::ofstream f;
    auto& out = report_path.empty() ? std::cerr : open_output(report_path, f);
    write_solve_report(r, out);
  }
  return limit_exit(r.report.status);
}

int cmd_compare(const Common& c, const std::vector<std::string>& strategies) {
  const Scenario s = load_scenario(c.scenario);
  std::vector<Strategy> list;
  for (const auto& n : strategies) list.push_back(parse_strategy(n));
  const auto rows = compare(s, list, c.alphas, parse_barriers(c.barriers), spec_of(c), options_of(c));
  write_comparison(rows, parse_output_format(c.format), std::cout);
  for (const auto& r : rows)
    if (limit_exit(r.status) != kOk) return kSolverLimit;
  return kOk;
}

int cmd_barrier_sweep(const Common& c) {
  const Scenario s = load_scenario(c.scenario);
  const auto rows = barrier_sweep(s, c.alphas, spec_of(c), options_of(c));
  write_barrier_sweep(rows, parse_output_format(c.format), std::cout);
  for (const auto& r : rows)
    if (limit_exit(r.status) != kOk) return kSolverLimit;
  return kOk;
}

int cmd_simulate(const Common& c, const std::string& plan_path, const std::string& chunk,
                 const std::string& trace_path) {
  SimConfig cfg;
  cfg.barriers = parse_barriers(c.barriers);
  cfg.chunk_size = parse_quantity(chunk, Quantity::Data);
  const Scenario s = load(c);
  const ExecutionPlan plan = load_plan(plan_path, s.platform);
  const auto trace = simulate(s.platform, s.workload, plan, cfg);
  for (const auto& w : trace.warnings) std::cerr << "warning: " << w << '\n';
  if (!trace_path.empty()) {
    std::ofstream f;
    write_trace_csv(trace, open_output(trace_path, f));
  }
  const auto conservation = check_conservation(trace, s.platform, s.workload, plan);
  const double predicted = evaluate(s.platform, s.workload, plan, cfg.barriers).makespan;
  const double measured = trace.measured_timeline.makespan;
  std::cout << "predicted_makespan_s," << format_double(predicted) << '\n';
  std::cout << "measured_makespan_s," << format_double(measured) << '\n';
  std::cout << "relative_error," << format_double(predicted > 0.0 ? (measured - predicted) / predicted : 0.0)
            << '\n';
  std::cout << "push_end_s," << format_double(trace.measured_timeline.breakdown.push) << '\n';
  std::cout << "conservation," << (conservation.ok() ? "ok" : "violated") << '\n';
  if (!conservation.ok()) {
    std::cerr << conservation.describe();
    return kValidation;
  }
  return kOk;
}

int cmd_generate(const std::string& env, std::uint64_t seed, double alpha, const std::string& out_path) {
  const Scenario s = make_environment(parse_environment_kind(env), seed, alpha);
  std::ofstream f;
  write_scenario(s, open_output(out_path, f));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Execution-plan modelling and optimization for geo-distributed MapReduce"};
  app.require_subcommand(1);
  Common c;

  std::string plan_path, strategy = "e2e", out_path, report_path, lp_path, chunk = "64MB", trace_path;
  std::vector<std::string> strategies;
  std::string env = "global-8";
  double gen_alpha = 1.0;

  auto* evaluate_cmd = app.add_subcommand("evaluate", "Print the phase timeline and makespan of a plan");
  add_scenario(evaluate_cmd, c);
  evaluate_cmd->add_option("--plan", plan_path, "Plan JSON file")->required();
  add_barriers(evaluate_cmd, c);
  add_alpha(evaluate_cmd, c, false);

  auto* plan_cmd = app.add_subcommand("plan", "Compute a plan with one strategy");
  add_scenario(plan_cmd, c);
  plan_cmd->add_option("--strategy", strategy, "uniform, affinity, myopic, single-push, single-shuffle or e2e")
      ->capture_default_str();
  plan_cmd->add_option("--out", out_path, "Plan file to write (default: stdout)");
  plan_cmd->add_option("--report", report_path, "Solve report CSV (default: stderr when the plan goes to stdout)");
  plan_cmd->add_option("--lp", lp_path, "Also export the makespan program in LP format");
  add_barriers(plan_cmd, c);
  add_alpha(plan_cmd, c, false);
  add_solver(plan_cmd, c);

  auto* compare_cmd = app.add_subcommand("compare", "Compare strategies, normalized to the uniform plan");
  add_scenario(compare_cmd, c);
  compare_cmd->add_option("--strategy", strategies, "Strategy (repeatable)")->required();
  add_alpha(compare_cmd, c, true);
  add_barriers(compare_cmd, c);
  add_solver(compare_cmd, c);
  add_format(compare_cmd, c);

  auto* sweep_cmd = app.add_subcommand("barrier-sweep", "Optimized makespan as each barrier is relaxed");
  add_scenario(sweep_cmd, c);
  add_alpha(sweep_cmd, c, true);
  add_solver(sweep_cmd, c);
  add_format(sweep_cmd, c);

  auto* simulate_cmd = app.add_subcommand("simulate", "Run a plan through the event simulator");
  add_scenario(simulate_cmd, c);
  simulate_cmd->add_option("--plan", plan_path, "Plan JSON file")->required();
  simulate_cmd->add_option("--chunk", chunk, "Chunk size, e.g. 64MB; 0 for fluid mode")->capture_default_str();
  simulate_cmd->add_option("--trace", trace_path, "Trace CSV to write");
  add_barriers(simulate_cmd, c);
  add_alpha(simulate_cmd, c, false);

  auto* generate_cmd = app.add_subcommand("generate", "Write a seeded synthetic scenario");
  generate_cmd->add_option("--env", env, "local-dc, intra-continental, global-4 or global-8")->capture_default_str();
  generate_cmd->add_option("--seed", c.seed, "Sampling seed")->capture_default_str();
  generate_cmd->add_option("--alpha", gen_alpha, "Expansion factor")->capture_default_str();
  generate_cmd->add_option("--out", out_path, "Scenario file to write (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  }

  try {
    if (*evaluate_cmd) return cmd_evaluate(c, plan_path);
    if (*plan_cmd) return cmd_plan(c, strategy, out_path, report_path, lp_path);
    if (*compare_cmd) return cmd_compare(c, strategies);
    if (*sweep_cmd) return cmd_barrier_sweep(c);
    if (*simulate_cmd) return cmd_simulate(c, plan_path, chunk, trace_path);
    if (*generate_cmd) return cmd_generate(env, c.seed, gen_alpha, out_path);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  } catch (const SolverError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kSolverLimit;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidation;
  }
  return kOk;
}
