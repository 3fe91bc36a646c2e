#include "geomr/optimizer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "geomr/branch_and_bound.hpp"
#include "geomr/error.hpp"
#include "geomr/makespan.hpp"
#include "geomr/refine.hpp"

namespace geomr {

std::string_view to_string(MipObjective o) {
  switch (o) {
    case MipObjective::Makespan: return "makespan";
    case MipObjective::PushTime: return "push_time";
    case MipObjective::ShuffleTimeGivenPush: return "shuffle_time_given_push";
  }
  return "unknown";
}

namespace {

using lp::Sense;
using lp::Term;

// Linear expression sum(terms) + constant.
struct Expr {
  std::vector<Term> terms;
  double constant = 0.0;

  Expr scaled(double c) const {
    Expr e{terms, constant * c};
    for (auto& t : e.terms) t.coef *= c;
    return e;
  }
};

class Builder {
 public:
  explicit Builder(lp::LinearProgram& lp) : lp_(lp) {}

  int var(std::string name, double lo, double hi) { return lp_.add_variable(std::move(name), lo, hi); }

  // lhs_var + sum(coef * expr) (sense) rhs, with expression constants moved
  // to the right-hand side.
  int row(std::string name, std::vector<Term> terms, const std::vector<std::pair<double, const Expr*>>& exprs,
          Sense sense, double rhs) {
    for (const auto& [coef, e] : exprs) {
      for (const auto& t : e->terms) terms.push_back({t.var, coef * t.coef});
      rhs -= coef * e->constant;
    }
    return lp_.add_constraint(std::move(name), std::move(terms), sense, rhs);
  }

 private:
  lp::LinearProgram& lp_;
};

void check_fixed(const FixedAssignment& fixed, const PlatformGraph& p) {
  ValidationResult result;
  if (fixed.push_fraction) {
    const auto& x = *fixed.push_fraction;
    if (x.rows() != p.num_sources() || x.cols() != p.num_mappers())
      throw DimensionError("pinned push fractions must be " + std::to_string(p.num_sources()) + "x" +
                           std::to_string(p.num_mappers()));
    ExecutionPlan probe{x, std::vector<double>(p.num_reducers(), 1.0 / static_cast<double>(p.num_reducers()))};
    for (const auto& v : validate_plan(probe, p).violations) result.violations.push_back(v);
  }
  if (fixed.reducer_fraction) {
    const auto& y = *fixed.reducer_fraction;
    if (y.size() != p.num_reducers())
      throw DimensionError("pinned reducer fractions must have " + std::to_string(p.num_reducers()) + " entries");
    ExecutionPlan probe = uniform_plan(p);
    probe.reducer_fraction = y;
    for (const auto& v : validate_plan(probe, p).violations) result.violations.push_back(v);
  }
  if (!result.ok()) throw InvalidPlanError("invalid pinned assignment:\n" + result.describe());
}

std::string id(std::string prefix, const std::string& a) { return prefix + "_" + a; }
std::string id(std::string prefix, const std::string& a, const std::string& b) {
  return prefix + "_" + a + "_" + b;
}

// Value m + y - 1 below which no product of [0, 1] numbers can fall, and
// the piecewise estimate of m * y reachable in the program.
double product_estimate(double m, double y, std::span<const double> bw, std::span<const double> bv) {
  const double est = tangent_envelope(bw, 0.5 * (m + y)) - chord_interpolation(bv, 0.5 * (m - y));
  return std::max({est, 0.0, m + y - 1.0});
}

double product_error(const PiecewiseSpec& spec) {
  return quadratic_error_bound(spec.breakpoint_count, 0.0, 1.0) +
         quadratic_error_bound(spec.breakpoint_count, -0.5, 0.5);
}

std::vector<double> mapper_share(const Workload& w, const ExecutionPlan& plan) {
  const double total = w.total_data();
  std::vector<double> m(plan.push_fraction.cols(), 0.0);
  for (std::size_t i = 0; i < plan.push_fraction.rows(); ++i)
    for (std::size_t j = 0; j < m.size(); ++j) m[j] += w.data_at_source[i] * plan.push_fraction(i, j);
  for (double& v : m) v /= total;
  return m;
}

bool has_products(const PlanMip& pm) {
  return pm.objective != MipObjective::PushTime && !pm.fixed.push_fraction && !pm.fixed.reducer_fraction;
}

std::vector<double> encode(const ExecutionPlan& plan) {
  std::vector<double> v(plan.push_fraction.values().begin(), plan.push_fraction.values().end());
  v.insert(v.end(), plan.reducer_fraction.begin(), plan.reducer_fraction.end());
  return v;
}

ExecutionPlan decode(const std::vector<double>& v, std::size_t s, std::size_t m) {
  ExecutionPlan plan;
  plan.push_fraction = Matrix(s, m);
  std::copy(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(s * m), plan.push_fraction.values().begin());
  plan.reducer_fraction.assign(v.begin() + static_cast<std::ptrdiff_t>(s * m), v.end());
  return plan;
}

ExecutionPlan with_fixed(ExecutionPlan plan, const FixedAssignment& fixed) {
  if (fixed.push_fraction) plan.push_fraction = *fixed.push_fraction;
  if (fixed.reducer_fraction) plan.reducer_fraction = *fixed.reducer_fraction;
  return plan;
}

// Objective of a plan in the program's own terms, seconds.
double program_objective(const PlanMip& pm, const ExecutionPlan& plan) {
  if (pm.objective == MipObjective::Makespan && has_products(pm))
    return linearized_makespan(pm.platform, pm.workload, plan, pm.barriers, pm.spec);
  MakespanEvaluator eval(pm.platform, pm.workload, pm.barriers);
  const auto& t = eval.timeline(plan);
  switch (pm.objective) {
    case MipObjective::Makespan: return t.makespan;
    case MipObjective::PushTime: return *std::max_element(t.push_end.begin(), t.push_end.end());
    case MipObjective::ShuffleTimeGivenPush: return *std::max_element(t.shuffle_end.begin(), t.shuffle_end.end());
  }
  return t.makespan;
}

bool better_plan(double a_value, const ExecutionPlan& a, double b_value, const ExecutionPlan& b) {
  const double tie = 1e-12 * std::max(1.0, std::abs(b_value));
  if (a_value < b_value - tie) return true;
  return a_value <= b_value + tie && lexicographically_less(a, b);
}

}  // namespace

ExecutionPlan PlanMip::extract_plan(std::span<const double> values) const {
  ExecutionPlan plan = uniform_plan(platform);
  const std::size_t num_m = platform.num_mappers();
  for (std::size_t i = 0; i < platform.num_sources(); ++i) {
    auto row = plan.push_fraction.row(i);
    for (std::size_t j = 0; j < num_m; ++j) {
      const int v = x_var[i * num_m + j];
      row[j] = v >= 0 ? values[static_cast<std::size_t>(v)] : (*fixed.push_fraction)(i, j);
    }
    if (!fixed.push_fraction) project_to_simplex(row);
  }
  bool y_free = false;
  for (std::size_t k = 0; k < platform.num_reducers(); ++k) {
    const int v = y_var[k];
    if (v >= 0) {
      plan.reducer_fraction[k] = values[static_cast<std::size_t>(v)];
      y_free = true;
    } else if (fixed.reducer_fraction) {
      plan.reducer_fraction[k] = (*fixed.reducer_fraction)[k];
    }
  }
  if (y_free) project_to_simplex(plan.reducer_fraction);
  return plan;
}

PlanMip build_mip(const PlatformGraph& p, const Workload& w, const BarrierConfig& b, MipObjective objective,
                  const PiecewiseSpec& spec, const FixedAssignment& fixed) {
  require_valid(p, w);
  check_fixed(fixed, p);
  if (objective == MipObjective::ShuffleTimeGivenPush && !fixed.push_fraction)
    throw Error("the shuffle_time_given_push objective needs every push fraction pinned");
  (void)breakpoints(spec.breakpoint_count, 0.0, 1.0);  // validates the count

  PlanMip pm;
  pm.platform = p;
  pm.workload = w;
  pm.barriers = b;
  pm.objective = objective;
  pm.spec = spec;
  pm.fixed = fixed;
  {
    MakespanEvaluator eval(p, w, b);
    const double tau = eval.makespan(with_fixed(uniform_plan(p), fixed));
    pm.time_scale = tau > 0.0 ? tau : 1.0;
  }
  const double tau = pm.time_scale;
  const std::size_t num_s = p.num_sources();
  const std::size_t num_m = p.num_mappers();
  const std::size_t num_r = p.num_reducers();
  const auto& data = w.data_at_source;
  const double total = w.total_data();
  const double alpha = w.alpha;

  auto& lp = pm.mip.lp;
  Builder bld(lp);

  // Push fractions and the normalized mapper load m_j.
  pm.x_var.assign(num_s * num_m, -1);
  if (!fixed.push_fraction) {
    for (std::size_t i = 0; i < num_s; ++i) {
      std::vector<Term> sum;
      for (std::size_t j = 0; j < num_m; ++j) {
        const int v = bld.var(id("x", p.sources[i], p.mappers[j]), 0.0, 1.0);
        pm.x_var[i * num_m + j] = v;
        sum.push_back({v, 1.0});
      }
      bld.row(id("assign", p.sources[i]), std::move(sum), {}, Sense::Equal, 1.0);
    }
  }
  std::vector<Expr> load(num_m);  // m_j
  for (std::size_t j = 0; j < num_m; ++j) {
    if (fixed.push_fraction) {
      for (std::size_t i = 0; i < num_s; ++i) load[j].constant += data[i] * (*fixed.push_fraction)(i, j) / total;
    } else {
      const int v = bld.var(id("m", p.mappers[j]), 0.0, 1.0);
      std::vector<Term> terms{{v, 1.0}};
      for (std::size_t i = 0; i < num_s; ++i) terms.push_back({pm.x_var[i * num_m + j], -data[i] / total});
      bld.row(id("load", p.mappers[j]), std::move(terms), {}, Sense::Equal, 0.0);
      load[j].terms.push_back({v, 1.0});
    }
  }

  // push_end_j >= D_i x_ij / B_ij.
  std::vector<int> push_end(num_m);
  for (std::size_t j = 0; j < num_m; ++j) {
    if (fixed.push_fraction) {
      double end = 0.0;
      for (std::size_t i = 0; i < num_s; ++i) {
        const double bytes = data[i] * (*fixed.push_fraction)(i, j);
        if (bytes > 0.0) end = std::max(end, bytes / p.push_bandwidth(i, j));
      }
      push_end[j] = bld.var(id("push_end", p.mappers[j]), end / tau, lp::kInfinity);
      continue;
    }
    push_end[j] = bld.var(id("push_end", p.mappers[j]), 0.0, lp::kInfinity);
    for (std::size_t i = 0; i < num_s; ++i) {
      bld.row(id("push", p.sources[i], p.mappers[j]),
              {{push_end[j], 1.0}, {pm.x_var[i * num_m + j], -data[i] / (p.push_bandwidth(i, j) * tau)}}, {},
              Sense::GreaterEqual, 0.0);
    }
  }

  auto set_objective = [&](const std::vector<int>& ends) {
    pm.objective_var = bld.var("makespan", 0.0, lp::kInfinity);
    lp.set_objective(pm.objective_var, 1.0);
    for (std::size_t e = 0; e < ends.size(); ++e)
      bld.row("objective_" + std::to_string(e), {{pm.objective_var, 1.0}, {ends[e], -1.0}}, {},
              Sense::GreaterEqual, 0.0);
  };

  pm.y_var.assign(num_r, -1);
  if (objective == MipObjective::PushTime) {
    set_objective(push_end);
    return pm;
  }

  // Start of each stage per node under a boundary's barrier: a shared
  // scalar after a global barrier, the node's own upstream end otherwise.
  auto starts = [&](const std::vector<int>& upstream, Barrier barrier, const std::string& name) {
    if (barrier != Barrier::Global) return upstream;
    const int g = bld.var(name, 0.0, lp::kInfinity);
    for (std::size_t u = 0; u < upstream.size(); ++u)
      bld.row(name + "_" + std::to_string(u), {{g, 1.0}, {upstream[u], -1.0}}, {}, Sense::GreaterEqual, 0.0);
    return std::vector<int>(upstream.size(), g);
  };
  // end >= start (+) duration.
  auto end_rows = [&](const std::string& name, int end, int start, const Expr& duration, Barrier barrier) {
    if (barrier == Barrier::Pipelined) {
      bld.row(name + "_after_start", {{end, 1.0}, {start, -1.0}}, {}, Sense::GreaterEqual, 0.0);
      bld.row(name + "_after_work", {{end, 1.0}}, {{-1.0, &duration}}, Sense::GreaterEqual, 0.0);
    } else {
      bld.row(name, {{end, 1.0}, {start, -1.0}}, {{-1.0, &duration}}, Sense::GreaterEqual, 0.0);
    }
  };

  // Map.
  const auto map_start = starts(push_end, b.push_map, "map_start");
  std::vector<int> map_end(num_m);
  for (std::size_t j = 0; j < num_m; ++j) {
    map_end[j] = bld.var(id("map_end", p.mappers[j]), 0.0, lp::kInfinity);
    const Expr duration = load[j].scaled(total / (p.map_capacity[j] * tau));
    end_rows(id("map", p.mappers[j]), map_end[j], map_start[j], duration, b.push_map);
  }

  // Reducer fractions.
  std::vector<Expr> share(num_r);
  if (fixed.reducer_fraction) {
    for (std::size_t k = 0; k < num_r; ++k) share[k].constant = (*fixed.reducer_fraction)[k];
  } else {
    std::vector<Term> sum;
    for (std::size_t k = 0; k < num_r; ++k) {
      pm.y_var[k] = bld.var(id("y", p.reducers[k]), 0.0, 1.0);
      share[k].terms.push_back({pm.y_var[k], 1.0});
      sum.push_back({pm.y_var[k], 1.0});
    }
    bld.row("keyspace", std::move(sum), {}, Sense::Equal, 1.0);
  }

  // Products m_j * y_k. With either factor pinned they are linear; otherwise
  // m y = w^2 - w'^2 with w = (m + y) / 2 and w' = (m - y) / 2.
  const auto bw = breakpoints(spec.breakpoint_count, 0.0, 1.0);
  const auto bv = breakpoints(spec.breakpoint_count, -0.5, 0.5);
  auto product = [&](std::size_t j, std::size_t k) -> Expr {
    if (load[j].terms.empty()) return share[k].scaled(load[j].constant);
    if (share[k].terms.empty()) return load[j].scaled(share[k].constant);
    const int m = load[j].terms[0].var;
    const int y = share[k].terms[0].var;
    const std::string tag = p.mappers[j] + "_" + p.reducers[k];
    const int s = bld.var("s_" + tag, 0.0, lp::kInfinity);
    const int q = bld.var("q_" + tag, 0.0, lp::kInfinity);
    for (std::size_t t = 0; t < bw.size(); ++t) {
      // s >= 2 b w - b^2
      bld.row("tangent_" + tag + "_" + std::to_string(t), {{s, 1.0}, {m, -bw[t]}, {y, -bw[t]}}, {},
              Sense::GreaterEqual, -bw[t] * bw[t]);
    }
    const std::size_t n = bv.size();
    std::vector<int> lambda(n);
    std::vector<int> select(n - 1);
    for (std::size_t t = 0; t < n; ++t) lambda[t] = bld.var("l_" + tag + "_" + std::to_string(t), 0.0, 1.0);
    for (std::size_t t = 0; t + 1 < n; ++t) {
      select[t] = bld.var("z_" + tag + "_" + std::to_string(t), 0.0, 1.0);
      pm.mip.binaries.push_back(select[t]);
    }
    std::vector<Term> wv{{m, -0.5}, {y, 0.5}};
    std::vector<Term> chord{{q, 1.0}};
    std::vector<Term> convex;
    for (std::size_t t = 0; t < n; ++t) {
      wv.push_back({lambda[t], bv[t]});
      chord.push_back({lambda[t], -bv[t] * bv[t]});
      convex.push_back({lambda[t], 1.0});
      std::vector<Term> adj{{lambda[t], 1.0}};
      if (t > 0) adj.push_back({select[t - 1], -1.0});
      if (t + 1 < n) adj.push_back({select[t], -1.0});
      bld.row("adjacent_" + tag + "_" + std::to_string(t), std::move(adj), {}, Sense::LessEqual, 0.0);
    }
    bld.row("wprime_" + tag, std::move(wv), {}, Sense::Equal, 0.0);
    bld.row("chord_" + tag, std::move(chord), {}, Sense::LessEqual, 0.0);
    bld.row("convex_" + tag, std::move(convex), {}, Sense::Equal, 1.0);
    std::vector<Term> one;
    for (int z : select) one.push_back({z, 1.0});
    const int one_row = bld.row("segment_" + tag, std::move(one), {}, Sense::Equal, 1.0);
    pm.mip.sos_groups.push_back({"segment_" + tag, select, one_row});
    // Valid for products of [0, 1] numbers.
    bld.row("nonneg_" + tag, {{s, 1.0}, {q, -1.0}}, {}, Sense::GreaterEqual, 0.0);
    bld.row("mccormick_" + tag, {{s, 1.0}, {q, -1.0}, {m, -1.0}, {y, -1.0}}, {}, Sense::GreaterEqual, -1.0);
    return Expr{{{s, 1.0}, {q, -1.0}}, 0.0};
  };

  // Shuffle.
  const auto shuffle_start = starts(map_end, b.map_shuffle, "shuffle_start");
  std::vector<int> shuffle_end(num_r);
  for (std::size_t k = 0; k < num_r; ++k)
    shuffle_end[k] = bld.var(id("shuffle_end", p.reducers[k]), 0.0, lp::kInfinity);
  for (std::size_t j = 0; j < num_m; ++j) {
    for (std::size_t k = 0; k < num_r; ++k) {
      const Expr duration = product(j, k).scaled(alpha * total / (p.shuffle_bandwidth(j, k) * tau));
      end_rows(id("shuffle", p.mappers[j], p.reducers[k]), shuffle_end[k], shuffle_start[j], duration,
               b.map_shuffle);
    }
  }
  if (objective == MipObjective::ShuffleTimeGivenPush) {
    set_objective(shuffle_end);
    return pm;
  }

  // Reduce.
  const auto reduce_start = starts(shuffle_end, b.shuffle_reduce, "reduce_start");
  std::vector<int> reduce_end(num_r);
  for (std::size_t k = 0; k < num_r; ++k) {
    reduce_end[k] = bld.var(id("reduce_end", p.reducers[k]), 0.0, lp::kInfinity);
    const Expr duration = share[k].scaled(alpha * total / (p.reduce_capacity[k] * tau));
    end_rows(id("reduce", p.reducers[k]), reduce_end[k], reduce_start[k], duration, b.shuffle_reduce);
  }
  set_objective(reduce_end);
  return pm;
}

double linearized_makespan(const PlatformGraph& p, const Workload& w, const ExecutionPlan& plan,
                           const BarrierConfig& b, const PiecewiseSpec& spec) {
  const auto bw = breakpoints(spec.breakpoint_count, 0.0, 1.0);
  const auto bv = breakpoints(spec.breakpoint_count, -0.5, 0.5);
  const auto m = mapper_share(w, plan);
  const double scale = w.alpha * w.total_data();
  Matrix volume(p.num_mappers(), p.num_reducers());
  for (std::size_t j = 0; j < m.size(); ++j)
    for (std::size_t k = 0; k < p.num_reducers(); ++k)
      volume(j, k) = scale * product_estimate(m[j], plan.reducer_fraction[k], bw, bv);
  MakespanEvaluator eval(p, w, b);
  return eval.timeline_with_shuffle_volume(plan, volume).makespan;
}

double linearization_error_bound(const PlatformGraph& p, const Workload& w, const PiecewiseSpec& spec) {
  const double delta = product_error(spec);
  double worst = 0.0;
  for (double bw : p.shuffle_bandwidth.values()) worst = std::max(worst, w.alpha * w.total_data() / bw);
  return delta * worst;
}

double linearization_error_bound(const PlatformGraph& p, const Workload& w, const ExecutionPlan& plan,
                                 const PiecewiseSpec& spec) {
  const double delta = product_error(spec);
  const auto m = mapper_share(w, plan);
  double worst = 0.0;
  for (std::size_t j = 0; j < m.size(); ++j) {
    for (std::size_t k = 0; k < p.num_reducers(); ++k) {
      const double err = std::min(delta, m[j] * plan.reducer_fraction[k]);
      worst = std::max(worst, err * w.alpha * w.total_data() / p.shuffle_bandwidth(j, k));
    }
  }
  return worst;
}

SolveReport solve_mip(const PlanMip& pm, const SolveOptions& options) {
  const auto& p = pm.platform;
  const double tau = pm.time_scale;

  std::vector<lp::Incumbent> warm;
  auto add_warm = [&](const ExecutionPlan& base) {
    const ExecutionPlan plan = with_fixed(base, pm.fixed);
    warm.push_back({program_objective(pm, plan) / tau, encode(plan)});
  };
  add_warm(uniform_plan(p));
  try {
    add_warm(affinity_plan(p));
  } catch (const Error&) {
    // Some source has no local mapper; uniform alone seeds the search.
  }

  const lp::Heuristic heuristic = [&](std::span<const double> values) -> std::optional<lp::Incumbent> {
    const ExecutionPlan plan = pm.extract_plan(values);
    return lp::Incumbent{program_objective(pm, plan) / tau, encode(plan)};
  };

  lp::BranchAndBoundOptions bb;
  bb.relative_gap = options.tolerance;
  bb.time_limit = options.time_limit;
  bb.node_limit = options.node_limit;
  const auto result = lp::solve_branch_and_bound(pm.mip, bb, heuristic, std::move(warm));
  if (!result.incumbent) {
    if (result.status == lp::MipStatus::Infeasible)
      throw SolverError("internal error: the execution-plan program is infeasible");
    throw SolverError("solver stopped (" + std::string(lp::to_string(result.status)) + ") without a feasible plan");
  }

  SolveReport report;
  report.plan = decode(result.incumbent->values, p.num_sources(), p.num_mappers());
  report.predicted_makespan = evaluate(p, pm.workload, report.plan, pm.barriers).makespan;
  report.mip_objective = result.incumbent->objective * tau;
  report.best_bound = result.best_bound * tau;
  report.gap = result.gap;
  report.node_count = result.nodes;
  report.lp_iterations = result.lp_iterations;
  report.wall_time = result.wall_time;
  report.status = lp::to_string(result.status);
  report.mip_plan = report.plan;
  report.mip_plan_makespan = report.predicted_makespan;
  if (has_products(pm)) {
    report.linearization_bound = linearization_error_bound(p, pm.workload, report.plan, pm.spec);
    report.epsilon_lin = report.predicted_makespan > 0.0 ? report.linearization_bound / report.predicted_makespan : 0.0;
  }
  report.stage_objectives = {report.mip_objective};
  return report;
}

namespace {

struct Polisher {
  const PlatformGraph& p;
  const Workload& w;
  const BarrierConfig& b;
  const PiecewiseSpec& spec;
  SolveOptions options;
  long nodes = 0;
  long iterations = 0;

  SolveReport step(const ExecutionPlan& plan, bool optimize_x) {
    FixedAssignment fixed;
    if (optimize_x) {
      fixed.reducer_fraction = plan.reducer_fraction;
    } else {
      fixed.push_fraction = plan.push_fraction;
    }
    auto report = solve_mip(build_mip(p, w, b, MipObjective::Makespan, spec, fixed), options);
    nodes += report.node_count;
    iterations += report.lp_iterations;
    return report;
  }

  // Alternates exact linear programs until neither half improves.
  std::pair<ExecutionPlan, double> run(ExecutionPlan plan, bool x_first) {
    MakespanEvaluator eval(p, w, b);
    double value = eval.makespan(plan);
    for (int round = 0; round < 50; ++round) {
      const double before = value;
      for (int half = 0; half < 2; ++half) {
        const bool optimize_x = (half == 0) == x_first;
        auto rep = step(plan, optimize_x);
        if (better_plan(rep.predicted_makespan, rep.plan, value, plan)) {
          plan = rep.plan;
          value = rep.predicted_makespan;
        }
      }
      if (!(value < before * (1.0 - 1e-9))) break;
    }
    return {plan, value};
  }
};

SolveReport combine_stats(SolveReport report, long nodes, long iterations) {
  report.node_count += nodes;
  report.lp_iterations += iterations;
  return report;
}

}  // namespace

SolveReport optimize_myopic(const PlatformGraph& p, const Workload& w, const BarrierConfig& b,
                            const PiecewiseSpec& spec, const SolveOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  const auto push = solve_mip(build_mip(p, w, b, MipObjective::PushTime, spec), options);
  FixedAssignment fixed;
  fixed.push_fraction = push.plan.push_fraction;
  const auto shuffle = solve_mip(build_mip(p, w, b, MipObjective::ShuffleTimeGivenPush, spec, fixed), options);

  SolveReport report = shuffle;
  report.node_count += push.node_count;
  report.lp_iterations += push.lp_iterations;
  report.gap = std::max(push.gap, shuffle.gap);
  report.status = push.status == "optimal" ? shuffle.status : push.status;
  report.stage_objectives = {push.mip_objective, shuffle.mip_objective};
  report.mip_objective = shuffle.mip_objective;
  report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

SolveReport optimize_single_phase(const PlatformGraph& p, const Workload& w, const BarrierConfig& b, Phase phase,
                                  const PiecewiseSpec& spec, const SolveOptions& options) {
  const ExecutionPlan uniform = uniform_plan(p);
  FixedAssignment fixed;
  if (phase == Phase::Push) {
    fixed.reducer_fraction = uniform.reducer_fraction;
  } else {
    fixed.push_fraction = uniform.push_fraction;
  }
  return solve_mip(build_mip(p, w, b, MipObjective::Makespan, spec, fixed), options);
}

SolveReport optimize_end_to_end(const PlatformGraph& p, const Workload& w, const BarrierConfig& b,
                                const PiecewiseSpec& spec, const SolveOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  SolveReport report = solve_mip(build_mip(p, w, b, MipObjective::Makespan, spec), options);

  Polisher polish{p, w, b, spec, options};
  const auto myopic = optimize_myopic(p, w, b, spec, options);
  polish.nodes += myopic.node_count;
  polish.iterations += myopic.lp_iterations;

  ExecutionPlan best = report.plan;
  double best_value = report.predicted_makespan;
  for (const ExecutionPlan& seed : {report.plan, uniform_plan(p), myopic.plan}) {
    for (bool x_first : {true, false}) {
      auto [plan, value] = polish.run(seed, x_first);
      if (better_plan(value, plan, best_value, best)) {
        best = std::move(plan);
        best_value = value;
      }
    }
  }

  RefineOptions refine;
  refine.seed = options.seed;
  ExecutionPlan refined = refine_plan(p, w, b, best, refine);
  const double refined_value = evaluate(p, w, refined, b).makespan;
  if (refined_value < best_value) {
    best = std::move(refined);
    best_value = refined_value;
  }

  report = combine_stats(std::move(report), polish.nodes, polish.iterations);
  report.plan = std::move(best);
  report.predicted_makespan = best_value;
  report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace geomr
