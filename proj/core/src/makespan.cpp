#include "geomr/makespan.hpp"

#include <algorithm>
#include <ostream>

#include "geomr/error.hpp"
#include "geomr/units.hpp"

namespace geomr {

namespace {

double combine(Barrier b, double start, double duration) {
  return b == Barrier::Pipelined ? std::max(start, duration) : start + duration;
}

// Index of the first maximum.
std::size_t argmax(const std::vector<double>& v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

double max_of(const std::vector<double>& v) { return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end()); }

}  // namespace

PhaseBreakdown phase_breakdown(const PhaseTimeline& t) {
  PhaseBreakdown out;
  if (t.reduce_end.empty() || t.map_end.empty()) return out;
  const auto& b = t.barriers;

  const std::size_t last_reducer = argmax(t.reduce_end);
  out.reduce = t.makespan - t.reduce_start[last_reducer];

  const std::size_t shuffle_reducer =
      b.shuffle_reduce == Barrier::Global ? argmax(t.shuffle_end) : last_reducer;
  const std::size_t shuffle_mapper = t.shuffle_critical_mapper[shuffle_reducer];
  out.shuffle = t.shuffle_end[shuffle_reducer] - t.shuffle_start[shuffle_mapper];

  const std::size_t map_mapper = b.map_shuffle == Barrier::Global ? argmax(t.map_end) : shuffle_mapper;
  out.map = t.map_end[map_mapper] - t.map_start[map_mapper];
  out.push = t.map_start[map_mapper];
  return out;
}

MakespanEvaluator::MakespanEvaluator(const PlatformGraph& p, const Workload& w, const BarrierConfig& b)
    : platform_(&p), workload_(&w), barriers_(b) {
  const std::size_t m = p.num_mappers();
  const std::size_t r = p.num_reducers();
  load_.resize(m);
  t_.barriers = b;
  t_.push_end.resize(m);
  t_.map_start.resize(m);
  t_.map_end.resize(m);
  t_.shuffle_start.resize(m);
  t_.shuffle_send_end.resize(m);
  t_.shuffle_end.resize(r);
  t_.reduce_start.resize(r);
  t_.reduce_end.resize(r);
  t_.shuffle_critical_mapper.resize(r);
}

void MakespanEvaluator::run(const ExecutionPlan& plan, const Matrix* volume) {
  const PlatformGraph& p = *platform_;
  const auto& data = workload_->data_at_source;
  const double alpha = workload_->alpha;
  const std::size_t num_s = p.num_sources();
  const std::size_t num_m = p.num_mappers();
  const std::size_t num_r = p.num_reducers();
  const auto& x = plan.push_fraction;
  const auto& y = plan.reducer_fraction;
  const auto& bar = barriers_;

  // Push: a mapper's data is in when its slowest inbound link is done.
  double total_load = 0.0;
  for (std::size_t j = 0; j < num_m; ++j) {
    double end = 0.0;
    double load = 0.0;
    for (std::size_t i = 0; i < num_s; ++i) {
      const double bytes = data[i] * x(i, j);
      load += bytes;
      if (bytes > 0.0) end = std::max(end, bytes / p.push_bandwidth(i, j));
    }
    t_.push_end[j] = end;
    load_[j] = load;
    total_load += load;
  }

  // Map.
  const double global_map_start = max_of(t_.push_end);
  for (std::size_t j = 0; j < num_m; ++j) {
    t_.map_start[j] = bar.push_map == Barrier::Global ? global_map_start : t_.push_end[j];
    t_.map_end[j] = combine(bar.push_map, t_.map_start[j], load_[j] / p.map_capacity[j]);
  }

  // Shuffle: a reducer's input is complete when its slowest inbound link is.
  const double global_shuffle_start = max_of(t_.map_end);
  for (std::size_t j = 0; j < num_m; ++j) {
    t_.shuffle_start[j] = bar.map_shuffle == Barrier::Global ? global_shuffle_start : t_.map_end[j];
    t_.shuffle_send_end[j] = t_.shuffle_start[j];
  }
  for (std::size_t k = 0; k < num_r; ++k) {
    double end = -1.0;
    std::size_t critical = 0;
    for (std::size_t j = 0; j < num_m; ++j) {
      const double bytes = volume ? (*volume)(j, k) : alpha * load_[j] * y[k];
      const double duration = bytes > 0.0 ? bytes / p.shuffle_bandwidth(j, k) : 0.0;
      const double link_end = combine(bar.map_shuffle, t_.shuffle_start[j], duration);
      t_.shuffle_send_end[j] = std::max(t_.shuffle_send_end[j], link_end);
      if (link_end > end) {
        end = link_end;
        critical = j;
      }
    }
    t_.shuffle_end[k] = end;
    t_.shuffle_critical_mapper[k] = critical;
  }

  // Reduce: work proportional to the reducer's share of all intermediate data.
  const double global_reduce_start = max_of(t_.shuffle_end);
  double makespan = 0.0;
  for (std::size_t k = 0; k < num_r; ++k) {
    t_.reduce_start[k] = bar.shuffle_reduce == Barrier::Global ? global_reduce_start : t_.shuffle_end[k];
    const double bytes = alpha * total_load * y[k];
    t_.reduce_end[k] = combine(bar.shuffle_reduce, t_.reduce_start[k], bytes / p.reduce_capacity[k]);
    makespan = std::max(makespan, t_.reduce_end[k]);
  }
  t_.makespan = makespan;
  t_.breakdown = phase_breakdown(t_);
}

double MakespanEvaluator::makespan(const ExecutionPlan& plan) {
  run(plan, nullptr);
  return t_.makespan;
}

const PhaseTimeline& MakespanEvaluator::timeline(const ExecutionPlan& plan) {
  run(plan, nullptr);
  return t_;
}

const PhaseTimeline& MakespanEvaluator::timeline_with_shuffle_volume(const ExecutionPlan& plan,
                                                                     const Matrix& volume) {
  run(plan, &volume);
  return t_;
}

PhaseTimeline evaluate(const PlatformGraph& p, const Workload& w, const ExecutionPlan& plan,
                       const BarrierConfig& b) {
  require_valid(p, w);
  require_valid(plan, p);
  MakespanEvaluator evaluator(p, w, b);
  return evaluator.timeline(plan);
}

void write_timeline_csv(const PhaseTimeline& t, const PlatformGraph& p, std::ostream& out) {
  out << "entity,role,phase,start,end\n";
  auto row = [&](const std::string& entity, const char* role, const char* phase, double start, double end) {
    out << entity << ',' << role << ',' << phase << ',' << format_double(start) << ',' << format_double(end)
        << '\n';
  };
  for (std::size_t j = 0; j < p.num_mappers(); ++j) {
    row(p.mappers[j], "mapper", "push", 0.0, t.push_end[j]);
    row(p.mappers[j], "mapper", "map", t.map_start[j], t.map_end[j]);
    row(p.mappers[j], "mapper", "shuffle", t.shuffle_start[j], t.shuffle_send_end[j]);
  }
  for (std::size_t k = 0; k < p.num_reducers(); ++k) {
    const double first_start = *std::min_element(t.shuffle_start.begin(), t.shuffle_start.end());
    row(p.reducers[k], "reducer", "shuffle", first_start, t.shuffle_end[k]);
    row(p.reducers[k], "reducer", "reduce", t.reduce_start[k], t.reduce_end[k]);
  }
  row("job", "summary", "makespan", 0.0, t.makespan);
}

}  // namespace geomr
