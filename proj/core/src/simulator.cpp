#include "geomr/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <ostream>
#include <queue>
#include <tuple>

#include "geomr/error.hpp"

namespace geomr {

std::string_view to_string(SimEventKind k) {
  switch (k) {
    case SimEventKind::TransferEnd: return "transfer_end";
    case SimEventKind::ComputeEnd: return "compute_end";
    case SimEventKind::ComputeStart: return "compute_start";
    case SimEventKind::TransferStart: return "transfer_start";
    case SimEventKind::BarrierRelease: return "barrier_release";
  }
  return "unknown";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Stage { Push, Map, Shuffle, Reduce };

// Every link and compute node of the plan as one server in a four-stage
// pipeline. Servers are numbered stage by stage, so index order is a
// topological order.
struct Server {
  Stage stage = Stage::Push;
  std::string name;
  double volume = 0.0;  // bytes the server handles in total
  double rate = 0.0;    // bytes/second
  // Data available to this server is factor * (sum of upstream progress).
  std::vector<std::size_t> upstream;
  double factor = 1.0;
  Barrier barrier = Barrier::Pipelined;  // discipline in front of the stage

  bool active = false;
  bool complete = false;
  double activated_at = 0.0;
  double started_at = -1.0;
  double completed_at = 0.0;
};

struct Topology {
  std::size_t num_s = 0, num_m = 0, num_r = 0;
  std::vector<Server> servers;
  std::size_t map_base = 0, shuffle_base = 0, reduce_base = 0;

  std::size_t push(std::size_t i, std::size_t j) const { return i * num_m + j; }
  std::size_t map(std::size_t j) const { return map_base + j; }
  std::size_t shuffle(std::size_t j, std::size_t k) const { return shuffle_base + j * num_r + k; }
  std::size_t reduce(std::size_t k) const { return reduce_base + k; }

  std::pair<std::size_t, std::size_t> stage_range(Stage s) const {
    switch (s) {
      case Stage::Push: return {0, map_base};
      case Stage::Map: return {map_base, shuffle_base};
      case Stage::Shuffle: return {shuffle_base, reduce_base};
      case Stage::Reduce: return {reduce_base, servers.size()};
    }
    return {0, 0};
  }
  static Stage previous(Stage s) {
    return s == Stage::Reduce ? Stage::Shuffle : s == Stage::Shuffle ? Stage::Map : Stage::Push;
  }

  bool upstream_closed(const Server& s) const {
    return std::all_of(s.upstream.begin(), s.upstream.end(), [&](std::size_t u) { return servers[u].complete; });
  }
  bool stage_complete(Stage st) const {
    const auto [a, b] = stage_range(st);
    for (std::size_t i = a; i < b; ++i)
      if (!servers[i].complete) return false;
    return true;
  }
  bool may_activate(const Server& s) const {
    if (s.stage == Stage::Push) return true;
    switch (s.barrier) {
      case Barrier::Pipelined: return true;
      case Barrier::Local: return upstream_closed(s);
      case Barrier::Global: return stage_complete(previous(s.stage));
    }
    return false;
  }
};

Topology build_topology(const PlatformGraph& p, const Workload& w, const ExecutionPlan& plan,
                        const BarrierConfig& b) {
  Topology t;
  t.num_s = p.num_sources();
  t.num_m = p.num_mappers();
  t.num_r = p.num_reducers();
  const auto& x = plan.push_fraction;
  const auto& y = plan.reducer_fraction;
  std::vector<double> load(t.num_m, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < t.num_s; ++i) {
    for (std::size_t j = 0; j < t.num_m; ++j) {
      Server s;
      s.stage = Stage::Push;
      s.name = p.sources[i] + "->" + p.mappers[j];
      s.volume = w.data_at_source[i] * x(i, j);
      s.rate = p.push_bandwidth(i, j);
      load[j] += s.volume;
      t.servers.push_back(std::move(s));
    }
  }
  for (double l : load) total += l;
  t.map_base = t.servers.size();
  for (std::size_t j = 0; j < t.num_m; ++j) {
    Server s;
    s.stage = Stage::Map;
    s.name = p.mappers[j];
    s.volume = load[j];
    s.rate = p.map_capacity[j];
    s.barrier = b.push_map;
    for (std::size_t i = 0; i < t.num_s; ++i) s.upstream.push_back(t.push(i, j));
    t.servers.push_back(std::move(s));
  }
  t.shuffle_base = t.servers.size();
  for (std::size_t j = 0; j < t.num_m; ++j) {
    for (std::size_t k = 0; k < t.num_r; ++k) {
      Server s;
      s.stage = Stage::Shuffle;
      s.name = p.mappers[j] + "->" + p.reducers[k];
      s.factor = w.alpha * y[k];
      s.volume = s.factor * load[j];
      s.rate = p.shuffle_bandwidth(j, k);
      s.barrier = b.map_shuffle;
      s.upstream.push_back(t.map(j));
      t.servers.push_back(std::move(s));
    }
  }
  t.reduce_base = t.servers.size();
  for (std::size_t k = 0; k < t.num_r; ++k) {
    Server s;
    s.stage = Stage::Reduce;
    s.name = p.reducers[k];
    s.volume = w.alpha * total * y[k];
    s.rate = p.reduce_capacity[k];
    s.barrier = b.shuffle_reduce;
    for (std::size_t j = 0; j < t.num_m; ++j) s.upstream.push_back(t.shuffle(j, k));
    t.servers.push_back(std::move(s));
  }
  return t;
}

bool is_link(Stage s) { return s == Stage::Push || s == Stage::Shuffle; }

SimEventKind start_kind(Stage s) { return is_link(s) ? SimEventKind::TransferStart : SimEventKind::ComputeStart; }
SimEventKind end_kind(Stage s) { return is_link(s) ? SimEventKind::TransferEnd : SimEventKind::ComputeEnd; }

int rank(SimEventKind k) { return static_cast<int>(k); }

// Measured timeline: node end times from the run, start times derived from
// them with the same barrier conventions as the analytic model.
PhaseTimeline measured_timeline(const Topology& t, const BarrierConfig& b) {
  PhaseTimeline tl;
  tl.barriers = b;
  const auto& s = t.servers;
  tl.push_end.assign(t.num_m, 0.0);
  tl.map_start.resize(t.num_m);
  tl.map_end.resize(t.num_m);
  tl.shuffle_start.resize(t.num_m);
  tl.shuffle_send_end.resize(t.num_m);
  tl.shuffle_end.assign(t.num_r, 0.0);
  tl.reduce_start.resize(t.num_r);
  tl.reduce_end.resize(t.num_r);
  tl.shuffle_critical_mapper.assign(t.num_r, 0);

  for (std::size_t j = 0; j < t.num_m; ++j)
    for (std::size_t i = 0; i < t.num_s; ++i)
      tl.push_end[j] = std::max(tl.push_end[j], s[t.push(i, j)].completed_at);
  const double all_pushed = *std::max_element(tl.push_end.begin(), tl.push_end.end());
  for (std::size_t j = 0; j < t.num_m; ++j) {
    tl.map_start[j] = b.push_map == Barrier::Global ? all_pushed : tl.push_end[j];
    tl.map_end[j] = s[t.map(j)].completed_at;
  }
  const double all_mapped = *std::max_element(tl.map_end.begin(), tl.map_end.end());
  for (std::size_t j = 0; j < t.num_m; ++j) {
    tl.shuffle_start[j] = b.map_shuffle == Barrier::Global ? all_mapped : tl.map_end[j];
    tl.shuffle_send_end[j] = tl.shuffle_start[j];
  }
  for (std::size_t k = 0; k < t.num_r; ++k) {
    double end = -1.0;
    for (std::size_t j = 0; j < t.num_m; ++j) {
      const double e = s[t.shuffle(j, k)].completed_at;
      tl.shuffle_send_end[j] = std::max(tl.shuffle_send_end[j], e);
      if (e > end) {
        end = e;
        tl.shuffle_critical_mapper[k] = j;
      }
    }
    tl.shuffle_end[k] = end;
  }
  const double all_shuffled = *std::max_element(tl.shuffle_end.begin(), tl.shuffle_end.end());
  double makespan = 0.0;
  for (std::size_t k = 0; k < t.num_r; ++k) {
    tl.reduce_start[k] = b.shuffle_reduce == Barrier::Global ? all_shuffled : tl.shuffle_end[k];
    tl.reduce_end[k] = s[t.reduce(k)].completed_at;
    makespan = std::max(makespan, tl.reduce_end[k]);
  }
  tl.makespan = makespan;
  tl.breakdown = phase_breakdown(tl);
  return tl;
}

class FluidRun {
 public:
  FluidRun(Topology& t, std::vector<SimEvent>& events) : t_(t), events_(events) {
    done_.assign(t.servers.size(), 0.0);
    rate_.assign(t.servers.size(), 0.0);
  }

  void run() {
    double now = 0.0;
    for (;;) {
      settle(now);
      if (t_.stage_complete(Stage::Reduce)) return;
      compute_rates();
      double dt = kInf;
      for (std::size_t s = 0; s < t_.servers.size(); ++s) {
        if (rate_[s] <= 0.0) continue;
        const auto& sv = t_.servers[s];
        dt = std::min(dt, (sv.volume - done_[s]) / rate_[s]);
        const double backlog = available(s) - done_[s];
        const double in = inflow(s);
        if (backlog > eps(s) && rate_[s] > in) dt = std::min(dt, backlog / (rate_[s] - in));
      }
      if (!std::isfinite(dt)) throw Error("simulation stalled: no server can make progress");
      for (std::size_t s = 0; s < t_.servers.size(); ++s) {
        if (rate_[s] <= 0.0) continue;
        auto& sv = t_.servers[s];
        if (sv.started_at < 0.0) {
          sv.started_at = now;
          events_.push_back({now, sv.name, start_kind(sv.stage), 0.0});
        }
        done_[s] = std::min(done_[s] + rate_[s] * dt, available(s));
        if (sv.volume - done_[s] <= eps(s)) done_[s] = sv.volume;
        if (available(s) - done_[s] <= eps(s)) done_[s] = available(s);
      }
      now += dt;
    }
  }

  double done(std::size_t s) const { return done_[s]; }

 private:
  double eps(std::size_t s) const { return 1e-12 * std::max(t_.servers[s].volume, 1.0); }

  double available(std::size_t s) const {
    const auto& sv = t_.servers[s];
    if (sv.stage == Stage::Push) return sv.volume;
    double sum = 0.0;
    for (std::size_t u : sv.upstream) sum += done_[u];
    return std::min(sv.factor * sum, sv.volume);
  }

  double inflow(std::size_t s) const {
    const auto& sv = t_.servers[s];
    if (sv.stage == Stage::Push) return kInf;
    double sum = 0.0;
    for (std::size_t u : sv.upstream) sum += rate_[u];
    return sv.factor * sum;
  }

  void compute_rates() {
    for (std::size_t s = 0; s < t_.servers.size(); ++s) {
      const auto& sv = t_.servers[s];
      rate_[s] = 0.0;
      if (!sv.active || sv.complete || sv.volume - done_[s] <= eps(s)) continue;
      const double backlog = available(s) - done_[s];
      rate_[s] = backlog > eps(s) ? sv.rate : std::min(sv.rate, inflow(s));
    }
  }

  // Applies every activation and completion due at `now`, to a fixed point.
  void settle(double now) {
    for (bool changed = true; changed;) {
      changed = false;
      for (std::size_t s = 0; s < t_.servers.size(); ++s) {
        auto& sv = t_.servers[s];
        if (!sv.active && t_.may_activate(sv)) {
          sv.active = true;
          sv.activated_at = now;
          if (sv.stage != Stage::Push && sv.barrier != Barrier::Pipelined)
            events_.push_back({now, sv.name, SimEventKind::BarrierRelease, 0.0});
          changed = true;
        }
        // Upstream totals can differ from the volume in the last bits.
        if (sv.active && !sv.complete && sv.volume - done_[s] <= eps(s) && t_.upstream_closed(sv)) {
          done_[s] = sv.volume;
          sv.complete = true;
          sv.completed_at = now;
          if (sv.started_at < 0.0) sv.started_at = now;
          events_.push_back({now, sv.name, end_kind(sv.stage), sv.volume});
          changed = true;
        }
      }
    }
  }

  Topology& t_;
  std::vector<SimEvent>& events_;
  std::vector<double> done_;
  std::vector<double> rate_;
};

class ChunkedRun {
 public:
  ChunkedRun(Topology& t, double chunk, std::vector<SimEvent>& events)
      : t_(t), chunk_(chunk), events_(events) {
    const std::size_t n = t.servers.size();
    queue_.resize(n);
    busy_.assign(n, false);
    expected_.assign(n, 0);
    processed_.assign(n, 0);
    received_.assign(n, 0.0);
    // Pieces each server will see: a push link splits its volume into
    // chunks, a mapper sees every inbound chunk, a shuffle link one output
    // piece per mapper chunk, a reducer every inbound piece.
    for (std::size_t s = 0; s < t.map_base; ++s) {
      const double v = t.servers[s].volume;
      for (double left = v; left > 0.0;) {
        const double piece = std::min(chunk_, left);
        queue_[s].push_back(piece);
        received_[s] += piece;
        left = v - received_[s];
        if (left <= 1e-12 * v) break;
      }
      expected_[s] = static_cast<long>(queue_[s].size());
    }
    for (std::size_t j = 0; j < t.num_m; ++j)
      for (std::size_t i = 0; i < t.num_s; ++i) expected_[t.map(j)] += expected_[t.push(i, j)];
    for (std::size_t j = 0; j < t.num_m; ++j)
      for (std::size_t k = 0; k < t.num_r; ++k) {
        const auto s = t.shuffle(j, k);
        expected_[s] = t.servers[s].factor > 0.0 ? expected_[t.map(j)] : 0;
        expected_[t.reduce(k)] += expected_[s];
      }
  }

  void run() {
    now_ = 0.0;
    settle();
    while (!pending_.empty()) {
      const auto [time, kind_rank, server, seq, bytes] = pending_.top();
      pending_.pop();
      now_ = time;
      finish_piece(server, bytes);
      settle();
    }
    if (!t_.stage_complete(Stage::Reduce)) throw Error("simulation stalled: some reducer never finished");
  }

  double received(std::size_t s) const { return received_[s]; }

 private:
  using Pending = std::tuple<double, int, std::size_t, long, double>;

  void try_start(std::size_t s) {
    auto& sv = t_.servers[s];
    if (!sv.active || busy_[s] || queue_[s].empty()) return;
    const double piece = queue_[s].front();
    queue_[s].pop_front();
    busy_[s] = true;
    if (sv.started_at < 0.0) sv.started_at = now_;
    events_.push_back({now_, sv.name, start_kind(sv.stage), piece});
    pending_.push({now_ + piece / sv.rate, rank(end_kind(sv.stage)), s, seq_++, piece});
  }

  void deliver(std::size_t s, double bytes) {
    queue_[s].push_back(bytes);
    received_[s] += bytes;
    try_start(s);
  }

  void finish_piece(std::size_t s, double bytes) {
    auto& sv = t_.servers[s];
    busy_[s] = false;
    ++processed_[s];
    events_.push_back({now_, sv.name, end_kind(sv.stage), bytes});
    switch (sv.stage) {
      case Stage::Push: deliver(t_.map(s % t_.num_m), bytes); break;
      case Stage::Map: {
        const std::size_t j = s - t_.map_base;
        for (std::size_t k = 0; k < t_.num_r; ++k) {
          const auto link = t_.shuffle(j, k);
          const double f = t_.servers[link].factor;
          if (f > 0.0) deliver(link, f * bytes);
        }
        break;
      }
      case Stage::Shuffle: deliver(t_.reduce((s - t_.shuffle_base) % t_.num_r), bytes); break;
      case Stage::Reduce: break;
    }
    try_start(s);
  }

  void settle() {
    for (bool changed = true; changed;) {
      changed = false;
      for (std::size_t s = 0; s < t_.servers.size(); ++s) {
        auto& sv = t_.servers[s];
        if (!sv.active && t_.may_activate(sv)) {
          sv.active = true;
          sv.activated_at = now_;
          if (sv.stage != Stage::Push && sv.barrier != Barrier::Pipelined)
            events_.push_back({now_, sv.name, SimEventKind::BarrierRelease, 0.0});
          try_start(s);
          changed = true;
        }
        if (sv.active && !sv.complete && !busy_[s] && processed_[s] == expected_[s] && t_.upstream_closed(sv)) {
          sv.complete = true;
          sv.completed_at = now_;
          if (sv.started_at < 0.0) sv.started_at = now_;
          changed = true;
        }
      }
    }
  }

  Topology& t_;
  double chunk_;
  std::vector<SimEvent>& events_;
  std::vector<std::deque<double>> queue_;
  std::vector<bool> busy_;
  std::vector<long> expected_;
  std::vector<long> processed_;
  std::vector<double> received_;
  std::priority_queue<Pending, std::vector<Pending>, std::greater<>> pending_;
  double now_ = 0.0;
  long seq_ = 0;
};

}  // namespace

SimTrace simulate(const PlatformGraph& p, const Workload& w, const ExecutionPlan& plan, const SimConfig& cfg) {
  require_valid(p, w);
  require_valid(plan, p);
  if (!(cfg.chunk_size >= 0.0) || !std::isfinite(cfg.chunk_size))
    throw Error("chunk size must be a finite nonnegative number of bytes");

  Topology t = build_topology(p, w, plan, cfg.barriers);
  SimTrace trace;
  trace.push_bytes = Matrix(t.num_s, t.num_m);
  trace.shuffle_bytes = Matrix(t.num_m, t.num_r);
  trace.mapper_input.assign(t.num_m, 0.0);
  trace.reducer_input.assign(t.num_r, 0.0);

  if (cfg.chunk_size > 0.0) {
    double smallest = kInf;
    for (const auto& s : t.servers)
      if (is_link(s.stage) && s.volume > 0.0) smallest = std::min(smallest, s.volume);
    if (cfg.chunk_size >= smallest) {
      trace.warnings.push_back("chunk size " + format_quantity(cfg.chunk_size, Quantity::Data) +
                               " is not below the smallest link volume " +
                               format_quantity(smallest, Quantity::Data));
    }
    ChunkedRun run(t, cfg.chunk_size, trace.events);
    run.run();
    for (std::size_t i = 0; i < t.num_s; ++i)
      for (std::size_t j = 0; j < t.num_m; ++j) trace.push_bytes(i, j) = run.received(t.push(i, j));
    for (std::size_t j = 0; j < t.num_m; ++j) {
      trace.mapper_input[j] = run.received(t.map(j));
      for (std::size_t k = 0; k < t.num_r; ++k) trace.shuffle_bytes(j, k) = run.received(t.shuffle(j, k));
    }
    for (std::size_t k = 0; k < t.num_r; ++k) trace.reducer_input[k] = run.received(t.reduce(k));
  } else {
    FluidRun run(t, trace.events);
    run.run();
    for (std::size_t i = 0; i < t.num_s; ++i)
      for (std::size_t j = 0; j < t.num_m; ++j) trace.push_bytes(i, j) = run.done(t.push(i, j));
    for (std::size_t j = 0; j < t.num_m; ++j) {
      for (std::size_t i = 0; i < t.num_s; ++i) trace.mapper_input[j] += run.done(t.push(i, j));
      for (std::size_t k = 0; k < t.num_r; ++k) trace.shuffle_bytes(j, k) = run.done(t.shuffle(j, k));
    }
    for (std::size_t k = 0; k < t.num_r; ++k)
      for (std::size_t j = 0; j < t.num_m; ++j) trace.reducer_input[k] += run.done(t.shuffle(j, k));
  }

  std::stable_sort(trace.events.begin(), trace.events.end(), [](const SimEvent& a, const SimEvent& b) {
    if (a.time != b.time) return a.time < b.time;
    return rank(a.kind) < rank(b.kind);
  });
  trace.measured_timeline = measured_timeline(t, cfg.barriers);
  return trace;
}

ValidationResult check_conservation(const SimTrace& trace, const PlatformGraph& p, const Workload& w,
                                    const ExecutionPlan& plan, double relative_tolerance) {
  ValidationResult result;
  auto check = [&](const std::string& where, double got, double want) {
    if (std::abs(got - want) > relative_tolerance * std::max(std::abs(want), 1.0))
      result.add(where, "delivered " + format_double(got) + " bytes, plan assigns " + format_double(want));
  };
  const double total = w.total_data();
  for (std::size_t i = 0; i < p.num_sources(); ++i)
    for (std::size_t j = 0; j < p.num_mappers(); ++j)
      check("push link " + p.sources[i] + "->" + p.mappers[j], trace.push_bytes(i, j),
            w.data_at_source[i] * plan.push_fraction(i, j));
  for (std::size_t j = 0; j < p.num_mappers(); ++j) {
    double load = 0.0;
    for (std::size_t i = 0; i < p.num_sources(); ++i) load += w.data_at_source[i] * plan.push_fraction(i, j);
    check("mapper " + p.mappers[j], trace.mapper_input[j], load);
    for (std::size_t k = 0; k < p.num_reducers(); ++k)
      check("shuffle link " + p.mappers[j] + "->" + p.reducers[k], trace.shuffle_bytes(j, k),
            w.alpha * load * plan.reducer_fraction[k]);
  }
  for (std::size_t k = 0; k < p.num_reducers(); ++k)
    check("reducer " + p.reducers[k], trace.reducer_input[k], w.alpha * total * plan.reducer_fraction[k]);
  return result;
}

void write_trace_csv(const SimTrace& trace, std::ostream& out) {
  out << "time,entity,event,bytes\n";
  for (const auto& e : trace.events)
    out << format_double(e.time) << ',' << e.entity << ',' << to_string(e.kind) << ',' << format_double(e.bytes)
        << '\n';
}

LinearFit correlate(const std::vector<PredictedMeasured>& pairs) {
  if (pairs.size() < 2) throw Error("correlation needs at least two (predicted, measured) pairs");
  const double n = static_cast<double>(pairs.size());
  double mx = 0.0, my = 0.0;
  for (const auto& q : pairs) {
    mx += q.predicted;
    my += q.measured;
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& q : pairs) {
    const double dx = q.predicted - mx;
    const double dy = q.measured - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (!(sxx > 0.0)) throw Error("correlation is undefined: every predicted makespan is the same");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

}  // namespace geomr
