#include "geomr/platform.hpp"

#include <array>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "geomr/error.hpp"
#include "geomr/units.hpp"

namespace geomr {

std::string ValidationResult::describe() const {
  std::ostringstream out;
  for (const auto& v : violations) out << v.where << ": " << v.what << '\n';
  return out.str();
}

std::string PlatformGraph::cluster(const std::string& node) const {
  auto it = cluster_of.find(node);
  return it == cluster_of.end() ? std::string{} : it->second;
}

double Workload::total_data() const noexcept {
  double total = 0.0;
  for (double d : data_at_source) total += d;
  return total;
}

namespace {

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

void check_matrix(ValidationResult& result, const char* name, const Matrix& m,
                  const std::vector<std::string>& rows, const std::vector<std::string>& cols) {
  if (m.rows() != rows.size() || m.cols() != cols.size()) {
    result.add(name, "expected " + std::to_string(rows.size()) + "x" + std::to_string(cols.size()) +
                         " entries, got " + std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()));
    return;
  }
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (!positive_finite(m(r, c))) {
        result.add(std::string(name) + "[" + rows[r] + "][" + cols[c] + "]",
                   "bandwidth must be finite and > 0, got " + format_double(m(r, c)));
      }
    }
  }
}

void check_capacities(ValidationResult& result, const char* name, const std::vector<double>& caps,
                      const std::vector<std::string>& nodes) {
  if (caps.size() != nodes.size()) {
    result.add(name, "expected " + std::to_string(nodes.size()) + " entries, got " +
                         std::to_string(caps.size()));
    return;
  }
  for (std::size_t i = 0; i < caps.size(); ++i) {
    if (!positive_finite(caps[i])) {
      result.add(std::string(name) + "[" + nodes[i] + "]",
                 "capacity must be finite and > 0, got " + format_double(caps[i]));
    }
  }
}

}  // namespace

ValidationResult validate_platform(const PlatformGraph& p) {
  ValidationResult result;
  if (p.sources.empty()) result.add("sources", "at least one source is required");
  if (p.mappers.empty()) result.add("mappers", "at least one mapper is required");
  if (p.reducers.empty()) result.add("reducers", "at least one reducer is required");

  std::set<std::string> seen;
  for (const auto* group : {&p.sources, &p.mappers, &p.reducers}) {
    for (const auto& id : *group) {
      if (id.empty()) result.add("node ids", "empty identifier");
      if (!seen.insert(id).second) result.add("node " + id, "duplicate identifier");
    }
  }

  check_matrix(result, "push_bandwidth", p.push_bandwidth, p.sources, p.mappers);
  check_matrix(result, "shuffle_bandwidth", p.shuffle_bandwidth, p.mappers, p.reducers);
  check_capacities(result, "map_capacity", p.map_capacity, p.mappers);
  check_capacities(result, "reduce_capacity", p.reduce_capacity, p.reducers);
  return result;
}

ValidationResult validate_workload(const Workload& w, const PlatformGraph& p) {
  ValidationResult result;
  if (w.data_at_source.size() != p.sources.size()) {
    result.add("data_at_source", "expected " + std::to_string(p.sources.size()) +
                                     " entries (one per source), got " +
                                     std::to_string(w.data_at_source.size()));
  } else {
    for (std::size_t i = 0; i < w.data_at_source.size(); ++i) {
      const double d = w.data_at_source[i];
      if (!std::isfinite(d) || d < 0.0) {
        result.add("data[" + p.sources[i] + "]", "data must be finite and >= 0, got " + format_double(d));
      }
    }
    if (!(w.total_data() > 0.0)) result.add("data_at_source", "total data must be > 0");
  }
  if (!positive_finite(w.alpha)) {
    result.add("alpha", "expansion factor must be finite and > 0, got " + format_double(w.alpha));
  }
  return result;
}

ValidationResult validate_scenario(const Scenario& s) {
  ValidationResult result = validate_platform(s.platform);
  for (auto& v : validate_workload(s.workload, s.platform).violations) result.violations.push_back(v);
  return result;
}

void require_valid(const PlatformGraph& p, const Workload& w) {
  auto platform = validate_platform(p);
  if (!platform.ok()) throw Error("invalid platform:\n" + platform.describe());
  auto workload = validate_workload(w, p);
  if (!workload.ok()) throw DimensionError("invalid workload:\n" + workload.describe());
}

Scenario make_two_cluster_example(double alpha) {
  constexpr double kFast = 100 * kMB;
  constexpr double kSlow = 10 * kMB;

  Scenario s;
  s.name = "tutorial-two-cluster";
  auto& p = s.platform;
  p.sources = {"D1", "D2"};
  p.mappers = {"M1", "M2"};
  p.reducers = {"R1", "R2"};
  p.push_bandwidth = Matrix(2, 2, kSlow);
  p.shuffle_bandwidth = Matrix(2, 2, kSlow);
  for (std::size_t i = 0; i < 2; ++i) {
    p.push_bandwidth(i, i) = kFast;
    p.shuffle_bandwidth(i, i) = kFast;
  }
  p.map_capacity = {kFast, kFast};
  p.reduce_capacity = {kFast, kFast};
  for (const char* id : {"D1", "M1", "R1"}) p.cluster_of[id] = "cluster1";
  for (const char* id : {"D2", "M2", "R2"}) p.cluster_of[id] = "cluster2";

  s.workload.data_at_source = {150 * kGB, 50 * kGB};
  s.workload.alpha = alpha;
  return s;
}

EnvironmentKind parse_environment_kind(std::string_view name) {
  if (name == "local-dc") return EnvironmentKind::LocalDc;
  if (name == "intra-continental") return EnvironmentKind::IntraContinental;
  if (name == "global-4") return EnvironmentKind::Global4;
  if (name == "global-8") return EnvironmentKind::Global8;
  throw Error("unknown environment kind \"" + std::string(name) +
              "\" (expected local-dc, intra-continental, global-4 or global-8)");
}

std::string_view to_string(EnvironmentKind kind) {
  switch (kind) {
    case EnvironmentKind::LocalDc: return "local-dc";
    case EnvironmentKind::IntraContinental: return "intra-continental";
    case EnvironmentKind::Global4: return "global-4";
    case EnvironmentKind::Global8: return "global-8";
  }
  return "unknown";
}

BandwidthRange continent_bandwidth_range(Continent from, Continent to) {
  // KBps, rows = sender, columns = receiver, in US, EU, Asia order.
  static constexpr std::array<std::array<BandwidthRange, 3>, 3> kTable{{
      {{{216, 9405}, {110, 2267}, {61, 3305}}},
      {{{794, 2734}, {4475, 11053}, {1502, 1593}}},
      {{{401, 3610}, {290, 1071}, {23762, 23875}}},
  }};
  const auto r = kTable[static_cast<std::size_t>(from)][static_cast<std::size_t>(to)];
  return {r.slowest * kKB, r.fastest * kKB};
}

Continent site_continent(std::string_view site) {
  if (site == "tamu" || site == "ucsb" || site == "hpl" || site == "uiuc") return Continent::US;
  if (site == "tu-berlin" || site == "essex") return Continent::EU;
  if (site == "nitech" || site == "wide") return Continent::Asia;
  throw Error("unknown site \"" + std::string(site) + "\"");
}

namespace {

// mt19937_64 output is fixed by the standard; the unit interval mapping is
// done here so scenarios are identical across standard libraries.
class UnitRandom {
 public:
  explicit UnitRandom(std::uint64_t seed) : engine_(seed) {}
  double uniform(double lo, double hi) {
    const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
  }

 private:
  std::mt19937_64 engine_;
};

std::vector<std::string> environment_sites(EnvironmentKind kind) {
  switch (kind) {
    case EnvironmentKind::LocalDc: return {"tamu"};
    case EnvironmentKind::IntraContinental: return {"tamu", "ucsb"};
    case EnvironmentKind::Global4: return {"ucsb", "tamu", "tu-berlin", "nitech"};
    case EnvironmentKind::Global8:
      return {"ucsb", "tamu", "tu-berlin", "nitech", "hpl", "uiuc", "essex", "wide"};
  }
  return {};
}

}  // namespace

Scenario make_environment(EnvironmentKind kind, std::uint64_t seed, double alpha) {
  constexpr std::size_t kNodesPerRole = 8;
  constexpr double kDataPerSource = 256 * kMB;
  constexpr double kSlowestCompute = 9 * kMB;
  constexpr double kFastestCompute = 90 * kMB;

  const auto sites = environment_sites(kind);
  Scenario s;
  s.name = std::string(to_string(kind)) + "-seed" + std::to_string(seed);
  auto& p = s.platform;

  std::vector<std::string> source_site, mapper_site, reducer_site;
  for (std::size_t n = 0; n < kNodesPerRole; ++n) {
    const std::string& site = sites[n % sites.size()];
    p.sources.push_back("s" + std::to_string(n));
    p.mappers.push_back("m" + std::to_string(n));
    p.reducers.push_back("r" + std::to_string(n));
    p.cluster_of[p.sources.back()] = site;
    p.cluster_of[p.mappers.back()] = site;
    p.cluster_of[p.reducers.back()] = site;
    source_site.push_back(site);
    mapper_site.push_back(site);
    reducer_site.push_back(site);
  }

  UnitRandom rng(seed);
  auto draw_link = [&](const std::string& from, const std::string& to) {
    const auto range = continent_bandwidth_range(site_continent(from), site_continent(to));
    return rng.uniform(range.slowest, range.fastest);
  };

  p.push_bandwidth = Matrix(kNodesPerRole, kNodesPerRole);
  for (std::size_t i = 0; i < kNodesPerRole; ++i)
    for (std::size_t j = 0; j < kNodesPerRole; ++j)
      p.push_bandwidth(i, j) = draw_link(source_site[i], mapper_site[j]);

  p.shuffle_bandwidth = Matrix(kNodesPerRole, kNodesPerRole);
  for (std::size_t j = 0; j < kNodesPerRole; ++j)
    for (std::size_t k = 0; k < kNodesPerRole; ++k)
      p.shuffle_bandwidth(j, k) = draw_link(mapper_site[j], reducer_site[k]);

  for (std::size_t j = 0; j < kNodesPerRole; ++j)
    p.map_capacity.push_back(rng.uniform(kSlowestCompute, kFastestCompute));
  for (std::size_t k = 0; k < kNodesPerRole; ++k)
    p.reduce_capacity.push_back(rng.uniform(kSlowestCompute, kFastestCompute));

  s.workload.data_at_source.assign(kNodesPerRole, kDataPerSource);
  s.workload.alpha = alpha;
  return s;
}

}  // namespace geomr
