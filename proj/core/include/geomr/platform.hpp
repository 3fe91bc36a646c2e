#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "geomr/matrix.hpp"

namespace geomr {

// One problem found by a validator. `where` identifies the offending entity,
// e.g. "push_bandwidth[s0][m1]" or "source row D2".
struct Violation {
  std::string where;
  std::string what;
};

struct ValidationResult {
  std::vector<Violation> violations;

  bool ok() const noexcept { return violations.empty(); }
  void add(std::string where, std::string what) {
    violations.push_back({std::move(where), std::move(what)});
  }
  // All violations, one per line.
  std::string describe() const;
};

// Tripartite platform: sources push to mappers over push links, mappers
// shuffle to reducers over shuffle links. Bandwidths and capacities are in
// bytes/second. The edge set is complete; there is no way to express a
// missing link.
struct PlatformGraph {
  std::vector<std::string> sources;
  std::vector<std::string> mappers;
  std::vector<std::string> reducers;
  Matrix push_bandwidth;     // |S| x |M|
  Matrix shuffle_bandwidth;  // |M| x |R|
  std::vector<double> map_capacity;
  std::vector<double> reduce_capacity;
  std::map<std::string, std::string> cluster_of;

  std::size_t num_sources() const noexcept { return sources.size(); }
  std::size_t num_mappers() const noexcept { return mappers.size(); }
  std::size_t num_reducers() const noexcept { return reducers.size(); }

  // Cluster label for a node id; empty when unassigned.
  std::string cluster(const std::string& node) const;
};

struct Workload {
  std::vector<double> data_at_source;  // bytes, one per source
  double alpha = 1.0;                  // map output / map input

  double total_data() const noexcept;
};

struct Scenario {
  std::string name;
  PlatformGraph platform;
  Workload workload;
};

ValidationResult validate_platform(const PlatformGraph& p);
ValidationResult validate_workload(const Workload& w, const PlatformGraph& p);
ValidationResult validate_scenario(const Scenario& s);

// Throws DimensionError / Error listing every violation when invalid.
void require_valid(const PlatformGraph& p, const Workload& w);

// Two clusters, one node of each role per cluster: 100 MBps links and
// compute inside a cluster, 10 MBps between clusters, 150 GB at D1 and
// 50 GB at D2.
Scenario make_two_cluster_example(double alpha = 1.0);

enum class EnvironmentKind { LocalDc, IntraContinental, Global4, Global8 };

EnvironmentKind parse_environment_kind(std::string_view name);
std::string_view to_string(EnvironmentKind kind);

// Eight sources, mappers and reducers spread over 1, 2, 4 or 8 sites.
// Link bandwidths are drawn uniformly inside the measured slowest/fastest
// range for the (sender continent, receiver continent) pair; compute rates
// are drawn from 9-90 MBps. Every source holds 256 MB. Same seed, same
// scenario, bit for bit.
Scenario make_environment(EnvironmentKind kind, std::uint64_t seed, double alpha = 1.0);

enum class Continent { US, EU, Asia };

struct BandwidthRange {
  double slowest;  // bytes/second
  double fastest;
};

// Measured link bandwidth range from a sender continent to a receiver
// continent.
BandwidthRange continent_bandwidth_range(Continent from, Continent to);

// Continent of a site label used by make_environment ("tamu", "ucsb", ...).
Continent site_continent(std::string_view site);

}  // namespace geomr
