#pragma once

#include <cstdint>
#include <random>
#include <string>

#include "geomr/plan.hpp"
#include "geomr/platform.hpp"
#include "geomr/units.hpp"

namespace geomr::testing {

// One source, one mapper, one reducer; D = 1 B, every rate 1 B/s.
inline Scenario unit_instance() {
  Scenario s;
  s.name = "unit";
  auto& p = s.platform;
  p.sources = {"s0"};
  p.mappers = {"m0"};
  p.reducers = {"r0"};
  p.push_bandwidth = Matrix(1, 1, 1.0);
  p.shuffle_bandwidth = Matrix(1, 1, 1.0);
  p.map_capacity = {1.0};
  p.reduce_capacity = {1.0};
  s.workload.data_at_source = {1.0};
  s.workload.alpha = 1.0;
  return s;
}

// Rates uniform in [1, 100] MB/s, data uniform in [1, 100] GB.
inline Scenario random_instance(std::uint64_t seed, std::size_t ns, std::size_t nm, std::size_t nr,
                                double alpha = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> rate(1 * kMB, 100 * kMB);
  std::uniform_real_distribution<double> data(1 * kGB, 100 * kGB);
  Scenario s;
  s.name = "random-" + std::to_string(seed);
  auto& p = s.platform;
  for (std::size_t i = 0; i < ns; ++i) p.sources.push_back("s" + std::to_string(i));
  for (std::size_t j = 0; j < nm; ++j) p.mappers.push_back("m" + std::to_string(j));
  for (std::size_t k = 0; k < nr; ++k) p.reducers.push_back("r" + std::to_string(k));
  p.push_bandwidth = Matrix(ns, nm);
  p.shuffle_bandwidth = Matrix(nm, nr);
  for (std::size_t i = 0; i < ns; ++i)
    for (std::size_t j = 0; j < nm; ++j) p.push_bandwidth(i, j) = rate(rng);
  for (std::size_t j = 0; j < nm; ++j)
    for (std::size_t k = 0; k < nr; ++k) p.shuffle_bandwidth(j, k) = rate(rng);
  for (std::size_t j = 0; j < nm; ++j) p.map_capacity.push_back(rate(rng));
  for (std::size_t k = 0; k < nr; ++k) p.reduce_capacity.push_back(rate(rng));
  for (std::size_t i = 0; i < ns; ++i) s.workload.data_at_source.push_back(data(rng));
  s.workload.alpha = alpha;
  return s;
}

// Equal data, bandwidths and capacities everywhere.
inline Scenario homogeneous_instance(std::size_t n, double alpha = 1.0) {
  Scenario s = random_instance(1, n, n, n, alpha);
  s.name = "homogeneous";
  auto& p = s.platform;
  p.push_bandwidth = Matrix(n, n, 50 * kMB);
  p.shuffle_bandwidth = Matrix(n, n, 50 * kMB);
  p.map_capacity.assign(n, 80 * kMB);
  p.reduce_capacity.assign(n, 80 * kMB);
  s.workload.data_at_source.assign(n, 10 * kGB);
  return s;
}

// A valid plan drawn from flat Dirichlet rows.
inline ExecutionPlan random_plan(const PlatformGraph& p, std::mt19937_64& rng) {
  std::exponential_distribution<double> e(1.0);
  ExecutionPlan plan;
  plan.push_fraction = Matrix(p.num_sources(), p.num_mappers());
  for (std::size_t i = 0; i < p.num_sources(); ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < p.num_mappers(); ++j) sum += plan.push_fraction(i, j) = e(rng);
    for (std::size_t j = 0; j < p.num_mappers(); ++j) plan.push_fraction(i, j) /= sum;
  }
  double sum = 0.0;
  plan.reducer_fraction.resize(p.num_reducers());
  for (auto& y : plan.reducer_fraction) sum += y = e(rng);
  for (auto& y : plan.reducer_fraction) y /= sum;
  return renormalized(std::move(plan));
}

}  // namespace geomr::testing
