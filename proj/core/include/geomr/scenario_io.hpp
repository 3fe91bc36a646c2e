#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "geomr/platform.hpp"

namespace geomr {

// Scenario files are JSON documents:
//
//   {
//     "name": "tutorial-two-cluster",
//     "clusters": ["cluster1", "cluster2"],
//     "sources":  [{"id": "D1", "cluster": "cluster1", "data": "150GB"}, ...],
//     "mappers":  [{"id": "M1", "cluster": "cluster1", "capacity": "100MBps"}, ...],
//     "reducers": [{"id": "R1", "cluster": "cluster1", "capacity": "100MBps"}, ...],
//     "push_bandwidth":    {"intra": "100MBps", "inter": "10MBps"},
//     "shuffle_bandwidth": [["100MBps", "10MBps"], ["10MBps", "100MBps"]],
//     "alpha": 1
//   }
//
// Bandwidth matrices are row-major in source (resp. mapper) order. Any
// quantity may be a bare number in canonical units.

// Throws ParseError (with line/column or JSON pointer), UnitError or
// DimensionError. The returned scenario passes validate_scenario.
Scenario parse_scenario(std::string_view text);
Scenario load_scenario(const std::filesystem::path& path);

// Full matrices, canonical units, shortest round-trip numbers: reloading
// yields bit-identical values.
void write_scenario(const Scenario& s, std::ostream& out);
void save_scenario(const Scenario& s, const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace geomr
