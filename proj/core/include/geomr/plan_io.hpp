#pragma once

#include <filesystem>
#include <iosfwd>
#include <string_view>
#include <vector>

#include "geomr/plan.hpp"

namespace geomr {

inline constexpr int kDefaultBucketCount = 1024;

// Assigns `bucket_count` hash buckets to reducers in contiguous ranges so
// reducer k owns y[k] * bucket_count buckets, rounded by largest remainder
// so the counts add up to bucket_count exactly.
std::vector<int> bucket_counts(std::span<const double> reducer_fraction, int bucket_count);
std::vector<int> bucketize(std::span<const double> reducer_fraction, int bucket_count);

// Plan files are JSON:
//
//   {
//     "sources": [...], "mappers": [...], "reducers": [...],
//     "push_fraction": [[x00, x01, ...], ...],      // row-major, source order
//     "reducer_fraction": [y0, y1, ...],
//     "shuffle_fraction": [[y0, y1, ...], ...],     // one identical row per mapper
//     "buckets": {"count": 1024, "per_reducer": [...], "reducer_of_bucket": [...]}
//   }
//
// Only push_fraction and reducer_fraction are read back; the rest is for
// consumers that enact the plan.
void write_plan(const ExecutionPlan& plan, const PlatformGraph& p, std::ostream& out,
                int bucket_count = kDefaultBucketCount);
void save_plan(const ExecutionPlan& plan, const PlatformGraph& p, const std::filesystem::path& path,
               int bucket_count = kDefaultBucketCount);

// Throws ParseError on malformed text and DimensionError when the plan does
// not fit the platform. Rows within kPlanSumTolerance of 1 are renormalized;
// other defects are left for validate_plan to report.
ExecutionPlan parse_plan(std::string_view text, const PlatformGraph& p);
ExecutionPlan load_plan(const std::filesystem::path& path, const PlatformGraph& p);

}  // namespace geomr
