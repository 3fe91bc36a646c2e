#include "geomr/plan_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "geomr/error.hpp"
#include "geomr/scenario_io.hpp"
#include "json.hpp"

namespace geomr {

using nlohmann::json;

std::vector<int> bucket_counts(std::span<const double> reducer_fraction, int bucket_count) {
  if (bucket_count <= 0) throw Error("bucket count must be positive");
  const std::size_t n = reducer_fraction.size();
  std::vector<int> counts(n, 0);
  std::vector<double> remainder(n, 0.0);
  int assigned = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const double exact = std::max(reducer_fraction[k], 0.0) * bucket_count;
    counts[k] = static_cast<int>(std::floor(exact));
    remainder[k] = exact - counts[k];
    assigned += counts[k];
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t n_left = 0; assigned < bucket_count && n > 0; ++n_left) {
    ++counts[order[n_left % n]];
    ++assigned;
  }
  for (std::size_t k = n; assigned > bucket_count && k-- > 0;) {
    const int take = std::min(counts[k], assigned - bucket_count);
    counts[k] -= take;
    assigned -= take;
  }
  return counts;
}

std::vector<int> bucketize(std::span<const double> reducer_fraction, int bucket_count) {
  const auto counts = bucket_counts(reducer_fraction, bucket_count);
  std::vector<int> owner;
  owner.reserve(static_cast<std::size_t>(bucket_count));
  for (std::size_t k = 0; k < counts.size(); ++k) owner.insert(owner.end(), counts[k], static_cast<int>(k));
  return owner;
}

void write_plan(const ExecutionPlan& plan, const PlatformGraph& p, std::ostream& out, int bucket_count) {
  json doc;
  doc["sources"] = p.sources;
  doc["mappers"] = p.mappers;
  doc["reducers"] = p.reducers;
  json push = json::array();
  for (std::size_t i = 0; i < plan.push_fraction.rows(); ++i) {
    const auto row = plan.push_fraction.row(i);
    push.push_back(std::vector<double>(row.begin(), row.end()));
  }
  doc["push_fraction"] = std::move(push);
  doc["reducer_fraction"] = plan.reducer_fraction;
  json shuffle = json::array();
  for (std::size_t j = 0; j < plan.push_fraction.cols(); ++j) shuffle.push_back(plan.reducer_fraction);
  doc["shuffle_fraction"] = std::move(shuffle);
  doc["buckets"] = {{"count", bucket_count},
                    {"per_reducer", bucket_counts(plan.reducer_fraction, bucket_count)},
                    {"reducer_of_bucket", bucketize(plan.reducer_fraction, bucket_count)}};
  out << doc.dump(2) << '\n';
}

void save_plan(const ExecutionPlan& plan, const PlatformGraph& p, const std::filesystem::path& path,
               int bucket_count) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  write_plan(plan, p, out, bucket_count);
}

namespace {

void check_ids(const json& doc, const char* key, const std::vector<std::string>& expected) {
  if (!doc.contains(key)) return;
  const json& ids = doc[key];
  if (!ids.is_array()) throw ParseError(std::string("/") + key, "expected an array of ids");
  std::vector<std::string> got;
  for (const auto& id : ids) {
    if (!id.is_string()) throw ParseError(std::string("/") + key, "expected string ids");
    got.push_back(id.get<std::string>());
  }
  if (got.size() != expected.size()) {
    throw DimensionError(std::string("plan lists ") + std::to_string(got.size()) + " " + key +
                         ", scenario has " + std::to_string(expected.size()));
  }
  if (got != expected) throw DimensionError(std::string("plan ") + key + " do not match the scenario's " + key);
}

std::vector<double> number_row(const json& row, const std::string& path) {
  if (!row.is_array()) throw ParseError(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t n = 0; n < row.size(); ++n) {
    if (!row[n].is_number()) throw ParseError(path + "/" + std::to_string(n), "expected a number");
    out.push_back(row[n].get<double>());
  }
  return out;
}

}  // namespace

ExecutionPlan parse_plan(std::string_view text, const PlatformGraph& p) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError("byte " + std::to_string(e.byte), "malformed JSON plan");
  }
  if (!doc.is_object()) throw ParseError("/", "expected a JSON object");
  check_ids(doc, "sources", p.sources);
  check_ids(doc, "mappers", p.mappers);
  check_ids(doc, "reducers", p.reducers);

  if (!doc.contains("push_fraction")) throw ParseError("/", "missing required field \"push_fraction\"");
  if (!doc.contains("reducer_fraction")) throw ParseError("/", "missing required field \"reducer_fraction\"");
  const json& push = doc["push_fraction"];
  if (!push.is_array()) throw ParseError("/push_fraction", "expected a matrix");
  if (push.size() != p.num_sources()) {
    throw DimensionError("push_fraction has " + std::to_string(push.size()) + " rows, scenario has " +
                         std::to_string(p.num_sources()) + " sources");
  }
  ExecutionPlan plan;
  plan.push_fraction = Matrix(p.num_sources(), p.num_mappers());
  for (std::size_t i = 0; i < push.size(); ++i) {
    const auto row = number_row(push[i], "/push_fraction/" + std::to_string(i));
    if (row.size() != p.num_mappers()) {
      throw DimensionError("push_fraction row " + std::to_string(i) + " has " + std::to_string(row.size()) +
                           " entries, scenario has " + std::to_string(p.num_mappers()) + " mappers");
    }
    std::copy(row.begin(), row.end(), plan.push_fraction.row(i).begin());
  }
  plan.reducer_fraction = number_row(doc["reducer_fraction"], "/reducer_fraction");
  if (plan.reducer_fraction.size() != p.num_reducers()) {
    throw DimensionError("reducer_fraction has " + std::to_string(plan.reducer_fraction.size()) +
                         " entries, scenario has " + std::to_string(p.num_reducers()) + " reducers");
  }
  return renormalized(std::move(plan));
}

ExecutionPlan load_plan(const std::filesystem::path& path, const PlatformGraph& p) {
  return parse_plan(read_text_file(path), p);
}

}  // namespace geomr
