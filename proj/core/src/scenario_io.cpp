#include "geomr/scenario_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "geomr/error.hpp"
#include "geomr/units.hpp"
#include "json.hpp"

namespace geomr {

using nlohmann::json;

namespace {

std::string line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t column = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

const json& require(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) throw ParseError(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(path, "missing required field \"" + key + "\"");
  return *it;
}

double quantity(const json& value, Quantity kind, const std::string& path) {
  try {
    if (value.is_number()) return value.get<double>();
    if (value.is_string()) return parse_quantity(value.get<std::string>(), kind);
  } catch (const UnitError& e) {
    throw UnitError(path + ": " + e.what());
  }
  throw ParseError(path, "expected a number or a quantity string");
}

std::string string_field(const json& obj, const std::string& key, const std::string& path) {
  const json& v = require(obj, key, path);
  if (!v.is_string()) throw ParseError(path + "/" + key, "expected a string");
  return v.get<std::string>();
}

struct NodeList {
  std::vector<std::string> ids;
  std::vector<std::string> clusters;
  std::vector<double> values;
};

NodeList parse_nodes(const json& doc, const std::string& key, const char* value_key, Quantity kind,
                     const std::set<std::string>& clusters) {
  const std::string base = "/" + key;
  const json& arr = require(doc, key, "");
  if (!arr.is_array()) throw ParseError(base, "expected an array of nodes");
  NodeList out;
  for (std::size_t n = 0; n < arr.size(); ++n) {
    const std::string path = base + "/" + std::to_string(n);
    const json& node = arr[n];
    if (!node.is_object()) throw ParseError(path, "expected an object");
    out.ids.push_back(string_field(node, "id", path));
    std::string cluster = string_field(node, "cluster", path);
    if (!clusters.empty() && !clusters.count(cluster)) {
      throw ParseError(path + "/cluster", "cluster \"" + cluster + "\" is not declared in /clusters");
    }
    out.clusters.push_back(std::move(cluster));
    out.values.push_back(quantity(require(node, value_key, path), kind, path + "/" + value_key));
  }
  return out;
}

Matrix parse_bandwidth(const json& doc, const std::string& key, const NodeList& rows,
                       const NodeList& cols) {
  const std::string base = "/" + key;
  const json& spec = require(doc, key, "");
  Matrix m(rows.ids.size(), cols.ids.size());
  if (spec.is_object()) {
    const double intra = quantity(require(spec, "intra", base), Quantity::Rate, base + "/intra");
    const double inter = quantity(require(spec, "inter", base), Quantity::Rate, base + "/inter");
    for (std::size_t r = 0; r < m.rows(); ++r)
      for (std::size_t c = 0; c < m.cols(); ++c)
        m(r, c) = rows.clusters[r] == cols.clusters[c] ? intra : inter;
    return m;
  }
  if (!spec.is_array()) throw ParseError(base, "expected a matrix or {intra, inter}");
  if (spec.size() != m.rows()) {
    throw DimensionError(base + ": expected " + std::to_string(m.rows()) + " rows, got " +
                         std::to_string(spec.size()));
  }
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const json& row = spec[r];
    const std::string rpath = base + "/" + std::to_string(r);
    if (!row.is_array()) throw ParseError(rpath, "expected an array");
    if (row.size() != m.cols()) {
      throw DimensionError(rpath + ": expected " + std::to_string(m.cols()) + " entries, got " +
                           std::to_string(row.size()));
    }
    for (std::size_t c = 0; c < m.cols(); ++c)
      m(r, c) = quantity(row[c], Quantity::Rate, rpath + "/" + std::to_string(c));
  }
  return m;
}

}  // namespace

Scenario parse_scenario(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError(line_column(text, e.byte == 0 ? 0 : e.byte - 1), "malformed JSON");
  }
  if (!doc.is_object()) throw ParseError("/", "expected a JSON object at top level");

  Scenario s;
  s.name = doc.contains("name") ? string_field(doc, "name", "") : std::string("unnamed");

  std::set<std::string> clusters;
  if (doc.contains("clusters")) {
    const json& arr = doc["clusters"];
    if (!arr.is_array()) throw ParseError("/clusters", "expected an array of labels");
    for (std::size_t n = 0; n < arr.size(); ++n) {
      if (!arr[n].is_string()) throw ParseError("/clusters/" + std::to_string(n), "expected a string");
      clusters.insert(arr[n].get<std::string>());
    }
  }

  const NodeList sources = parse_nodes(doc, "sources", "data", Quantity::Data, clusters);
  const NodeList mappers = parse_nodes(doc, "mappers", "capacity", Quantity::Rate, clusters);
  const NodeList reducers = parse_nodes(doc, "reducers", "capacity", Quantity::Rate, clusters);

  auto& p = s.platform;
  p.sources = sources.ids;
  p.mappers = mappers.ids;
  p.reducers = reducers.ids;
  p.map_capacity = mappers.values;
  p.reduce_capacity = reducers.values;
  for (const NodeList* list : {&sources, &mappers, &reducers})
    for (std::size_t n = 0; n < list->ids.size(); ++n) p.cluster_of[list->ids[n]] = list->clusters[n];
  p.push_bandwidth = parse_bandwidth(doc, "push_bandwidth", sources, mappers);
  p.shuffle_bandwidth = parse_bandwidth(doc, "shuffle_bandwidth", mappers, reducers);

  s.workload.data_at_source = sources.values;
  s.workload.alpha = doc.contains("alpha") ? quantity(doc["alpha"], Quantity::Data, "/alpha") : 1.0;

  const auto validation = validate_scenario(s);
  if (!validation.ok()) throw ParseError("", "scenario violates platform invariants:\n" + validation.describe());
  return s;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Scenario load_scenario(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  try {
    return parse_scenario(text);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + (e.where().empty() ? "" : ": " + e.where()),
                     std::string(e.what()).substr(e.where().empty() ? 0 : e.where().size() + 2));
  }
}

void write_scenario(const Scenario& s, std::ostream& out) {
  const auto& p = s.platform;
  std::set<std::string> clusters;
  for (const auto& [node, cluster] : p.cluster_of) clusters.insert(cluster);

  json doc;
  doc["name"] = s.name;
  doc["clusters"] = std::vector<std::string>(clusters.begin(), clusters.end());
  auto nodes = [&](const std::vector<std::string>& ids, const std::vector<double>& values,
                   const char* key, Quantity kind) {
    json arr = json::array();
    for (std::size_t n = 0; n < ids.size(); ++n)
      arr.push_back({{"id", ids[n]}, {"cluster", p.cluster(ids[n])}, {key, format_quantity(values[n], kind)}});
    return arr;
  };
  doc["sources"] = nodes(p.sources, s.workload.data_at_source, "data", Quantity::Data);
  doc["mappers"] = nodes(p.mappers, p.map_capacity, "capacity", Quantity::Rate);
  doc["reducers"] = nodes(p.reducers, p.reduce_capacity, "capacity", Quantity::Rate);
  auto matrix = [](const Matrix& m) {
    json rows = json::array();
    for (std::size_t r = 0; r < m.rows(); ++r) {
      json row = json::array();
      for (double v : m.row(r)) row.push_back(format_quantity(v, Quantity::Rate));
      rows.push_back(std::move(row));
    }
    return rows;
  };
  doc["push_bandwidth"] = matrix(p.push_bandwidth);
  doc["shuffle_bandwidth"] = matrix(p.shuffle_bandwidth);
  doc["alpha"] = s.workload.alpha;
  out << doc.dump(2) << '\n';
}

void save_scenario(const Scenario& s, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  write_scenario(s, out);
}

}  // namespace geomr
