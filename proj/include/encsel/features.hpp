#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "encsel/encodings.hpp"
#include "encsel/graph.hpp"
#include "encsel/traversal.hpp"
#include "encsel/util.hpp"

namespace encsel {

inline constexpr double kUndefinedFeature = -1.0;
inline constexpr int kCatalogVersion = 1;

struct FeatureEntry {
  std::string name;
  std::string group;  // "graph" or "static_hc1".."static_hc6"
  std::string provenance;
  bool undefined_allowed = false;  // may take kUndefinedFeature
  bool reconstructed = false;      // definition rebuilt from the feature name alone
};

// Ordered, uniquely named feature list.
class FeatureCatalog {
 public:
  FeatureCatalog() = default;
  explicit FeatureCatalog(std::vector<FeatureEntry> entries, std::size_t beam_width = kDefaultBeamWidth)
      : entries_(std::move(entries)), beam_width_(beam_width) {
    std::vector<std::string> names = this->names();
    std::sort(names.begin(), names.end());
    auto dup = std::adjacent_find(names.begin(), names.end());
    if (dup != names.end()) throw ValidationError("duplicate feature name '" + *dup + "' in catalog");
  }

  const std::vector<FeatureEntry>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  std::size_t beam_width() const noexcept { return beam_width_; }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (const auto& e : entries_) out.push_back(e.name);
    return out;
  }

  const FeatureEntry& at(const std::string& name) const {
    for (const auto& e : entries_) {
      if (e.name == name) return e;
    }
    throw ValidationError("feature '" + name + "' is not in the catalog");
  }

  // Group names in first-appearance order.
  std::vector<std::string> groups() const {
    std::vector<std::string> out;
    for (const auto& e : entries_) {
      if (std::find(out.begin(), out.end(), e.group) == out.end()) out.push_back(e.group);
    }
    return out;
  }

  // Projection onto `names`, in that order.
  FeatureCatalog restrict(const std::vector<std::string>& names) const {
    std::vector<FeatureEntry> out;
    for (const auto& n : names) out.push_back(at(n));
    return FeatureCatalog(std::move(out), beam_width_);
  }

 private:
  std::vector<FeatureEntry> entries_;
  std::size_t beam_width_ = kDefaultBeamWidth;
};

namespace detail {

inline const std::vector<std::string>& graph_feature_names() {
  static const std::vector<std::string> names{
      "ratio_node_edge",
      "ratio_bi_edge",
      "avg_out_degree",
      "avg_in_degree",
      "ratio_of_odd_out_degree",
      "ratio_of_even_out_degree",
      "ratio_of_odd_in_degree",
      "ratio_of_even_in_degree",
      "ratio_of_odd_degree",
      "ratio_of_even_degree",
      "ratio_out_degree_less_than_3",
      "ratio_in_degree_less_than_3",
      "ratio_degree_less_than_3",
      "avg_depth_bfs",
      "avg_depth_beam",
      "dfs_1st_back_depth",
      "sum_of_choices_along_path",
      "depth_avg_dfs_backjump",
      "depth_back_to_root",
      "depth_back_to_any",
      "depth_one_path",
      "min_depth_bfs",
      "max_depth_bfs",
      "min_depth_beam",
      "max_depth_beam",
  };
  return names;
}

inline const std::vector<std::string>& static_feature_stems() {
  static const std::vector<std::string> stems{
      "Frac_Unary_Rules",
      "Frac_Binary_Rules",
      "Frac_Ternary_Rules",
      "Free_Problem_Variables",
      "Problem_Variables",
      "Assigned_Problem_Variables",
      "Constraints",
      "Rules",
      "Frac_Normal_Rules",
      "Frac_Cardinality_Rules",
      "Frac_Choice_Rules",
      "Frac_Binary_Constraints",
      "Frac_Ternary_Constraints",
      "Frac_Other_Constraints",
  };
  return stems;
}

inline FeatureEntry graph_entry(const std::string& name) {
  static const std::vector<std::string> undefined{"ratio_node_edge", "ratio_bi_edge", "depth_back_to_root", "depth_back_to_any"};
  const bool traversal = name.find("depth") != std::string::npos || name.find("dfs") != std::string::npos ||
                         name.find("choices") != std::string::npos;
  FeatureEntry e;
  e.name = name;
  e.group = "graph";
  e.undefined_allowed = std::find(undefined.begin(), undefined.end(), name) != undefined.end();
  e.reconstructed = traversal || name == "ratio_bi_edge";
  if (name.find("beam") != std::string::npos) {
    e.provenance = "beam-limited BFS over every root, aggregated; reconstructed definition";
  } else if (name.find("bfs") != std::string::npos) {
    e.provenance = "BFS tree depth over every root, aggregated";
  } else if (traversal) {
    e.provenance = "single DFS from node 1, ascending successors; reconstructed definition";
    if (e.undefined_allowed) e.provenance += "; -1 when no such back edge";
  } else if (name == "ratio_bi_edge") {
    e.provenance = "fraction of arcs whose reverse arc is present; reconstructed definition";
  } else if (name == "ratio_node_edge") {
    e.provenance = "nodes / arcs; -1 for an arcless graph";
  } else {
    e.provenance = "degree statistic";
  }
  return e;
}

}  // namespace detail

// Every feature: 25 graph features, then 14 static features per encoding.
inline FeatureCatalog full_catalog(std::size_t beam_width = kDefaultBeamWidth) {
  std::vector<FeatureEntry> entries;
  for (const auto& n : detail::graph_feature_names()) entries.push_back(detail::graph_entry(n));
  for (int k = 1; k <= kEncodingCount; ++k) {
    for (const auto& stem : detail::static_feature_stems()) {
      FeatureEntry e;
      e.name = stem + "_hc" + std::to_string(k);
      e.group = "static_hc" + std::to_string(k);
      e.provenance = "closed-form ground instantiation count of encoding " + std::to_string(k);
      e.undefined_allowed = stem.rfind("Frac_", 0) == 0;
      entries.push_back(std::move(e));
    }
  }
  return FeatureCatalog(std::move(entries), beam_width);
}

// The default active set: graph features plus Encoding 1 static features (39).
inline FeatureCatalog default_catalog(std::size_t beam_width = kDefaultBeamWidth) {
  std::vector<std::string> names = detail::graph_feature_names();
  for (const auto& stem : detail::static_feature_stems()) names.push_back(stem + "_hc1");
  return full_catalog(beam_width).restrict(names);
}

using NamedValues = std::vector<std::pair<std::string, double>>;

namespace detail {

template <typename Range>
double mean_of(const Range& r) {
  if (r.empty()) return 0.0;
  double total = 0.0;
  for (auto v : r) total += static_cast<double>(v);
  return total / static_cast<double>(r.size());
}

}  // namespace detail

// The 25 graph features, in catalog order.
inline NamedValues graph_features(const DirectedGraph& g, std::size_t beam_width = kDefaultBeamWidth) {
  const std::size_t n = g.node_count();
  if (n < 1) throw PreconditionError("graph features need at least one node");
  const double nd = static_cast<double>(n);
  const double a = static_cast<double>(g.arc_count());

  std::size_t bi = 0;
  for (const Arc& arc : g.arcs()) bi += g.has_arc(arc.to, arc.from) ? 1 : 0;

  std::size_t odd_out = 0, odd_in = 0, odd_total = 0, out_lt3 = 0, in_lt3 = 0, total_lt3 = 0;
  for (NodeId v = 1; v <= n; ++v) {
    std::size_t o = g.out_degree(v), i = g.in_degree(v);
    odd_out += o % 2;
    odd_in += i % 2;
    odd_total += (o + i) % 2;
    out_lt3 += o < 3;
    in_lt3 += i < 3;
    total_lt3 += (o + i) < 3;
  }
  auto frac = [nd](std::size_t k) { return static_cast<double>(k) / nd; };

  auto bfs = bfs_depths(g);
  auto beam = beam_depths(g, beam_width);
  DfsProfile dfs = dfs_profile(g, 1);
  auto opt = [](const std::optional<std::size_t>& v) { return v ? static_cast<double>(*v) : kUndefinedFeature; };

  return {
      {"ratio_node_edge", a > 0 ? nd / a : kUndefinedFeature},
      {"ratio_bi_edge", a > 0 ? static_cast<double>(bi) / a : kUndefinedFeature},
      {"avg_out_degree", a / nd},
      {"avg_in_degree", a / nd},
      {"ratio_of_odd_out_degree", frac(odd_out)},
      {"ratio_of_even_out_degree", frac(n - odd_out)},
      {"ratio_of_odd_in_degree", frac(odd_in)},
      {"ratio_of_even_in_degree", frac(n - odd_in)},
      {"ratio_of_odd_degree", frac(odd_total)},
      {"ratio_of_even_degree", frac(n - odd_total)},
      {"ratio_out_degree_less_than_3", frac(out_lt3)},
      {"ratio_in_degree_less_than_3", frac(in_lt3)},
      {"ratio_degree_less_than_3", frac(total_lt3)},
      {"avg_depth_bfs", detail::mean_of(bfs)},
      {"avg_depth_beam", detail::mean_of(beam)},
      {"dfs_1st_back_depth", static_cast<double>(dfs.first_back_depth)},
      {"sum_of_choices_along_path", static_cast<double>(dfs.sum_choices_along_path)},
      {"depth_avg_dfs_backjump", dfs.avg_backjump_depth},
      {"depth_back_to_root", opt(dfs.back_to_root_depth)},
      {"depth_back_to_any", opt(dfs.back_to_any_depth)},
      {"depth_one_path", static_cast<double>(dfs.one_path_len)},
      {"min_depth_bfs", static_cast<double>(*std::min_element(bfs.begin(), bfs.end()))},
      {"max_depth_bfs", static_cast<double>(*std::max_element(bfs.begin(), bfs.end()))},
      {"min_depth_beam", static_cast<double>(*std::min_element(beam.begin(), beam.end()))},
      {"max_depth_beam", static_cast<double>(*std::max_element(beam.begin(), beam.end()))},
  };
}

// The 14 static features of `enc`, suffixed `_hc<k>`.
inline NamedValues encoding_static_features(const DirectedGraph& g, EncodingId enc) {
  const StaticCounts c = static_counts(enc, g);
  const std::string sfx = "_hc" + std::to_string(enc.value());
  auto over = [](std::size_t part, std::size_t whole) {
    return whole > 0 ? static_cast<double>(part) / static_cast<double>(whole) : kUndefinedFeature;
  };
  auto raw = [](std::size_t v) { return static_cast<double>(v); };
  return {
      {"Frac_Unary_Rules" + sfx, over(c.unary_rules, c.rules)},
      {"Frac_Binary_Rules" + sfx, over(c.binary_rules, c.rules)},
      {"Frac_Ternary_Rules" + sfx, over(c.ternary_rules, c.rules)},
      {"Free_Problem_Variables" + sfx, raw(c.free_problem_variables)},
      {"Problem_Variables" + sfx, raw(c.problem_variables)},
      {"Assigned_Problem_Variables" + sfx, raw(c.assigned_problem_variables)},
      {"Constraints" + sfx, raw(c.constraints)},
      {"Rules" + sfx, raw(c.rules)},
      {"Frac_Normal_Rules" + sfx, over(c.normal_rules, c.rules)},
      {"Frac_Cardinality_Rules" + sfx, over(c.cardinality_rules, c.rules)},
      {"Frac_Choice_Rules" + sfx, over(c.choice_rules, c.rules)},
      {"Frac_Binary_Constraints" + sfx, over(c.binary_constraints, c.constraints)},
      {"Frac_Ternary_Constraints" + sfx, over(c.ternary_constraints, c.constraints)},
      {"Frac_Other_Constraints" + sfx, over(c.other_constraints, c.constraints)},
  };
}

// Feature values per instance, columns in catalog order.
struct FeatureTable {
  std::vector<std::string> names;
  std::vector<std::string> instance_ids;
  std::vector<std::vector<double>> rows;
  std::vector<double> extract_seconds;  // parallel to rows; not part of features.csv
  std::vector<std::pair<std::string, std::string>> row_errors;  // (instance id, message)

  std::size_t row_of(const std::string& id) const {
    for (std::size_t i = 0; i < instance_ids.size(); ++i) {
      if (instance_ids[i] == id) return i;
    }
    throw DataError("no feature row for instance '" + id + "'");
  }

  bool has_row(const std::string& id) const {
    return std::find(instance_ids.begin(), instance_ids.end(), id) != instance_ids.end();
  }

  std::size_t column_of(const std::string& name) const {
    auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) throw DataError("feature table has no column '" + name + "'");
    return static_cast<std::size_t>(it - names.begin());
  }

  friend bool operator==(const FeatureTable& a, const FeatureTable& b) {
    return a.names == b.names && a.instance_ids == b.instance_ids && a.rows == b.rows;
  }
};

// Values of `catalog` for one graph.
inline std::vector<double> feature_vector(const DirectedGraph& g, const FeatureCatalog& catalog) {
  std::map<std::string, double> values;
  bool need_graph = false;
  std::vector<char> need_static(kEncodingCount, 0);
  for (const auto& e : catalog.entries()) {
    if (e.group == "graph") {
      need_graph = true;
    } else {
      need_static[static_cast<std::size_t>(std::stoi(e.group.substr(std::string("static_hc").size())) - 1)] = 1;
    }
  }
  if (need_graph) {
    for (auto& [k, v] : graph_features(g, catalog.beam_width())) values[k] = v;
  }
  for (int k = 1; k <= kEncodingCount; ++k) {
    if (!need_static[static_cast<std::size_t>(k - 1)]) continue;
    for (auto& [name, v] : encoding_static_features(g, EncodingId(k))) values[name] = v;
  }
  std::vector<double> out;
  out.reserve(catalog.size());
  for (const auto& e : catalog.entries()) out.push_back(values.at(e.name));
  return out;
}

// One row per instance that could be featurized; failures are recorded in
// row_errors and the remaining instances still complete.
template <typename Instances>
FeatureTable build_feature_table(const Instances& instances, const FeatureCatalog& catalog) {
  FeatureTable table;
  table.names = catalog.names();
  for (const auto& inst : instances) {
    try {
      auto start = std::chrono::steady_clock::now();
      auto values = feature_vector(inst.graph, catalog);
      double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      table.instance_ids.push_back(inst.id);
      table.rows.push_back(std::move(values));
      table.extract_seconds.push_back(seconds);
    } catch (const std::exception& ex) {
      table.row_errors.emplace_back(inst.id, ex.what());
    }
  }
  return table;
}

// Column subset in the given order.
inline FeatureTable project(const FeatureTable& table, const std::vector<std::string>& names) {
  FeatureTable out;
  out.names = names;
  out.instance_ids = table.instance_ids;
  out.extract_seconds = table.extract_seconds;
  std::vector<std::size_t> cols;
  for (const auto& n : names) cols.push_back(table.column_of(n));
  for (const auto& row : table.rows) {
    std::vector<double> r;
    for (std::size_t c : cols) r.push_back(row[c]);
    out.rows.push_back(std::move(r));
  }
  return out;
}

inline std::string features_to_csv(const FeatureTable& t) {
  std::string out = "instance_id";
  for (const auto& n : t.names) out += "," + n;
  out += "\n";
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    out += t.instance_ids[i];
    for (double v : t.rows[i]) out += "," + format_decimal(v);
    out += "\n";
  }
  return out;
}

inline FeatureTable features_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw LoadError("feature file is empty; expected a header");
  auto header = split(trim_cr(line));
  if (header.empty() || header[0] != "instance_id") throw LoadError("feature file: first column must be 'instance_id'");
  FeatureTable t;
  t.names.assign(header.begin() + 1, header.end());
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim_cr(line);
    if (line.empty()) continue;
    auto f = split(line);
    if (f.size() != header.size()) throw LoadError("feature file line " + std::to_string(line_no) + ": wrong field count");
    std::vector<double> row;
    for (std::size_t i = 1; i < f.size(); ++i) {
      double v = 0;
      if (!parse_finite(f[i], v)) {
        throw LoadError("feature file line " + std::to_string(line_no) + ", column '" + header[i] + "': '" + f[i] + "' is not a finite number");
      }
      row.push_back(v);
    }
    t.instance_ids.push_back(f[0]);
    t.rows.push_back(std::move(row));
  }
  return t;
}

// Strict load: the header must list exactly the catalog names in catalog order.
inline FeatureTable features_from_csv(const std::string& text, const FeatureCatalog& catalog) {
  FeatureTable t = features_from_csv(text);
  auto expected = catalog.names();
  if (t.names != expected) {
    for (std::size_t i = 0; i < std::max(expected.size(), t.names.size()); ++i) {
      if (i >= t.names.size() || i >= expected.size() || t.names[i] != expected[i]) {
        throw LoadError("feature file header does not match the catalog at column " + std::to_string(i + 1) + " (expected '" +
                        (i < expected.size() ? expected[i] : std::string("<end>")) + "', found '" +
                        (i < t.names.size() ? t.names[i] : std::string("<end>")) + "')");
      }
    }
  }
  return t;
}

inline void save_features(const FeatureTable& t, const std::filesystem::path& path) { write_text(path, features_to_csv(t)); }
inline FeatureTable load_features(const std::filesystem::path& path) { return features_from_csv(read_text(path)); }
inline FeatureTable load_features(const std::filesystem::path& path, const FeatureCatalog& catalog) {
  return features_from_csv(read_text(path), catalog);
}

// Sidecar with the per-instance extraction wall time.
inline std::string feature_times_csv(const FeatureTable& t) {
  std::string out = "instance_id,extract_s\n";
  for (std::size_t i = 0; i < t.instance_ids.size(); ++i) {
    out += t.instance_ids[i] + "," + format_decimal(i < t.extract_seconds.size() ? t.extract_seconds[i] : 0.0, 9) + "\n";
  }
  return out;
}

inline std::map<std::string, double> feature_times_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  if (trim_cr(line) != "instance_id,extract_s") throw LoadError("feature time file: expected header 'instance_id,extract_s'");
  std::map<std::string, double> out;
  while (std::getline(in, line)) {
    line = trim_cr(line);
    if (line.empty()) continue;
    auto f = split(line);
    double v = 0;
    if (f.size() != 2 || !parse_finite(f[1], v)) throw LoadError("feature time file: malformed line '" + line + "'");
    out[f[0]] = v;
  }
  return out;
}

inline nlohmann::json catalog_to_json(const FeatureCatalog& catalog) {
  nlohmann::json j;
  j["version"] = kCatalogVersion;
  j["beam_width"] = catalog.beam_width();
  j["dfs_root"] = 1;
  j["undefined_value"] = kUndefinedFeature;
  auto& arr = j["features"] = nlohmann::json::array();
  for (const auto& e : catalog.entries()) {
    arr.push_back({{"name", e.name},
                   {"group", e.group},
                   {"provenance", e.provenance},
                   {"undefined_allowed", e.undefined_allowed},
                   {"reconstructed", e.reconstructed}});
  }
  return j;
}

inline FeatureCatalog catalog_from_json(const nlohmann::json& j) {
  if (j.value("version", 0) != kCatalogVersion) throw LoadError("unsupported catalog version");
  std::vector<FeatureEntry> entries;
  for (const auto& f : j.at("features")) {
    entries.push_back({f.at("name").get<std::string>(), f.at("group").get<std::string>(), f.value("provenance", ""),
                       f.value("undefined_allowed", false), f.value("reconstructed", false)});
  }
  return FeatureCatalog(std::move(entries), j.value("beam_width", kDefaultBeamWidth));
}

}  // namespace encsel
