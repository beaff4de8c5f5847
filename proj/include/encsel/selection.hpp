#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "encsel/encoding_id.hpp"
#include "encsel/features.hpp"
#include "encsel/ml/runtime_model.hpp"
#include "encsel/performance.hpp"

namespace encsel {

enum class PolicyKind { Single, Learned, Oracle };

inline std::string to_string(PolicyKind k) {
  switch (k) {
    case PolicyKind::Single: return "single";
    case PolicyKind::Learned: return "learned";
    case PolicyKind::Oracle: return "oracle";
  }
  return {};
}

struct Policy {
  PolicyKind kind = PolicyKind::Oracle;
  std::optional<EncodingId> single;
  std::vector<ml::RuntimeModel> models;  // learned only: one per encoding, ascending
  std::string description;
};

inline Policy single_policy(EncodingId enc) { return Policy{PolicyKind::Single, enc, {}, to_string(enc)}; }

inline Policy oracle_policy_spec() { return Policy{PolicyKind::Oracle, std::nullopt, {}, "Oracle"}; }

inline Policy learned_policy(std::vector<ml::RuntimeModel> models, std::string description) {
  std::sort(models.begin(), models.end(), [](const auto& a, const auto& b) { return a.encoding < b.encoding; });
  if (models.size() != static_cast<std::size_t>(kEncodingCount)) {
    throw PreconditionError("a learned policy needs exactly one model per encoding, got " + std::to_string(models.size()));
  }
  for (std::size_t i = 0; i < models.size(); ++i) {
    if (models[i].encoding != EncodingId(static_cast<int>(i) + 1)) throw PreconditionError("a learned policy needs exactly one model per encoding");
    if (models[i].feature_names != models[0].feature_names) throw PreconditionError("learned models disagree on their feature schema");
  }
  return Policy{PolicyKind::Learned, std::nullopt, std::move(models), std::move(description)};
}

// Index of the smallest value; ties keep the earliest.
inline std::size_t argmin_first(std::span<const double> values) {
  if (values.empty()) throw PreconditionError("argmin of an empty list");
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] < values[best]) best = i;
  }
  return best;
}

inline std::vector<double> predict_all(std::span<const ml::RuntimeModel> models, std::span<const std::string> names,
                                       std::span<const double> values) {
  std::vector<double> out;
  for (const auto& m : models) out.push_back(m.predict_seconds(names, values));
  return out;
}

// Encoding with the lowest predicted runtime; ties go to the lower id.
inline EncodingId select_encoding(std::span<const ml::RuntimeModel> models, std::span<const std::string> names, std::span<const double> values) {
  if (models.empty()) throw PreconditionError("select_encoding needs at least one model");
  std::vector<const ml::RuntimeModel*> sorted;
  for (const auto& m : models) sorted.push_back(&m);
  std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->encoding < b->encoding; });
  std::vector<double> preds;
  for (auto* m : sorted) preds.push_back(m->predict_seconds(names, values));
  return sorted[argmin_first(preds)]->encoding;
}

// Per instance, the solved encoding with the smallest raw runtime (ties to
// the lower id); nullopt where nothing solved.
inline std::vector<std::optional<EncodingId>> oracle_policy(const PerformanceMatrix& m) {
  m.require_complete();
  std::vector<std::optional<EncodingId>> picks;
  for (std::size_t r = 0; r < m.instance_count(); ++r) {
    std::optional<std::size_t> best;
    for (std::size_t c = 0; c < m.encodings().size(); ++c) {
      const auto& o = m.outcome(r, c);
      if (o.solved() && (!best || o.runtime_s < m.outcome(r, *best).runtime_s)) best = c;
    }
    picks.push_back(best ? std::optional<EncodingId>(m.encodings()[*best]) : std::nullopt);
  }
  return picks;
}

enum class WinsRule { All, First };

inline WinsRule parse_wins_rule(const std::string& s) {
  if (s == "all") return WinsRule::All;
  if (s == "first") return WinsRule::First;
  throw ValidationError("unknown wins rule '" + s + "' (expected all or first)");
}
inline std::string to_string(WinsRule w) { return w == WinsRule::All ? "all" : "first"; }

struct Metrics {
  std::string policy;
  std::size_t n_instances = 0;
  std::size_t solved = 0;
  double solved_pct = 0.0;
  std::optional<double> avg_solved_runtime_s;  // nullopt when nothing solved
  std::optional<std::size_t> wins;             // single and learned policies only
  std::optional<double> avg_with_features_s;   // learned only, when extraction times are known

  friend bool operator==(const Metrics&, const Metrics&) = default;
};

struct EvaluationOptions {
  WinsRule wins = WinsRule::All;
};

// Encoding each instance gets under `policy`; nullopt only for oracle rows nothing solved.
inline std::vector<std::optional<EncodingId>> policy_picks(const Policy& policy, const PerformanceMatrix& m, const FeatureTable* features,
                                                           const std::vector<std::string>& instances) {
  std::vector<std::optional<EncodingId>> picks;
  switch (policy.kind) {
    case PolicyKind::Single:
      m.column_of(*policy.single);
      picks.assign(instances.size(), *policy.single);
      break;
    case PolicyKind::Oracle: {
      auto all = oracle_policy(m);
      for (const auto& id : instances) picks.push_back(all[m.row_of(id)]);
      break;
    }
    case PolicyKind::Learned:
      if (!features) throw DataError("learned policy '" + policy.description + "' needs a feature table");
      for (const auto& id : instances) {
        if (!features->has_row(id)) throw DataError("no feature row for instance '" + id + "'; cannot apply the learned policy");
        const auto& row = features->rows[features->row_of(id)];
        picks.push_back(select_encoding(policy.models, features->names, row));
      }
      break;
  }
  return picks;
}

inline double sorted_sum(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

// Scores fixed per-instance picks. Sums run over sorted values so the result
// does not depend on instance order.
inline Metrics evaluate_picks(const std::string& label, PolicyKind kind, const std::vector<std::optional<EncodingId>>& picks,
                              const PerformanceMatrix& m, const std::vector<std::string>& instances, const FeatureTable* features,
                              const EvaluationOptions& opt = {}) {
  if (picks.size() != instances.size()) throw PreconditionError("one pick per instance required");
  Metrics out;
  out.policy = label;
  out.n_instances = instances.size();
  std::vector<double> runtimes, inclusive;
  std::size_t wins = 0;
  bool have_times = kind == PolicyKind::Learned && features && features->extract_seconds.size() == features->rows.size();
  for (std::size_t i = 0; i < instances.size(); ++i) {
    std::size_t r = m.row_of(instances[i]);
    if (!m.row_complete(r)) throw DataError("performance row '" + instances[i] + "' is incomplete");
    if (!picks[i]) continue;
    const auto& o = m.outcome(r, m.column_of(*picks[i]));
    if (!o.solved()) continue;
    ++out.solved;
    runtimes.push_back(o.runtime_s);
    if (have_times) {
      if (!features->has_row(instances[i])) {
        have_times = false;
      } else {
        inclusive.push_back(o.runtime_s + features->extract_seconds[features->row_of(instances[i])]);
      }
    }
    std::optional<std::size_t> first_best;
    double best = 0.0;
    for (std::size_t c = 0; c < m.encodings().size(); ++c) {
      const auto& x = m.outcome(r, c);
      if (x.solved() && (!first_best || x.runtime_s < best)) {
        first_best = c;
        best = x.runtime_s;
      }
    }
    bool win = opt.wins == WinsRule::All ? o.runtime_s == best : m.encodings()[*first_best] == *picks[i];
    if (win) ++wins;
  }
  out.solved_pct = out.n_instances ? 100.0 * static_cast<double>(out.solved) / static_cast<double>(out.n_instances) : 0.0;
  if (!runtimes.empty()) out.avg_solved_runtime_s = sorted_sum(runtimes) / static_cast<double>(runtimes.size());
  if (kind != PolicyKind::Oracle) out.wins = wins;
  if (have_times && !inclusive.empty()) out.avg_with_features_s = sorted_sum(inclusive) / static_cast<double>(inclusive.size());
  return out;
}

inline Metrics evaluate_policy(const Policy& policy, const PerformanceMatrix& m, const FeatureTable* features,
                               const std::vector<std::string>& instances, const EvaluationOptions& opt = {}) {
  auto picks = policy_picks(policy, m, features, instances);
  return evaluate_picks(policy.description, policy.kind, picks, m, instances, features, opt);
}

inline Metrics evaluate_policy(const Policy& policy, const PerformanceMatrix& m, const FeatureTable* features = nullptr,
                               const EvaluationOptions& opt = {}) {
  return evaluate_policy(policy, m, features, m.instances(), opt);
}

struct ReportRow {
  PolicyKind kind = PolicyKind::Single;
  Metrics metrics;
};

struct SelectionReport {
  std::vector<ReportRow> rows;  // singles, oracle, then learned selectors
  nlohmann::json config = nlohmann::json::object();

  const Metrics* oracle() const {
    for (const auto& r : rows) {
      if (r.kind == PolicyKind::Oracle) return &r.metrics;
    }
    return nullptr;
  }
};

inline SelectionReport build_report(const std::vector<Policy>& learned, const PerformanceMatrix& m, const FeatureTable* features,
                                    const std::vector<std::string>& instances, const EvaluationOptions& opt = {}) {
  SelectionReport report;
  for (EncodingId e : m.encodings()) report.rows.push_back({PolicyKind::Single, evaluate_policy(single_policy(e), m, features, instances, opt)});
  report.rows.push_back({PolicyKind::Oracle, evaluate_policy(oracle_policy_spec(), m, features, instances, opt)});
  for (const auto& p : learned) report.rows.push_back({PolicyKind::Learned, evaluate_policy(p, m, features, instances, opt)});
  return report;
}

// Selector solved% over oracle solved%; nullopt when the oracle solved nothing.
inline std::optional<double> oracle_gap(const Metrics& selector, const Metrics& oracle) {
  if (oracle.solved_pct <= 0.0) return std::nullopt;
  return selector.solved_pct / oracle.solved_pct;
}

inline std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

// "label, solved%, avg, wins" with one decimal; absent values print as "-".
inline std::string summary_row(const Metrics& m) {
  return m.policy + ", " + fixed(m.solved_pct, 1) + ", " + (m.avg_solved_runtime_s ? fixed(*m.avg_solved_runtime_s, 1) : "-") + ", " +
         (m.wins ? std::to_string(*m.wins) : "-");
}

// Reads rows in summary_row's format, e.g. published per-encoding results.
inline SelectionReport import_summary(const std::string& text) {
  SelectionReport report;
  std::size_t line_no = 0;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    line = trim_cr(line);
    if (line.empty() || line[0] == '#') continue;
    auto parts = split(line, ',');
    if (parts.size() != 4) throw LoadError("summary line " + std::to_string(line_no) + ": expected 4 fields");
    for (auto& p : parts) {
      auto b = p.find_first_not_of(' ');
      auto e = p.find_last_not_of(' ');
      p = b == std::string::npos ? "" : p.substr(b, e - b + 1);
    }
    ReportRow row;
    row.metrics.policy = parts[0];
    row.kind = parts[0] == "Oracle" ? PolicyKind::Oracle : parts[0].rfind("Encoding ", 0) == 0 ? PolicyKind::Single : PolicyKind::Learned;
    double v = 0.0;
    if (!parse_finite(parts[1], v) || v < 0 || v > 100) throw LoadError("summary line " + std::to_string(line_no) + ": bad solved percentage");
    row.metrics.solved_pct = v;
    if (parts[2] != "-") {
      if (!parse_finite(parts[2], v)) throw LoadError("summary line " + std::to_string(line_no) + ": bad average runtime");
      row.metrics.avg_solved_runtime_s = v;
    }
    if (parts[3] != "-") {
      if (!parse_finite(parts[3], v) || v < 0 || v != std::floor(v)) throw LoadError("summary line " + std::to_string(line_no) + ": bad wins count");
      row.metrics.wins = static_cast<std::size_t>(v);
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

inline std::string report_to_text(const SelectionReport& report) {
  const std::vector<std::string> header{"Policy", "Solved%", "AvgSolved(s)", "AvgInclFeat(s)", "Wins", "OracleRatio"};
  std::vector<std::vector<std::string>> cells{header};
  const Metrics* oracle = report.oracle();
  for (const auto& r : report.rows) {
    const auto& m = r.metrics;
    std::string ratio = "-";
    if (oracle && r.kind == PolicyKind::Learned) {
      if (auto g = oracle_gap(m, *oracle)) ratio = fixed(*g, 3);
    }
    cells.push_back({m.policy, fixed(m.solved_pct, 1), m.avg_solved_runtime_s ? fixed(*m.avg_solved_runtime_s, 1) : "-",
                     m.avg_with_features_s ? fixed(*m.avg_with_features_s, 1) : "-", m.wins ? std::to_string(*m.wins) : "-", ratio});
  }
  std::vector<std::size_t> width(header.size(), 0);
  for (const auto& row : cells) {
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  }
  std::string out;
  for (const auto& row : cells) {
    std::string line;
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c == 0) {
        line += row[c] + std::string(width[c] - row[c].size(), ' ');
      } else {
        line += "  " + std::string(width[c] - row[c].size(), ' ') + row[c];
      }
    }
    out += line + "\n";
  }
  if (!report.rows.empty()) out += "instances: " + std::to_string(report.rows.front().metrics.n_instances) + "\n";
  return out;
}

inline nlohmann::json metrics_to_json(const Metrics& m) {
  nlohmann::json j;
  j["policy"] = m.policy;
  j["n_instances"] = m.n_instances;
  j["solved"] = m.solved;
  j["solved_pct"] = m.solved_pct;
  j["avg_solved_runtime_s"] = m.avg_solved_runtime_s ? nlohmann::json(*m.avg_solved_runtime_s) : nlohmann::json(nullptr);
  j["avg_with_features_s"] = m.avg_with_features_s ? nlohmann::json(*m.avg_with_features_s) : nlohmann::json(nullptr);
  j["wins"] = m.wins ? nlohmann::json(*m.wins) : nlohmann::json(nullptr);
  return j;
}

inline nlohmann::json report_to_json(const SelectionReport& report) {
  nlohmann::json j;
  auto rows = nlohmann::json::array();
  const Metrics* oracle = report.oracle();
  for (const auto& r : report.rows) {
    auto row = metrics_to_json(r.metrics);
    row["kind"] = to_string(r.kind);
    if (oracle && r.kind == PolicyKind::Learned) {
      auto g = oracle_gap(r.metrics, *oracle);
      row["oracle_ratio"] = g ? nlohmann::json(*g) : nlohmann::json(nullptr);
    }
    rows.push_back(row);
  }
  j["policies"] = rows;
  j["config"] = report.config;
  return j;
}

inline PolicyKind parse_policy_kind(const std::string& s) {
  if (s == "single") return PolicyKind::Single;
  if (s == "learned") return PolicyKind::Learned;
  if (s == "oracle") return PolicyKind::Oracle;
  throw LoadError("unknown policy kind '" + s + "'");
}

// Inverse of report_to_json; the derived oracle_ratio field is ignored.
inline SelectionReport report_from_json(const nlohmann::json& j) {
  try {
    SelectionReport report;
    for (const auto& row : j.at("policies")) {
      Metrics m;
      m.policy = row.at("policy").get<std::string>();
      m.n_instances = row.at("n_instances").get<std::size_t>();
      m.solved = row.at("solved").get<std::size_t>();
      m.solved_pct = row.at("solved_pct").get<double>();
      if (!row.at("avg_solved_runtime_s").is_null()) m.avg_solved_runtime_s = row["avg_solved_runtime_s"].get<double>();
      if (!row.at("avg_with_features_s").is_null()) m.avg_with_features_s = row["avg_with_features_s"].get<double>();
      if (!row.at("wins").is_null()) m.wins = row["wins"].get<std::size_t>();
      report.rows.push_back({parse_policy_kind(row.at("kind").get<std::string>()), std::move(m)});
    }
    report.config = j.value("config", nlohmann::json::object());
    return report;
  } catch (const nlohmann::json::exception& ex) {
    throw LoadError(std::string("report: ") + ex.what());
  }
}

}  // namespace encsel
