#pragma once

#include <algorithm>
#include <filesystem>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "encsel/encoding_id.hpp"
#include "encsel/util.hpp"

namespace encsel {

inline constexpr double kDefaultCutoffSeconds = 200.0;

enum class RunStatus { SAT, UNSAT, TIMEOUT, ERROR };

inline std::string to_string(RunStatus s) {
  switch (s) {
    case RunStatus::SAT: return "SAT";
    case RunStatus::UNSAT: return "UNSAT";
    case RunStatus::TIMEOUT: return "TIMEOUT";
    case RunStatus::ERROR: return "ERROR";
  }
  return "ERROR";
}

inline RunStatus parse_status(const std::string& text) {
  if (text == "SAT") return RunStatus::SAT;
  if (text == "UNSAT") return RunStatus::UNSAT;
  if (text == "TIMEOUT") return RunStatus::TIMEOUT;
  if (text == "ERROR") return RunStatus::ERROR;
  throw LoadError("unknown run status '" + text + "'");
}

inline bool is_solved(RunStatus s) { return s == RunStatus::SAT || s == RunStatus::UNSAT; }

struct RunOutcome {
  RunStatus status = RunStatus::ERROR;
  double runtime_s = 0.0;
  std::string detail;  // diagnostics for ERROR outcomes; not persisted

  bool solved() const { return is_solved(status); }
};

// Outcome with the timing invariants enforced: timeouts report exactly the
// cutoff, and a solve that reached the cutoff counts as a timeout.
inline RunOutcome make_outcome(RunStatus status, double runtime_s, double cutoff_s, std::string detail = {}) {
  if (status == RunStatus::TIMEOUT || (is_solved(status) && runtime_s >= cutoff_s)) {
    return {RunStatus::TIMEOUT, cutoff_s, std::move(detail)};
  }
  return {status, runtime_s, std::move(detail)};
}

// Timed-out cells get cutoff * (1 + k), k = number of timeouts in the row.
// Other cells keep their measured runtime; ERROR cells are penalized like
// timeouts but do not count toward k.
inline std::vector<double> penalized_runtime(const std::vector<RunOutcome>& row, double cutoff_s) {
  std::size_t k = static_cast<std::size_t>(
      std::count_if(row.begin(), row.end(), [](const RunOutcome& o) { return o.status == RunStatus::TIMEOUT; }));
  const double penalty = cutoff_s * static_cast<double>(1 + k);
  std::vector<double> out;
  out.reserve(row.size());
  for (const auto& o : row) out.push_back(o.solved() ? o.runtime_s : penalty);
  return out;
}

// Run outcomes keyed by (instance, encoding). Rows keep insertion order;
// columns are the encodings the matrix was created with, ascending.
class PerformanceMatrix {
 public:
  PerformanceMatrix() = default;
  PerformanceMatrix(double cutoff_s, std::vector<EncodingId> encodings) : cutoff_s_(cutoff_s), encodings_(std::move(encodings)) {
    std::sort(encodings_.begin(), encodings_.end());
    encodings_.erase(std::unique(encodings_.begin(), encodings_.end()), encodings_.end());
    if (cutoff_s_ <= 0) throw PreconditionError("cutoff must be positive");
  }

  double cutoff_s() const noexcept { return cutoff_s_; }
  const std::vector<EncodingId>& encodings() const noexcept { return encodings_; }
  const std::vector<std::string>& instances() const noexcept { return instances_; }
  std::size_t instance_count() const noexcept { return instances_.size(); }

  std::size_t add_instance(const std::string& id) {
    validate_identifier(id);
    auto [it, inserted] = index_.emplace(id, instances_.size());
    if (inserted) {
      instances_.push_back(id);
      cells_.emplace_back(encodings_.size());
      penalized_.emplace_back(encodings_.size());
    }
    return it->second;
  }

  bool has_instance(const std::string& id) const { return index_.count(id) > 0; }

  std::size_t row_of(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw DataError("instance '" + id + "' is not in the performance matrix");
    return it->second;
  }

  std::size_t column_of(EncodingId enc) const {
    auto it = std::lower_bound(encodings_.begin(), encodings_.end(), enc);
    if (it == encodings_.end() || *it != enc) throw DataError(to_string(enc) + " is not a column of the matrix");
    return static_cast<std::size_t>(it - encodings_.begin());
  }

  // Stores an outcome; when the row becomes complete its penalized values are computed.
  void set(const std::string& instance, EncodingId enc, RunOutcome outcome) {
    std::size_t r = add_instance(instance);
    cells_[r][column_of(enc)] = std::move(outcome);
    refresh_penalized(r);
  }

  // Stores an outcome together with an explicit penalized value (used when loading).
  void set_with_penalized(const std::string& instance, EncodingId enc, RunOutcome outcome, double penalized) {
    std::size_t r = add_instance(instance);
    std::size_t c = column_of(enc);
    cells_[r][c] = std::move(outcome);
    penalized_[r][c] = penalized;
  }

  const std::optional<RunOutcome>& cell(std::size_t row, std::size_t col) const { return cells_.at(row).at(col); }
  const RunOutcome& outcome(std::size_t row, std::size_t col) const {
    const auto& c = cell(row, col);
    if (!c) throw DataError("missing cell (" + instances_[row] + ", " + to_string(encodings_[col]) + ")");
    return *c;
  }
  const RunOutcome& outcome(const std::string& instance, EncodingId enc) const { return outcome(row_of(instance), column_of(enc)); }

  double penalized(std::size_t row, std::size_t col) const {
    const auto& p = penalized_.at(row).at(col);
    if (!p) throw DataError("row '" + instances_[row] + "' is incomplete; no penalized runtime");
    return *p;
  }

  bool row_complete(std::size_t row) const {
    return std::all_of(cells_[row].begin(), cells_[row].end(), [](const auto& c) { return c.has_value(); });
  }

  std::vector<std::string> missing_pairs() const {
    std::vector<std::string> missing;
    for (std::size_t r = 0; r < instances_.size(); ++r) {
      for (std::size_t c = 0; c < encodings_.size(); ++c) {
        if (!cells_[r][c]) missing.push_back("(" + instances_[r] + ", " + std::to_string(encodings_[c].value()) + ")");
      }
    }
    return missing;
  }

  bool complete() const { return missing_pairs().empty(); }

  // Throws DataError listing every missing (instance, encoding) pair.
  void require_complete() const {
    auto missing = missing_pairs();
    if (missing.empty()) return;
    std::string list;
    for (std::size_t i = 0; i < missing.size() && i < 20; ++i) list += (i ? " " : "") + missing[i];
    if (missing.size() > 20) list += " ...";
    throw DataError("performance matrix incomplete, " + std::to_string(missing.size()) + " missing pairs: " + list);
  }

  std::vector<RunOutcome> row(std::size_t r) const {
    std::vector<RunOutcome> out;
    for (std::size_t c = 0; c < encodings_.size(); ++c) out.push_back(outcome(r, c));
    return out;
  }

  friend bool operator==(const PerformanceMatrix& a, const PerformanceMatrix& b) {
    if (a.cutoff_s_ != b.cutoff_s_ || a.encodings_ != b.encodings_ || a.instances_ != b.instances_) return false;
    for (std::size_t r = 0; r < a.instances_.size(); ++r) {
      for (std::size_t c = 0; c < a.encodings_.size(); ++c) {
        const auto& x = a.cells_[r][c];
        const auto& y = b.cells_[r][c];
        if (x.has_value() != y.has_value()) return false;
        if (x && (x->status != y->status || x->runtime_s != y->runtime_s)) return false;
        if (a.penalized_[r][c] != b.penalized_[r][c]) return false;
      }
    }
    return true;
  }

 private:
  void refresh_penalized(std::size_t r) {
    if (!row_complete(r)) return;
    auto values = penalized_runtime(row(r), cutoff_s_);
    for (std::size_t c = 0; c < values.size(); ++c) penalized_[r][c] = values[c];
  }

  double cutoff_s_ = kDefaultCutoffSeconds;
  std::vector<EncodingId> encodings_;
  std::vector<std::string> instances_;
  std::map<std::string, std::size_t> index_;
  std::vector<std::vector<std::optional<RunOutcome>>> cells_;
  std::vector<std::vector<std::optional<double>>> penalized_;
};

inline const std::vector<std::string>& performance_csv_columns() {
  static const std::vector<std::string> columns{"instance_id", "encoding_id", "status", "runtime_s", "penalized_s", "cutoff_s"};
  return columns;
}

// performance.csv: one line per filled cell, rows in matrix order.
inline std::string matrix_to_csv(const PerformanceMatrix& m) {
  std::string out = join(performance_csv_columns(), ",") + "\n";
  for (std::size_t r = 0; r < m.instance_count(); ++r) {
    for (std::size_t c = 0; c < m.encodings().size(); ++c) {
      const auto& cell = m.cell(r, c);
      if (!cell) continue;
      out += m.instances()[r] + "," + std::to_string(m.encodings()[c].value()) + "," + to_string(cell->status) + "," +
             format_decimal(cell->runtime_s) + "," + format_decimal(m.penalized(r, c)) + "," + format_decimal(m.cutoff_s()) +
             "\n";
    }
  }
  return out;
}

// Parses performance.csv. An empty body yields an empty matrix over all six
// encodings with the default cutoff. Otherwise the column set is the set of
// encodings present in the file.
inline PerformanceMatrix matrix_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw LoadError("performance file is empty; expected a header");
  auto header = split(trim_cr(line));
  const auto& expected = performance_csv_columns();
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (i >= header.size() || header[i] != expected[i]) throw LoadError("performance file: missing or misplaced column '" + expected[i] + "'");
  }
  if (header.size() != expected.size()) throw LoadError("performance file: unexpected column '" + header[expected.size()] + "'");

  struct Entry {
    std::string instance;
    int enc;
    RunOutcome outcome;
    double penalized;
  };
  std::vector<Entry> entries;
  std::optional<double> cutoff;
  std::vector<EncodingId> encs;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim_cr(line);
    if (line.empty()) continue;
    auto f = split(line);
    if (f.size() != expected.size()) throw LoadError("performance file line " + std::to_string(line_no) + ": expected 6 fields");
    double runtime = 0, penalized = 0, cut = 0, enc_value = 0;
    if (!parse_finite(f[1], enc_value) || !parse_finite(f[3], runtime) || !parse_finite(f[4], penalized) || !parse_finite(f[5], cut)) {
      throw LoadError("performance file line " + std::to_string(line_no) + ": malformed number");
    }
    if (cutoff && *cutoff != cut) throw LoadError("performance file line " + std::to_string(line_no) + ": inconsistent cutoff_s");
    cutoff = cut;
    EncodingId enc(static_cast<int>(enc_value));
    if (std::find(encs.begin(), encs.end(), enc) == encs.end()) encs.push_back(enc);
    entries.push_back({f[0], enc.value(), RunOutcome{parse_status(f[2]), runtime, {}}, penalized});
  }
  if (entries.empty()) {
    auto all = all_encoding_ids();
    return PerformanceMatrix(kDefaultCutoffSeconds, {all.begin(), all.end()});
  }
  PerformanceMatrix m(*cutoff, encs);
  for (auto& e : entries) m.set_with_penalized(e.instance, EncodingId(e.enc), std::move(e.outcome), e.penalized);
  return m;
}

inline void save_matrix(const PerformanceMatrix& m, const std::filesystem::path& path) { write_text(path, matrix_to_csv(m)); }
inline PerformanceMatrix load_matrix(const std::filesystem::path& path) { return matrix_from_csv(read_text(path)); }

}  // namespace encsel
