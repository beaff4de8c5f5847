#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "encsel/features.hpp"
#include "encsel/ml/cv.hpp"
#include "encsel/ml/runtime_model.hpp"
#include "encsel/performance.hpp"
#include "encsel/selection.hpp"

namespace encsel {

struct Split {
  std::vector<std::string> train;
  std::vector<std::string> test;
};

// Stratum label: the fastest solved encoding, or "unsolved".
inline std::string fastest_label(const PerformanceMatrix& m, std::size_t row) {
  std::optional<std::size_t> best;
  for (std::size_t c = 0; c < m.encodings().size(); ++c) {
    const auto& o = m.outcome(row, c);
    if (o.solved() && (!best || o.runtime_s < m.outcome(row, *best).runtime_s)) best = c;
  }
  return best ? std::to_string(m.encodings()[*best].value()) : std::string("unsolved");
}

// Seeded train/test split of the given instances. With `stratify`, each
// fastest-encoding stratum contributes its share of test rows; leftover test
// slots go to strata with the largest fractional share (ties by label).
inline Split train_test_split(const PerformanceMatrix& m, const std::vector<std::string>& instances, double test_fraction, std::uint64_t seed,
                              bool stratify = true) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw PreconditionError("test fraction must lie strictly between 0 and 1");
  std::map<std::string, std::vector<std::string>> strata;
  for (const auto& id : instances) strata[stratify ? fastest_label(m, m.row_of(id)) : std::string("all")].push_back(id);
  std::mt19937_64 rng(seed);
  const auto total_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(instances.size())));
  std::vector<std::pair<std::string, std::size_t>> quota;
  std::vector<std::pair<double, std::string>> remainders;
  std::size_t assigned = 0;
  for (auto& [label, ids] : strata) {
    std::shuffle(ids.begin(), ids.end(), rng);
    double share = test_fraction * static_cast<double>(ids.size());
    auto q = static_cast<std::size_t>(std::floor(share));
    quota.emplace_back(label, q);
    remainders.emplace_back(share - static_cast<double>(q), label);
    assigned += q;
  }
  std::stable_sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t i = 0; assigned < total_test && i < remainders.size(); ++i, ++assigned) {
    for (auto& [label, q] : quota) {
      if (label == remainders[i].second) ++q;
    }
  }
  std::map<std::string, char> in_test;
  for (const auto& [label, q] : quota) {
    const auto& ids = strata[label];
    for (std::size_t i = 0; i < q && i < ids.size(); ++i) in_test[ids[i]] = 1;
  }
  Split s;
  for (const auto& id : instances) (in_test.count(id) ? s.test : s.train).push_back(id);
  return s;
}

inline std::string split_to_csv(const Split& s) {
  std::string out = "instance_id,part\n";
  for (const auto& id : s.train) out += id + ",train\n";
  for (const auto& id : s.test) out += id + ",test\n";
  return out;
}

inline Split split_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || trim_cr(line) != "instance_id,part") throw LoadError("split file: expected header instance_id,part");
  Split s;
  while (std::getline(in, line)) {
    line = trim_cr(line);
    if (line.empty()) continue;
    auto parts = split(line);
    if (parts.size() != 2 || (parts[1] != "train" && parts[1] != "test")) throw LoadError("split file: bad line '" + line + "'");
    (parts[1] == "train" ? s.train : s.test).push_back(parts[0]);
  }
  return s;
}

// Training rows for one encoding: penalized runtimes as targets, skipping
// ERROR cells.
inline ml::Dataset encoding_dataset(const PerformanceMatrix& m, const FeatureTable& features, const std::vector<std::string>& instances,
                                    EncodingId enc) {
  const std::size_t col = m.column_of(enc);
  std::vector<std::vector<double>> rows;
  ml::Dataset d;
  d.feature_names = features.names;
  for (const auto& id : instances) {
    std::size_t r = m.row_of(id);
    if (m.outcome(r, col).status == RunStatus::ERROR) continue;
    if (!features.has_row(id)) throw DataError("no feature row for training instance '" + id + "'");
    rows.push_back(features.rows[features.row_of(id)]);
    d.targets.push_back(m.penalized(r, col));
  }
  d.rows = ml::Matrix::from_rows(rows, features.names.size());
  d.validate();
  return d;
}

enum class CvObjective { Rmse, SelectionGap };

inline CvObjective parse_cv_objective(const std::string& s) {
  if (s == "rmse") return CvObjective::Rmse;
  if (s == "selection-gap") return CvObjective::SelectionGap;
  throw ValidationError("unknown CV objective '" + s + "' (expected rmse or selection-gap)");
}
inline std::string to_string(CvObjective o) { return o == CvObjective::Rmse ? "rmse" : "selection-gap"; }

struct TrainOptions {
  ml::ModelKind kind = ml::ModelKind::Tree;
  ml::TargetTransform transform = ml::TargetTransform::Log;
  CvObjective objective = CvObjective::Rmse;
  std::size_t folds = 10;
  std::uint64_t seed = 0;
  std::vector<ml::Hyperparams> grid;  // empty = default grid for the kind
};

struct EncodingTraining {
  EncodingId encoding{1};
  std::size_t rows = 0;
  ml::GridSearchResult search;
};

struct TrainResult {
  std::vector<ml::RuntimeModel> models;  // ascending encoding
  std::vector<EncodingTraining> details;
  std::vector<ml::Hyperparams> grid;
};

// Fits one runtime model per encoding, tuning hyperparameters by k-fold CV.
// Under the selection-gap objective one grid point is shared by all six
// models and rows with an ERROR cell are dropped so the encodings align.
inline TrainResult train_models(const PerformanceMatrix& m, const FeatureTable& features, const std::vector<std::string>& train_ids,
                                const TrainOptions& opt) {
  m.require_complete();
  TrainResult result;
  result.grid = opt.grid.empty() ? ml::default_grid(opt.kind, features.names.size(), opt.seed) : opt.grid;
  if (opt.objective == CvObjective::Rmse) {
    for (EncodingId e : m.encodings()) {
      auto data = encoding_dataset(m, features, train_ids, e);
      if (data.size() == 0) throw DataError("no usable training rows for " + to_string(e));
      auto y = ml::to_targets(opt.transform, data.targets);
      const std::size_t k = std::min(opt.folds, data.size());
      if (k < 2) throw DataError("too few training rows for cross-validation of " + to_string(e));
      auto folds = ml::kfold_split(data.size(), k, opt.seed);
      auto search = ml::grid_search(data.rows, y, opt.kind, result.grid, folds);
      result.models.push_back(ml::RuntimeModel{e, data.feature_names, opt.transform, ml::fit_model(opt.kind, data.rows, y, search.best)});
      result.details.push_back({e, data.size(), std::move(search)});
    }
    return result;
  }
  std::vector<std::string> aligned;
  for (const auto& id : train_ids) {
    std::size_t r = m.row_of(id);
    bool ok = true;
    for (std::size_t c = 0; c < m.encodings().size(); ++c) ok = ok && m.outcome(r, c).status != RunStatus::ERROR;
    if (ok) aligned.push_back(id);
  }
  std::vector<ml::Dataset> sets;
  std::vector<std::vector<double>> targets, seconds;
  for (EncodingId e : m.encodings()) {
    sets.push_back(encoding_dataset(m, features, aligned, e));
    targets.push_back(ml::to_targets(opt.transform, sets.back().targets));
    seconds.push_back(sets.back().targets);
  }
  const std::size_t k = std::min(opt.folds, aligned.size());
  if (k < 2) throw DataError("too few aligned training rows for cross-validation");
  auto folds = ml::kfold_split(aligned.size(), k, opt.seed);
  auto search = ml::grid_search_selection_gap(sets.front().rows, targets, seconds, opt.kind, result.grid, folds);
  for (std::size_t i = 0; i < sets.size(); ++i) {
    EncodingId e = m.encodings()[i];
    result.models.push_back(ml::RuntimeModel{e, sets[i].feature_names, opt.transform, ml::fit_model(opt.kind, sets[i].rows, targets[i], search.best)});
    result.details.push_back({e, aligned.size(), search});
  }
  return result;
}

}  // namespace encsel
