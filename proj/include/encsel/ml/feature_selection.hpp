#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "encsel/ml/cv.hpp"

namespace encsel::ml {

struct SelectionStep {
  std::string phase;  // "feature" or "group"
  std::string group;
  std::vector<std::string> candidate;  // features added in this step
  double score_before = 0.0;
  double score_after = 0.0;
  bool accepted = false;
};

struct FeatureSelectionResult {
  std::vector<std::string> selected;  // in column order
  std::vector<SelectionStep> log;
};

struct FeatureSelectionOptions {
  ModelKind kind = ModelKind::Tree;
  Hyperparams params;
  std::size_t max_batch = 3;  // batch sizes are drawn uniformly from 1..max_batch
  std::uint64_t seed = 0;
};

namespace detail {

// Mean CV RMSE over the encodings' targets using only `cols`; the empty set
// scores the training-mean baseline.
inline double selection_score(const Matrix& x, const std::vector<std::vector<double>>& targets, const std::vector<std::size_t>& cols,
                              const Folds& folds, const FeatureSelectionOptions& opt) {
  double total = 0.0;
  if (cols.empty()) {
    for (const auto& y : targets) total += cv_rmse_mean_baseline(y, folds);
  } else {
    std::vector<std::size_t> sorted(cols);
    std::sort(sorted.begin(), sorted.end());
    Matrix sub = x.select_cols(sorted);
    Hyperparams h = opt.params;
    h.forest_mtry = std::min(std::max<std::size_t>(h.forest_mtry, 1), sorted.size());
    for (const auto& y : targets) total += cv_rmse(opt.kind, sub, y, h, folds);
  }
  return total / static_cast<double>(targets.size());
}

}  // namespace detail

// Two-phase greedy selection. Phase 1, per group: starting from the empty
// set, add seeded batches of the group's features in seeded order and keep a
// batch only if it strictly lowers the score. Phase 2: the same accept rule
// applied to each group's surviving features as a unit.
inline FeatureSelectionResult greedy_feature_selection(const Matrix& x, const std::vector<std::vector<double>>& targets,
                                                       const std::vector<std::string>& names, const std::vector<std::string>& groups,
                                                       const Folds& folds, const FeatureSelectionOptions& opt) {
  if (names.size() != x.cols() || groups.size() != x.cols()) throw PreconditionError("feature selection: names/groups do not match columns");
  if (targets.empty()) throw PreconditionError("feature selection needs at least one target vector");
  if (opt.max_batch < 1) throw PreconditionError("feature selection batch size must be at least 1");
  FeatureSelectionResult result;
  if (x.cols() == 0) return result;

  std::mt19937_64 rng(opt.seed);
  std::vector<std::string> group_order;
  for (const auto& g : groups) {
    if (std::find(group_order.begin(), group_order.end(), g) == group_order.end()) group_order.push_back(g);
  }
  auto labels = [&](const std::vector<std::size_t>& cols) {
    std::vector<std::string> out;
    for (std::size_t c : cols) out.push_back(names[c]);
    return out;
  };

  const double empty_score = detail::selection_score(x, targets, {}, folds, opt);
  std::vector<std::vector<std::size_t>> survivors;
  for (const auto& g : group_order) {
    std::vector<std::size_t> members;
    for (std::size_t c = 0; c < groups.size(); ++c) {
      if (groups[c] == g) members.push_back(c);
    }
    std::shuffle(members.begin(), members.end(), rng);
    std::vector<std::size_t> kept;
    double current = empty_score;
    for (std::size_t pos = 0; pos < members.size();) {
      std::uniform_int_distribution<std::size_t> batch_size(1, opt.max_batch);
      std::size_t b = std::min(batch_size(rng), members.size() - pos);
      std::vector<std::size_t> batch(members.begin() + static_cast<std::ptrdiff_t>(pos), members.begin() + static_cast<std::ptrdiff_t>(pos + b));
      pos += b;
      std::vector<std::size_t> candidate = kept;
      candidate.insert(candidate.end(), batch.begin(), batch.end());
      double score = detail::selection_score(x, targets, candidate, folds, opt);
      bool accept = score < current;
      result.log.push_back({"feature", g, labels(batch), current, score, accept});
      if (accept) {
        kept = std::move(candidate);
        current = score;
      }
    }
    survivors.push_back(std::move(kept));
  }

  std::vector<std::size_t> order(group_order.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::size_t> chosen;
  double current = empty_score;
  for (std::size_t gi : order) {
    if (survivors[gi].empty()) continue;
    std::vector<std::size_t> candidate = chosen;
    candidate.insert(candidate.end(), survivors[gi].begin(), survivors[gi].end());
    double score = detail::selection_score(x, targets, candidate, folds, opt);
    bool accept = score < current;
    result.log.push_back({"group", group_order[gi], labels(survivors[gi]), current, score, accept});
    if (accept) {
      chosen = std::move(candidate);
      current = score;
    }
  }
  std::sort(chosen.begin(), chosen.end());
  result.selected = labels(chosen);
  return result;
}

}  // namespace encsel::ml
