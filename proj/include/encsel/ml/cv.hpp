#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include "encsel/ml/model.hpp"

namespace encsel::ml {

using Folds = std::vector<std::vector<std::size_t>>;

// Seeded shuffle of 0..n-1 cut into k contiguous folds; the first n % k
// folds hold one extra index.
inline Folds kfold_split(std::size_t n, std::size_t k, std::uint64_t seed) {
  if (k < 2 || k > n) throw PreconditionError("kfold: need 2 <= k <= n (k=" + std::to_string(k) + ", n=" + std::to_string(n) + ")");
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  Folds folds(k);
  std::size_t pos = 0;
  for (std::size_t f = 0; f < k; ++f) {
    std::size_t size = n / k + (f < n % k ? 1 : 0);
    folds[f].assign(idx.begin() + static_cast<std::ptrdiff_t>(pos), idx.begin() + static_cast<std::ptrdiff_t>(pos + size));
    pos += size;
  }
  return folds;
}

// Every index outside fold `f`, ascending.
inline std::vector<std::size_t> training_indices(const Folds& folds, std::size_t f) {
  std::vector<std::size_t> train;
  for (std::size_t g = 0; g < folds.size(); ++g) {
    if (g != f) train.insert(train.end(), folds[g].begin(), folds[g].end());
  }
  std::sort(train.begin(), train.end());
  return train;
}

inline bool feasible(ModelKind kind, const Hyperparams& h, std::size_t train_rows) {
  return kind != ModelKind::Knn || h.knn_k <= train_rows;
}

// Mean over folds of the held-out RMSE. Infinite when a fold cannot be fit.
inline double cv_rmse(ModelKind kind, const Matrix& x, const std::vector<double>& y, const Hyperparams& h, const Folds& folds) {
  double total = 0.0;
  for (std::size_t f = 0; f < folds.size(); ++f) {
    auto train = training_indices(folds, f);
    if (!feasible(kind, h, train.size())) return std::numeric_limits<double>::infinity();
    auto model = fit_model(kind, x.select_rows(train), pick(y, train), h);
    std::vector<double> pred, truth;
    for (std::size_t i : folds[f]) {
      pred.push_back(model.predict(x.row(i)));
      truth.push_back(y[i]);
    }
    total += rmse(pred, truth);
  }
  return total / static_cast<double>(folds.size());
}

// Held-out RMSE of the training-fold mean (the featureless baseline).
inline double cv_rmse_mean_baseline(const std::vector<double>& y, const Folds& folds) {
  double total = 0.0;
  for (std::size_t f = 0; f < folds.size(); ++f) {
    auto train = training_indices(folds, f);
    double mean = 0.0;
    for (std::size_t i : train) mean += y[i];
    mean /= static_cast<double>(train.size());
    std::vector<double> pred(folds[f].size(), mean), truth;
    for (std::size_t i : folds[f]) truth.push_back(y[i]);
    total += rmse(pred, truth);
  }
  return total / static_cast<double>(folds.size());
}

struct GridSearchResult {
  Hyperparams best;
  std::size_t best_index = 0;
  std::vector<double> scores;  // per grid point, lower is better
};

// Minimizes mean CV RMSE over the grid; ties keep the earlier point.
inline GridSearchResult grid_search(const Matrix& x, const std::vector<double>& y, ModelKind kind, const std::vector<Hyperparams>& grid,
                                    const Folds& folds) {
  if (grid.empty()) throw PreconditionError("grid_search needs a nonempty grid");
  GridSearchResult result;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double s = cv_rmse(kind, x, y, grid[i], folds);
    result.scores.push_back(s);
    if (i == 0 || s < result.scores[result.best_index]) result.best_index = i;
  }
  result.best = grid[result.best_index];
  return result;
}

inline GridSearchResult grid_search(const Dataset& data, ModelKind kind, const std::vector<Hyperparams>& grid, const Folds& folds) {
  return grid_search(data.rows, data.targets, kind, grid, folds);
}

// Mean over folds of the per-instance gap between the penalized runtime of
// the encoding picked by the induced selector and the row minimum.
// `targets[e]` trains encoding e's model; `seconds[e]` scores the picks.
inline double cv_selection_gap(ModelKind kind, const Matrix& x, const std::vector<std::vector<double>>& targets,
                               const std::vector<std::vector<double>>& seconds, const Hyperparams& h, const Folds& folds) {
  double total = 0.0;
  for (std::size_t f = 0; f < folds.size(); ++f) {
    auto train = training_indices(folds, f);
    if (!feasible(kind, h, train.size())) return std::numeric_limits<double>::infinity();
    Matrix xt = x.select_rows(train);
    std::vector<FittedModel> models;
    for (const auto& y : targets) models.push_back(fit_model(kind, xt, pick(y, train), h));
    double gap = 0.0;
    for (std::size_t i : folds[f]) {
      std::size_t best = 0;
      double best_pred = 0.0;
      double row_min = std::numeric_limits<double>::infinity();
      for (std::size_t e = 0; e < models.size(); ++e) {
        double p = models[e].predict(x.row(i));
        if (e == 0 || p < best_pred) {
          best_pred = p;
          best = e;
        }
        row_min = std::min(row_min, seconds[e][i]);
      }
      gap += seconds[best][i] - row_min;
    }
    total += gap / static_cast<double>(folds[f].size());
  }
  return total / static_cast<double>(folds.size());
}

inline GridSearchResult grid_search_selection_gap(const Matrix& x, const std::vector<std::vector<double>>& targets,
                                                  const std::vector<std::vector<double>>& seconds, ModelKind kind,
                                                  const std::vector<Hyperparams>& grid, const Folds& folds) {
  if (grid.empty()) throw PreconditionError("grid_search needs a nonempty grid");
  GridSearchResult result;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double s = cv_selection_gap(kind, x, targets, seconds, grid[i], folds);
    result.scores.push_back(s);
    if (i == 0 || s < result.scores[result.best_index]) result.best_index = i;
  }
  result.best = grid[result.best_index];
  return result;
}

// knn_k in {1,3,5,7,9}; tree_max_depth in {4,6,8,12,unlimited} x
// tree_min_leaf in {1,3,5}; forest_trees in {50,100} x forest_mtry in
// {round(sqrt(p)), p/3} (at least 1, duplicates dropped).
inline std::vector<Hyperparams> default_grid(ModelKind kind, std::size_t feature_count, std::uint64_t seed) {
  std::vector<Hyperparams> grid;
  Hyperparams base;
  base.seed = seed;
  switch (kind) {
    case ModelKind::Knn:
      for (std::size_t k : {1, 3, 5, 7, 9}) {
        Hyperparams h = base;
        h.knn_k = k;
        grid.push_back(h);
      }
      break;
    case ModelKind::Tree:
      for (std::optional<std::size_t> d : {std::optional<std::size_t>(4), std::optional<std::size_t>(6), std::optional<std::size_t>(8),
                                           std::optional<std::size_t>(12), std::optional<std::size_t>()}) {
        for (std::size_t leaf : {1, 3, 5}) {
          Hyperparams h = base;
          h.tree_max_depth = d;
          h.tree_min_leaf = leaf;
          grid.push_back(h);
        }
      }
      break;
    case ModelKind::Forest: {
      const std::size_t p = std::max<std::size_t>(feature_count, 1);
      std::vector<std::size_t> mtries{std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(p))))),
                                      std::max<std::size_t>(1, p / 3)};
      if (mtries[0] == mtries[1]) mtries.pop_back();
      for (std::size_t trees : {50, 100}) {
        for (std::size_t m : mtries) {
          Hyperparams h = base;
          h.forest_trees = trees;
          h.forest_mtry = m;
          grid.push_back(h);
        }
      }
      break;
    }
  }
  return grid;
}

}  // namespace encsel::ml
