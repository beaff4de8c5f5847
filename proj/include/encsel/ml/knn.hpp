#pragma once

#include <algorithm>
#include <span>
#include <utility>
#include <vector>

#include "encsel/ml/dataset.hpp"

namespace encsel::ml {

// Stores the (already scaled) training set.
struct KnnModel {
  std::size_t k = 1;
  Matrix train;
  std::vector<double> targets;

  // Mean target of the k nearest rows by Euclidean distance; equal distances
  // are ordered by training-row index.
  double predict(std::span<const double> x) const {
    std::vector<std::pair<double, std::size_t>> dist(train.rows());
    for (std::size_t r = 0; r < train.rows(); ++r) {
      auto row = train.row(r);
      double d = 0.0;
      for (std::size_t j = 0; j < row.size(); ++j) d += (row[j] - x[j]) * (row[j] - x[j]);
      dist[r] = {d, r};
    }
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
    double sum = 0.0;
    for (std::size_t i = 0; i < k; ++i) sum += targets[dist[i].second];
    return sum / static_cast<double>(k);
  }

  friend bool operator==(const KnnModel&, const KnnModel&) = default;
};

inline KnnModel knn_fit(const Matrix& x, std::span<const double> y, std::size_t k) {
  if (k < 1) throw PreconditionError("knn: k must be at least 1");
  if (k > x.rows()) throw PreconditionError("knn: k = " + std::to_string(k) + " exceeds " + std::to_string(x.rows()) + " training rows");
  return KnnModel{k, x, std::vector<double>(y.begin(), y.end())};
}

}  // namespace encsel::ml
