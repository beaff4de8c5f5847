#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "encsel/ml/tree.hpp"

namespace encsel::ml {

struct RandomForest {
  std::vector<RegressionTree> trees;
  std::vector<std::uint64_t> seeds;  // seeds[i] = seed + i

  double predict(std::span<const double> x) const {
    double sum = 0.0;
    for (const auto& t : trees) sum += t.predict(x);
    return sum / static_cast<double>(trees.size());
  }

  std::vector<double> tree_predictions(std::span<const double> x) const {
    std::vector<double> out;
    for (const auto& t : trees) out.push_back(t.predict(x));
    return out;
  }

  friend bool operator==(const RandomForest&, const RandomForest&) = default;
};

struct ForestParams {
  std::size_t trees = 100;
  std::size_t mtry = 1;
  std::size_t min_leaf = 1;
  bool bootstrap = true;  // false trains every tree on the full training set
};

// Tree i draws its bootstrap sample and its per-split feature samples from a
// generator seeded with seed + i, so trees are independent of training order.
inline RandomForest forest_fit(const Matrix& x, std::span<const double> y, const ForestParams& params, std::uint64_t seed) {
  if (params.trees < 1) throw PreconditionError("forest needs at least one tree");
  if (params.mtry < 1 || params.mtry > x.cols()) throw PreconditionError("forest mtry must be in 1..feature count");
  RandomForest forest;
  const std::size_t n = x.rows();
  for (std::size_t i = 0; i < params.trees; ++i) {
    const std::uint64_t tree_seed = seed + i;
    std::mt19937_64 rng(tree_seed);
    std::vector<std::size_t> rows(n);
    if (params.bootstrap) {
      std::uniform_int_distribution<std::size_t> draw(0, n - 1);
      for (auto& r : rows) r = draw(rng);
    } else {
      std::iota(rows.begin(), rows.end(), std::size_t{0});
    }
    TreeParams tp{std::nullopt, params.min_leaf, params.mtry};
    forest.trees.push_back(detail::TreeBuilder(x, y, tp, rng).build(std::move(rows)));
    forest.seeds.push_back(tree_seed);
  }
  return forest;
}

}  // namespace encsel::ml
