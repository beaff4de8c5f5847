#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "encsel/ml/dataset.hpp"

namespace encsel::ml {

struct TreeNode {
  std::int32_t feature = -1;  // -1 marks a leaf
  double threshold = 0.0;     // x[feature] <= threshold goes left
  std::int32_t left = -1;
  std::int32_t right = -1;
  double value = 0.0;  // mean target of the training rows reaching the node

  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

struct RegressionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  double predict(std::span<const double> x) const {
    std::size_t i = 0;
    while (nodes[i].feature >= 0) {
      const auto& n = nodes[i];
      i = static_cast<std::size_t>(x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right);
    }
    return nodes[i].value;
  }

  std::size_t depth() const {
    std::vector<std::pair<std::size_t, std::size_t>> stack{{0, 0}};
    std::size_t best = 0;
    while (!stack.empty()) {
      auto [i, d] = stack.back();
      stack.pop_back();
      best = std::max(best, d);
      if (nodes[i].feature >= 0) {
        stack.push_back({static_cast<std::size_t>(nodes[i].left), d + 1});
        stack.push_back({static_cast<std::size_t>(nodes[i].right), d + 1});
      }
    }
    return best;
  }

  friend bool operator==(const RegressionTree&, const RegressionTree&) = default;
};

struct TreeParams {
  std::optional<std::size_t> max_depth;  // nullopt = unlimited
  std::size_t min_leaf = 1;
  // Features considered per split; nullopt = all. Sampled afresh at every split.
  std::optional<std::size_t> mtry;
};

namespace detail {

// CART growth by exhaustive search over midpoints between consecutive
// distinct values. A candidate must beat the best so far by more than a
// rounding tolerance, so ties keep the lower feature index, then the lower
// threshold.
class TreeBuilder {
 public:
  TreeBuilder(const Matrix& x, std::span<const double> y, const TreeParams& params, std::mt19937_64& rng)
      : x_(x), y_(y), params_(params), rng_(rng), features_(x.cols()) {
    std::iota(features_.begin(), features_.end(), std::size_t{0});
  }

  RegressionTree build(std::vector<std::size_t> rows) {
    RegressionTree tree;
    tree.nodes.emplace_back();
    grow(tree, 0, rows, 0);
    return tree;
  }

 private:
  struct Split {
    std::size_t feature = 0;
    double threshold = 0.0;
    double sse = 0.0;
  };

  void grow(RegressionTree& tree, std::size_t node, std::vector<std::size_t>& rows, std::size_t depth) {
    double sum = 0.0;
    for (std::size_t r : rows) sum += y_[r];
    tree.nodes[node].value = sum / static_cast<double>(rows.size());

    const bool depth_reached = params_.max_depth && depth >= *params_.max_depth;
    const bool too_small = rows.size() < 2 * params_.min_leaf;
    const bool pure = std::all_of(rows.begin(), rows.end(), [&](std::size_t r) { return y_[r] == y_[rows.front()]; });
    if (depth_reached || too_small || pure) return;

    auto split = best_split(rows);
    if (!split) return;

    std::vector<std::size_t> left, right;
    for (std::size_t r : rows) (x_(r, split->feature) <= split->threshold ? left : right).push_back(r);

    tree.nodes[node].feature = static_cast<std::int32_t>(split->feature);
    tree.nodes[node].threshold = split->threshold;
    std::size_t l = tree.nodes.size();
    tree.nodes.emplace_back();
    std::size_t rgt = tree.nodes.size();
    tree.nodes.emplace_back();
    tree.nodes[node].left = static_cast<std::int32_t>(l);
    tree.nodes[node].right = static_cast<std::int32_t>(rgt);
    grow(tree, l, left, depth + 1);
    grow(tree, rgt, right, depth + 1);
  }

  std::vector<std::size_t> candidate_features() {
    const std::size_t p = x_.cols();
    if (!params_.mtry || *params_.mtry >= p) return features_;
    std::vector<std::size_t> chosen;
    std::sample(features_.begin(), features_.end(), std::back_inserter(chosen), *params_.mtry, rng_);
    std::sort(chosen.begin(), chosen.end());
    return chosen;
  }

  std::optional<Split> best_split(const std::vector<std::size_t>& rows) {
    const std::size_t n = rows.size();
    double total = 0.0, total_sq = 0.0;
    for (std::size_t r : rows) {
      total += y_[r];
      total_sq += y_[r] * y_[r];
    }
    const double tolerance = 1e-12 * std::max(1.0, total_sq);

    std::optional<Split> best;
    std::vector<std::size_t> order(rows);
    for (std::size_t f : candidate_features()) {
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x_(a, f) < x_(b, f); });
      double left_sum = 0.0, left_sq = 0.0;
      for (std::size_t i = 0; i + 1 < n; ++i) {
        const double yi = y_[order[i]];
        left_sum += yi;
        left_sq += yi * yi;
        const std::size_t nl = i + 1, nr = n - nl;
        const double xa = x_(order[i], f), xb = x_(order[i + 1], f);
        if (!(xa < xb) || nl < params_.min_leaf || nr < params_.min_leaf) continue;
        const double right_sum = total - left_sum, right_sq = total_sq - left_sq;
        const double sse = (left_sq - left_sum * left_sum / static_cast<double>(nl)) +
                           (right_sq - right_sum * right_sum / static_cast<double>(nr));
        if (!best || sse < best->sse - tolerance) {
          double threshold = xa + (xb - xa) / 2.0;
          if (!(threshold < xb)) threshold = xa;
          best = Split{f, threshold, sse};
        }
      }
    }
    return best;
  }

  const Matrix& x_;
  std::span<const double> y_;
  TreeParams params_;
  std::mt19937_64& rng_;
  std::vector<std::size_t> features_;
};

}  // namespace detail

// Grows one tree on `rows` (all rows when empty; duplicates allowed).
inline RegressionTree tree_fit(const Matrix& x, std::span<const double> y, const TreeParams& params, std::uint64_t seed,
                               std::vector<std::size_t> rows = {}) {
  if (x.rows() == 0 || x.rows() != y.size()) throw PreconditionError("tree_fit needs at least one row and matching targets");
  if (params.min_leaf < 1) throw PreconditionError("tree min_leaf must be at least 1");
  if (rows.empty()) {
    rows.resize(x.rows());
    std::iota(rows.begin(), rows.end(), std::size_t{0});
  }
  std::mt19937_64 rng(seed);
  return detail::TreeBuilder(x, y, params, rng).build(std::move(rows));
}

}  // namespace encsel::ml
