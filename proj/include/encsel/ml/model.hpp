#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "encsel/ml/forest.hpp"
#include "encsel/ml/knn.hpp"
#include "encsel/ml/scaler.hpp"
#include "encsel/ml/tree.hpp"

namespace encsel::ml {

enum class ModelKind { Knn, Tree, Forest };

inline std::string to_string(ModelKind k) {
  switch (k) {
    case ModelKind::Knn: return "knn";
    case ModelKind::Tree: return "tree";
    case ModelKind::Forest: return "forest";
  }
  return {};
}

inline ModelKind parse_model_kind(const std::string& s) {
  if (s == "knn") return ModelKind::Knn;
  if (s == "tree" || s == "dt") return ModelKind::Tree;
  if (s == "forest" || s == "rf") return ModelKind::Forest;
  throw ValidationError("unknown model kind '" + s + "' (expected knn, tree or forest)");
}

struct Hyperparams {
  std::size_t knn_k = 5;
  std::optional<std::size_t> tree_max_depth;  // nullopt = unlimited
  std::size_t tree_min_leaf = 1;
  std::size_t forest_trees = 100;
  std::size_t forest_mtry = 1;
  std::uint64_t seed = 0;

  friend bool operator==(const Hyperparams&, const Hyperparams&) = default;
};

inline std::string describe(ModelKind kind, const Hyperparams& h) {
  switch (kind) {
    case ModelKind::Knn: return "k=" + std::to_string(h.knn_k);
    case ModelKind::Tree:
      return "max_depth=" + (h.tree_max_depth ? std::to_string(*h.tree_max_depth) : std::string("unlimited")) +
             " min_leaf=" + std::to_string(h.tree_min_leaf);
    case ModelKind::Forest:
      return "trees=" + std::to_string(h.forest_trees) + " mtry=" + std::to_string(h.forest_mtry) + " min_leaf=" + std::to_string(h.tree_min_leaf);
  }
  return {};
}

using Regressor = std::variant<KnnModel, RegressionTree, RandomForest>;

// Scaler plus regressor, operating in whatever target space it was fit on.
struct FittedModel {
  ModelKind kind = ModelKind::Tree;
  Hyperparams params;
  Scaler scaler;
  Regressor regressor;

  double predict(std::span<const double> raw) const {
    auto x = scaler.apply(raw);
    return std::visit([&](const auto& m) { return m.predict(x); }, regressor);
  }

  friend bool operator==(const FittedModel&, const FittedModel&) = default;
};

inline FittedModel fit_model(ModelKind kind, const Matrix& x, std::span<const double> y, const Hyperparams& h) {
  if (x.rows() == 0) throw PreconditionError("cannot fit a model on zero rows");
  FittedModel m{kind, h, fit_scaler(x), {}};
  Matrix xs = m.scaler.apply(x);
  switch (kind) {
    case ModelKind::Knn:
      m.regressor = knn_fit(xs, y, h.knn_k);
      break;
    case ModelKind::Tree:
      m.regressor = tree_fit(xs, y, TreeParams{h.tree_max_depth, h.tree_min_leaf, std::nullopt}, h.seed);
      break;
    case ModelKind::Forest: {
      ForestParams fp{h.forest_trees, std::min(h.forest_mtry, x.cols()), h.tree_min_leaf, true};
      if (fp.mtry < 1) fp.mtry = 1;
      m.regressor = forest_fit(xs, y, fp, h.seed);
      break;
    }
  }
  return m;
}

enum class TargetTransform { Raw, Log };

inline constexpr double kLogFloorSeconds = 0.01;

inline std::string to_string(TargetTransform t) { return t == TargetTransform::Log ? "log" : "raw"; }
inline TargetTransform parse_target_transform(const std::string& s) {
  if (s == "log") return TargetTransform::Log;
  if (s == "raw") return TargetTransform::Raw;
  throw ValidationError("unknown target transform '" + s + "' (expected raw or log)");
}

inline double to_target(TargetTransform t, double seconds) {
  return t == TargetTransform::Log ? std::log(std::max(seconds, kLogFloorSeconds)) : seconds;
}
inline double from_target(TargetTransform t, double value) { return t == TargetTransform::Log ? std::exp(value) : value; }

inline std::vector<double> to_targets(TargetTransform t, std::span<const double> seconds) {
  std::vector<double> out;
  out.reserve(seconds.size());
  for (double s : seconds) out.push_back(to_target(t, s));
  return out;
}

}  // namespace encsel::ml
