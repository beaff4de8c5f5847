#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "encsel/encoding_id.hpp"
#include "encsel/ml/model.hpp"
#include "encsel/util.hpp"

namespace encsel::ml {

inline constexpr int kModelFileVersion = 1;

// A fitted regressor predicting one encoding's runtime from named features.
struct RuntimeModel {
  EncodingId encoding{1};
  std::vector<std::string> feature_names;
  TargetTransform transform = TargetTransform::Log;
  FittedModel model;

  ModelKind kind() const { return model.kind; }

  // Reorders a named vector into this model's feature order.
  std::vector<double> project(std::span<const std::string> names, std::span<const double> values) const {
    std::vector<double> out;
    out.reserve(feature_names.size());
    for (const auto& f : feature_names) {
      auto it = std::find(names.begin(), names.end(), f);
      if (it == names.end()) throw DataError("feature vector lacks '" + f + "' required by the " + to_string(encoding) + " model");
      out.push_back(values[static_cast<std::size_t>(it - names.begin())]);
    }
    return out;
  }

  // Predicted runtime in seconds.
  double predict_seconds(std::span<const std::string> names, std::span<const double> values) const {
    auto x = project(names, values);
    return from_target(transform, model.predict(x));
  }

  friend bool operator==(const RuntimeModel&, const RuntimeModel&) = default;
};

inline RuntimeModel fit_runtime_model(EncodingId enc, ModelKind kind, const Dataset& data, const Hyperparams& h, TargetTransform t) {
  data.validate();
  auto y = to_targets(t, data.targets);
  return RuntimeModel{enc, data.feature_names, t, fit_model(kind, data.rows, y, h)};
}

namespace detail {

inline nlohmann::json tree_to_json(const RegressionTree& t) {
  auto nodes = nlohmann::json::array();
  for (const auto& n : t.nodes) nodes.push_back({n.feature, n.threshold, n.left, n.right, n.value});
  return nodes;
}

inline RegressionTree tree_from_json(const nlohmann::json& j) {
  RegressionTree t;
  for (const auto& n : j) {
    t.nodes.push_back({n.at(0).get<std::int32_t>(), n.at(1).get<double>(), n.at(2).get<std::int32_t>(), n.at(3).get<std::int32_t>(),
                       n.at(4).get<double>()});
  }
  const auto size = static_cast<std::int32_t>(t.nodes.size());
  if (size == 0) throw LoadError("model file: empty tree");
  for (const auto& n : t.nodes) {
    if (n.feature >= 0 && (n.left <= 0 || n.left >= size || n.right <= 0 || n.right >= size)) throw LoadError("model file: corrupt tree links");
  }
  return t;
}

}  // namespace detail

inline nlohmann::json model_to_json(const RuntimeModel& m) {
  nlohmann::json j;
  j["format"] = "encsel-runtime-model";
  j["version"] = kModelFileVersion;
  j["encoding"] = m.encoding.value();
  j["kind"] = to_string(m.model.kind);
  j["target_transform"] = to_string(m.transform);
  j["feature_names"] = m.feature_names;
  const auto& h = m.model.params;
  j["hyperparams"] = {{"knn_k", h.knn_k},
                      {"tree_max_depth", h.tree_max_depth ? nlohmann::json(*h.tree_max_depth) : nlohmann::json(nullptr)},
                      {"tree_min_leaf", h.tree_min_leaf},
                      {"forest_trees", h.forest_trees},
                      {"forest_mtry", h.forest_mtry},
                      {"seed", h.seed}};
  j["scaler"] = {{"mean", m.model.scaler.mean}, {"stddev", m.model.scaler.stddev}};
  auto& state = j["state"];
  std::visit(
      [&](const auto& r) {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, KnnModel>) {
          state["k"] = r.k;
          state["cols"] = r.train.cols();
          state["train"] = r.train.data();
          state["targets"] = r.targets;
        } else if constexpr (std::is_same_v<T, RegressionTree>) {
          state["nodes"] = detail::tree_to_json(r);
        } else {
          auto trees = nlohmann::json::array();
          for (const auto& t : r.trees) trees.push_back(detail::tree_to_json(t));
          state["trees"] = trees;
          state["seeds"] = r.seeds;
        }
      },
      m.model.regressor);
  return j;
}

// Refuses files of another version and, when `expected_features` is given,
// models trained on a different feature list.
inline RuntimeModel model_from_json(const nlohmann::json& j, const std::vector<std::string>* expected_features = nullptr) {
  try {
    if (j.value("format", "") != "encsel-runtime-model") throw LoadError("model file: not a runtime model document");
    if (j.at("version").get<int>() != kModelFileVersion) {
      throw LoadError("model file: version " + j.at("version").dump() + " is not supported (expected " + std::to_string(kModelFileVersion) + ")");
    }
    RuntimeModel m;
    m.encoding = EncodingId(j.at("encoding").get<int>());
    m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    if (expected_features && *expected_features != m.feature_names) throw LoadError("model file: feature names differ from the expected feature list");
    m.transform = parse_target_transform(j.at("target_transform").get<std::string>());
    m.model.kind = parse_model_kind(j.at("kind").get<std::string>());
    const auto& h = j.at("hyperparams");
    m.model.params.knn_k = h.at("knn_k").get<std::size_t>();
    if (!h.at("tree_max_depth").is_null()) m.model.params.tree_max_depth = h.at("tree_max_depth").get<std::size_t>();
    m.model.params.tree_min_leaf = h.at("tree_min_leaf").get<std::size_t>();
    m.model.params.forest_trees = h.at("forest_trees").get<std::size_t>();
    m.model.params.forest_mtry = h.at("forest_mtry").get<std::size_t>();
    m.model.params.seed = h.at("seed").get<std::uint64_t>();
    m.model.scaler.mean = j.at("scaler").at("mean").get<std::vector<double>>();
    m.model.scaler.stddev = j.at("scaler").at("stddev").get<std::vector<double>>();
    if (m.model.scaler.mean.size() != m.feature_names.size()) throw LoadError("model file: scaler width differs from feature count");
    const auto& s = j.at("state");
    switch (m.model.kind) {
      case ModelKind::Knn: {
        KnnModel knn;
        knn.k = s.at("k").get<std::size_t>();
        auto cols = s.at("cols").get<std::size_t>();
        auto flat = s.at("train").get<std::vector<double>>();
        knn.targets = s.at("targets").get<std::vector<double>>();
        if (cols != m.feature_names.size() || flat.size() != cols * knn.targets.size() || knn.k < 1 || knn.k > knn.targets.size()) {
          throw LoadError("model file: inconsistent knn state");
        }
        knn.train = Matrix(knn.targets.size(), cols);
        for (std::size_t r = 0; r < knn.targets.size(); ++r) {
          for (std::size_t c = 0; c < cols; ++c) knn.train(r, c) = flat[r * cols + c];
        }
        m.model.regressor = std::move(knn);
        break;
      }
      case ModelKind::Tree:
        m.model.regressor = detail::tree_from_json(s.at("nodes"));
        break;
      case ModelKind::Forest: {
        RandomForest f;
        for (const auto& t : s.at("trees")) f.trees.push_back(detail::tree_from_json(t));
        f.seeds = s.at("seeds").get<std::vector<std::uint64_t>>();
        if (f.trees.empty()) throw LoadError("model file: forest without trees");
        m.model.regressor = std::move(f);
        break;
      }
    }
    return m;
  } catch (const nlohmann::json::exception& ex) {
    throw LoadError(std::string("model file: ") + ex.what());
  }
}

inline void save_model(const RuntimeModel& m, const std::filesystem::path& path) { write_text(path, model_to_json(m).dump(1) + "\n"); }

inline RuntimeModel load_model(const std::filesystem::path& path, const std::vector<std::string>* expected_features = nullptr) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text(path));
  } catch (const nlohmann::json::parse_error& ex) {
    throw LoadError("model file " + path.string() + ": " + ex.what());
  }
  return model_from_json(j, expected_features);
}

}  // namespace encsel::ml
