#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "surrogate/model.hpp"

namespace surrogate {

struct ForestParams {
  std::size_t n_trees = 10000;
  std::size_t max_depth = 15;  // root is depth 0
  bool bootstrap = true;
  std::size_t features_per_split = 0;  // 0 selects floor(sqrt(d))
  std::size_t min_samples_split = 2;
  std::uint64_t seed = 0;

  static constexpr std::size_t kUnboundedDepth = std::numeric_limits<std::uint32_t>::max();

  nlohmann::json to_json() const;
  static ForestParams from_json(const nlohmann::json& j);
};

/// 1 - p0^2 - p1^2. Throws EmptySet.
double gini_impurity(std::span<const int> labels);

/// Flat-array CART tree. Internal nodes route x[feature] <= threshold to the
/// left child; leaves hold the positive fraction of their training samples.
class DecisionTree {
 public:
  struct Node {
    std::int32_t feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    double value = 0.0;         // leaf probability
  };

  DecisionTree() = default;
  explicit DecisionTree(std::vector<Node> nodes) : nodes_(std::move(nodes)) {}

  double predict(std::span<const double> x) const noexcept {
    std::int32_t i = 0;
    while (nodes_[i].feature >= 0) {
      const auto& n = nodes_[i];
      i = x[n.feature] <= n.threshold ? n.left : n.right;
    }
    return nodes_[i].value;
  }

  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  /// Longest root-to-leaf path, in edges.
  std::size_t depth() const;

  nlohmann::json to_json() const;
  static DecisionTree from_json(const nlohmann::json& j);

 private:
  std::vector<Node> nodes_;
};

class ForestModel final : public Classifier {
 public:
  ForestModel(ForestParams params, std::size_t input_dim, std::vector<DecisionTree> trees,
              std::vector<double> importances);

  /// Grows params.n_trees trees, in parallel; tree t uses seed mix_seed(params.seed, t).
  static ForestModel train(const Matrix& X, std::span<const int> y, const ForestParams& params);

  std::string kind() const override { return "forest"; }
  std::size_t input_dim() const override { return input_dim_; }
  double predict_proba(std::span<const double> x) const override;
  using Classifier::predict_proba;
  nlohmann::json body_to_json() const override;
  static ForestModel from_json(const nlohmann::json& j);

  const ForestParams& params() const noexcept { return params_; }
  const std::vector<DecisionTree>& trees() const noexcept { return trees_; }
  /// Mean-decrease-in-impurity per feature, normalized to sum to 1.
  const std::vector<double>& feature_importances() const noexcept { return importances_; }

 private:
  ForestParams params_;
  std::size_t input_dim_;
  std::vector<DecisionTree> trees_;
  std::vector<double> importances_;
};

}  // namespace surrogate
