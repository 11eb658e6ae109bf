#include "surrogate/forest.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>

#include "surrogate/error.hpp"
#include "surrogate/parallel.hpp"

namespace surrogate {

nlohmann::json ForestParams::to_json() const {
  return {{"n_trees", n_trees},
          {"max_depth", max_depth},
          {"bootstrap", bootstrap},
          {"features_per_split", features_per_split},
          {"min_samples_split", min_samples_split},
          {"seed", seed}};
}

ForestParams ForestParams::from_json(const nlohmann::json& j) {
  ForestParams p;
  p.n_trees = j.value("n_trees", p.n_trees);
  p.max_depth = j.value("max_depth", p.max_depth);
  p.bootstrap = j.value("bootstrap", p.bootstrap);
  p.features_per_split = j.value("features_per_split", p.features_per_split);
  p.min_samples_split = j.value("min_samples_split", p.min_samples_split);
  p.seed = j.value("seed", p.seed);
  return p;
}

double gini_impurity(std::span<const int> labels) {
  if (labels.empty()) throw Error(ErrorCode::EmptySet, "gini impurity of an empty set");
  const auto ones = std::count(labels.begin(), labels.end(), 1);
  const double p1 = static_cast<double>(ones) / static_cast<double>(labels.size());
  const double p0 = 1.0 - p1;
  return 1.0 - p0 * p0 - p1 * p1;
}

namespace {

double gini_from_counts(std::size_t positives, std::size_t total) {
  const double p1 = static_cast<double>(positives) / static_cast<double>(total);
  const double p0 = 1.0 - p1;
  return 1.0 - p0 * p0 - p1 * p1;
}

class TreeBuilder {
 public:
  TreeBuilder(const Matrix& X, std::span<const int> y, const ForestParams& p, std::size_t mtry, std::uint64_t seed)
      : X_(X), y_(y), params_(p), mtry_(mtry), rng_(seed), importance_(X.cols(), 0.0) {}

  DecisionTree build() {
    const std::size_t n = X_.rows();
    samples_.resize(n);
    if (params_.bootstrap) {
      std::uniform_int_distribution<std::size_t> pick(0, n - 1);
      for (auto& s : samples_) s = pick(rng_);
    } else {
      std::iota(samples_.begin(), samples_.end(), std::size_t{0});
    }
    features_.resize(X_.cols());
    std::iota(features_.begin(), features_.end(), std::size_t{0});
    grow(0, n, 0);
    return DecisionTree(std::move(nodes_));
  }

  std::vector<double> importance() const {
    std::vector<double> imp = importance_;
    const double total = std::accumulate(imp.begin(), imp.end(), 0.0);
    if (total > 0.0) {
      for (auto& v : imp) v /= total;
    }
    return imp;
  }

 private:
  struct Split {
    std::size_t feature = 0;
    double threshold = 0.0;
    double decrease = -1.0;
    bool valid = false;
  };

  std::int32_t grow(std::size_t begin, std::size_t end, std::size_t depth) {
    const std::size_t n = end - begin;
    std::size_t positives = 0;
    for (std::size_t i = begin; i < end; ++i) positives += static_cast<std::size_t>(y_[samples_[i]] == 1);

    const auto id = static_cast<std::int32_t>(nodes_.size());
    nodes_.push_back({});
    nodes_[id].value = static_cast<double>(positives) / static_cast<double>(n);

    const bool pure = positives == 0 || positives == n;
    if (pure || depth >= params_.max_depth || n < params_.min_samples_split) return id;

    const Split split = find_split(begin, end, positives);
    if (!split.valid) return id;

    importance_[split.feature] += static_cast<double>(n) * split.decrease;

    auto* first = samples_.data() + begin;
    auto* last = samples_.data() + end;
    auto* middle = std::partition(first, last, [&](std::size_t s) { return X_(s, split.feature) <= split.threshold; });
    const std::size_t mid = begin + static_cast<std::size_t>(middle - first);

    const auto left = grow(begin, mid, depth + 1);
    const auto right = grow(mid, end, depth + 1);
    auto& node = nodes_[id];
    node.feature = static_cast<std::int32_t>(split.feature);
    node.threshold = split.threshold;
    node.left = left;
    node.right = right;
    return id;
  }

  Split find_split(std::size_t begin, std::size_t end, std::size_t positives) {
    const std::size_t n = end - begin;
    const double parent = gini_from_counts(positives, n);

    // Partial Fisher-Yates: the first mtry_ entries form the candidate subset.
    // If none of them can split the node, keep drawing until one can.
    Split best;
    const std::size_t d = features_.size();
    for (std::size_t k = 0; k < d; ++k) {
      std::uniform_int_distribution<std::size_t> pick(k, d - 1);
      std::swap(features_[k], features_[pick(rng_)]);
      if (k >= mtry_ && best.valid) break;
      evaluate(features_[k], begin, end, positives, parent, best);
    }
    return best;
  }

  void evaluate(std::size_t f, std::size_t begin, std::size_t end, std::size_t positives, double parent, Split& best) {
    const std::size_t n = end - begin;
    column_.clear();
    for (std::size_t i = begin; i < end; ++i) column_.emplace_back(X_(samples_[i], f), y_[samples_[i]]);
    std::sort(column_.begin(), column_.end());

    std::size_t left_pos = 0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      left_pos += static_cast<std::size_t>(column_[i].second == 1);
      const double a = column_[i].first;
      const double b = column_[i + 1].first;
      if (!(a < b)) continue;
      const std::size_t nl = i + 1;
      const std::size_t nr = n - nl;
      const double weighted = (static_cast<double>(nl) * gini_from_counts(left_pos, nl) +
                               static_cast<double>(nr) * gini_from_counts(positives - left_pos, nr)) /
                              static_cast<double>(n);
      const double decrease = parent - weighted;
      double threshold = a + (b - a) / 2.0;
      if (!(threshold < b)) threshold = a;
      const bool better = !best.valid || decrease > best.decrease ||
                          (decrease == best.decrease &&
                           (f < best.feature || (f == best.feature && threshold < best.threshold)));
      if (better) best = {f, threshold, decrease, true};
    }
  }

  const Matrix& X_;
  std::span<const int> y_;
  const ForestParams& params_;
  std::size_t mtry_;
  std::mt19937_64 rng_;
  std::vector<double> importance_;
  std::vector<std::size_t> samples_;
  std::vector<std::size_t> features_;
  std::vector<std::pair<double, int>> column_;
  std::vector<DecisionTree::Node> nodes_;
};

nlohmann::json node_to_json(const std::vector<DecisionTree::Node>& nodes, std::int32_t i) {
  const auto& n = nodes[i];
  if (n.feature < 0) return {{"leaf", n.value}};
  return {{"feature", n.feature},
          {"threshold", n.threshold},
          {"value", n.value},
          {"left", node_to_json(nodes, n.left)},
          {"right", node_to_json(nodes, n.right)}};
}

std::int32_t node_from_json(const nlohmann::json& j, std::vector<DecisionTree::Node>& nodes) {
  const auto id = static_cast<std::int32_t>(nodes.size());
  nodes.push_back({});
  if (j.contains("leaf")) {
    nodes[id].value = j.at("leaf").get<double>();
    return id;
  }
  const auto feature = j.at("feature").get<std::int32_t>();
  const auto threshold = j.at("threshold").get<double>();
  const auto value = j.value("value", 0.0);
  const auto left = node_from_json(j.at("left"), nodes);
  const auto right = node_from_json(j.at("right"), nodes);
  nodes[id] = {feature, threshold, left, right, value};
  return id;
}

}  // namespace

std::size_t DecisionTree::depth() const {
  if (nodes_.empty()) return 0;
  std::function<std::size_t(std::int32_t)> walk = [&](std::int32_t i) -> std::size_t {
    const auto& n = nodes_[i];
    if (n.feature < 0) return 0;
    return 1 + std::max(walk(n.left), walk(n.right));
  };
  return walk(0);
}

nlohmann::json DecisionTree::to_json() const { return node_to_json(nodes_, 0); }

DecisionTree DecisionTree::from_json(const nlohmann::json& j) {
  std::vector<Node> nodes;
  node_from_json(j, nodes);
  return DecisionTree(std::move(nodes));
}

ForestModel::ForestModel(ForestParams params, std::size_t input_dim, std::vector<DecisionTree> trees,
                         std::vector<double> importances)
    : params_(params), input_dim_(input_dim), trees_(std::move(trees)), importances_(std::move(importances)) {
  if (trees_.empty()) throw Error(ErrorCode::InvalidParams, "forest needs at least one tree");
}

ForestModel ForestModel::train(const Matrix& X, std::span<const int> y, const ForestParams& params) {
  if (X.rows() == 0) throw Error(ErrorCode::EmptyData, "forest training set is empty");
  if (X.rows() == 1) throw Error(ErrorCode::SingleSample, "forest needs at least two samples");
  if (y.size() != X.rows()) throw Error(ErrorCode::LengthMismatch, "X and y row counts differ");
  if (params.n_trees < 1 || params.max_depth < 1 || params.min_samples_split < 2) {
    throw Error(ErrorCode::InvalidParams, "n_trees >= 1, max_depth >= 1 and min_samples_split >= 2 required");
  }
  const std::size_t d = X.cols();
  std::size_t mtry = params.features_per_split;
  if (mtry == 0) mtry = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(d))));
  mtry = std::clamp<std::size_t>(mtry, 1, std::max<std::size_t>(d, 1));

  std::vector<DecisionTree> trees(params.n_trees);
  std::vector<std::vector<double>> per_tree(params.n_trees);
  parallel_for(params.n_trees, [&](std::size_t t) {
    TreeBuilder builder(X, y, params, mtry, mix_seed(params.seed, t));
    trees[t] = builder.build();
    per_tree[t] = builder.importance();
  });

  std::vector<double> importance(d, 0.0);
  for (const auto& imp : per_tree) {
    for (std::size_t f = 0; f < d; ++f) importance[f] += imp[f];
  }
  const double total = std::accumulate(importance.begin(), importance.end(), 0.0);
  if (total > 0.0) {
    for (auto& v : importance) v /= total;
  }
  return ForestModel(params, d, std::move(trees), std::move(importance));
}

double ForestModel::predict_proba(std::span<const double> x) const {
  check_dimension(x, input_dim_);
  double sum = 0.0;
  for (const auto& t : trees_) sum += t.predict(x);
  return sum / static_cast<double>(trees_.size());
}

nlohmann::json ForestModel::body_to_json() const {
  nlohmann::json trees = nlohmann::json::array();
  for (const auto& t : trees_) trees.push_back(t.to_json());
  return {{"params", params_.to_json()}, {"feature_importances", importances_}, {"trees", std::move(trees)}};
}

ForestModel ForestModel::from_json(const nlohmann::json& j) {
  std::vector<DecisionTree> trees;
  for (const auto& t : j.at("trees")) trees.push_back(DecisionTree::from_json(t));
  auto importances = j.value("feature_importances", std::vector<double>{});
  const auto dim = j.at("input_dim").get<std::size_t>();
  if (importances.empty()) importances.assign(dim, 0.0);
  return ForestModel(ForestParams::from_json(j.at("params")), dim, std::move(trees), std::move(importances));
}

}  // namespace surrogate
