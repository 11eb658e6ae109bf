#pragma once

#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "surrogate/corpus.hpp"

namespace surrogate {

enum class Direction { Top, Bottom };

/// "metric within the top/bottom `percentile` fraction of all results".
struct LabelRule {
  Metric metric = Metric::Qli;
  Direction direction = Direction::Top;
  double percentile = 0.35;  // (0, 1]
};

/// Conjunction of rules, at most one per metric.
class RuleSet {
 public:
  RuleSet() = default;
  explicit RuleSet(std::vector<LabelRule> rules);

  const std::vector<LabelRule>& rules() const noexcept { return rules_; }

  /// QLI top 35% and unemployment bottom 35%.
  static RuleSet baseline();

  nlohmann::json to_json() const;
  static RuleSet from_json(const nlohmann::json& j);
  static RuleSet load(const std::string& path);

 private:
  std::vector<LabelRule> rules_;
};

/// Nearest-rank empirical quantile. With values sorted ascending, the
/// threshold is the element at 1-based rank ceil(p*n) for Bottom and
/// ceil((1-p)*n) for Top (clamped to rank 1). Membership is inclusive.
double percentile_threshold(std::span<const double> values, double percentile, Direction direction);

/// 1 for records satisfying every rule, thresholds taken over the whole set.
std::vector<int> label(std::span<const OutcomeMetrics> outcomes, const RuleSet& rules);
std::vector<int> label(const Dataset& dataset, const RuleSet& rules);

}  // namespace surrogate
