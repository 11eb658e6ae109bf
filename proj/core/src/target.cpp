#include "surrogate/target.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "surrogate/error.hpp"

namespace surrogate {

namespace {

// p*n for p given as a short decimal (0.35) lands a few ulps off the integer
// it denotes; snap before taking the ceiling.
std::size_t nearest_rank(double fraction, std::size_t n) {
  const double x = fraction * static_cast<double>(n);
  const double snapped = std::abs(x - std::round(x)) < 1e-9 ? std::round(x) : x;
  const auto rank = static_cast<std::size_t>(std::ceil(snapped));
  return std::clamp<std::size_t>(rank, 1, n);
}

void check_rule(const LabelRule& r) {
  if (!(r.percentile > 0.0 && r.percentile <= 1.0)) {
    throw Error(ErrorCode::InvalidRule, "percentile " + std::to_string(r.percentile) + " outside (0, 1]");
  }
}

}  // namespace

RuleSet::RuleSet(std::vector<LabelRule> rules) : rules_(std::move(rules)) {
  if (rules_.empty()) throw Error(ErrorCode::InvalidRule, "rule set must contain at least one rule");
  for (std::size_t i = 0; i < rules_.size(); ++i) {
    check_rule(rules_[i]);
    for (std::size_t j = 0; j < i; ++j) {
      if (rules_[j].metric == rules_[i].metric) {
        throw Error(ErrorCode::InvalidRule, "more than one rule on metric '" +
                                                std::string(metric_name(rules_[i].metric)) + "'");
      }
    }
  }
}

RuleSet RuleSet::baseline() {
  return RuleSet({{Metric::Qli, Direction::Top, 0.35}, {Metric::Unemployment, Direction::Bottom, 0.35}});
}

nlohmann::json RuleSet::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : rules_) {
    arr.push_back({{"metric", metric_name(r.metric)},
                   {"direction", r.direction == Direction::Top ? "top" : "bottom"},
                   {"percentile", r.percentile}});
  }
  return {{"rules", std::move(arr)}};
}

RuleSet RuleSet::from_json(const nlohmann::json& j) {
  try {
    std::vector<LabelRule> rules;
    for (const auto& r : j.at("rules")) {
      LabelRule rule;
      rule.metric = metric_from_name(r.at("metric").get<std::string>());
      const auto dir = r.at("direction").get<std::string>();
      if (dir == "top") rule.direction = Direction::Top;
      else if (dir == "bottom") rule.direction = Direction::Bottom;
      else throw Error(ErrorCode::InvalidRule, "unknown direction '" + dir + "'");
      rule.percentile = r.at("percentile").get<double>();
      rules.push_back(rule);
    }
    return RuleSet(std::move(rules));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidRule, e.what());
  }
}

RuleSet RuleSet::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open rules file " + path);
  try {
    return from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::InvalidRule, path + ": " + e.what());
  }
}

double percentile_threshold(std::span<const double> values, double percentile, Direction direction) {
  if (values.empty()) throw Error(ErrorCode::EmptyValues, "percentile of an empty list");
  if (!(percentile > 0.0 && percentile <= 1.0)) {
    throw Error(ErrorCode::InvalidRule, "percentile " + std::to_string(percentile) + " outside (0, 1]");
  }
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  const std::size_t rank =
      direction == Direction::Bottom ? nearest_rank(percentile, n) : nearest_rank(1.0 - percentile, n);
  return sorted[rank - 1];
}

std::vector<int> label(std::span<const OutcomeMetrics> outcomes, const RuleSet& rules) {
  if (outcomes.empty()) throw Error(ErrorCode::EmptyDataset, "cannot label an empty dataset");
  std::vector<int> labels(outcomes.size(), 1);
  std::vector<double> column(outcomes.size());
  for (const auto& rule : rules.rules()) {
    for (std::size_t i = 0; i < outcomes.size(); ++i) column[i] = outcomes[i].get(rule.metric);
    const double t = percentile_threshold(column, rule.percentile, rule.direction);
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
      const bool member = rule.direction == Direction::Top ? column[i] >= t : column[i] <= t;
      if (!member) labels[i] = 0;
    }
  }
  return labels;
}

std::vector<int> label(const Dataset& dataset, const RuleSet& rules) {
  std::vector<OutcomeMetrics> outcomes;
  outcomes.reserve(dataset.size());
  for (const auto& r : dataset.records) outcomes.push_back(r.outcome);
  return label(outcomes, rules);
}

}  // namespace surrogate
