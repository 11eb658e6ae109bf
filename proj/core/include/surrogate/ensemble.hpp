#pragma once

#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "surrogate/model.hpp"

namespace surrogate {

struct Vote {
  double probability;
  int label;
};

/// Unweighted mean, class 1 iff mean >= 0.5. Values are summed in ascending
/// order, so any permutation of the input gives a bit-identical result.
/// Throws EmptyMembers / OutOfRangeProbability.
Vote soft_vote(std::span<const double> probabilities);

/// Soft-voting combiner over already-trained members of equal input width.
class VotingModel final : public Classifier {
 public:
  explicit VotingModel(std::vector<std::shared_ptr<const Classifier>> members);

  std::string kind() const override { return "voting"; }
  std::size_t input_dim() const override { return members_.front()->input_dim(); }
  double predict_proba(std::span<const double> x) const override;
  using Classifier::predict_proba;
  nlohmann::json body_to_json() const override;
  static VotingModel from_json(const nlohmann::json& j);

  const std::vector<std::shared_ptr<const Classifier>>& members() const noexcept { return members_; }

 private:
  std::vector<std::shared_ptr<const Classifier>> members_;
};

}  // namespace surrogate
