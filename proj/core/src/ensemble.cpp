#include "surrogate/ensemble.hpp"

#include <algorithm>
#include <cmath>

#include "surrogate/error.hpp"

namespace surrogate {

Vote soft_vote(std::span<const double> probabilities) {
  if (probabilities.empty()) throw Error(ErrorCode::EmptyMembers, "soft vote over zero members");
  std::vector<double> sorted(probabilities.begin(), probabilities.end());
  for (double p : sorted) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw Error(ErrorCode::OutOfRangeProbability, "member probability " + std::to_string(p) + " outside [0, 1]");
    }
  }
  std::sort(sorted.begin(), sorted.end());
  double sum = 0.0;
  for (double p : sorted) sum += p;
  // Rounding in the division can push the mean a hair outside the member range.
  const double mean = std::clamp(sum / static_cast<double>(sorted.size()), sorted.front(), sorted.back());
  return {mean, decide(mean)};
}

VotingModel::VotingModel(std::vector<std::shared_ptr<const Classifier>> members) : members_(std::move(members)) {
  if (members_.empty()) throw Error(ErrorCode::EmptyMembers, "voting model needs at least one member");
  for (const auto& m : members_) {
    if (!m) throw Error(ErrorCode::EmptyMembers, "null voting member");
    if (m->input_dim() != members_.front()->input_dim()) {
      throw Error(ErrorCode::DimensionMismatch, "voting members disagree on input dimensionality");
    }
  }
}

double VotingModel::predict_proba(std::span<const double> x) const {
  check_dimension(x, input_dim());
  std::vector<double> p;
  p.reserve(members_.size());
  for (const auto& m : members_) p.push_back(m->predict_proba(x));
  return soft_vote(p).probability;
}

nlohmann::json VotingModel::body_to_json() const {
  nlohmann::json members = nlohmann::json::array();
  for (const auto& m : members_) members.push_back(save_model(*m));
  return {{"voting", "soft"}, {"members", std::move(members)}};
}

VotingModel VotingModel::from_json(const nlohmann::json& j) {
  std::vector<std::shared_ptr<const Classifier>> members;
  for (const auto& m : j.at("members")) members.push_back(load_model(m));
  return VotingModel(std::move(members));
}

}  // namespace surrogate
