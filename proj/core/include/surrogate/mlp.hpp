#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "surrogate/lbfgs.hpp"
#include "surrogate/model.hpp"

namespace surrogate {

struct MlpParams {
  std::vector<std::size_t> hidden_sizes{100};
  double alpha = 1e-4;  // L2 on weights, biases excluded
  std::size_t max_iter = 2000;
  std::size_t lbfgs_memory = 10;
  double grad_tol = 1e-5;
  std::uint64_t seed = 0;

  nlohmann::json to_json() const;
  static MlpParams from_json(const nlohmann::json& j);
};

/// Dense layer, z_j = b_j + sum_i a_i W(i, j); W is in x out, row-major.
struct DenseLayer {
  std::size_t in = 0;
  std::size_t out = 0;
  std::vector<double> weights;
  std::vector<double> bias;
};

/// tanh hidden layers feeding a single logistic output unit.
class MlpModel final : public Classifier {
 public:
  /// Throws DimensionMismatch when layers do not chain, NonFiniteWeights on NaN/inf.
  explicit MlpModel(std::vector<DenseLayer> layers, MlpParams params = {});

  /// All-zero network with the given layer widths (input, hidden..., 1).
  static MlpModel zeros(std::span<const std::size_t> widths);

  /// Glorot-uniform initialisation from params.seed, then full-batch L-BFGS
  /// on the regularized log-loss.
  static MlpModel train(const Matrix& X, std::span<const int> y, const MlpParams& params,
                        LbfgsResult* report = nullptr);

  std::string kind() const override { return "mlp"; }
  std::size_t input_dim() const override { return layers_.front().in; }
  /// Strictly inside (0, 1).
  double predict_proba(std::span<const double> x) const override;
  using Classifier::predict_proba;
  nlohmann::json body_to_json() const override;
  static MlpModel from_json(const nlohmann::json& j);

  /// Mean binary cross-entropy + (alpha/2) * sum of squared weights, with
  /// the gradient over the flattened parameter vector.
  std::pair<double, std::vector<double>> loss_and_grad(const Matrix& X, std::span<const int> y, double alpha) const;

  /// Layer by layer: weights (row-major) then biases.
  std::vector<double> flat_parameters() const;
  void set_flat_parameters(std::span<const double> flat);
  std::size_t parameter_count() const;

  const std::vector<DenseLayer>& layers() const noexcept { return layers_; }
  const MlpParams& params() const noexcept { return params_; }

 private:
  std::vector<DenseLayer> layers_;
  MlpParams params_;
};

}  // namespace surrogate
