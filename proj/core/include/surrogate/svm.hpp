#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "surrogate/model.hpp"

namespace surrogate {

struct SvmParams {
  double c = 1.0;
  int degree = 3;
  std::optional<double> gamma;  // unset: 1 / (d * var(X))
  double coef0 = 0.0;
  double tol = 1e-3;
  std::size_t max_passes = 10000;  // outer SMO sweeps
  bool record_dual_trace = false;

  nlohmann::json to_json() const;
  static SvmParams from_json(const nlohmann::json& j);
};

/// (gamma * <x, z> + coef0)^degree
double poly_kernel(std::span<const double> x, std::span<const double> z, double gamma, double coef0, int degree);

/// Resolves the "scale" default: 1 / (d * population variance of all entries of X).
double scale_gamma(const Matrix& X);

struct SmoSolution {
  std::vector<double> alpha;  // one per training row
  double bias = 0.0;
  double gamma = 1.0;
  std::size_t updates = 0;
  std::size_t passes = 0;
  bool converged = false;
  double dual_objective = 0.0;
  /// Smallest objective change over all accepted pair updates.
  double min_update_gain = 0.0;
  /// Objective after each accepted update (only when record_dual_trace).
  std::vector<double> dual_trace;
};

/// Platt's sequential minimal optimization on the soft-margin dual, labels
/// in {-1, +1}. Working pairs: the example loop alternates full sweeps with
/// sweeps over non-bound multipliers; the partner maximizes |E1 - E2|.
/// A pair update whose objective gain is not positive is rejected.
/// Throws SingleClass / SingleSample. Reaching max_passes returns the
/// current iterate with converged = false.
SmoSolution smo_train(const Matrix& X, std::span<const int> y_pm, const SvmParams& params);

struct PlattFit {
  double a = 0.0;
  double b = 0.0;
  std::size_t iterations = 0;
  std::vector<double> loss_trace;  // regularized log-loss after each accepted Newton step, starting at the initial point
};

/// Fits P(y=1|s) = 1 / (1 + exp(a*s + b)) by damped Newton with Platt's
/// target smoothing. Labels in {0, 1}.
PlattFit platt_fit(std::span<const double> decision_values, std::span<const int> labels);

double platt_probability(double decision, double a, double b) noexcept;

class SvmModel final : public Classifier {
 public:
  SvmModel(SvmParams params, double gamma, Matrix support_vectors, std::vector<double> dual_coef, double bias,
           double platt_a, double platt_b);

  /// SMO on {0,1} labels (mapped to -1/+1) followed by Platt scaling on the
  /// training decision values.
  static SvmModel train(const Matrix& X, std::span<const int> y, const SvmParams& params,
                        SmoSolution* solution = nullptr);

  std::string kind() const override { return "svm"; }
  std::size_t input_dim() const override { return sv_.cols(); }
  double predict_proba(std::span<const double> x) const override;
  using Classifier::predict_proba;
  nlohmann::json body_to_json() const override;
  static SvmModel from_json(const nlohmann::json& j);

  /// sum_i alpha_i y_i K(sv_i, x) + b
  double decision(std::span<const double> x) const;

  const Matrix& support_vectors() const noexcept { return sv_; }
  const std::vector<double>& dual_coef() const noexcept { return coef_; }
  double bias() const noexcept { return bias_; }
  double gamma() const noexcept { return gamma_; }
  double platt_a() const noexcept { return platt_a_; }
  double platt_b() const noexcept { return platt_b_; }
  const SvmParams& params() const noexcept { return params_; }

 private:
  SvmParams params_;
  double gamma_;
  Matrix sv_;
  std::vector<double> coef_;
  double bias_;
  double platt_a_;
  double platt_b_;
};

}  // namespace surrogate
