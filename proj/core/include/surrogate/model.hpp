#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "surrogate/matrix.hpp"

namespace surrogate {

inline constexpr int kModelFormatVersion = 1;

/// Uniform probability-prediction surface shared by every trained model.
/// Implementations are immutable after construction and safe to share
/// across threads.
class Classifier {
 public:
  virtual ~Classifier() = default;

  /// "forest", "svm", "mlp" or "voting".
  virtual std::string kind() const = 0;
  virtual std::size_t input_dim() const = 0;

  /// P(y = 1 | x). Throws DimensionMismatch on a wrong-width input.
  virtual double predict_proba(std::span<const double> x) const = 0;

  /// Model body; the envelope fields are added by save_model().
  virtual nlohmann::json body_to_json() const = 0;

  /// Row-wise predict_proba, parallel across rows.
  std::vector<double> predict_proba(const Matrix& X) const;

  /// Class 1 iff probability >= 0.5.
  std::vector<int> predict(const Matrix& X) const;
};

/// Probability-to-class rule used across the toolkit: ties at 0.5 go to class 1.
constexpr int decide(double probability) noexcept { return probability >= 0.5 ? 1 : 0; }

/// Versioned envelope {format_version, kind, input_dim, ...body}.
nlohmann::json save_model(const Classifier& model);

/// Dispatches on "kind". Throws FormatVersion when format_version differs.
std::shared_ptr<const Classifier> load_model(const nlohmann::json& envelope);

void write_model_file(const Classifier& model, const std::string& path);
std::shared_ptr<const Classifier> read_model_file(const std::string& path);

void check_dimension(std::span<const double> x, std::size_t expected);

}  // namespace surrogate
