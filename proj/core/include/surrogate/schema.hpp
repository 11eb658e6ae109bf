#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "surrogate/matrix.hpp"

namespace surrogate {

enum class ParamKind { Boolean, Continuous };

struct ParameterDecl {
  std::string name;
  ParamKind kind = ParamKind::Continuous;
  double lower = 0.0;  // continuous only
  double upper = 1.0;  // continuous only

  static ParameterDecl boolean(std::string name) { return {std::move(name), ParamKind::Boolean, 0.0, 0.0}; }
  static ParameterDecl continuous(std::string name, double lower, double upper) {
    return {std::move(name), ParamKind::Continuous, lower, upper};
  }
};

/// A single configuration: named parameter values plus the active ACP
/// (metropolitan region). Booleans are stored as 0.0 / 1.0.
struct ParameterVector {
  std::map<std::string, double> values;
  std::string acp;

  friend bool operator==(const ParameterVector&, const ParameterVector&) = default;
};

using FeatureVector = std::vector<double>;

/// Ordered declaration of the parameter space.
///
/// Feature layout is the declaration order of `entries`, followed by a
/// one-hot block over `acps`. The constructor rejects duplicate names and
/// continuous bounds that are not finite with 0 <= lower < upper.
class ParameterSchema {
 public:
  ParameterSchema() = default;
  ParameterSchema(std::vector<ParameterDecl> entries, std::vector<std::string> acps);

  const std::vector<ParameterDecl>& entries() const noexcept { return entries_; }
  const std::vector<std::string>& acps() const noexcept { return acps_; }

  std::size_t feature_count() const noexcept { return entries_.size() + acps_.size(); }
  std::size_t acp_offset() const noexcept { return entries_.size(); }

  std::optional<std::size_t> entry_index(const std::string& name) const;
  std::optional<std::size_t> acp_index(const std::string& name) const;

  /// Names of every feature column, ACP columns prefixed with "acp=".
  std::vector<std::string> feature_names() const;

  nlohmann::json to_json() const;
  static ParameterSchema from_json(const nlohmann::json& j);
  static ParameterSchema load(const std::string& path);

  friend bool operator==(const ParameterSchema& a, const ParameterSchema& b);

 private:
  std::vector<ParameterDecl> entries_;
  std::vector<std::string> acps_;
  std::map<std::string, std::size_t> entry_lookup_;
  std::map<std::string, std::size_t> acp_lookup_;
};

/// Throws Error{UnknownParameter | OutOfBounds | MissingParameter | UnknownAcp}.
const ParameterVector& validate(const ParameterSchema& schema, const ParameterVector& v);

FeatureVector vectorize(const ParameterSchema& schema, const ParameterVector& v);

/// Row-wise vectorize; row order preserved.
Matrix to_feature_matrix(const ParameterSchema& schema, const std::vector<ParameterVector>& vectors);

/// Config-file body: flat object of parameter values (booleans as JSON
/// booleans) plus "acp".
nlohmann::json config_to_json(const ParameterSchema& schema, const ParameterVector& v);
ParameterVector config_from_json(const ParameterSchema& schema, const nlohmann::json& j);

struct ScalerStats {
  std::vector<double> mean;
  std::vector<double> std;  // population convention
};

/// Column-wise (x - mean) / std. Constant columns map to zero. Stats are
/// computed from X unless `fitted` is supplied.
std::pair<Matrix, ScalerStats> standardize(const Matrix& X, const std::optional<ScalerStats>& fitted = std::nullopt);

}  // namespace surrogate
