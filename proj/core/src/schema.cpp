#include "surrogate/schema.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "surrogate/error.hpp"

namespace surrogate {

namespace {

std::string format_bounds(double lower, double upper) {
  std::ostringstream os;
  os << '[' << lower << ", " << upper << ']';
  return os.str();
}

}  // namespace

ParameterSchema::ParameterSchema(std::vector<ParameterDecl> entries, std::vector<std::string> acps)
    : entries_(std::move(entries)), acps_(std::move(acps)) {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& e = entries_[i];
    if (e.name.empty() || e.name == "acp") {
      throw Error(ErrorCode::InvalidSchema, "reserved or empty parameter name '" + e.name + "'");
    }
    if (!entry_lookup_.emplace(e.name, i).second) {
      throw Error(ErrorCode::InvalidSchema, "duplicate parameter name '" + e.name + "'");
    }
    if (e.kind == ParamKind::Continuous) {
      if (!std::isfinite(e.lower) || !std::isfinite(e.upper) || !(e.lower < e.upper) || e.lower < 0.0) {
        throw Error(ErrorCode::InvalidSchema,
                    "parameter '" + e.name + "' has invalid bounds " + format_bounds(e.lower, e.upper));
      }
    }
  }
  for (std::size_t i = 0; i < acps_.size(); ++i) {
    if (acps_[i].empty()) throw Error(ErrorCode::InvalidSchema, "empty ACP name");
    if (!acp_lookup_.emplace(acps_[i], i).second) {
      throw Error(ErrorCode::InvalidSchema, "duplicate ACP name '" + acps_[i] + "'");
    }
  }
}

std::optional<std::size_t> ParameterSchema::entry_index(const std::string& name) const {
  auto it = entry_lookup_.find(name);
  if (it == entry_lookup_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> ParameterSchema::acp_index(const std::string& name) const {
  auto it = acp_lookup_.find(name);
  if (it == acp_lookup_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::string> ParameterSchema::feature_names() const {
  std::vector<std::string> names;
  names.reserve(feature_count());
  for (const auto& e : entries_) names.push_back(e.name);
  for (const auto& a : acps_) names.push_back("acp=" + a);
  return names;
}

bool operator==(const ParameterSchema& a, const ParameterSchema& b) {
  if (a.acps_ != b.acps_ || a.entries_.size() != b.entries_.size()) return false;
  for (std::size_t i = 0; i < a.entries_.size(); ++i) {
    const auto& x = a.entries_[i];
    const auto& y = b.entries_[i];
    if (x.name != y.name || x.kind != y.kind) return false;
    if (x.kind == ParamKind::Continuous && (x.lower != y.lower || x.upper != y.upper)) return false;
  }
  return true;
}

nlohmann::json ParameterSchema::to_json() const {
  nlohmann::json params = nlohmann::json::array();
  for (const auto& e : entries_) {
    nlohmann::json p{{"name", e.name}};
    if (e.kind == ParamKind::Boolean) {
      p["kind"] = "boolean";
    } else {
      p["kind"] = "continuous";
      p["bounds"] = {e.lower, e.upper};
    }
    params.push_back(std::move(p));
  }
  return {{"parameters", std::move(params)}, {"acps", acps_}};
}

ParameterSchema ParameterSchema::from_json(const nlohmann::json& j) {
  try {
    std::vector<ParameterDecl> entries;
    for (const auto& p : j.at("parameters")) {
      const auto name = p.at("name").get<std::string>();
      const auto kind = p.at("kind").get<std::string>();
      if (kind == "boolean") {
        if (p.contains("bounds")) {
          throw Error(ErrorCode::InvalidSchema, "boolean parameter '" + name + "' must not carry bounds");
        }
        entries.push_back(ParameterDecl::boolean(name));
      } else if (kind == "continuous") {
        const auto& b = p.at("bounds");
        if (!b.is_array() || b.size() != 2) {
          throw Error(ErrorCode::InvalidSchema, "parameter '" + name + "' bounds must be [lower, upper]");
        }
        entries.push_back(ParameterDecl::continuous(name, b[0].get<double>(), b[1].get<double>()));
      } else {
        throw Error(ErrorCode::InvalidSchema, "parameter '" + name + "' has unknown kind '" + kind + "'");
      }
    }
    std::vector<std::string> acps;
    if (j.contains("acps")) acps = j.at("acps").get<std::vector<std::string>>();
    return ParameterSchema(std::move(entries), std::move(acps));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidSchema, e.what());
  }
}

ParameterSchema ParameterSchema::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open schema file " + path);
  try {
    return from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::InvalidSchema, path + ": " + e.what());
  }
}

const ParameterVector& validate(const ParameterSchema& schema, const ParameterVector& v) {
  for (const auto& [name, value] : v.values) {
    if (!schema.entry_index(name)) throw Error(ErrorCode::UnknownParameter, "'" + name + "'");
  }
  for (const auto& e : schema.entries()) {
    auto it = v.values.find(e.name);
    if (it == v.values.end()) throw Error(ErrorCode::MissingParameter, "'" + e.name + "'");
    const double x = it->second;
    if (e.kind == ParamKind::Boolean) {
      if (x != 0.0 && x != 1.0) {
        std::ostringstream os;
        os << "'" << e.name << "' = " << x << " outside {0, 1}";
        throw Error(ErrorCode::OutOfBounds, os.str());
      }
    } else if (!(x >= e.lower && x <= e.upper)) {
      std::ostringstream os;
      os << "'" << e.name << "' = " << x << " outside " << format_bounds(e.lower, e.upper);
      throw Error(ErrorCode::OutOfBounds, os.str());
    }
  }
  if (schema.acps().empty()) {
    if (!v.acp.empty()) throw Error(ErrorCode::UnknownAcp, "'" + v.acp + "' (schema declares no ACPs)");
  } else if (!schema.acp_index(v.acp)) {
    throw Error(ErrorCode::UnknownAcp, "'" + v.acp + "'");
  }
  return v;
}

FeatureVector vectorize(const ParameterSchema& schema, const ParameterVector& v) {
  validate(schema, v);
  FeatureVector out(schema.feature_count(), 0.0);
  const auto& entries = schema.entries();
  for (std::size_t i = 0; i < entries.size(); ++i) out[i] = v.values.at(entries[i].name);
  if (!schema.acps().empty()) out[schema.acp_offset() + *schema.acp_index(v.acp)] = 1.0;
  return out;
}

Matrix to_feature_matrix(const ParameterSchema& schema, const std::vector<ParameterVector>& vectors) {
  Matrix X(vectors.size(), schema.feature_count());
  for (std::size_t r = 0; r < vectors.size(); ++r) {
    auto f = vectorize(schema, vectors[r]);
    std::copy(f.begin(), f.end(), X.row(r).begin());
  }
  return X;
}

nlohmann::json config_to_json(const ParameterSchema& schema, const ParameterVector& v) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& e : schema.entries()) {
    auto it = v.values.find(e.name);
    if (it == v.values.end()) continue;
    if (e.kind == ParamKind::Boolean) {
      j[e.name] = it->second != 0.0;
    } else {
      j[e.name] = it->second;
    }
  }
  if (!v.acp.empty()) j["acp"] = v.acp;
  return j;
}

ParameterVector config_from_json(const ParameterSchema& schema, const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::MalformedConfig, "config must be a JSON object");
  ParameterVector v;
  for (const auto& [key, value] : j.items()) {
    if (key == "acp") {
      if (!value.is_string()) throw Error(ErrorCode::MalformedConfig, "\"acp\" must be a string");
      v.acp = value.get<std::string>();
    } else if (value.is_boolean()) {
      v.values[key] = value.get<bool>() ? 1.0 : 0.0;
    } else if (value.is_number()) {
      v.values[key] = value.get<double>();
    } else {
      throw Error(ErrorCode::MalformedConfig, "value of '" + key + "' must be a number or boolean");
    }
  }
  validate(schema, v);
  return v;
}

std::pair<Matrix, ScalerStats> standardize(const Matrix& X, const std::optional<ScalerStats>& fitted) {
  if (X.rows() == 0) throw Error(ErrorCode::EmptyMatrix, "cannot standardize a matrix with no rows");
  ScalerStats stats;
  if (fitted) {
    if (fitted->mean.size() != X.cols() || fitted->std.size() != X.cols()) {
      throw Error(ErrorCode::DimensionMismatch, "scaler stats do not match matrix width");
    }
    stats = *fitted;
  } else {
    const auto n = static_cast<double>(X.rows());
    stats.mean.assign(X.cols(), 0.0);
    stats.std.assign(X.cols(), 0.0);
    for (std::size_t c = 0; c < X.cols(); ++c) {
      double sum = 0.0;
      for (std::size_t r = 0; r < X.rows(); ++r) sum += X(r, c);
      const double mean = sum / n;
      double ss = 0.0;
      bool constant = true;
      for (std::size_t r = 0; r < X.rows(); ++r) {
        ss += (X(r, c) - mean) * (X(r, c) - mean);
        constant = constant && X(r, c) == X(0, c);
      }
      stats.mean[c] = mean;
      stats.std[c] = constant ? 0.0 : std::sqrt(ss / n);
    }
  }
  Matrix out(X.rows(), X.cols());
  for (std::size_t r = 0; r < X.rows(); ++r) {
    for (std::size_t c = 0; c < X.cols(); ++c) {
      out(r, c) = stats.std[c] > 0.0 ? (X(r, c) - stats.mean[c]) / stats.std[c] : 0.0;
    }
  }
  return {std::move(out), std::move(stats)};
}

}  // namespace surrogate
