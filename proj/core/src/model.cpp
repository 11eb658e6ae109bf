#include "surrogate/model.hpp"

#include <fstream>

#include "surrogate/ensemble.hpp"
#include "surrogate/error.hpp"
#include "surrogate/forest.hpp"
#include "surrogate/mlp.hpp"
#include "surrogate/parallel.hpp"
#include "surrogate/svm.hpp"

namespace surrogate {

void check_dimension(std::span<const double> x, std::size_t expected) {
  if (x.size() != expected) {
    throw Error(ErrorCode::DimensionMismatch,
                "input has " + std::to_string(x.size()) + " features, model expects " + std::to_string(expected));
  }
}

std::vector<double> Classifier::predict_proba(const Matrix& X) const {
  if (X.rows() > 0 && X.cols() != input_dim()) check_dimension(X.row(0), input_dim());
  std::vector<double> out(X.rows());
  constexpr std::size_t kBlock = 1024;
  const std::size_t blocks = (X.rows() + kBlock - 1) / kBlock;
  parallel_for(blocks, [&](std::size_t b) {
    const std::size_t end = std::min(X.rows(), (b + 1) * kBlock);
    for (std::size_t r = b * kBlock; r < end; ++r) out[r] = predict_proba(X.row(r));
  });
  return out;
}

std::vector<int> Classifier::predict(const Matrix& X) const {
  auto p = predict_proba(X);
  std::vector<int> out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) out[i] = decide(p[i]);
  return out;
}

nlohmann::json save_model(const Classifier& model) {
  nlohmann::json j = model.body_to_json();
  j["format_version"] = kModelFormatVersion;
  j["kind"] = model.kind();
  j["input_dim"] = model.input_dim();
  return j;
}

std::shared_ptr<const Classifier> load_model(const nlohmann::json& envelope) {
  try {
    const int version = envelope.at("format_version").get<int>();
    if (version != kModelFormatVersion) {
      throw Error(ErrorCode::FormatVersion, "model format_version " + std::to_string(version) +
                                                " is not supported (expected " +
                                                std::to_string(kModelFormatVersion) + ")");
    }
    const auto kind = envelope.at("kind").get<std::string>();
    if (kind == "forest") return std::make_shared<ForestModel>(ForestModel::from_json(envelope));
    if (kind == "svm") return std::make_shared<SvmModel>(SvmModel::from_json(envelope));
    if (kind == "mlp") return std::make_shared<MlpModel>(MlpModel::from_json(envelope));
    if (kind == "voting") return std::make_shared<VotingModel>(VotingModel::from_json(envelope));
    throw Error(ErrorCode::FormatVersion, "unknown model kind '" + kind + "'");
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::FormatVersion, std::string("malformed model envelope: ") + e.what());
  }
}

void write_model_file(const Classifier& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write model file " + path);
  out << save_model(model).dump() << '\n';
}

std::shared_ptr<const Classifier> read_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open model file " + path);
  try {
    return load_model(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::FormatVersion, path + ": " + e.what());
  }
}

}  // namespace surrogate
