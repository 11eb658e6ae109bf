#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "surrogate/error.hpp"
#include "surrogate/eval.hpp"
#include "surrogate/forest.hpp"
#include "surrogate/mlp.hpp"
#include "surrogate/sampler.hpp"
#include "surrogate/svm.hpp"

namespace surrogate {

/// Everything a pipeline run depends on. Stage seeds are derived from `seed`.
struct PipelineConfig {
  std::string corpus;
  std::string schema;
  std::string rules;
  std::string out = "surrogate-out";

  std::uint64_t seed = 7;
  double train_frac = 0.65;
  bool stratify = false;
  bool standardize = false;
  std::size_t n_samples = 100000;

  std::vector<std::string> classifiers{"forest", "svm", "mlp", "voting"};
  std::vector<std::string> voting_members{"forest", "svm", "mlp"};
  std::string analysis_model = "forest";

  ForestParams forest{};
  SvmParams svm{};
  MlpParams mlp{};
  SamplerOptions sampler{};

  struct Seeds {
    std::uint64_t split, forest, mlp, sampler;
  };
  Seeds seeds() const;

  /// Paths excluded, so runs that differ only in where they read or write
  /// hash identically.
  nlohmann::json settings_json() const;
  nlohmann::json to_json() const;
  static PipelineConfig from_json(const nlohmann::json& j);
  static PipelineConfig load(const std::string& path);
};

/// Error tagged with the pipeline stage that raised it.
class StageError : public Error {
 public:
  StageError(std::string stage, const Error& cause)
      : Error(Verbatim{}, cause.code(), "stage '" + stage + "': " + cause.what()), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

/// Exit status for an error: 1 usage, 2 data, 3 numeric.
int exit_status(const Error& e) noexcept;

/// Artifact file names inside the output directory.
namespace artifacts {
inline constexpr const char* kConfig = "pipeline_config.json";
inline constexpr const char* kDataset = "dataset.json";
inline constexpr const char* kLabels = "labels.csv";
inline constexpr const char* kSplit = "split.json";
inline constexpr const char* kScaler = "scaler.json";
inline constexpr const char* kModelDir = "models";
inline constexpr const char* kEvalJson = "eval_report.json";
inline constexpr const char* kEvalText = "eval_report.txt";
inline constexpr const char* kMarginals = "marginals.json";
inline constexpr const char* kSamples = "samples.jsonl";
inline constexpr const char* kPredictions = "predictions.csv";
inline constexpr const char* kMeanShift = "mean_shift.csv";
inline constexpr const char* kSampleMeanShift = "sample_mean_shift.csv";
inline constexpr const char* kAgreement = "direction_agreement.csv";
inline constexpr const char* kBooleanRates = "boolean_rates.csv";
inline constexpr const char* kAcpRanking = "acp_ranking.csv";
inline constexpr const char* kImportance = "feature_importance.csv";
inline constexpr const char* kAnalysis = "analysis.json";
}  // namespace artifacts

struct SynthOptions {
  std::string out;
  std::size_t n_configs = 232;
  std::size_t runs_per_config = 3;
  std::size_t n_acps = 46;
  std::uint64_t seed = 1;        // corpus draws
  std::uint64_t world_seed = 1;  // ACP quality table
  double noise_std = 0.05;
};

/// Each stage reads its inputs from the documented files (or raw inputs
/// named in the config) and writes its artifacts into cfg.out. Errors are
/// rethrown as StageError.
namespace stages {
void synth(const SynthOptions& opts);
void ingest(const PipelineConfig& cfg);
void label(const PipelineConfig& cfg);
void train(const PipelineConfig& cfg);
void eval(const PipelineConfig& cfg, const std::optional<std::string>& model_path = std::nullopt);
void sample(const PipelineConfig& cfg);
void predict(const PipelineConfig& cfg, const std::optional<std::string>& model_path = std::nullopt);
void analyze(const PipelineConfig& cfg);
}  // namespace stages

/// ingest -> label -> train -> eval -> sample -> predict -> analyze.
void run_pipeline(const PipelineConfig& cfg);

/// Reads eval_report.json back into per-classifier results.
std::vector<ClassifierEvaluation> read_evaluations(const std::filesystem::path& out_dir);

}  // namespace surrogate
