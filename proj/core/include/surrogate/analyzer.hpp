#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "surrogate/sampler.hpp"
#include "surrogate/schema.hpp"

namespace surrogate {

struct MeanShiftEntry {
  std::string parameter;
  double mean_all = 0.0;
  double mean_optimal = 0.0;
  /// (mean_optimal - mean_all) / |mean_all|; meaningless when !shift_defined.
  double relative_shift = 0.0;
  bool shift_defined = true;
  /// Same shift measured against the original sample's mean, when supplied.
  std::optional<double> sample_mean;
  std::optional<double> shift_vs_sample_mean;
};

/// Per continuous parameter, sorted by |relative_shift| descending (schema
/// order among ties, undefined shifts last). `reference` adds the
/// sample-mean columns. Throws EmptyInput / NoPositives / LengthMismatch.
std::vector<MeanShiftEntry> mean_shift_report(const std::vector<ParameterVector>& vectors, std::span<const int> labels,
                                              const ParameterSchema& schema,
                                              const MarginalStats* reference = nullptr);

struct BooleanRate {
  std::string parameter;
  double p_true_all = 0.0;
  double p_true_optimal = 0.0;
};

std::vector<BooleanRate> boolean_rates(const std::vector<ParameterVector>& vectors, std::span<const int> labels,
                                       const ParameterSchema& schema);

struct AcpRankEntry {
  std::string acp;
  double optimal_rate = 0.0;  // P(optimal | ACP active)
  std::size_t sample_count = 0;
  std::size_t optimal_count = 0;
  std::size_t rank = 0;  // dense, from 1; ties share the better rank
  bool rate_defined = true;
};

/// Sorted by rate descending, ties alphabetical; ACPs never sampled come
/// last with rate_defined = false.
std::vector<AcpRankEntry> acp_ranking(const std::vector<ParameterVector>& vectors, std::span<const int> labels,
                                      const ParameterSchema& schema);

enum class Agreement { Agree, Disagree, Undefined };
std::string_view to_string(Agreement a) noexcept;

struct DirectionAgreement {
  std::string parameter;
  Agreement agreement = Agreement::Undefined;
  double sample_shift = 0.0;
  double predicted_shift = 0.0;
};

/// Compares the sign of each parameter's shift in two reports over the same
/// parameters. Zero agrees only with zero. Throws SchemaMismatch.
std::vector<DirectionAgreement> direction_agreement(std::span<const MeanShiftEntry> sample_report,
                                                    std::span<const MeanShiftEntry> predicted_report);

/// e.g. "labor_market: +13% vs sample -19.8%"
std::string describe_shift(const std::string& parameter, double predicted_shift,
                           std::optional<double> sample_shift = std::nullopt);

std::string percent(double fraction);

struct FeatureImportance {
  std::string feature;
  double importance = 0.0;
};

std::vector<FeatureImportance> rank_importances(const std::vector<std::string>& names,
                                                std::span<const double> importances);

void write_mean_shift_csv(std::ostream& out, std::span<const MeanShiftEntry> entries);
void write_boolean_rates_csv(std::ostream& out, std::span<const BooleanRate> rates);
void write_acp_ranking_csv(std::ostream& out, std::span<const AcpRankEntry> ranking);
void write_agreement_csv(std::ostream& out, std::span<const DirectionAgreement> rows);
void write_importance_csv(std::ostream& out, std::span<const FeatureImportance> rows);

nlohmann::json to_json(std::span<const MeanShiftEntry> entries);
nlohmann::json to_json(std::span<const BooleanRate> rates);
nlohmann::json to_json(std::span<const AcpRankEntry> ranking);
nlohmann::json to_json(std::span<const DirectionAgreement> rows);

}  // namespace surrogate
