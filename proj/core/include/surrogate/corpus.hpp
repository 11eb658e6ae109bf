#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "surrogate/matrix.hpp"
#include "surrogate/schema.hpp"

namespace surrogate {

enum class Metric { Qli, GdpIndex, Unemployment, Gini };

inline constexpr std::array<Metric, 4> kAllMetrics{Metric::Qli, Metric::GdpIndex, Metric::Unemployment,
                                                   Metric::Gini};

std::string_view metric_name(Metric m) noexcept;
Metric metric_from_name(std::string_view name);

/// Final-month macro results of one configuration.
struct OutcomeMetrics {
  double qli = 0.0;           // [0, 1]
  double gdp_index = 0.0;     // >= 0
  double unemployment = 0.0;  // [0, 1]
  double gini = 0.0;          // [0, 1]
  int month = 0;

  double get(Metric m) const noexcept;
  friend bool operator==(const OutcomeMetrics&, const OutcomeMetrics&) = default;
};

/// Throws ValidationFailed when any metric lies outside its range.
void validate_outcome(const OutcomeMetrics& m);

struct RunRecord {
  std::string config_id;
  ParameterVector params;
  OutcomeMetrics outcome;

  friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

struct Dataset {
  ParameterSchema schema;
  std::vector<RunRecord> records;
  Matrix X;        // row i = vectorize(records[i].params)
  Matrix metrics;  // columns in kAllMetrics order
  std::vector<std::string> skipped;  // directories passed over during ingest, with reason

  std::size_t size() const noexcept { return records.size(); }
  std::vector<double> metric_column(Metric m) const;
  std::vector<ParameterVector> parameter_vectors() const;

  nlohmann::json to_json() const;
  static Dataset from_json(const nlohmann::json& j);
};

Dataset make_dataset(ParameterSchema schema, std::vector<RunRecord> records);

/// Parsed averages.csv: header plus numeric rows.
struct AveragesTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

inline constexpr std::string_view kConfigFile = "config.json";
inline constexpr std::string_view kAveragesFile = "averages.csv";

/// Throws MalformedAverages on ragged rows or unparseable numbers.
AveragesTable parse_averages(std::string_view text);

/// Metrics of the row with the largest month. Throws EmptyTable / MissingColumn.
OutcomeMetrics final_month(const AveragesTable& table);

/// Walks the immediate subdirectories of `root` (lexicographic order). Each
/// directory holding both config.json and averages.csv becomes one record;
/// directories missing either file are listed in Dataset::skipped. Nested
/// per-run folders are never read.
Dataset ingest(const std::filesystem::path& root, const ParameterSchema& schema);

}  // namespace surrogate
