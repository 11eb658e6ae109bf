#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

namespace surrogate {

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Seeded uniform permutation; the first floor(train_frac * n) indices train.
/// Throws DegenerateSplit when either side would be empty.
SplitIndices split(std::size_t n, double train_frac, std::uint64_t seed);

/// Per-class variant: each class is permuted and cut at floor(train_frac * n_c)
/// on its own. Output index lists are sorted.
SplitIndices stratified_split(std::span<const int> labels, double train_frac, std::uint64_t seed);

/// Rows are actual {0, 1}, columns predicted {0, 1}.
struct ConfusionMatrix {
  std::size_t tn = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tp = 0;

  std::size_t total() const noexcept { return tn + fp + fn + tp; }
  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

/// Throws LengthMismatch (also for empty input).
ConfusionMatrix confusion(std::span<const int> y_true, std::span<const int> y_pred);

/// (tn + tp) / total. Throws EmptyMatrix.
double accuracy(const ConfusionMatrix& m);

/// Fixed 4-decimal rendering used in reports.
std::string format_score(double score);

struct ClassifierEvaluation {
  std::string name;
  ConfusionMatrix matrix;
  double score = 0.0;
};

nlohmann::json evaluation_to_json(const ClassifierEvaluation& e);

/// Text table: one column pair per classifier, a score row, then the two
/// confusion-matrix rows.
std::string evaluation_table(std::span<const ClassifierEvaluation> evaluations);

}  // namespace surrogate
