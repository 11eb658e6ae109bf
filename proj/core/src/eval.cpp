#include "surrogate/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>
#include <sstream>

#include "surrogate/error.hpp"

namespace surrogate {

namespace {

std::size_t train_count(std::size_t n, double train_frac) {
  return static_cast<std::size_t>(std::floor(train_frac * static_cast<double>(n) + 1e-9));
}

}  // namespace

SplitIndices split(std::size_t n, double train_frac, std::uint64_t seed) {
  if (!(train_frac > 0.0 && train_frac < 1.0)) {
    throw Error(ErrorCode::DegenerateSplit, "train fraction must lie strictly between 0 and 1");
  }
  const std::size_t n_train = train_count(n, train_frac);
  if (n < 2 || n_train == 0 || n_train == n) {
    throw Error(ErrorCode::DegenerateSplit, "split of " + std::to_string(n) + " samples leaves a side empty");
  }
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(perm.begin(), perm.end(), rng);
  SplitIndices out;
  out.train.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_train));
  out.test.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_train), perm.end());
  return out;
}

SplitIndices stratified_split(std::span<const int> labels, double train_frac, std::uint64_t seed) {
  if (!(train_frac > 0.0 && train_frac < 1.0)) {
    throw Error(ErrorCode::DegenerateSplit, "train fraction must lie strictly between 0 and 1");
  }
  std::mt19937_64 rng(seed);
  SplitIndices out;
  for (int cls : {0, 1}) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if ((labels[i] == 1) == (cls == 1)) members.push_back(i);
    }
    std::shuffle(members.begin(), members.end(), rng);
    const std::size_t k = train_count(members.size(), train_frac);
    out.train.insert(out.train.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(k));
    out.test.insert(out.test.end(), members.begin() + static_cast<std::ptrdiff_t>(k), members.end());
  }
  if (out.train.empty() || out.test.empty()) {
    throw Error(ErrorCode::DegenerateSplit, "stratified split leaves a side empty");
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

ConfusionMatrix confusion(std::span<const int> y_true, std::span<const int> y_pred) {
  if (y_true.size() != y_pred.size() || y_true.empty()) {
    throw Error(ErrorCode::LengthMismatch, "confusion needs equal, non-zero lengths (got " +
                                               std::to_string(y_true.size()) + " and " +
                                               std::to_string(y_pred.size()) + ")");
  }
  ConfusionMatrix m;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const bool actual = y_true[i] == 1;
    const bool predicted = y_pred[i] == 1;
    if (actual) (predicted ? m.tp : m.fn)++;
    else (predicted ? m.fp : m.tn)++;
  }
  return m;
}

double accuracy(const ConfusionMatrix& m) {
  if (m.total() == 0) throw Error(ErrorCode::EmptyMatrix, "accuracy of an empty confusion matrix");
  return static_cast<double>(m.tn + m.tp) / static_cast<double>(m.total());
}

std::string format_score(double score) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", score);
  return buf;
}

nlohmann::json evaluation_to_json(const ClassifierEvaluation& e) {
  return {{"score", std::stod(format_score(e.score))},
          {"score_text", format_score(e.score)},
          {"confusion", {{"tn", e.matrix.tn}, {"fp", e.matrix.fp}, {"fn", e.matrix.fn}, {"tp", e.matrix.tp}}}};
}

std::string evaluation_table(std::span<const ClassifierEvaluation> evaluations) {
  std::ostringstream os;
  auto cell = [&](const std::string& s, int width) {
    os << s;
    for (int i = static_cast<int>(s.size()); i < width; ++i) os << ' ';
  };
  constexpr int kLabel = 12;
  constexpr int kCol = 16;
  cell("", kLabel);
  for (const auto& e : evaluations) cell("| " + e.name, kCol);
  os << '\n';
  cell("Score", kLabel);
  for (const auto& e : evaluations) cell("| " + format_score(e.score), kCol);
  os << '\n';
  cell("Confusion", kLabel);
  for (const auto& e : evaluations) cell("| " + std::to_string(e.matrix.tn) + "  " + std::to_string(e.matrix.fp), kCol);
  os << '\n';
  cell("Matrix", kLabel);
  for (const auto& e : evaluations) cell("| " + std::to_string(e.matrix.fn) + "  " + std::to_string(e.matrix.tp), kCol);
  os << '\n';
  return os.str();
}

}  // namespace surrogate
