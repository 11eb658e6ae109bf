#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iterator>
#include <optional>
#include <numeric>
#include <random>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "surrogate/corpus.hpp"
#include "surrogate/error.hpp"
#include "surrogate/matrix.hpp"
#include "surrogate/svm.hpp"
#include "surrogate/target.hpp"

namespace surrogate::testing {

/// Scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "t") {
    static std::atomic<int> counter{0};
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("surrogate-" + tag + "-" + std::to_string(rd()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const noexcept { return path_; }
  std::filesystem::path operator/(const std::string& p) const { return path_ / p; }

 private:
  std::filesystem::path path_;
};

/// Code of the surrogate::Error thrown by fn, or nullopt if none was thrown.
inline std::optional<ErrorCode> thrown_code(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

/// Sort-and-slice reference labeller. Percentiles are whole percents, so
/// ranks come from exact integer arithmetic: ceil(k * n / 100).
struct PercentRule {
  Metric metric;
  Direction direction;
  int percent;  // 1..100
};

inline std::vector<int> brute_force_labels(std::span<const OutcomeMetrics> outcomes,
                                           const std::vector<PercentRule>& rules) {
  const long n = static_cast<long>(outcomes.size());
  std::vector<std::size_t> all(outcomes.size());
  std::iota(all.begin(), all.end(), 0);
  std::set<std::size_t> members(all.begin(), all.end());
  for (const auto& r : rules) {
    std::vector<std::size_t> order = all;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return outcomes[a].get(r.metric) < outcomes[b].get(r.metric);
    });
    const long keep = r.direction == Direction::Bottom ? r.percent : 100 - r.percent;
    long rank = (keep * n + 99) / 100;
    rank = std::clamp(rank, 1L, n);
    const double cut = outcomes[order[rank - 1]].get(r.metric);
    std::set<std::size_t> slice;
    for (auto i : order) {
      const double v = outcomes[i].get(r.metric);
      if (r.direction == Direction::Bottom ? v <= cut : v >= cut) slice.insert(i);
    }
    std::set<std::size_t> both;
    std::set_intersection(members.begin(), members.end(), slice.begin(), slice.end(),
                          std::inserter(both, both.begin()));
    members = std::move(both);
  }
  std::vector<int> out(outcomes.size(), 0);
  for (auto i : members) out[i] = 1;
  return out;
}

/// Mean of Normal(mu, sigma) restricted to [lo, hi], by composite Simpson
/// integration of the density and first moment.
inline double truncated_normal_mean(double mu, double sigma, double lo, double hi, int intervals = 200000) {
  hi = std::min(hi, mu + 40.0 * sigma);
  lo = std::max(lo, mu - 40.0 * sigma);
  const double h = (hi - lo) / intervals;
  double mass = 0.0, moment = 0.0;
  for (int i = 0; i <= intervals; ++i) {
    const double x = lo + i * h;
    const double z = (x - mu) / sigma;
    const double w = (i == 0 || i == intervals) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    const double phi = std::exp(-0.5 * z * z);
    mass += w * phi;
    moment += w * x * phi;
  }
  return moment / mass;
}

/// Same integration for the variance of the truncated distribution.
inline double truncated_normal_variance(double mu, double sigma, double lo, double hi, int intervals = 200000) {
  const double m = truncated_normal_mean(mu, sigma, lo, hi, intervals);
  hi = std::min(hi, mu + 40.0 * sigma);
  lo = std::max(lo, mu - 40.0 * sigma);
  const double h = (hi - lo) / intervals;
  double mass = 0.0, second = 0.0;
  for (int i = 0; i <= intervals; ++i) {
    const double x = lo + i * h;
    const double z = (x - mu) / sigma;
    const double w = (i == 0 || i == intervals) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    const double phi = std::exp(-0.5 * z * z);
    mass += w * phi;
    second += w * (x - m) * (x - m) * phi;
  }
  return second / mass;
}

/// Central differences of f at x with step h.
inline std::vector<double> finite_difference(const std::function<double(std::span<const double>)>& f,
                                             std::vector<double> x, double h = 1e-5) {
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double saved = x[i];
    x[i] = saved + h;
    const double fp = f(x);
    x[i] = saved - h;
    const double fm = f(x);
    x[i] = saved;
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

/// Soft-margin dual objective sum(a) - 1/2 sum_ij a_i a_j y_i y_j K_ij, computed directly.
inline double dual_objective(const Matrix& X, std::span<const int> y_pm, std::span<const double> alpha, double gamma,
                             double coef0, int degree) {
  double linear = 0.0, quad = 0.0;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    linear += alpha[i];
    if (alpha[i] == 0.0) continue;
    for (std::size_t j = 0; j < alpha.size(); ++j) {
      if (alpha[j] == 0.0) continue;
      quad += alpha[i] * alpha[j] * y_pm[i] * y_pm[j] * poly_kernel(X.row(i), X.row(j), gamma, coef0, degree);
    }
  }
  return linear - 0.5 * quad;
}

/// Random linearly separable 2-D set: points in [-1,1]^2 at distance >= margin
/// from a random line, labelled by side, both classes present.
struct SeparableSet {
  Matrix X;
  std::vector<int> y_pm;
};

inline SeparableSet separable_2d(std::mt19937_64& rng, std::size_t n, double margin) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::acos(-1.0));
  std::uniform_real_distribution<double> off(-0.4, 0.4);
  for (;;) {
    const double t = angle(rng);
    const double w0 = std::cos(t), w1 = std::sin(t), b = off(rng);
    SeparableSet s;
    int pos = 0;
    while (s.y_pm.size() < n) {
      const double p[2] = {u(rng), u(rng)};
      const double d = w0 * p[0] + w1 * p[1] + b;
      if (std::abs(d) < margin) continue;
      s.X.push_row(p);
      s.y_pm.push_back(d > 0 ? 1 : -1);
      pos += d > 0;
    }
    if (pos > 0 && pos < static_cast<int>(n)) return s;
  }
}

}  // namespace surrogate::testing
