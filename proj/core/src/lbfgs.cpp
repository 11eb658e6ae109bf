#include "surrogate/lbfgs.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "surrogate/error.hpp"

namespace surrogate {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double inf_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

struct CurvaturePair {
  std::vector<double> s;
  std::vector<double> y;
  double rho;
};

// Two-loop recursion: returns -H g.
std::vector<double> direction(const std::deque<CurvaturePair>& history, std::span<const double> g) {
  std::vector<double> q(g.begin(), g.end());
  std::vector<double> alpha(history.size());
  for (std::size_t k = history.size(); k-- > 0;) {
    const auto& p = history[k];
    alpha[k] = p.rho * dot(p.s, q);
    for (std::size_t i = 0; i < q.size(); ++i) q[i] -= alpha[k] * p.y[i];
  }
  if (!history.empty()) {
    const auto& last = history.back();
    const double gamma = dot(last.s, last.y) / dot(last.y, last.y);
    for (auto& v : q) v *= gamma;
  }
  for (std::size_t k = 0; k < history.size(); ++k) {
    const auto& p = history[k];
    const double beta = p.rho * dot(p.y, q);
    for (std::size_t i = 0; i < q.size(); ++i) q[i] += p.s[i] * (alpha[k] - beta);
  }
  for (auto& v : q) v = -v;
  return q;
}

}  // namespace

LbfgsResult lbfgs_minimize(const Objective& objective, std::vector<double> x0, const LbfgsOptions& options) {
  const std::size_t n = x0.size();
  LbfgsResult result;
  std::vector<double> x = std::move(x0);
  std::vector<double> g(n);
  double f = objective(x, g);
  result.evaluations = 1;
  if (!std::isfinite(f) || !all_finite(g)) {
    throw Error(ErrorCode::NonFiniteObjective, "objective or gradient is not finite at the starting point");
  }

  std::deque<CurvaturePair> history;
  std::vector<double> x_new(n);
  std::vector<double> g_new(n);
  bool fallback_used = false;

  result.status = LbfgsStatus::MaxIterations;
  while (true) {
    if (inf_norm(g) < options.grad_tol) {
      result.status = LbfgsStatus::Converged;
      break;
    }
    if (result.iterations >= options.max_iter) break;

    auto d = direction(history, g);
    double slope = dot(g, d);
    if (!(slope < 0.0)) {
      history.clear();
      d = direction(history, g);
      slope = dot(g, d);
    }

    // Without curvature information, scale the first step to unit length.
    double step = history.empty() ? std::min(1.0, 1.0 / inf_norm(g)) : 1.0;

    bool accepted = false;
    double f_new = f;
    for (std::size_t k = 0; k < options.max_backtracks; ++k) {
      bool moved = false;
      for (std::size_t i = 0; i < n; ++i) {
        x_new[i] = x[i] + step * d[i];
        moved = moved || x_new[i] != x[i];
      }
      if (!moved) break;
      f_new = objective(x_new, g_new);
      ++result.evaluations;
      if (std::isfinite(f_new) && all_finite(g_new) && f_new <= f + options.armijo_c1 * step * slope) {
        accepted = true;
        break;
      }
      step *= options.backtrack;
    }

    if (!accepted) {
      if (fallback_used || history.empty()) {
        result.status = LbfgsStatus::LineSearchFailure;
        break;
      }
      fallback_used = true;
      history.clear();
      continue;
    }
    fallback_used = false;

    CurvaturePair pair{std::vector<double>(n), std::vector<double>(n), 0.0};
    for (std::size_t i = 0; i < n; ++i) {
      pair.s[i] = x_new[i] - x[i];
      pair.y[i] = g_new[i] - g[i];
    }
    const double sy = dot(pair.s, pair.y);
    if (sy > 1e-10 * std::sqrt(dot(pair.s, pair.s) * dot(pair.y, pair.y))) {
      pair.rho = 1.0 / sy;
      history.push_back(std::move(pair));
      if (history.size() > options.memory) history.pop_front();
    }

    x.swap(x_new);
    g.swap(g_new);
    f = f_new;
    ++result.iterations;
  }

  result.x = std::move(x);
  result.f = f;
  result.grad_inf_norm = inf_norm(g);
  return result;
}

}  // namespace surrogate
