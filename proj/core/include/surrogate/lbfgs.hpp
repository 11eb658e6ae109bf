#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace surrogate {

/// Objective callback: returns f(x) and writes the gradient into `grad`.
using Objective = std::function<double(std::span<const double> x, std::span<double> grad)>;

struct LbfgsOptions {
  std::size_t memory = 10;
  std::size_t max_iter = 2000;
  double grad_tol = 1e-5;       // stop when ||g||_inf < grad_tol
  double armijo_c1 = 1e-4;
  double backtrack = 0.5;
  std::size_t max_backtracks = 60;
};

enum class LbfgsStatus { Converged, MaxIterations, LineSearchFailure };

struct LbfgsResult {
  std::vector<double> x;  // best iterate seen
  double f = 0.0;
  double grad_inf_norm = 0.0;
  std::size_t iterations = 0;
  std::size_t evaluations = 0;
  LbfgsStatus status = LbfgsStatus::MaxIterations;
};

/// Limited-memory BFGS: two-loop recursion for the search direction and a
/// backtracking line search on the Armijo condition. Curvature pairs with
/// s.y <= 0 are not stored. When a line search fails the history is cleared
/// and one steepest-descent step is attempted; a second failure ends the run
/// with status LineSearchFailure. Throws NonFiniteObjective when f(x0) is not
/// finite.
LbfgsResult lbfgs_minimize(const Objective& objective, std::vector<double> x0, const LbfgsOptions& options = {});

}  // namespace surrogate
