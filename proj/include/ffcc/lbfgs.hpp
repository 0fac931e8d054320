#pragma once

#include <functional>
#include <span>
#include <vector>

namespace ffcc {

/// Objective callback: returns f(x) and writes the gradient into `grad`
/// (same length as x).
using Objective = std::function<double(std::span<const double> x, std::span<double> grad)>;

struct LbfgsOptions {
  int max_iters = 100;
  int history = 10;
  /// Sufficient-decrease constant of the backtracking line search.
  double armijo = 1e-4;
  /// Step shrink factor per backtracking step.
  double backtrack = 0.5;
  int max_line_search_steps = 50;
  /// Stops when the max-norm of the gradient falls below this.
  double grad_tol = 1e-10;
};

struct IterationRecord {
  int iteration = 0;
  double loss = 0.0;
  double grad_norm = 0.0;
};

struct LbfgsResult {
  std::vector<double> x;
  double loss = 0.0;
  /// Number of accepted steps.
  int iterations = 0;
  bool converged = false;
  /// Set when a line search could not find a sufficient decrease.
  bool line_search_failed = false;
  /// Entry 0 is the starting point; entry k follows the k-th accepted step.
  std::vector<IterationRecord> trace;
};

/// Limited-memory BFGS with the two-loop recursion and a backtracking
/// (Armijo) line search. Curvature pairs with s.y <= 0 are discarded.
/// Accepted losses are monotone non-increasing and the returned point is the
/// best iterate seen.
LbfgsResult lbfgs_minimize(const Objective& objective, std::vector<double> x0,
                           const LbfgsOptions& options);

}  // namespace ffcc
