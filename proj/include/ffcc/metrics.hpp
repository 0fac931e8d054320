#pragma once

#include <span>

#include <Eigen/Core>

#include "ffcc/types.hpp"

namespace ffcc {

/// Error statistics in degrees, in the usual color-constancy table layout.
struct MetricSummary {
  double mean = 0.0;
  double median = 0.0;
  double trimean = 0.0;
  /// Mean of the errors at or below the first quartile.
  double best25 = 0.0;
  /// Mean of the errors at or above the third quartile.
  double worst25 = 0.0;
  /// Geometric mean of the five statistics above.
  double avg = 0.0;
};

/// Angle in degrees between two RGB vectors. Throws for a zero vector.
double angular_error(const Rgb& estimate, const Rgb& truth);

/// Quantile with linear interpolation between order statistics
/// (position q * (N - 1) in the sorted list).
double quantile(std::span<const double> sorted, double q);

MetricSummary summarize(std::span<const double> errors);

/// 0.5 * log|sigma| (constant omitted). Throws for non positive-definite sigma.
double entropy(const Eigen::Matrix2d& sigma);

struct ErrorEntropy {
  double error = 0.0;
  double entropy = 0.0;
};

/// Twice the area under the cumulative error curve obtained by ordering
/// samples by ascending entropy (stable for ties). The curve passes through
/// (k/N, cumsum_k / N) and is integrated with the trapezoid rule, so an
/// uninformative ordering averages to the mean error and a perfect ordering
/// gives a value below it.
double entropy_ordered_error(std::span<const ErrorEntropy> pairs);

}  // namespace ffcc
