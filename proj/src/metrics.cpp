#include "ffcc/metrics.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

namespace ffcc {

double angular_error(const Rgb& a, const Rgb& b) {
  const double na = std::sqrt(a.r * a.r + a.g * a.g + a.b * a.b);
  const double nb = std::sqrt(b.r * b.r + b.g * b.g + b.b * b.b);
  if (!(na > 0.0) || !(nb > 0.0)) throw Error("angular_error: zero vector");
  // atan2 of |a x b| and a . b stays accurate for nearly parallel vectors.
  const double cx = a.g * b.b - a.b * b.g;
  const double cy = a.b * b.r - a.r * b.b;
  const double cz = a.r * b.g - a.g * b.r;
  const double dot = a.r * b.r + a.g * b.g + a.b * b.b;
  return std::atan2(std::sqrt(cx * cx + cy * cy + cz * cz), dot) * 180.0 / std::numbers::pi;
}

double quantile(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw Error("quantile of an empty list");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

MetricSummary summarize(std::span<const double> errors) {
  if (errors.empty()) throw Error("summarize: empty error list");
  std::vector<double> e(errors.begin(), errors.end());
  std::sort(e.begin(), e.end());

  MetricSummary m;
  m.mean = std::accumulate(e.begin(), e.end(), 0.0) / e.size();
  const double q1 = quantile(e, 0.25);
  m.median = quantile(e, 0.5);
  const double q3 = quantile(e, 0.75);
  m.trimean = (q1 + 2.0 * m.median + q3) / 4.0;

  double lo_sum = 0.0, hi_sum = 0.0;
  std::size_t lo_n = 0, hi_n = 0;
  for (double x : e) {
    if (x <= q1) lo_sum += x, ++lo_n;
    if (x >= q3) hi_sum += x, ++hi_n;
  }
  m.best25 = lo_sum / lo_n;
  m.worst25 = hi_sum / hi_n;
  m.avg = std::pow(m.mean * m.median * m.trimean * m.best25 * m.worst25, 0.2);
  return m;
}

double entropy(const Eigen::Matrix2d& sigma) {
  const double det = sigma.determinant();
  if (!(sigma(0, 0) > 0.0) || !(det > 0.0) || std::abs(sigma(0, 1) - sigma(1, 0)) >
                                                    1e-12 * (std::abs(sigma(0, 0)) + std::abs(sigma(1, 1)))) {
    throw Error("entropy: covariance is not symmetric positive-definite");
  }
  return 0.5 * std::log(det);
}

double entropy_ordered_error(std::span<const ErrorEntropy> pairs) {
  if (pairs.empty()) throw Error("entropy_ordered_error: empty list");
  std::vector<ErrorEntropy> sorted(pairs.begin(), pairs.end());
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const ErrorEntropy& a, const ErrorEntropy& b) { return a.entropy < b.entropy; });
  const double n = static_cast<double>(sorted.size());
  double prev = 0.0;
  double area = 0.0;
  for (const ErrorEntropy& p : sorted) {
    const double next = prev + p.error;
    area += 0.5 * (prev + next);
    prev = next;
  }
  return 2.0 * area / (n * n);
}

}  // namespace ffcc
