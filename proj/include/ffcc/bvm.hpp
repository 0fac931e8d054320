#pragma once

#include <functional>

#include <Eigen/Core>

#include "ffcc/chroma.hpp"
#include "ffcc/types.hpp"

namespace ffcc {

/// Raised when a PDF has no preferred direction along some axis (zero
/// resultant), so its circular mean is undefined.
class DegenerateConcentration : public Error {
 public:
  using Error::Error;
};

/// Illuminant posterior: mean in log-chroma and 2x2 covariance (units^2).
struct BvmPosterior {
  Chroma mu;
  Eigen::Matrix2d sigma = Eigen::Matrix2d::Identity();
};

/// Regularizer added to the covariance diagonal, in bin units.
inline constexpr double kCovarianceEpsilon = 1.0;
/// Resultant lengths below this are treated as degenerate.
inline constexpr double kMinResultant = 1e-12;

/// Circular mean of a toroidal PDF, expressed in log-chroma inside the
/// primary span [u_lo, u_lo + n*h).
Chroma fit_mean(const Grid& p, const HistogramGeometry& geom);

/// Covariance of the PDF after unwrapping bins so the seam lies opposite
/// the mean; epsilon = 1 bin^2 is added to the diagonal before scaling by h^2.
Eigen::Matrix2d fit_covariance(const Grid& p, const HistogramGeometry& geom, const Chroma& mu);

BvmPosterior fit_bvm(const Grid& p, const HistogramGeometry& geom);

/// Gaussian negative log-likelihood without constants:
/// log|S| + (t - mu)^T S^-1 (t - mu).
double nll_loss(const BvmPosterior& post, const Chroma& target);

struct NllGradient {
  double loss = 0.0;
  Eigen::Vector2d d_mu = Eigen::Vector2d::Zero();
  /// Gradient with respect to every entry of sigma, treated as a full matrix.
  Eigen::Matrix2d d_sigma = Eigen::Matrix2d::Zero();
};

NllGradient nll_gradient(const BvmPosterior& post, const Chroma& target);

/// Maps an aliased mean to the member of its alias family used for scoring.
using DealiasFn = std::function<Chroma(const Chroma&)>;

struct BvmLoss {
  double loss = 0.0;
  /// Posterior after de-aliasing.
  BvmPosterior posterior;
  /// d loss / d P(i, j), treating P as unconstrained.
  Grid d_p;
};

/// Fits the BVM to P, de-aliases the mean and returns the NLL loss against
/// the target with its gradient with respect to every entry of P.
BvmLoss loss_backward(const Grid& p, const HistogramGeometry& geom, const Chroma& target,
                      const DealiasFn& dealias = {});

}  // namespace ffcc
