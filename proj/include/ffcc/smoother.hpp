#pragma once

#include "ffcc/bvm.hpp"

namespace ffcc {

/// Running illuminant estimate for one video stream.
struct SmootherState {
  Chroma mu;
  Eigen::Matrix2d sigma = Eigen::Matrix2d::Identity();
  /// Per-frame transition variance added to both axes before each update.
  double alpha = 0.0;
  /// Alias period of the observations (n * h of the model that produced
  /// them). Observations further than period / 2 from mu along an axis are
  /// moved to the nearest alias before fusion. Zero disables the remapping.
  double period = 0.0;
};

/// Starts a stream from its first observation.
SmootherState init_state(const BvmPosterior& first, double alpha, double period = 0.0);

/// Product-of-Gaussians fusion of the predicted state and an observation.
/// Throws Error if either covariance is not symmetric positive-definite.
SmootherState smooth_update(const SmootherState& state, const BvmPosterior& obs);

}  // namespace ffcc
