#include "ffcc/smoother.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include <cmath>

namespace ffcc {

namespace {

void require_spd(const Eigen::Matrix2d& s, const char* what) {
  const bool symmetric = std::abs(s(0, 1) - s(1, 0)) <= 1e-12 * (std::abs(s(0, 0)) + std::abs(s(1, 1)));
  if (!s.allFinite() || !symmetric || !(s(0, 0) > 0.0) || !(s.determinant() > 0.0)) {
    throw Error(std::string("smoother: ") + what + " covariance is not symmetric positive-definite");
  }
}

double nearest_alias(double x, double ref, double period) {
  if (period <= 0.0) return x;
  return x - period * std::floor((x - ref) / period + 0.5);
}

}  // namespace

SmootherState init_state(const BvmPosterior& first, double alpha, double period) {
  if (!(alpha >= 0.0)) throw Error("smoother: alpha must be >= 0");
  if (!(period >= 0.0)) throw Error("smoother: period must be >= 0");
  require_spd(first.sigma, "observation");
  return SmootherState{first.mu, first.sigma, alpha, period};
}

SmootherState smooth_update(const SmootherState& state, const BvmPosterior& obs) {
  require_spd(state.sigma, "state");
  require_spd(obs.sigma, "observation");
  if (!(state.alpha >= 0.0)) throw Error("smoother: alpha must be >= 0");

  const Eigen::Matrix2d pred = state.sigma + state.alpha * Eigen::Matrix2d::Identity();
  const Eigen::Matrix2d pred_inv = pred.inverse();
  const Eigen::Matrix2d obs_inv = obs.sigma.inverse();
  const Eigen::Vector2d mu_t(state.mu.u, state.mu.v);
  const Eigen::Vector2d mu_o(nearest_alias(obs.mu.u, state.mu.u, state.period),
                             nearest_alias(obs.mu.v, state.mu.v, state.period));

  const Eigen::Matrix2d precision = pred_inv + obs_inv;
  Eigen::Matrix2d sigma = precision.inverse();
  sigma = 0.5 * (sigma + sigma.transpose());
  // Solve instead of multiplying by the inverse so that mu_o == mu_t is a
  // fixed point to rounding.
  const Eigen::Vector2d delta = precision.ldlt().solve(obs_inv * (mu_o - mu_t));

  SmootherState next = state;
  next.mu = {mu_t.x() + delta.x(), mu_t.y() + delta.y()};
  next.sigma = sigma;
  return next;
}

}  // namespace ffcc
