#pragma once

#include <span>
#include <vector>

#include "ffcc/types.hpp"

namespace ffcc {

/// Per-slot weights w of the frequency-domain reparameterization
/// z = w * fftv(Z), chosen so that ||z||^2 equals the smoothness-plus-L2
/// regularizer of Z.
struct RegWeights {
  int n = 0;
  double lambda0 = 1.0;
  double lambda1 = 0.0;
  std::vector<double> w;
};

/// w = (1/n) sqrt(lambda1 (|D_u|^2 + |D_v|^2) + lambda0), evaluated at each
/// fftv slot's frequency, where D_u and D_v are the DFTs of the 2-tap
/// forward-difference filters zero-padded to n x n.
RegWeights build_weights(int n, double lambda0, double lambda1);

/// lambda1 * sum of squared wrap-around forward differences along both axes
/// plus lambda0 * sum of squares.
double regularizer_time_domain(const Grid& z, double lambda0, double lambda1);
/// Gradient of regularizer_time_domain with respect to every entry of z.
Grid regularizer_gradient(const Grid& z, double lambda0, double lambda1);

std::vector<double> to_preconditioned(const Grid& z, const RegWeights& w);
Grid from_preconditioned(std::span<const double> z, const RegWeights& w);

/// Chains a gradient with respect to the grid Z back to the preconditioned
/// vector z: (1/w) * fftv(dZ) / n^2, using that fftv / n is orthogonal.
std::vector<double> gradient_to_preconditioned(const Grid& d_grid, const RegWeights& w);

}  // namespace ffcc
