#pragma once

#include <cstdint>
#include <vector>

#include "ffcc/image.hpp"

namespace ffcc {

/// Random scenes for tests and demos: a background plus axis-aligned
/// rectangles of flat reflectance, lit by one global illuminant.
struct SyntheticOptions {
  int width = 64;
  int height = 48;
  int patches = 14;
  /// Share of surfaces drawn near neutral; the rest are colorful with a
  /// common color cast, so gray world is biased on these scenes.
  double neutral_fraction = 0.3;
  /// Standard deviation of the multiplicative per-pixel noise.
  double noise = 0.02;
  /// Illuminant log-chroma is drawn from one of two Gaussian clusters.
  double cluster_a_u = -0.35;
  double cluster_a_v = 0.45;
  double cluster_b_u = 0.10;
  double cluster_b_v = -0.05;
  double cluster_sigma = 0.04;
};

struct SyntheticScene {
  LinearImage image{1, 1};
  /// Unit-norm ground truth.
  Rgb illuminant;
};

/// Deterministic for a given seed.
std::vector<SyntheticScene> make_synthetic_scenes(std::size_t count, std::uint64_t seed,
                                                  const SyntheticOptions& options = {});

}  // namespace ffcc
