#pragma once

#include <array>
#include <string>
#include <string_view>

#include "ffcc/bvm.hpp"
#include "ffcc/chroma.hpp"
#include "ffcc/image.hpp"
#include "ffcc/torus_fft.hpp"

namespace ffcc {

enum class DealiasMode { kGrayLight, kGrayWorld };

std::string_view to_string(DealiasMode mode);
/// Parses "gray-light" or "gray-world".
DealiasMode parse_dealias_mode(std::string_view text);

/// Learned model: one filter per histogram channel, a log-gain map and a
/// bias map, all n x n and periodic.
struct ModelParams {
  HistogramGeometry geometry;
  std::array<Grid, kNumChannels> filters;
  Grid gain_log;
  Grid bias;

  static ModelParams zeros(const HistogramGeometry& geom);
  /// Throws Error if any grid size disagrees with the geometry.
  void validate() const;

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

struct IlluminantEstimate {
  /// De-aliased posterior.
  BvmPosterior posterior;
  /// Unit-norm illuminant color.
  Rgb rgb;
  /// 0.5 * log|sigma|.
  double entropy = 0.0;
};

/// exp(z - max z) normalized to unit mass.
Grid softmax2d(const Grid& z);

/// Pre-softmax scores B + exp(G_log) * sum_k (N_k conv F_k).
Grid forward_logits(const HistogramStack& stack, const ModelParams& params);
/// softmax2d(forward_logits(...)).
Grid forward(const HistogramStack& stack, const ModelParams& params);

/// Gray-light de-aliasing: the identity, trusting histogram placement.
Chroma dealias_gray_light(const Chroma& mu, const HistogramGeometry& geom);
/// Gray-world de-aliasing: the alias of mu nearest the image's mean chroma.
Chroma dealias_gray_world(const Chroma& mu, const Chroma& image_mean, const HistogramGeometry& geom);

/// Unit-norm RGB of the illuminant with log-chroma (u, v).
Rgb illuminant_rgb(const Chroma& uv);

/// Gray-world baseline: the illuminant whose chroma is the image mean chroma.
Rgb gray_world_illuminant(const LinearImage& img);

/// Inference with precomputed filter spectra. Immutable after construction,
/// so a single instance may be shared by concurrent callers.
class Estimator {
 public:
  explicit Estimator(ModelParams params);

  const ModelParams& params() const { return params_; }

  /// Posterior PDF over the histogram torus for a stack.
  Grid pdf(const HistogramStack& stack) const;
  /// Full pipeline from a stack; the image mean chroma is only used for
  /// gray-world de-aliasing.
  IlluminantEstimate estimate(const HistogramStack& stack, const Chroma& image_mean,
                              DealiasMode mode) const;
  IlluminantEstimate estimate(const LinearImage& img, DealiasMode mode) const;

 private:
  ModelParams params_;
  std::array<Spectrum, kNumChannels> filter_spectra_;
  Grid gain_;
};

/// Builds an Estimator and runs it once. Throws DegenerateConcentration when
/// the posterior PDF has no preferred direction.
IlluminantEstimate estimate(const LinearImage& img, const ModelParams& params,
                            DealiasMode mode = DealiasMode::kGrayLight);

}  // namespace ffcc
