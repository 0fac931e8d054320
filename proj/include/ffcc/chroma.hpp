#pragma once

#include <array>
#include <optional>
#include <span>

#include "ffcc/image.hpp"
#include "ffcc/types.hpp"

namespace ffcc {

/// Placement of the toroidal log-chroma histogram. Bin (i, j) covers
/// u in [u_lo + i*h, u_lo + (i+1)*h) modulo the period n*h, likewise for v.
struct HistogramGeometry {
  int n = 64;
  double bin_size = 1.0 / 32.0;
  double u_lo = 0.0;
  double v_lo = 0.0;

  /// Torus period in log-chroma units.
  double period() const { return n * bin_size; }
  /// Throws Error unless n >= 2, n is even and bin_size > 0.
  void validate() const;

  friend bool operator==(const HistogramGeometry&, const HistogramGeometry&) = default;
};

/// Histogram channel count: pixel channel and edge channel.
inline constexpr int kNumChannels = 2;

/// K toroidal n x n histograms built from one image.
struct HistogramStack {
  HistogramGeometry geometry;
  std::array<Grid, kNumChannels> channels;
  /// Number of valid pixels that contributed to each channel. A zero count
  /// means that channel is the all-zero grid.
  std::array<std::size_t, kNumChannels> counts{};
};

/// Log-chroma of a pixel, or nullopt if any channel is non-positive.
std::optional<Chroma> compute_uv(const Rgb& pixel);

/// Local mean absolute deviation over the 8-neighbourhood, per channel.
/// Border pixels, pixels with any invalid neighbour and pixels whose
/// deviation is zero in some channel are marked invalid.
LinearImage edge_image(const LinearImage& img);

/// Unit-mass toroidal histogram of the valid pixels' log-chroma. Returns the
/// all-zero grid when there are no valid pixels; `count` receives the number
/// of contributing pixels.
Grid build_histogram(const LinearImage& img, const HistogramGeometry& geom,
                     std::size_t* count = nullptr);

/// Histogram bin of a chroma value under the floor + modulus rule.
std::array<int, 2> chroma_bin(const Chroma& c, const HistogramGeometry& geom);

/// Pixel channel and edge channel histograms.
HistogramStack build_stack(const LinearImage& img, const HistogramGeometry& geom);

/// Arithmetic mean of per-pixel (u, v) over valid pixels.
std::optional<Chroma> mean_chroma(const LinearImage& img);

/// Re-expresses a stack under a different origin. The origin offsets must be
/// integer multiples of the bin size, in which case the result is an exact
/// cyclic shift; otherwise Error is thrown.
HistogramStack rebase_stack(const HistogramStack& stack, const HistogramGeometry& target);

/// Histogram origin that centers the bounding box of the given illuminant
/// chroma values in the histogram span. The origin is snapped to integer
/// multiples of bin_size so that stacks built at any snapped origin can be
/// rebased onto each other.
HistogramGeometry fit_geometry(std::span<const Chroma> labels, int n, double bin_size);

}  // namespace ffcc
