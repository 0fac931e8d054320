#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ffcc/image.hpp"

namespace ffcc {

/// Decoded integer raster. Gray inputs are expanded to three channels and
/// alpha is dropped, so `samples` always holds width * height * 3 values.
struct RawImage {
  int width = 0;
  int height = 0;
  /// Largest representable code value (255, 65535, or the PNM maxval).
  int max_value = 255;
  std::vector<std::uint16_t> samples;
};

/// Reads an 8/16-bit PNG or a binary PPM/PGM (P6/P5), detected by content.
RawImage read_raw_image(const std::string& path);

struct ImageReadOptions {
  /// Pixels with any channel >= threshold * white level are invalid.
  double saturation_threshold = 0.98;
  /// Decode the sRGB transfer curve instead of treating codes as linear.
  bool assume_srgb = false;
};

/// Codes scaled by 1/max_value; non-positive and saturated pixels invalid.
LinearImage to_linear(const RawImage& raw, const ImageReadOptions& options = {});
LinearImage read_image(const std::string& path, const ImageReadOptions& options = {});

/// Per-pixel exclusion mask: true where any channel is nonzero.
std::vector<bool> read_mask(const std::string& path, int width, int height);

/// 8-bit display raster, 1 (gray) or 3 (RGB) channels, row-major.
struct Image8 {
  int width = 0;
  int height = 0;
  int channels = 3;
  std::vector<std::uint8_t> data;
};

void write_png(const std::string& path, const Image8& img);

}  // namespace ffcc
