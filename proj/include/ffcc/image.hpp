#pragma once

#include <vector>

#include "ffcc/types.hpp"

namespace ffcc {

/// Photometrically linear RGB raster with a per-pixel validity mask.
///
/// Pixels are stored row-major (y outer, x inner). A pixel may only be
/// valid when all three channels are strictly positive; set_valid() enforces
/// this, so log-chroma is always defined for valid pixels.
class LinearImage {
 public:
  LinearImage(int width, int height);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t pixel_count() const { return rgb_.size(); }

  const Rgb& at(int x, int y) const { return rgb_[index(x, y)]; }
  bool valid(int x, int y) const { return valid_[index(x, y)] != 0; }

  /// Stores the value and marks the pixel valid iff all channels are > 0.
  void set(int x, int y, const Rgb& rgb);
  /// Requests validity; ignored (pixel stays invalid) for non-positive pixels.
  void set_valid(int x, int y, bool valid);

  std::span<const Rgb> pixels() const { return rgb_; }
  std::size_t valid_count() const;

  /// Marks pixels with any channel >= threshold * white_level as invalid.
  void mask_saturated(double white_level, double threshold);

  /// Returns a copy with every channel multiplied by the given gains.
  LinearImage scaled(const Rgb& gains) const;

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * width_ + x;
  }

  int width_;
  int height_;
  std::vector<Rgb> rgb_;
  std::vector<unsigned char> valid_;
};

}  // namespace ffcc
