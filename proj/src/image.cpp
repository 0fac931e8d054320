#include "ffcc/image.hpp"

namespace ffcc {

namespace {
bool positive(const Rgb& p) { return p.r > 0.0 && p.g > 0.0 && p.b > 0.0; }
}  // namespace

LinearImage::LinearImage(int width, int height) : width_(width), height_(height) {
  if (width <= 0 || height <= 0) {
    throw Error("LinearImage: width and height must be positive");
  }
  rgb_.resize(static_cast<std::size_t>(width) * height);
  valid_.assign(rgb_.size(), 0);
}

void LinearImage::set(int x, int y, const Rgb& rgb) {
  const std::size_t k = index(x, y);
  rgb_[k] = rgb;
  valid_[k] = positive(rgb) ? 1 : 0;
}

void LinearImage::set_valid(int x, int y, bool valid) {
  const std::size_t k = index(x, y);
  valid_[k] = (valid && positive(rgb_[k])) ? 1 : 0;
}

std::size_t LinearImage::valid_count() const {
  std::size_t count = 0;
  for (unsigned char v : valid_) count += v;
  return count;
}

void LinearImage::mask_saturated(double white_level, double threshold) {
  const double limit = threshold * white_level;
  for (std::size_t k = 0; k < rgb_.size(); ++k) {
    const Rgb& p = rgb_[k];
    if (p.r >= limit || p.g >= limit || p.b >= limit) valid_[k] = 0;
  }
}

LinearImage LinearImage::scaled(const Rgb& gains) const {
  LinearImage out(width_, height_);
  for (std::size_t k = 0; k < rgb_.size(); ++k) {
    const Rgb& p = rgb_[k];
    out.rgb_[k] = {p.r * gains.r, p.g * gains.g, p.b * gains.b};
    out.valid_[k] = (valid_[k] && positive(out.rgb_[k])) ? 1 : 0;
  }
  return out;
}

}  // namespace ffcc
