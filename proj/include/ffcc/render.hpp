#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ffcc/image.hpp"
#include "ffcc/image_io.hpp"
#include "ffcc/model.hpp"

namespace ffcc {

using Ccm = std::array<std::array<double, 3>, 3>;

inline constexpr Ccm kIdentityCcm = {{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};

struct NamedCcm {
  std::string_view camera;
  Ccm ccm;
};

/// Row-normalized color correction matrices for the benchmark cameras,
/// keyed "Dataset/Camera" (e.g. "GehlerShi/Canon1D").
const std::vector<NamedCcm>& ccm_table();
std::optional<Ccm> find_ccm(std::string_view camera);

/// Standard sRGB transfer curve on [0, 1].
double linear_to_srgb(double c);
/// 8-bit code of a linear value: clamp, encode, round to nearest.
std::uint8_t srgb_byte(double linear);

/// White balances by dividing each channel by L / L_g, applies the CCM and
/// encodes to 8-bit sRGB. Every pixel is rendered, valid or not.
Image8 render_srgb(const LinearImage& img, const Rgb& illuminant, const Ccm& ccm = kIdentityCcm);

struct NamedMap {
  std::string name;
  Image8 image;
};

/// Grayscale n x n pictures of each filter, the gain exp(G_log) and the bias,
/// shifted so the origin bin sits at (n/2, n/2) and min-max scaled to
/// 0..255. A constant grid renders as mid-gray (128).
std::vector<NamedMap> render_model_maps(const ModelParams& params);

}  // namespace ffcc
