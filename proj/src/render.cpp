#include "ffcc/render.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace ffcc {

const std::vector<NamedCcm>& ccm_table() {
  static const std::vector<NamedCcm> table = {
      {"GehlerShi/Canon1D", {{{2.2310, -1.5926, 0.3616}, {-0.1494, 1.4544, -0.3050}, {0.1641, -0.6588, 1.4947}}}},
      {"GehlerShi/Canon5D", {{{1.7494, -0.8470, 0.0976}, {-0.1565, 1.4380, -0.2815}, {0.0786, -0.5070, 1.4284}}}},
      {"Cheng/Canon1DsMkIII", {{{1.7247, -0.7791, 0.0544}, {-0.1436, 1.4632, -0.3195}, {0.0589, -0.4625, 1.4037}}}},
      {"Cheng/Canon600D", {{{1.8988, -0.9897, 0.0909}, {-0.2058, 1.6396, -0.4338}, {0.0749, -0.7030, 1.6281}}}},
      {"Cheng/FujifilmXM1", {{{1.4183, -0.2497, -0.1686}, {-0.2230, 1.6449, -0.4219}, {0.0785, -0.5980, 1.5195}}}},
      {"Cheng/NikonD5200", {{{1.3792, -0.3134, -0.0659}, {-0.0826, 1.3759, -0.2932}, {0.0483, -0.4553, 1.4070}}}},
      {"Cheng/OlympusEPL6", {{{1.6565, -0.4971, -0.1595}, {-0.3335, 1.7772, -0.4437}, {0.0895, -0.7023, 1.6128}}}},
      {"Cheng/PanasonicGX1", {{{1.5629, -0.5117, -0.0512}, {-0.2472, 1.7590, -0.5117}, {0.1395, -0.8945, 1.7550}}}},
      {"Cheng/SamsungNX2000", {{{1.5770, -0.4351, -0.1419}, {-0.1747, 1.5225, -0.3477}, {0.0573, -0.6397, 1.5825}}}},
      {"Cheng/SonyA57", {{{1.5963, -0.5545, -0.0418}, {-0.1343, 1.5331, -0.3988}, {0.0563, -0.4026, 1.3463}}}},
  };
  return table;
}

std::optional<Ccm> find_ccm(std::string_view camera) {
  if (camera == "identity") return kIdentityCcm;
  for (const NamedCcm& c : ccm_table()) {
    if (c.camera == camera) return c.ccm;
  }
  return std::nullopt;
}

double linear_to_srgb(double c) {
  c = std::clamp(c, 0.0, 1.0);
  return c <= 0.0031308 ? 12.92 * c : 1.055 * std::pow(c, 1.0 / 2.4) - 0.055;
}

std::uint8_t srgb_byte(double linear) {
  return static_cast<std::uint8_t>(std::lround(255.0 * linear_to_srgb(linear)));
}

Image8 render_srgb(const LinearImage& img, const Rgb& illuminant, const Ccm& ccm) {
  if (!(illuminant.r > 0.0 && illuminant.g > 0.0 && illuminant.b > 0.0)) {
    throw Error("render_srgb: illuminant channels must be > 0");
  }
  const double gains[3] = {illuminant.g / illuminant.r, 1.0, illuminant.g / illuminant.b};
  Image8 out;
  out.width = img.width();
  out.height = img.height();
  out.channels = 3;
  out.data.resize(static_cast<std::size_t>(out.width) * out.height * 3);
  std::size_t k = 0;
  for (const Rgb& p : img.pixels()) {
    const double wb[3] = {p.r * gains[0], p.g * gains[1], p.b * gains[2]};
    for (int row = 0; row < 3; ++row) {
      const double c = ccm[row][0] * wb[0] + ccm[row][1] * wb[1] + ccm[row][2] * wb[2];
      out.data[k++] = srgb_byte(c);
    }
  }
  return out;
}

namespace {

Image8 render_map(const Grid& g) {
  const int n = g.n();
  const auto [lo_it, hi_it] = std::minmax_element(g.values().begin(), g.values().end());
  const double lo = *lo_it, hi = *hi_it;
  Image8 out;
  out.width = n;
  out.height = n;
  out.channels = 1;
  out.data.resize(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double v = g.wrap(i + n / 2, j + n / 2);
      const double t = hi > lo ? (v - lo) / (hi - lo) : 128.0 / 255.0;
      out.data[static_cast<std::size_t>(i) * n + j] = static_cast<std::uint8_t>(std::lround(255.0 * t));
    }
  }
  return out;
}

}  // namespace

std::vector<NamedMap> render_model_maps(const ModelParams& params) {
  params.validate();
  std::vector<NamedMap> maps;
  for (int k = 0; k < kNumChannels; ++k) maps.push_back({fmt::format("filter{}", k), render_map(params.filters[k])});
  Grid gain = params.gain_log;
  for (double& v : gain.values()) v = std::exp(v);
  maps.push_back({"gain", render_map(gain)});
  maps.push_back({"bias", render_map(params.bias)});
  return maps;
}

}  // namespace ffcc
