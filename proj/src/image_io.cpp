#include "ffcc/image_io.hpp"

#include <fmt/format.h>
#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <string>

namespace ffcc {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::string& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode));
  if (!f) throw Error(fmt::format("cannot open '{}'", path));
  return f;
}

RawImage read_png(const std::string& path) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str())) {
    throw Error(fmt::format("{}: {}", path, image.message));
  }
  // 16-bit files are read as-is; 8-bit files are read without conversion.
  const bool sixteen = (image.format & PNG_FORMAT_FLAG_LINEAR) != 0;
  image.format = sixteen ? PNG_FORMAT_LINEAR_RGB : PNG_FORMAT_RGB;
  RawImage raw;
  raw.width = static_cast<int>(image.width);
  raw.height = static_cast<int>(image.height);
  raw.max_value = sixteen ? 65535 : 255;
  raw.samples.resize(static_cast<std::size_t>(raw.width) * raw.height * 3);
  int ok = 0;
  if (sixteen) {
    ok = png_image_finish_read(&image, nullptr, raw.samples.data(), 0, nullptr);
  } else {
    std::vector<std::uint8_t> buf(raw.samples.size());
    ok = png_image_finish_read(&image, nullptr, buf.data(), 0, nullptr);
    std::copy(buf.begin(), buf.end(), raw.samples.begin());
  }
  if (!ok) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw Error(fmt::format("{}: {}", path, msg));
  }
  return raw;
}

// Next whitespace-delimited header token, skipping '#' comments.
std::string pnm_token(std::istream& in) {
  std::string tok;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (std::isspace(c)) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(static_cast<char>(c));
  }
  return tok;
}

RawImage read_pnm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(fmt::format("cannot open '{}'", path));
  const std::string magic = pnm_token(in);
  if (magic != "P5" && magic != "P6") throw Error(fmt::format("{}: only binary P5/P6 PNM files are supported", path));
  const int channels = magic == "P6" ? 3 : 1;
  RawImage raw;
  try {
    raw.width = std::stoi(pnm_token(in));
    raw.height = std::stoi(pnm_token(in));
    raw.max_value = std::stoi(pnm_token(in));
  } catch (const std::exception&) {
    throw Error(fmt::format("{}: malformed PNM header", path));
  }
  if (raw.width <= 0 || raw.height <= 0 || raw.max_value <= 0 || raw.max_value > 65535) {
    throw Error(fmt::format("{}: invalid PNM dimensions or maxval", path));
  }
  const int bytes = raw.max_value > 255 ? 2 : 1;
  const std::size_t pixels = static_cast<std::size_t>(raw.width) * raw.height;
  std::vector<unsigned char> buf(pixels * channels * bytes);
  if (!in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()))) {
    throw Error(fmt::format("{}: truncated PNM data", path));
  }
  raw.samples.resize(pixels * 3);
  for (std::size_t p = 0; p < pixels; ++p) {
    for (int c = 0; c < 3; ++c) {
      const std::size_t src = (p * channels + (channels == 3 ? c : 0)) * bytes;
      // PNM 16-bit samples are big-endian.
      raw.samples[p * 3 + c] = bytes == 2 ? static_cast<std::uint16_t>(buf[src] << 8 | buf[src + 1]) : buf[src];
    }
  }
  return raw;
}

double srgb_to_linear(double c) { return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4); }

}  // namespace

RawImage read_raw_image(const std::string& path) {
  unsigned char sig[8] = {};
  {
    FilePtr f = open_file(path, "rb");
    if (std::fread(sig, 1, sizeof sig, f.get()) < 2) throw Error(fmt::format("{}: file too short", path));
  }
  if (png_sig_cmp(sig, 0, 8) == 0) return read_png(path);
  if (sig[0] == 'P') return read_pnm(path);
  throw Error(fmt::format("{}: unrecognized image format (expected PNG or PPM/PGM)", path));
}

LinearImage to_linear(const RawImage& raw, const ImageReadOptions& options) {
  LinearImage img(raw.width, raw.height);
  const double scale = 1.0 / raw.max_value;
  for (int y = 0; y < raw.height; ++y) {
    for (int x = 0; x < raw.width; ++x) {
      const std::size_t k = (static_cast<std::size_t>(y) * raw.width + x) * 3;
      double c[3];
      for (int i = 0; i < 3; ++i) {
        c[i] = raw.samples[k + i] * scale;
        if (options.assume_srgb) c[i] = srgb_to_linear(c[i]);
      }
      img.set(x, y, {c[0], c[1], c[2]});
    }
  }
  img.mask_saturated(1.0, options.saturation_threshold);
  return img;
}

LinearImage read_image(const std::string& path, const ImageReadOptions& options) {
  return to_linear(read_raw_image(path), options);
}

std::vector<bool> read_mask(const std::string& path, int width, int height) {
  const RawImage raw = read_raw_image(path);
  if (raw.width != width || raw.height != height) {
    throw Error(fmt::format("{}: mask is {}x{}, image is {}x{}", path, raw.width, raw.height, width, height));
  }
  std::vector<bool> mask(static_cast<std::size_t>(width) * height);
  for (std::size_t p = 0; p < mask.size(); ++p) {
    mask[p] = raw.samples[3 * p] != 0 || raw.samples[3 * p + 1] != 0 || raw.samples[3 * p + 2] != 0;
  }
  return mask;
}

void write_png(const std::string& path, const Image8& img) {
  if (img.channels != 1 && img.channels != 3) throw Error("write_png: channels must be 1 or 3");
  if (img.data.size() != static_cast<std::size_t>(img.width) * img.height * img.channels) {
    throw Error("write_png: buffer size mismatch");
  }
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(img.width);
  image.height = static_cast<png_uint_32>(img.height);
  image.format = img.channels == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  if (!png_image_write_to_file(&image, path.c_str(), 0, img.data.data(), 0, nullptr)) {
    throw Error(fmt::format("cannot write '{}': {}", path, image.message));
  }
}

}  // namespace ffcc
