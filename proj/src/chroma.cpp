#include "ffcc/chroma.hpp"

#include <algorithm>
#include <cmath>

namespace ffcc {

void HistogramGeometry::validate() const {
  if (n < 2 || n % 2 != 0) throw Error("histogram size n must be even and >= 2");
  if (!(bin_size > 0.0) || !std::isfinite(bin_size)) throw Error("bin size must be positive");
  if (!std::isfinite(u_lo) || !std::isfinite(v_lo)) throw Error("histogram origin must be finite");
}

std::optional<Chroma> compute_uv(const Rgb& p) {
  if (!(p.r > 0.0 && p.g > 0.0 && p.b > 0.0)) return std::nullopt;
  return Chroma{std::log(p.g / p.r), std::log(p.g / p.b)};
}

LinearImage edge_image(const LinearImage& img) {
  const int w = img.width();
  const int h = img.height();
  LinearImage out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const bool interior = x > 0 && y > 0 && x + 1 < w && y + 1 < h;
      if (!interior) {
        out.set(x, y, {0.0, 0.0, 0.0});
        continue;
      }
      const Rgb& c = img.at(x, y);
      Rgb e;
      bool neighbours_valid = true;
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const Rgb& q = img.at(x + dx, y + dy);
          e.r += std::abs(c.r - q.r);
          e.g += std::abs(c.g - q.g);
          e.b += std::abs(c.b - q.b);
          neighbours_valid = neighbours_valid && img.valid(x + dx, y + dy);
        }
      }
      out.set(x, y, {e.r / 8.0, e.g / 8.0, e.b / 8.0});
      if (!neighbours_valid) out.set_valid(x, y, false);
    }
  }
  return out;
}

std::array<int, 2> chroma_bin(const Chroma& c, const HistogramGeometry& geom) {
  const auto wrap = [n = geom.n](double t) {
    double f = std::floor(t);
    // Values beyond int range still wrap correctly through fmod.
    double r = std::fmod(f, static_cast<double>(n));
    if (r < 0) r += n;
    int k = static_cast<int>(r);
    return k >= n ? 0 : k;
  };
  return {wrap((c.u - geom.u_lo) / geom.bin_size), wrap((c.v - geom.v_lo) / geom.bin_size)};
}

Grid build_histogram(const LinearImage& img, const HistogramGeometry& geom, std::size_t* count) {
  geom.validate();
  Grid hist(geom.n);
  std::size_t total = 0;
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      if (!img.valid(x, y)) continue;
      const auto uv = compute_uv(img.at(x, y));
      if (!uv) continue;
      const auto [i, j] = chroma_bin(*uv, geom);
      hist(i, j) += 1.0;
      ++total;
    }
  }
  if (total > 0) {
    const double scale = 1.0 / static_cast<double>(total);
    for (double& v : hist.values()) v *= scale;
  }
  if (count) *count = total;
  return hist;
}

HistogramStack build_stack(const LinearImage& img, const HistogramGeometry& geom) {
  HistogramStack stack;
  stack.geometry = geom;
  stack.channels[0] = build_histogram(img, geom, &stack.counts[0]);
  stack.channels[1] = build_histogram(edge_image(img), geom, &stack.counts[1]);
  return stack;
}

std::optional<Chroma> mean_chroma(const LinearImage& img) {
  double su = 0.0;
  double sv = 0.0;
  std::size_t count = 0;
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      if (!img.valid(x, y)) continue;
      const auto uv = compute_uv(img.at(x, y));
      if (!uv) continue;
      su += uv->u;
      sv += uv->v;
      ++count;
    }
  }
  if (count == 0) return std::nullopt;
  return Chroma{su / count, sv / count};
}

HistogramStack rebase_stack(const HistogramStack& stack, const HistogramGeometry& target) {
  const HistogramGeometry& src = stack.geometry;
  if (src == target) return stack;
  if (src.n != target.n || src.bin_size != target.bin_size) {
    throw Error("rebase_stack: histogram size and bin size must match");
  }
  const double du = (target.u_lo - src.u_lo) / src.bin_size;
  const double dv = (target.v_lo - src.v_lo) / src.bin_size;
  const double su = std::round(du);
  const double sv = std::round(dv);
  if (std::abs(du - su) > 1e-6 || std::abs(dv - sv) > 1e-6) {
    throw Error("rebase_stack: origin offset is not a whole number of bins");
  }
  const int n = src.n;
  const int shift_i = static_cast<int>(std::fmod(su, n));
  const int shift_j = static_cast<int>(std::fmod(sv, n));
  HistogramStack out;
  out.geometry = target;
  out.counts = stack.counts;
  for (int k = 0; k < kNumChannels; ++k) {
    // A pixel in source bin a lands in target bin a - shift.
    Grid g(n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) g(i, j) = stack.channels[k].wrap(i + shift_i, j + shift_j);
    }
    out.channels[k] = std::move(g);
  }
  return out;
}

HistogramGeometry fit_geometry(std::span<const Chroma> labels, int n, double bin_size) {
  HistogramGeometry geom;
  geom.n = n;
  geom.bin_size = bin_size;
  geom.validate();
  if (labels.empty()) throw Error("fit_geometry: no labels");
  double umin = labels[0].u, umax = labels[0].u;
  double vmin = labels[0].v, vmax = labels[0].v;
  for (const Chroma& c : labels) {
    umin = std::min(umin, c.u);
    umax = std::max(umax, c.u);
    vmin = std::min(vmin, c.v);
    vmax = std::max(vmax, c.v);
  }
  const double half_span = 0.5 * geom.period();
  geom.u_lo = bin_size * std::round((0.5 * (umin + umax) - half_span) / bin_size);
  geom.v_lo = bin_size * std::round((0.5 * (vmin + vmax) - half_span) / bin_size);
  return geom;
}

}  // namespace ffcc
