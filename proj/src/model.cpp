#include "ffcc/model.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>

namespace ffcc {

std::string_view to_string(DealiasMode mode) {
  return mode == DealiasMode::kGrayWorld ? "gray-world" : "gray-light";
}

DealiasMode parse_dealias_mode(std::string_view text) {
  if (text == "gray-light") return DealiasMode::kGrayLight;
  if (text == "gray-world") return DealiasMode::kGrayWorld;
  throw Error("unknown de-aliasing mode '" + std::string(text) + "'");
}

ModelParams ModelParams::zeros(const HistogramGeometry& geom) {
  geom.validate();
  ModelParams p;
  p.geometry = geom;
  for (Grid& f : p.filters) f = Grid(geom.n);
  p.gain_log = Grid(geom.n);
  p.bias = Grid(geom.n);
  return p;
}

void ModelParams::validate() const {
  geometry.validate();
  const int n = geometry.n;
  for (const Grid& f : filters) {
    if (f.n() != n) throw Error("model filter size does not match geometry");
  }
  if (gain_log.n() != n || bias.n() != n) throw Error("model gain/bias size does not match geometry");
}

Grid softmax2d(const Grid& z) {
  Grid p(z.n());
  double zmax = -std::numeric_limits<double>::infinity();
  for (double v : z.values()) zmax = std::max(zmax, v);
  double total = 0.0;
  auto out = p.values();
  auto in = z.values();
  for (std::size_t k = 0; k < in.size(); ++k) {
    out[k] = std::exp(in[k] - zmax);
    total += out[k];
  }
  const double inv = 1.0 / total;
  for (double& v : out) v *= inv;
  return p;
}

namespace {

Grid exp_grid(const Grid& g) {
  Grid out(g.n());
  auto in = g.values();
  auto o = out.values();
  for (std::size_t k = 0; k < in.size(); ++k) o[k] = std::exp(in[k]);
  return out;
}

Grid logits_from(const HistogramStack& stack, const std::array<Spectrum, kNumChannels>& filters,
                 const Grid& gain, const Grid& bias) {
  Spectrum acc = rfft2(stack.channels[0]);
  for (std::size_t k = 0; k < acc.bins.size(); ++k) acc.bins[k] *= filters[0].bins[k];
  for (int c = 1; c < kNumChannels; ++c) {
    const Spectrum s = rfft2(stack.channels[c]);
    for (std::size_t k = 0; k < acc.bins.size(); ++k) acc.bins[k] += s.bins[k] * filters[c].bins[k];
  }
  Grid y = irfft2(acc);
  auto yv = y.values();
  auto gv = gain.values();
  auto bv = bias.values();
  for (std::size_t k = 0; k < yv.size(); ++k) yv[k] = bv[k] + gv[k] * yv[k];
  return y;
}

void check_stack(const HistogramStack& stack, const ModelParams& params) {
  if (!(stack.geometry == params.geometry)) {
    throw Error("histogram geometry does not match model geometry");
  }
}

}  // namespace

Grid forward_logits(const HistogramStack& stack, const ModelParams& params) {
  params.validate();
  check_stack(stack, params);
  std::array<Spectrum, kNumChannels> spectra;
  for (int c = 0; c < kNumChannels; ++c) spectra[c] = rfft2(params.filters[c]);
  return logits_from(stack, spectra, exp_grid(params.gain_log), params.bias);
}

Grid forward(const HistogramStack& stack, const ModelParams& params) {
  return softmax2d(forward_logits(stack, params));
}

Chroma dealias_gray_light(const Chroma& mu, const HistogramGeometry&) { return mu; }

Chroma dealias_gray_world(const Chroma& mu, const Chroma& image_mean, const HistogramGeometry& geom) {
  const double period = geom.period();
  const auto wrap = [period](double x, double center) {
    return x - period * std::floor((x - center) / period + 0.5);
  };
  return {wrap(mu.u, image_mean.u), wrap(mu.v, image_mean.v)};
}

Rgb illuminant_rgb(const Chroma& uv) {
  const double r = std::exp(-uv.u);
  const double b = std::exp(-uv.v);
  const double z = std::sqrt(r * r + 1.0 + b * b);
  return {r / z, 1.0 / z, b / z};
}

Rgb gray_world_illuminant(const LinearImage& img) {
  const auto mean = mean_chroma(img);
  if (!mean) throw Error("gray world: image has no valid pixels");
  return illuminant_rgb(*mean);
}

Estimator::Estimator(ModelParams params) : params_(std::move(params)) {
  params_.validate();
  for (int c = 0; c < kNumChannels; ++c) filter_spectra_[c] = rfft2(params_.filters[c]);
  gain_ = exp_grid(params_.gain_log);
}

Grid Estimator::pdf(const HistogramStack& stack) const {
  check_stack(stack, params_);
  return softmax2d(logits_from(stack, filter_spectra_, gain_, params_.bias));
}

IlluminantEstimate Estimator::estimate(const HistogramStack& stack, const Chroma& image_mean,
                                       DealiasMode mode) const {
  const Grid p = pdf(stack);
  IlluminantEstimate est;
  est.posterior = fit_bvm(p, params_.geometry);
  if (mode == DealiasMode::kGrayWorld) {
    est.posterior.mu = dealias_gray_world(est.posterior.mu, image_mean, params_.geometry);
  } else {
    est.posterior.mu = dealias_gray_light(est.posterior.mu, params_.geometry);
  }
  est.rgb = illuminant_rgb(est.posterior.mu);
  est.entropy = 0.5 * std::log(est.posterior.sigma.determinant());
  return est;
}

IlluminantEstimate Estimator::estimate(const LinearImage& img, DealiasMode mode) const {
  const HistogramStack stack = build_stack(img, params_.geometry);
  Chroma mean;
  if (mode == DealiasMode::kGrayWorld) {
    const auto m = mean_chroma(img);
    if (!m) throw Error("gray-world de-aliasing needs at least one valid pixel");
    mean = *m;
  }
  return estimate(stack, mean, mode);
}

IlluminantEstimate estimate(const LinearImage& img, const ModelParams& params, DealiasMode mode) {
  return Estimator(params).estimate(img, mode);
}

}  // namespace ffcc
