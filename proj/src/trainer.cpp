#include "ffcc/trainer.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "ffcc/parallel.hpp"

namespace ffcc {

namespace {

constexpr int kNumGrids = kNumChannels + 2;
constexpr int kGainGrid = kNumChannels;
constexpr int kBiasGrid = kNumChannels + 1;
// Examples per reduction chunk. Fixed so the summation order (and hence the
// result) does not depend on the number of threads.
constexpr std::size_t kChunkSize = 8;

Spectrum zero_spectrum(int n) {
  Spectrum s;
  s.n = n;
  s.bins.assign(static_cast<std::size_t>(n) * s.cols(), {0.0, 0.0});
  return s;
}

}  // namespace

void TrainConfig::validate() const {
  for (const GridLambdas* l : {&filter, &gain, &bias}) {
    if (!(l->lambda0 > 0.0)) throw Error("training config: every lambda0 must be > 0");
    if (!(l->lambda1 >= 0.0)) throw Error("training config: every lambda1 must be >= 0");
  }
  if (pretrain_iters < 1 || refine_iters < 1) throw Error("training config: iteration counts must be >= 1");
  if (lbfgs_history < 1) throw Error("training config: lbfgs_history must be >= 1");
  if (u_lo.has_value() != v_lo.has_value()) throw Error("training config: set both u_lo and v_lo or neither");
  HistogramGeometry g;
  g.n = n;
  g.bin_size = bin_size;
  g.validate();
}

LogisticLoss logistic_loss(const Grid& p, const Chroma& target, const HistogramGeometry& geom) {
  if (!std::isfinite(target.u) || !std::isfinite(target.v)) throw Error("logistic_loss: target chroma must be finite");
  if (p.n() != geom.n) throw Error("logistic_loss: PDF size does not match geometry");
  const auto [bi, bj] = chroma_bin(target, geom);
  LogisticLoss out;
  out.loss = -std::log(p(bi, bj));
  out.d_logits = p;
  out.d_logits(bi, bj) -= 1.0;
  return out;
}

TrainingObjective::TrainingObjective(std::span<const TrainingExample> examples,
                                     const HistogramGeometry& geom, const TrainConfig& config,
                                     Stage stage)
    : geom_(geom), config_(config), stage_(stage) {
  geom_.validate();
  config_.validate();
  examples_.reserve(examples.size());
  for (const TrainingExample& ex : examples) {
    if (!(ex.stack.geometry == geom_)) throw Error("training example histogram geometry mismatch");
    Prepared p;
    for (int c = 0; c < kNumChannels; ++c) p.spectra[c] = rfft2(ex.stack.channels[c]);
    p.target = ex.target;
    p.image_mean = ex.image_mean;
    examples_.push_back(std::move(p));
  }
  for (int g = 0; g < kNumGrids; ++g) {
    const GridLambdas& l = lambdas_for(g);
    weights_[g] = build_weights(geom_.n, l.lambda0, l.lambda1);
  }
}

std::size_t TrainingObjective::dimension() const {
  return static_cast<std::size_t>(kNumGrids) * geom_.n * geom_.n;
}

const RegWeights& TrainingObjective::weights_for(int grid) const { return weights_[grid]; }

const GridLambdas& TrainingObjective::lambdas_for(int grid) const {
  if (grid < kNumChannels) return config_.filter;
  return grid == kGainGrid ? config_.gain : config_.bias;
}

ModelParams TrainingObjective::unpack(std::span<const double> x) const {
  if (x.size() != dimension()) throw Error("parameter vector has the wrong length");
  const std::size_t nn = static_cast<std::size_t>(geom_.n) * geom_.n;
  ModelParams p;
  p.geometry = geom_;
  for (int g = 0; g < kNumGrids; ++g) {
    const auto seg = x.subspan(g * nn, nn);
    Grid grid(geom_.n);
    if (config_.parameterization == Parameterization::kPreconditioned) {
      grid = from_preconditioned(seg, weights_for(g));
    } else {
      std::copy(seg.begin(), seg.end(), grid.values().begin());
    }
    if (g < kNumChannels) {
      p.filters[g] = std::move(grid);
    } else if (g == kGainGrid) {
      p.gain_log = std::move(grid);
    } else {
      p.bias = std::move(grid);
    }
  }
  return p;
}

std::vector<double> TrainingObjective::pack(const ModelParams& params) const {
  if (!(params.geometry == geom_)) throw Error("model geometry does not match the objective");
  std::vector<double> x;
  x.reserve(dimension());
  for (int g = 0; g < kNumGrids; ++g) {
    const Grid& grid = g < kNumChannels ? params.filters[g] : (g == kGainGrid ? params.gain_log : params.bias);
    if (config_.parameterization == Parameterization::kPreconditioned) {
      const auto z = to_preconditioned(grid, weights_for(g));
      x.insert(x.end(), z.begin(), z.end());
    } else {
      x.insert(x.end(), grid.values().begin(), grid.values().end());
    }
  }
  return x;
}

double TrainingObjective::data_loss(std::span<const double> x, std::span<double> grad) const {
  if (grad.size() != dimension()) throw Error("gradient buffer has the wrong length");
  const int n = geom_.n;
  const ModelParams params = unpack(x);
  std::array<Spectrum, kNumChannels> filter_spectra;
  for (int c = 0; c < kNumChannels; ++c) filter_spectra[c] = rfft2(params.filters[c]);
  Grid gain(n);
  for (std::size_t k = 0; k < gain.size(); ++k) gain.values()[k] = std::exp(params.gain_log.values()[k]);

  struct Accumulator {
    double loss = 0.0;
    std::size_t skipped = 0;
    std::array<Spectrum, kNumChannels> d_filter_spectra;
    Grid d_gain_log;
    Grid d_bias;
  };
  const std::size_t chunks = (examples_.size() + kChunkSize - 1) / kChunkSize;
  std::vector<Accumulator> acc(chunks);

  parallel_for(chunks, [&](std::size_t chunk) {
    Accumulator& a = acc[chunk];
    for (auto& s : a.d_filter_spectra) s = zero_spectrum(n);
    a.d_gain_log = Grid(n);
    a.d_bias = Grid(n);
    const std::size_t end = std::min(examples_.size(), (chunk + 1) * kChunkSize);
    for (std::size_t e = chunk * kChunkSize; e < end; ++e) {
      const Prepared& ex = examples_[e];
      Spectrum y_hat = zero_spectrum(n);
      for (int c = 0; c < kNumChannels; ++c) {
        for (std::size_t k = 0; k < y_hat.bins.size(); ++k) {
          y_hat.bins[k] += ex.spectra[c].bins[k] * filter_spectra[c].bins[k];
        }
      }
      const Grid y = irfft2(y_hat);
      Grid logits(n);
      for (std::size_t k = 0; k < logits.size(); ++k) {
        logits.values()[k] = params.bias.values()[k] + gain.values()[k] * y.values()[k];
      }
      const Grid p = softmax2d(logits);

      Grid d_logits;
      if (stage_ == Stage::kPretrain) {
        LogisticLoss l = logistic_loss(p, ex.target, geom_);
        a.loss += l.loss;
        d_logits = std::move(l.d_logits);
      } else {
        BvmLoss l;
        try {
          DealiasFn dealias;
          if (config_.dealias == DealiasMode::kGrayWorld) {
            dealias = [&](const Chroma& mu) { return dealias_gray_world(mu, ex.image_mean, geom_); };
          }
          l = loss_backward(p, geom_, ex.target, dealias);
        } catch (const DegenerateConcentration&) {
          ++a.skipped;
          continue;
        }
        a.loss += l.loss;
        // Softmax backward: dX = P * (dP - <P, dP>).
        double inner = 0.0;
        for (std::size_t k = 0; k < p.size(); ++k) inner += p.values()[k] * l.d_p.values()[k];
        d_logits = Grid(n);
        for (std::size_t k = 0; k < p.size(); ++k) {
          d_logits.values()[k] = p.values()[k] * (l.d_p.values()[k] - inner);
        }
      }

      Grid d_y(n);
      for (std::size_t k = 0; k < d_logits.size(); ++k) {
        const double dx = d_logits.values()[k];
        a.d_bias.values()[k] += dx;
        a.d_gain_log.values()[k] += dx * gain.values()[k] * y.values()[k];
        d_y.values()[k] = dx * gain.values()[k];
      }
      // d F_k is the correlation of d_y with N_k: conj(N_k^) * d_y^ in frequency.
      const Spectrum dy_hat = rfft2(d_y);
      for (int c = 0; c < kNumChannels; ++c) {
        auto& dst = a.d_filter_spectra[c].bins;
        for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += std::conj(ex.spectra[c].bins[k]) * dy_hat.bins[k];
      }
    }
  });

  double loss = 0.0;
  std::size_t skipped = 0;
  std::array<Spectrum, kNumChannels> d_filter_spectra;
  for (auto& s : d_filter_spectra) s = zero_spectrum(n);
  Grid d_gain_log(n), d_bias(n);
  for (const Accumulator& a : acc) {
    loss += a.loss;
    skipped += a.skipped;
    for (int c = 0; c < kNumChannels; ++c) {
      for (std::size_t k = 0; k < d_filter_spectra[c].bins.size(); ++k) {
        d_filter_spectra[c].bins[k] += a.d_filter_spectra[c].bins[k];
      }
    }
    for (std::size_t k = 0; k < d_bias.size(); ++k) {
      d_bias.values()[k] += a.d_bias.values()[k];
      d_gain_log.values()[k] += a.d_gain_log.values()[k];
    }
  }
  last_skipped_ = skipped;

  const std::size_t nn = static_cast<std::size_t>(n) * n;
  for (int g = 0; g < kNumGrids; ++g) {
    Grid d_grid = g < kNumChannels ? irfft2(d_filter_spectra[g]) : (g == kGainGrid ? d_gain_log : d_bias);
    auto dst = grad.subspan(g * nn, nn);
    if (config_.parameterization == Parameterization::kPreconditioned) {
      const auto dz = gradient_to_preconditioned(d_grid, weights_for(g));
      std::copy(dz.begin(), dz.end(), dst.begin());
    } else {
      std::copy(d_grid.values().begin(), d_grid.values().end(), dst.begin());
    }
  }
  return loss;
}

double TrainingObjective::regularizer(std::span<const double> x, std::span<double> grad) const {
  if (x.size() != dimension() || grad.size() != dimension()) throw Error("parameter vector has the wrong length");
  if (config_.parameterization == Parameterization::kPreconditioned) {
    double r = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
      r += x[k] * x[k];
      grad[k] = 2.0 * x[k];
    }
    return r;
  }
  const int n = geom_.n;
  const std::size_t nn = static_cast<std::size_t>(n) * n;
  double r = 0.0;
  for (int g = 0; g < kNumGrids; ++g) {
    Grid z(n);
    const auto seg = x.subspan(g * nn, nn);
    std::copy(seg.begin(), seg.end(), z.values().begin());
    const GridLambdas& l = lambdas_for(g);
    r += regularizer_time_domain(z, l.lambda0, l.lambda1);
    const Grid dz = regularizer_gradient(z, l.lambda0, l.lambda1);
    std::copy(dz.values().begin(), dz.values().end(), grad.subspan(g * nn, nn).begin());
  }
  return r;
}

double TrainingObjective::operator()(std::span<const double> x, std::span<double> grad) const {
  std::vector<double> g_reg(grad.size());
  const double data = data_loss(x, grad);
  const double reg = regularizer(x, g_reg);
  for (std::size_t k = 0; k < grad.size(); ++k) grad[k] += g_reg[k];
  return data + reg;
}

HistogramGeometry training_geometry(std::span<const TrainingExample> examples, const TrainConfig& config) {
  if (config.u_lo && config.v_lo) {
    HistogramGeometry g{config.n, config.bin_size, *config.u_lo, *config.v_lo};
    g.validate();
    return g;
  }
  std::vector<Chroma> labels;
  labels.reserve(examples.size());
  for (const TrainingExample& ex : examples) labels.push_back(ex.target);
  return fit_geometry(labels, config.n, config.bin_size);
}

TrainResult train(std::span<const TrainingExample> examples, const TrainConfig& config, std::ostream* log) {
  if (examples.empty()) throw Error("train: empty dataset");
  config.validate();
  const HistogramGeometry geom = training_geometry(examples, config);
  std::vector<TrainingExample> rebased(examples.begin(), examples.end());
  for (TrainingExample& ex : rebased) ex.stack = rebase_stack(ex.stack, geom);

  TrainResult result;
  std::vector<double> x(static_cast<std::size_t>(kNumGrids) * geom.n * geom.n, 0.0);
  const struct {
    Stage stage;
    int iters;
    const char* name;
    std::vector<IterationRecord>* trace;
  } stages[] = {{Stage::kPretrain, config.pretrain_iters, "pretrain", &result.pretrain_trace},
                {Stage::kRefine, config.refine_iters, "refine", &result.refine_trace}};

  for (const auto& st : stages) {
    TrainingObjective objective(rebased, geom, config, st.stage);
    LbfgsOptions opts;
    opts.max_iters = st.iters;
    opts.history = config.lbfgs_history;
    LbfgsResult r = lbfgs_minimize(
        [&](std::span<const double> v, std::span<double> g) { return objective(v, g); }, x, opts);
    x = std::move(r.x);
    *st.trace = std::move(r.trace);
    if (log) {
      fmt::print(*log, "{}: {} iterations, loss {:.6g} -> {:.6g}{}\n", st.name, r.iterations,
                 st.trace->front().loss, r.loss, r.line_search_failed ? " (line search stopped early)" : "");
      if (st.stage == Stage::kRefine && objective.last_skipped() > 0) {
        fmt::print(*log, "warning: {} examples had a degenerate posterior and were skipped\n",
                   objective.last_skipped());
      }
    }
  }
  result.params = TrainingObjective(rebased, geom, config, Stage::kPretrain).unpack(x);
  return result;
}

std::vector<Prediction> evaluate_examples(std::span<const TrainingExample> examples,
                                          const ModelParams& params, DealiasMode mode) {
  const Estimator estimator(params);
  std::vector<Prediction> out(examples.size());
  parallel_for(examples.size(), [&](std::size_t k) {
    const TrainingExample& ex = examples[k];
    Prediction& p = out[k];
    p.name = ex.name;
    p.truth = illuminant_rgb(ex.target);
    try {
      const IlluminantEstimate est = estimator.estimate(rebase_stack(ex.stack, params.geometry), ex.image_mean, mode);
      p.estimate = est.rgb;
      p.entropy = est.entropy;
    } catch (const DegenerateConcentration&) {
      p.estimate = illuminant_rgb(ex.image_mean);
      p.entropy = std::numeric_limits<double>::max();
      p.fallback = true;
    }
    p.error = angular_error(p.estimate, p.truth);
  });
  return out;
}

std::vector<int> fold_assignment(std::size_t count, int folds) {
  if (folds < 2) throw Error("cross validation needs at least 2 folds");
  if (static_cast<std::size_t>(folds) > count) throw Error("more folds than examples");
  std::vector<int> fold(count);
  for (std::size_t s = 0; s < count; ++s) {
    fold[s] = static_cast<int>(s * static_cast<std::size_t>(folds) / count);
  }
  return fold;
}

CvResult cross_validate(std::span<const TrainingExample> examples, int folds, const TrainConfig& config,
                        std::ostream* log) {
  const std::vector<int> fold = fold_assignment(examples.size(), folds);
  CvResult result;
  result.predictions.resize(examples.size());
  for (int f = 0; f < folds; ++f) {
    std::vector<TrainingExample> train_set;
    std::vector<TrainingExample> test_set;
    std::vector<std::size_t> test_index;
    for (std::size_t s = 0; s < examples.size(); ++s) {
      if (fold[s] == f) {
        test_set.push_back(examples[s]);
        test_index.push_back(s);
      } else {
        train_set.push_back(examples[s]);
      }
    }
    if (log) fmt::print(*log, "fold {}/{}: {} train, {} test\n", f + 1, folds, train_set.size(), test_set.size());
    const TrainResult trained = train(train_set, config, log);
    std::vector<Prediction> preds = evaluate_examples(test_set, trained.params, config.dealias);
    std::vector<double> errors;
    for (std::size_t k = 0; k < preds.size(); ++k) {
      preds[k].fold = f;
      errors.push_back(preds[k].error);
      result.predictions[test_index[k]] = std::move(preds[k]);
    }
    result.fold_metrics.push_back(summarize(errors));
  }
  std::vector<double> errors;
  std::vector<ErrorEntropy> pairs;
  for (const Prediction& p : result.predictions) {
    errors.push_back(p.error);
    pairs.push_back({p.error, p.entropy});
  }
  result.overall = summarize(errors);
  result.entropy_ordered = entropy_ordered_error(pairs);
  return result;
}

}  // namespace ffcc
