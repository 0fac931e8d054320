#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ffcc/chroma.hpp"
#include "ffcc/lbfgs.hpp"
#include "ffcc/metrics.hpp"
#include "ffcc/model.hpp"
#include "ffcc/precond.hpp"

namespace ffcc {

/// Regularizer strengths for one learned grid.
struct GridLambdas {
  double lambda0 = 1.0;
  double lambda1 = 0.0;

  friend bool operator==(const GridLambdas&, const GridLambdas&) = default;
};

enum class Stage { kPretrain, kRefine };

/// How the optimizer sees the learned grids. kPreconditioned optimizes the
/// rescaled FFT vectors z = w * fftv(Z) with the regularizer as ||z||^2;
/// kTimeDomain optimizes the grid values directly with the regularizer
/// evaluated explicitly. Both minimize the same objective.
enum class Parameterization { kPreconditioned, kTimeDomain };

struct TrainConfig {
  GridLambdas filter{1e-2, 1.0};
  GridLambdas gain{1e-2, 1.0};
  GridLambdas bias{1e-2, 1.0};
  int pretrain_iters = 16;
  int refine_iters = 64;
  int lbfgs_history = 10;
  DealiasMode dealias = DealiasMode::kGrayLight;
  int n = 64;
  double bin_size = 1.0 / 32.0;
  /// Histogram origin. When unset it is fitted to the training labels.
  std::optional<double> u_lo;
  std::optional<double> v_lo;
  Parameterization parameterization = Parameterization::kPreconditioned;

  void validate() const;

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

/// One training image reduced to what the optimizer needs. Histograms are
/// computed once up front.
struct TrainingExample {
  std::string name;
  HistogramStack stack;
  /// Mean log-chroma of the valid pixels (for gray-world de-aliasing).
  Chroma image_mean;
  /// Ground-truth illuminant chroma.
  Chroma target;
};

struct LogisticLoss {
  double loss = 0.0;
  /// Gradient with respect to the pre-softmax logits: P - P*.
  Grid d_logits;
};

/// Cross-entropy between P and the one-hot histogram P* of the target.
LogisticLoss logistic_loss(const Grid& p, const Chroma& target, const HistogramGeometry& geom);

/// The training objective as a function of a flat parameter vector holding
/// the filters, then log-gain, then bias, each n^2 long.
class TrainingObjective {
 public:
  /// Example stacks must already use `geom`.
  TrainingObjective(std::span<const TrainingExample> examples, const HistogramGeometry& geom,
                    const TrainConfig& config, Stage stage);

  std::size_t dimension() const;
  const HistogramGeometry& geometry() const { return geom_; }

  /// Sum of per-example data losses; writes d loss / d x into grad.
  double data_loss(std::span<const double> x, std::span<double> grad) const;
  /// Regularizer of all grids; writes its gradient into grad.
  double regularizer(std::span<const double> x, std::span<double> grad) const;
  /// data_loss + regularizer.
  double operator()(std::span<const double> x, std::span<double> grad) const;

  ModelParams unpack(std::span<const double> x) const;
  std::vector<double> pack(const ModelParams& params) const;

  /// Examples skipped because their PDF was degenerate, in the most recent
  /// evaluation (refine stage only).
  std::size_t last_skipped() const { return last_skipped_; }

 private:
  struct Prepared {
    std::array<Spectrum, kNumChannels> spectra;
    Chroma target;
    Chroma image_mean;
  };

  const RegWeights& weights_for(int grid) const;
  const GridLambdas& lambdas_for(int grid) const;

  HistogramGeometry geom_;
  TrainConfig config_;
  Stage stage_;
  std::vector<Prepared> examples_;
  std::array<RegWeights, kNumChannels + 2> weights_;
  mutable std::size_t last_skipped_ = 0;
};

struct TrainResult {
  ModelParams params;
  std::vector<IterationRecord> pretrain_trace;
  std::vector<IterationRecord> refine_trace;
};

/// Geometry a training run will use for the given examples and config.
HistogramGeometry training_geometry(std::span<const TrainingExample> examples, const TrainConfig& config);

/// Zero-initialized two-stage training: logistic pretraining followed by BVM
/// negative log-likelihood refinement, both with L-BFGS. Deterministic.
TrainResult train(std::span<const TrainingExample> examples, const TrainConfig& config,
                  std::ostream* log = nullptr);

struct Prediction {
  std::string name;
  Rgb estimate;
  Rgb truth;
  double error = 0.0;
  double entropy = 0.0;
  int fold = 0;
  /// True when the posterior was degenerate and gray world was used instead.
  bool fallback = false;
};

/// Runs a trained model over examples (stacks are rebased to the model).
std::vector<Prediction> evaluate_examples(std::span<const TrainingExample> examples,
                                          const ModelParams& params, DealiasMode mode);

struct CvResult {
  std::vector<MetricSummary> fold_metrics;
  MetricSummary overall;
  double entropy_ordered = 0.0;
  /// Held-out predictions in example order.
  std::vector<Prediction> predictions;
};

/// Fold of each example: contiguous blocks in the given order, fold of
/// example s is floor(s * folds / N).
std::vector<int> fold_assignment(std::size_t count, int folds);

/// k-fold cross validation; examples should be sorted by name. Every stack
/// must be rebasable to the geometry fitted on each training split (stacks
/// built at bin-aligned origins always are).
CvResult cross_validate(std::span<const TrainingExample> examples, int folds,
                        const TrainConfig& config, std::ostream* log = nullptr);

}  // namespace ffcc
