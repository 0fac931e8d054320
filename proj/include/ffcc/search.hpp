#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "ffcc/trainer.hpp"

namespace ffcc {

/// Candidate values per config key, searched one key at a time.
struct SearchGrid {
  std::vector<std::pair<std::string, std::vector<double>>> axes;
  /// Maximum number of passes over all axes.
  int sweeps = 2;
};

/// Lines "key = v1, v2, ..." (any training-config key) and optionally
/// "sweeps = k". '#' starts a comment line.
SearchGrid parse_search_grid(std::istream& in);
SearchGrid load_search_grid(const std::string& path);

struct SearchStep {
  std::string key;
  double value = 0.0;
  double score = 0.0;
};

struct SearchResult {
  TrainConfig best;
  double best_score = 0.0;
  /// Every distinct configuration scored, in evaluation order.
  std::vector<SearchStep> history;
};

using ConfigScore = std::function<double(const TrainConfig&)>;

/// Cyclic coordinate descent: for each key in turn, scores every candidate
/// with the other keys held at the incumbent and moves to the best one if it
/// strictly improves. Stops after `sweeps` passes or a pass with no change.
SearchResult coordinate_descent(const SearchGrid& grid, const TrainConfig& base, const ConfigScore& score);

/// coordinate_descent scored by the cross-validated "avg" error.
SearchResult hyperparam_search(std::span<const TrainingExample> examples, const SearchGrid& grid,
                               const TrainConfig& base, int folds, std::ostream* log = nullptr);

}  // namespace ffcc
