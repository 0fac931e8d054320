#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ffcc/image_io.hpp"
#include "ffcc/trainer.hpp"

namespace ffcc {

struct DatasetSample {
  /// File name as written in labels.csv.
  std::string name;
  std::string image_path;
  /// Ground-truth illuminant, unit norm.
  Rgb illuminant;
  /// Exclusion mask; nonzero pixels are ignored.
  std::optional<std::string> mask_path;
};

/// Reads <dir>/labels.csv with rows "filename,r,g,b[,mask]". A first line
/// whose second field is not numeric is taken as a header; '#' lines are
/// comments. Samples are sorted by filename. Every bad row is reported in a
/// single Error.
std::vector<DatasetSample> load_dataset(const std::string& dir);

/// Decodes the image and applies the mask.
LinearImage load_sample_image(const DatasetSample& sample, const ImageReadOptions& options = {});

/// Geometry that example stacks are built with: the config's origin when it
/// sets one, otherwise (0, 0). Training rebases stacks as needed.
HistogramGeometry example_geometry(const TrainConfig& config);

TrainingExample make_example(const std::string& name, const LinearImage& img, const Rgb& illuminant,
                             const HistogramGeometry& geom);

/// Loads every sample and computes its histograms, in dataset order.
std::vector<TrainingExample> build_examples(const std::vector<DatasetSample>& samples,
                                            const HistogramGeometry& geom,
                                            const ImageReadOptions& options = {});

}  // namespace ffcc
