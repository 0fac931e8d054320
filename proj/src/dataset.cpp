#include "ffcc/dataset.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ffcc/config_io.hpp"
#include "ffcc/parallel.hpp"

namespace ffcc {

namespace fs = std::filesystem;

namespace {

std::vector<std::string> split_csv(std::string_view line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.emplace_back(trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

bool is_number(const std::string& s) {
  try {
    parse_double(s, "");
    return true;
  } catch (const Error&) {
    return false;
  }
}

}  // namespace

std::vector<DatasetSample> load_dataset(const std::string& dir) {
  const fs::path labels = fs::path(dir) / "labels.csv";
  std::ifstream in(labels);
  if (!in) throw Error(fmt::format("cannot open '{}'", labels.string()));

  std::vector<DatasetSample> samples;
  std::vector<std::string> problems;
  std::string line;
  int line_no = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view s = trim(line);
    if (s.empty() || s.front() == '#') continue;
    const std::vector<std::string> f = split_csv(s);
    if (first) {
      first = false;
      if (f.size() >= 2 && !is_number(f[1])) continue;
    }
    auto problem = [&](const std::string& msg) { problems.push_back(fmt::format("line {}: {}", line_no, msg)); };
    if (f.size() != 4 && f.size() != 5) {
      problem(fmt::format("expected 4 or 5 fields, got {}", f.size()));
      continue;
    }
    DatasetSample sample;
    sample.name = f[0];
    double rgb[3];
    try {
      for (int c = 0; c < 3; ++c) rgb[c] = parse_double(f[c + 1], "illuminant");
    } catch (const Error& e) {
      problem(e.what());
      continue;
    }
    if (!(rgb[0] > 0.0 && rgb[1] > 0.0 && rgb[2] > 0.0)) {
      problem(fmt::format("illuminant of '{}' must have all channels > 0", f[0]));
      continue;
    }
    const double norm = std::sqrt(rgb[0] * rgb[0] + rgb[1] * rgb[1] + rgb[2] * rgb[2]);
    sample.illuminant = {rgb[0] / norm, rgb[1] / norm, rgb[2] / norm};
    sample.image_path = (fs::path(dir) / f[0]).string();
    if (!fs::is_regular_file(sample.image_path)) {
      problem(fmt::format("image '{}' not found", f[0]));
      continue;
    }
    if (f.size() == 5 && !f[4].empty()) {
      sample.mask_path = (fs::path(dir) / f[4]).string();
      if (!fs::is_regular_file(*sample.mask_path)) {
        problem(fmt::format("mask '{}' not found", f[4]));
        continue;
      }
    }
    samples.push_back(std::move(sample));
  }
  if (!problems.empty()) {
    std::string msg = fmt::format("{}: {} bad row(s)", labels.string(), problems.size());
    for (const std::string& p : problems) msg += "\n  " + p;
    throw Error(msg);
  }
  std::stable_sort(samples.begin(), samples.end(),
                   [](const DatasetSample& a, const DatasetSample& b) { return a.name < b.name; });
  return samples;
}

LinearImage load_sample_image(const DatasetSample& sample, const ImageReadOptions& options) {
  LinearImage img = read_image(sample.image_path, options);
  if (sample.mask_path) {
    const std::vector<bool> mask = read_mask(*sample.mask_path, img.width(), img.height());
    for (int y = 0; y < img.height(); ++y) {
      for (int x = 0; x < img.width(); ++x) {
        if (mask[static_cast<std::size_t>(y) * img.width() + x]) img.set_valid(x, y, false);
      }
    }
  }
  return img;
}

HistogramGeometry example_geometry(const TrainConfig& config) {
  HistogramGeometry g{config.n, config.bin_size, config.u_lo.value_or(0.0), config.v_lo.value_or(0.0)};
  g.validate();
  return g;
}

TrainingExample make_example(const std::string& name, const LinearImage& img, const Rgb& illuminant,
                             const HistogramGeometry& geom) {
  const auto target = compute_uv(illuminant);
  if (!target) throw Error(fmt::format("{}: illuminant must have all channels > 0", name));
  TrainingExample ex;
  ex.name = name;
  ex.stack = build_stack(img, geom);
  ex.image_mean = mean_chroma(img).value_or(Chroma{});
  ex.target = *target;
  return ex;
}

std::vector<TrainingExample> build_examples(const std::vector<DatasetSample>& samples,
                                            const HistogramGeometry& geom, const ImageReadOptions& options) {
  std::vector<TrainingExample> out(samples.size());
  parallel_for(samples.size(), [&](std::size_t k) {
    const DatasetSample& s = samples[k];
    out[k] = make_example(s.name, load_sample_image(s, options), s.illuminant, geom);
  });
  return out;
}

}  // namespace ffcc
