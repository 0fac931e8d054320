// Command-line front end: train, predict, eval, smooth, render-model, search.

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "ffcc/config_io.hpp"
#include "ffcc/dataset.hpp"
#include "ffcc/image_io.hpp"
#include "ffcc/metrics.hpp"
#include "ffcc/model_io.hpp"
#include "ffcc/parallel.hpp"
#include "ffcc/render.hpp"
#include "ffcc/search.hpp"
#include "ffcc/smoother.hpp"
#include "ffcc/trainer.hpp"

namespace fs = std::filesystem;
using namespace ffcc;

namespace {

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(fmt::format("cannot write '{}'", path));
  return out;
}

void write_trace(const std::string& path, const std::vector<IterationRecord>& trace) {
  std::ofstream out = open_output(path);
  fmt::print(out, "iteration,loss,grad_norm\n");
  for (const IterationRecord& r : trace) fmt::print(out, "{},{},{}\n", r.iteration, r.loss, r.grad_norm);
}

void print_summary(std::ostream& out, const MetricSummary& m, std::optional<double> eo, const std::string& format) {
  if (format == "csv") {
    fmt::print(out, "mean,median,trimean,best25,worst25,avg{}\n", eo ? ",eo" : "");
    fmt::print(out, "{},{},{},{},{},{}", m.mean, m.median, m.trimean, m.best25, m.worst25, m.avg);
    if (eo) fmt::print(out, ",{}", *eo);
    fmt::print(out, "\n");
    return;
  }
  fmt::print(out, "{:>8} {:>8} {:>8} {:>8} {:>8} {:>8}{}\n", "Mean", "Med.", "Tri.", "Best25", "Worst25", "Avg.",
             eo ? fmt::format(" {:>8}", "EO") : "");
  fmt::print(out, "{:8.3f} {:8.3f} {:8.3f} {:8.3f} {:8.3f} {:8.3f}", m.mean, m.median, m.trimean, m.best25,
             m.worst25, m.avg);
  if (eo) fmt::print(out, " {:8.3f}", *eo);
  fmt::print(out, "\n");
}

void write_predictions(const std::string& path, const std::vector<Prediction>& preds) {
  std::ofstream out = open_output(path);
  fmt::print(out, "image,fold,est_r,est_g,est_b,true_r,true_g,true_b,error,entropy,fallback\n");
  for (const Prediction& p : preds) {
    fmt::print(out, "{},{},{},{},{},{},{},{},{},{},{}\n", p.name, p.fold, p.estimate.r, p.estimate.g, p.estimate.b,
               p.truth.r, p.truth.g, p.truth.b, p.error, p.entropy, p.fallback ? 1 : 0);
  }
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string f;
  while (std::getline(ss, f, ',')) fields.emplace_back(trim(f));
  return fields;
}

int run_train(const std::string& data_dir, const std::string& config_path, const std::string& model_path,
              const std::string& trace_prefix, const ImageReadOptions& read) {
  const TrainConfig config = config_path.empty() ? TrainConfig{} : load_config(config_path);
  config.validate();
  const auto samples = load_dataset(data_dir);
  if (samples.empty()) throw Error(fmt::format("{}: dataset is empty", data_dir));
  const auto examples = build_examples(samples, example_geometry(config), read);
  const TrainResult result = train(examples, config, &std::cerr);
  save_model(model_path, ModelFile{result.params, config.dealias, config});
  if (!trace_prefix.empty()) {
    write_trace(trace_prefix + "pretrain.csv", result.pretrain_trace);
    write_trace(trace_prefix + "refine.csv", result.refine_trace);
  }
  return 0;
}

int run_predict(const std::string& model_path, const std::vector<std::string>& images,
                const std::optional<std::string>& dealias_text, const std::string& format,
                const ImageReadOptions& read, const std::string& render_dir, const std::string& ccm_name) {
  if (format != "csv" && format != "posterior") throw Error(fmt::format("unknown format '{}'", format));
  const ModelFile model = load_model(model_path);
  const DealiasMode mode = dealias_text ? parse_dealias_mode(*dealias_text) : model.dealias;
  const std::optional<Ccm> ccm = find_ccm(ccm_name);
  if (!ccm) throw Error(fmt::format("unknown camera CCM '{}'", ccm_name));
  if (!render_dir.empty()) fs::create_directories(render_dir);

  const Estimator estimator(model.params);
  std::vector<std::optional<IlluminantEstimate>> results(images.size());
  std::vector<std::string> errors(images.size());
  parallel_for(images.size(), [&](std::size_t k) {
    try {
      const LinearImage img = read_image(images[k], read);
      results[k] = estimator.estimate(img, mode);
      if (!render_dir.empty()) {
        const fs::path out = fs::path(render_dir) / (fs::path(images[k]).stem().string() + ".png");
        write_png(out.string(), render_srgb(img, results[k]->rgb, *ccm));
      }
    } catch (const std::exception& e) {
      errors[k] = e.what();
    }
  });

  if (format == "csv") {
    fmt::print("image,mu_u,mu_v,s_uu,s_uv,s_vv,entropy,r,g,b\n");
  } else {
    fmt::print("frame,mu_u,mu_v,s_uu,s_uv,s_vv,entropy\n");
  }
  int status = 0;
  for (std::size_t k = 0; k < images.size(); ++k) {
    if (!results[k]) {
      fmt::print(stderr, "error: {}: {}\n", images[k], errors[k]);
      status = 1;
      continue;
    }
    const IlluminantEstimate& e = *results[k];
    const auto& s = e.posterior.sigma;
    if (format == "csv") {
      fmt::print("{},{},{},{},{},{},{},{},{},{}\n", images[k], e.posterior.mu.u, e.posterior.mu.v, s(0, 0), s(0, 1),
                 s(1, 1), e.entropy, e.rgb.r, e.rgb.g, e.rgb.b);
    } else {
      fmt::print("{},{},{},{},{},{},{}\n", k, e.posterior.mu.u, e.posterior.mu.v, s(0, 0), s(0, 1), s(1, 1),
                 e.entropy);
    }
  }
  return status;
}

int run_eval(const std::string& model_path, const std::string& data_dir, int folds, const std::string& config_path,
             const std::string& format, const std::string& predictions_path, const ImageReadOptions& read) {
  if (format != "table" && format != "csv") throw Error(fmt::format("unknown format '{}'", format));
  const ModelFile model = load_model(model_path);
  const auto samples = load_dataset(data_dir);
  if (samples.empty()) throw Error(fmt::format("{}: dataset is empty", data_dir));

  if (folds > 0) {
    const TrainConfig config = config_path.empty() ? model.config : load_config(config_path);
    const auto examples = build_examples(samples, example_geometry(config), read);
    const CvResult cv = cross_validate(examples, folds, config, &std::cerr);
    if (format == "table") {
      for (std::size_t f = 0; f < cv.fold_metrics.size(); ++f) {
        fmt::print("fold {}\n", f + 1);
        print_summary(std::cout, cv.fold_metrics[f], std::nullopt, format);
      }
      fmt::print("overall\n");
    }
    print_summary(std::cout, cv.overall, cv.entropy_ordered, format);
    if (!predictions_path.empty()) write_predictions(predictions_path, cv.predictions);
    return 0;
  }

  const auto examples = build_examples(samples, model.params.geometry, read);
  const auto preds = evaluate_examples(examples, model.params, model.dealias);
  std::vector<double> errors;
  std::vector<ErrorEntropy> pairs;
  for (const Prediction& p : preds) {
    errors.push_back(p.error);
    pairs.push_back({p.error, p.entropy});
  }
  print_summary(std::cout, summarize(errors), entropy_ordered_error(pairs), format);
  if (!predictions_path.empty()) write_predictions(predictions_path, preds);
  return 0;
}

int run_smooth(const std::string& input, double alpha, double period, const std::string& output) {
  std::ifstream in(input);
  if (!in) throw Error(fmt::format("cannot open '{}'", input));
  std::ofstream file;
  if (!output.empty()) file = open_output(output);
  std::ostream& out = output.empty() ? std::cout : file;

  fmt::print(out, "frame,mu_u,mu_v,s_uu,s_uv,s_vv,entropy\n");
  std::optional<SmootherState> state;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto f = split_fields(line);
    if (line_no == 1 && !f.empty() && f[0] == "frame") continue;
    if (f.size() < 6) throw Error(fmt::format("{} line {}: expected frame,mu_u,mu_v,s_uu,s_uv,s_vv", input, line_no));
    BvmPosterior obs;
    try {
      obs.mu = {parse_double(f[1], "mu_u"), parse_double(f[2], "mu_v")};
      const double suv = parse_double(f[4], "s_uv");
      obs.sigma << parse_double(f[3], "s_uu"), suv, suv, parse_double(f[5], "s_vv");
      state = state ? smooth_update(*state, obs) : init_state(obs, alpha, period);
    } catch (const Error& e) {
      throw Error(fmt::format("{} line {}: {}", input, line_no, e.what()));
    }
    fmt::print(out, "{},{},{},{},{},{},{}\n", f[0], state->mu.u, state->mu.v, state->sigma(0, 0), state->sigma(0, 1),
               state->sigma(1, 1), entropy(state->sigma));
  }
  return 0;
}

int run_render_model(const std::string& model_path, const std::string& out_dir) {
  const ModelFile model = load_model(model_path);
  fs::create_directories(out_dir);
  for (const NamedMap& m : render_model_maps(model.params)) {
    write_png((fs::path(out_dir) / (m.name + ".png")).string(), m.image);
  }
  return 0;
}

int run_search(const std::string& data_dir, const std::string& grid_path, int folds, const std::string& config_path,
               const std::string& output, const ImageReadOptions& read) {
  const TrainConfig base = config_path.empty() ? TrainConfig{} : load_config(config_path);
  const SearchGrid grid = load_search_grid(grid_path);
  const auto samples = load_dataset(data_dir);
  const auto examples = build_examples(samples, example_geometry(base), read);
  const SearchResult result = hyperparam_search(examples, grid, base, folds, &std::cerr);
  const std::string text = format_config(result.best);
  if (output.empty()) {
    fmt::print("# cross-validated avg error {}\n{}", result.best_score, text);
  } else {
    std::ofstream out = open_output(output);
    fmt::print(out, "# cross-validated avg error {}\n{}", result.best_score, text);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Illuminant estimation with toroidal log-chroma histograms"};
  app.require_subcommand(1);

  ImageReadOptions read;
  auto add_read_options = [&](CLI::App* cmd) {
    cmd->add_flag("--assume-srgb", read.assume_srgb, "Decode the sRGB curve (8-bit display images)");
    cmd->add_option("--saturation", read.saturation_threshold, "Saturation threshold as a fraction of white")
        ->check(CLI::Range(0.0, 1.0));
  };

  std::string data_dir, config_path, model_path, trace_prefix;
  auto* train_cmd = app.add_subcommand("train", "Train a model on a dataset directory");
  train_cmd->add_option("data_dir", data_dir, "Directory with labels.csv")->required()->check(CLI::ExistingDirectory);
  train_cmd->add_option("--config", config_path, "Training config (key = value)")->check(CLI::ExistingFile);
  train_cmd->add_option("-o,--output", model_path, "Model file to write")->required();
  train_cmd->add_option("--trace", trace_prefix, "Write <prefix>pretrain.csv and <prefix>refine.csv loss traces");
  add_read_options(train_cmd);

  std::vector<std::string> images;
  std::optional<std::string> dealias;
  std::string format = "csv", render_dir, ccm_name = "identity";
  auto* predict_cmd = app.add_subcommand("predict", "Estimate the illuminant of images");
  predict_cmd->add_option("model", model_path, "Model file")->required()->check(CLI::ExistingFile);
  predict_cmd->add_option("images", images, "Input images")->required();
  predict_cmd->add_option("--dealias", dealias, "gray-light or gray-world (default: the model's)")
      ->check(CLI::IsMember({"gray-light", "gray-world"}));
  predict_cmd->add_option("--format", format, "csv or posterior")->check(CLI::IsMember({"csv", "posterior"}));
  predict_cmd->add_option("--render", render_dir, "Also write white-balanced sRGB renders here");
  predict_cmd->add_option("--ccm", ccm_name, "Color correction matrix for --render (e.g. GehlerShi/Canon1D)");
  add_read_options(predict_cmd);

  int folds = 0;
  std::string eval_format = "table", predictions_path;
  auto* eval_cmd = app.add_subcommand("eval", "Error metrics of a model, or k-fold cross validation");
  eval_cmd->add_option("model", model_path, "Model file")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("data_dir", data_dir, "Directory with labels.csv")->required()->check(CLI::ExistingDirectory);
  eval_cmd->add_option("--folds", folds, "Cross-validate with this many folds instead")->check(CLI::Range(2, 1000));
  eval_cmd->add_option("--config", config_path, "Training config for --folds (default: the model's)")
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--format", eval_format, "table or csv")->check(CLI::IsMember({"table", "csv"}));
  eval_cmd->add_option("--predictions", predictions_path, "Write per-image results as CSV");
  add_read_options(eval_cmd);

  double alpha = 0.0, period = 2.0;
  std::string posteriors, output;
  auto* smooth_cmd = app.add_subcommand("smooth", "Temporal smoothing of per-frame posteriors");
  smooth_cmd->add_option("--alpha", alpha, "Per-frame transition variance")->required()->check(CLI::NonNegativeNumber);
  smooth_cmd->add_option("--period", period, "Alias period of the means (0 disables)")
      ->check(CLI::NonNegativeNumber);
  smooth_cmd->add_option("posteriors", posteriors, "CSV frame,mu_u,mu_v,s_uu,s_uv,s_vv[,entropy]")
      ->required()
      ->check(CLI::ExistingFile);
  smooth_cmd->add_option("-o,--output", output, "Output CSV (default stdout)");

  std::string out_dir;
  auto* render_cmd = app.add_subcommand("render-model", "Write the learned maps as PNG images");
  render_cmd->add_option("model", model_path, "Model file")->required()->check(CLI::ExistingFile);
  render_cmd->add_option("-o,--output", out_dir, "Output directory")->required();

  std::string grid_path;
  int search_folds = 3;
  auto* search_cmd = app.add_subcommand("search", "Coordinate-descent search over regularizer settings");
  search_cmd->add_option("data_dir", data_dir, "Directory with labels.csv")->required()->check(CLI::ExistingDirectory);
  search_cmd->add_option("--grid", grid_path, "Candidate values, one key per line")
      ->required()
      ->check(CLI::ExistingFile);
  search_cmd->add_option("--folds", search_folds, "Cross validation folds")->check(CLI::Range(2, 1000));
  search_cmd->add_option("--config", config_path, "Base config")->check(CLI::ExistingFile);
  search_cmd->add_option("-o,--output", output, "Write the best config here (default stdout)");
  add_read_options(search_cmd);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train_cmd) return run_train(data_dir, config_path, model_path, trace_prefix, read);
    if (*predict_cmd) return run_predict(model_path, images, dealias, format, read, render_dir, ccm_name);
    if (*eval_cmd) return run_eval(model_path, data_dir, folds, config_path, eval_format, predictions_path, read);
    if (*smooth_cmd) return run_smooth(posteriors, alpha, period, output);
    if (*render_cmd) return run_render_model(model_path, out_dir);
    if (*search_cmd) return run_search(data_dir, grid_path, search_folds, config_path, output, read);
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
  return 1;
}
