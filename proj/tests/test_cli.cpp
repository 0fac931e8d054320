#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "ffcc/image_io.hpp"
#include "ffcc/synthetic.hpp"

namespace fs = std::filesystem;

namespace {

struct CliRun {
  int status;
  std::string out;
};

class CliTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    std::random_device rd;
    dir_ = new fs::path(fs::temp_directory_path() / ("ffcc_cli_" + std::to_string(rd())));
    fs::create_directories(*dir_ / "data");
    // Sixteen synthetic scenes written as 16-bit PPM files.
    ffcc::SyntheticOptions o;
    o.width = 24;
    o.height = 16;
    const auto scenes = ffcc::make_synthetic_scenes(16, 7, o);
    std::ofstream labels(*dir_ / "data" / "labels.csv");
    labels << "filename,r,g,b\n";
    for (std::size_t k = 0; k < scenes.size(); ++k) {
      const std::string name = "img" + std::to_string(10 + k) + ".ppm";
      std::ofstream out(*dir_ / "data" / name, std::ios::binary);
      out << "P6\n" << o.width << " " << o.height << "\n65535\n";
      for (const ffcc::Rgb& p : scenes[k].image.pixels()) {
        for (double c : {p.r, p.g, p.b}) {
          const auto v = static_cast<std::uint16_t>(std::lround(std::min(1.0, c) * 65535));
          out.put(static_cast<char>(v >> 8)).put(static_cast<char>(v & 0xff));
        }
      }
      const auto& l = scenes[k].illuminant;
      labels << name << "," << l.r << "," << l.g << "," << l.b << "\n";
    }
    std::ofstream(*dir_ / "train.cfg") << "pretrain_iters = 4\nrefine_iters = 4\nn = 32\nbin_size = 0.0625\n";
  }
  static void TearDownTestSuite() {
    fs::remove_all(*dir_);
    delete dir_;
  }

  static CliRun run(const std::string& args) {
    const char* cli = std::getenv("FFCC_CLI");
    EXPECT_NE(cli, nullptr);
    const fs::path out = *dir_ / "stdout.txt";
    const std::string cmd = std::string(cli) + " " + args + " > " + out.string() + " 2> " + (*dir_ / "stderr.txt").string();
    const int rc = std::system(cmd.c_str());
    std::ifstream in(out);
    std::stringstream s;
    s << in.rdbuf();
    return {WEXITSTATUS(rc), s.str()};
  }

  static std::string path(const std::string& name) { return (*dir_ / name).string(); }

  static void ensure_model() {
    if (!fs::exists(*dir_ / "m.model")) {
      ASSERT_EQ(run("train " + path("data") + " --config " + path("train.cfg") + " -o " + path("m.model") +
                    " --trace " + path("trace_"))
                    .status,
                0);
    }
  }

  static fs::path* dir_;
};

fs::path* CliTest::dir_ = nullptr;

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string l;
  while (std::getline(in, l)) out.push_back(l);
  return out;
}

int count_fields(const std::string& line) { return 1 + static_cast<int>(std::count(line.begin(), line.end(), ',')); }

}  // namespace

TEST_F(CliTest, TrainWritesModelAndTraces) {
  ensure_model();
  EXPECT_TRUE(fs::exists(path("trace_pretrain.csv")));
  std::ifstream trace(path("trace_refine.csv"));
  std::string header;
  std::getline(trace, header);
  EXPECT_EQ(header, "iteration,loss,grad_norm");
}

TEST_F(CliTest, PredictCsvRow) {
  ensure_model();
  const CliRun r = run("predict " + path("m.model") + " " + path("data/img10.ppm"));
  ASSERT_EQ(r.status, 0);
  const auto l = lines(r.out);
  ASSERT_EQ(l.size(), 2u);
  // Image name followed by 9 numeric fields.
  EXPECT_EQ(count_fields(l[1]), 10);
  std::istringstream row(l[1]);
  std::string field;
  std::getline(row, field, ',');
  int numeric = 0;
  while (std::getline(row, field, ',')) {
    std::size_t used = 0;
    std::stod(field, &used);
    numeric += used == field.size();
  }
  EXPECT_EQ(numeric, 9);
}

TEST_F(CliTest, PredictPosteriorFeedsSmooth) {
  ensure_model();
  const CliRun r = run("predict " + path("m.model") + " " + path("data/img10.ppm") + " " + path("data/img11.ppm") + " " +
                    path("data/img12.ppm") + " --format posterior --dealias gray-world");
  ASSERT_EQ(r.status, 0);
  EXPECT_EQ(lines(r.out)[0], "frame,mu_u,mu_v,s_uu,s_uv,s_vv,entropy");
  std::ofstream(path("post.csv")) << r.out;
  const CliRun s = run("smooth --alpha 0.001 " + path("post.csv"));
  ASSERT_EQ(s.status, 0);
  const auto l = lines(s.out);
  ASSERT_EQ(l.size(), 4u);
  EXPECT_EQ(l[0], "frame,mu_u,mu_v,s_uu,s_uv,s_vv,entropy");
  EXPECT_EQ(count_fields(l[3]), 7);
  EXPECT_EQ(lines(r.out)[1], l[1]);
}

TEST_F(CliTest, EvalAndCrossValidation) {
  ensure_model();
  const CliRun e = run("eval " + path("m.model") + " " + path("data") + " --format csv");
  ASSERT_EQ(e.status, 0);
  EXPECT_EQ(lines(e.out)[0], "mean,median,trimean,best25,worst25,avg,eo");
  const CliRun cv = run("eval " + path("m.model") + " " + path("data") + " --folds 3 --format csv --predictions " +
                     path("pred.csv"));
  ASSERT_EQ(cv.status, 0);
  EXPECT_EQ(lines(cv.out).size(), 2u);
  std::ifstream pred(path("pred.csv"));
  int rows = 0;
  for (std::string l; std::getline(pred, l);) ++rows;
  EXPECT_EQ(rows, 17);
}

TEST_F(CliTest, DeterministicOutputs) {
  ensure_model();
  ASSERT_EQ(run("train " + path("data") + " --config " + path("train.cfg") + " -o " + path("m2.model")).status, 0);
  std::ifstream a(path("m.model")), b(path("m2.model"));
  std::stringstream sa, sb;
  sa << a.rdbuf();
  sb << b.rdbuf();
  EXPECT_EQ(sa.str(), sb.str());
  const std::string args = "predict " + path("m.model") + " " + path("data/img13.ppm") + " " + path("data/img14.ppm");
  EXPECT_EQ(run(args).out, run(args).out);
}

TEST_F(CliTest, RenderModel) {
  ensure_model();
  ASSERT_EQ(run("render-model " + path("m.model") + " -o " + path("maps")).status, 0);
  const ffcc::RawImage img = ffcc::read_raw_image(path("maps/bias.png"));
  EXPECT_EQ(img.width, 32);
  EXPECT_EQ(img.height, 32);
}

TEST_F(CliTest, Search) {
  std::ofstream(path("grid.txt")) << "sweeps = 1\nlambda1_bias = 0.1, 10\n";
  const CliRun r = run("search " + path("data") + " --grid " + path("grid.txt") + " --config " + path("train.cfg") +
                    " --folds 2");
  ASSERT_EQ(r.status, 0);
  EXPECT_NE(r.out.find("lambda1_bias = "), std::string::npos);
}

TEST_F(CliTest, UsageErrorsExitNonzero) {
  EXPECT_NE(run("").status, 0);
  EXPECT_NE(run("frobnicate").status, 0);
  EXPECT_NE(run("predict --bogus-flag x").status, 0);
  EXPECT_NE(run("predict " + path("nope.model") + " " + path("data/img10.ppm")).status, 0);
  EXPECT_NE(run("smooth " + path("post.csv")).status, 0);
  ensure_model();
  EXPECT_NE(run("predict " + path("m.model") + " " + path("data/missing.ppm")).status, 0);
}
