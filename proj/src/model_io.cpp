#include "ffcc/model_io.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <algorithm>
#include <fstream>
#include <istream>
#include <sstream>
#include <vector>

#include "ffcc/config_io.hpp"

namespace ffcc {

namespace {

// Already carries the line number.
class FormatError : public Error {
 public:
  using Error::Error;
};

void write_grid(std::ostream& out, std::string_view label, const Grid& g) {
  fmt::print(out, "{}\n", label);
  for (int i = 0; i < g.n(); ++i) {
    std::string row;
    for (int j = 0; j < g.n(); ++j) {
      if (j > 0) row += ' ';
      row += fmt::format("{}", g(i, j));
    }
    fmt::print(out, "{}\n", row);
  }
}

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  std::string line() {
    std::string s;
    if (!std::getline(in_, s)) throw Error(fmt::format("model file truncated after line {}", line_no_));
    ++line_no_;
    if (!s.empty() && s.back() == '\r') s.pop_back();
    return s;
  }

  std::string value(std::string_view key) {
    const std::string s = line();
    if (s.size() <= key.size() || s.compare(0, key.size(), key) != 0 || s[key.size()] != ' ') {
      fail(fmt::format("expected '{}'", key));
    }
    return s.substr(key.size() + 1);
  }

  void expect(std::string_view text) {
    if (line() != text) fail(fmt::format("expected '{}'", text));
  }

  Grid grid(std::string_view label, int n) {
    expect(label);
    Grid g(n);
    for (int i = 0; i < n; ++i) {
      std::istringstream row(line());
      std::string tok;
      int j = 0;
      while (row >> tok) {
        if (j >= n) fail(fmt::format("{} row {} has more than {} values", label, i, n));
        g(i, j++) = parse_double(tok, "model value");
      }
      if (j != n) fail(fmt::format("{} row {} has {} values, expected {}", label, i, j, n));
    }
    return g;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw FormatError(fmt::format("model file line {}: {}", line_no_, msg));
  }

 private:
  std::istream& in_;
  int line_no_ = 0;
};

}  // namespace

void write_model(std::ostream& out, const ModelFile& m) {
  m.params.validate();
  const HistogramGeometry& g = m.params.geometry;
  fmt::print(out, "{}\n", kModelMagic);
  fmt::print(out, "n {}\nbin_size {}\nu_lo {}\nv_lo {}\n", g.n, g.bin_size, g.u_lo, g.v_lo);
  fmt::print(out, "channels {}\n", kNumChannels);
  fmt::print(out, "dealias {}\n", to_string(m.dealias));
  const std::string config = format_config(m.config);
  fmt::print(out, "config {}\n{}", std::count(config.begin(), config.end(), '\n'), config);
  for (int k = 0; k < kNumChannels; ++k) write_grid(out, fmt::format("filter {}", k), m.params.filters[k]);
  write_grid(out, "gain_log", m.params.gain_log);
  write_grid(out, "bias", m.params.bias);
  fmt::print(out, "end\n");
}

ModelFile read_model(std::istream& in) {
  Reader r(in);
  const std::string magic = r.line();
  if (magic != kModelMagic) {
    r.fail(fmt::format("unsupported model format '{}' (expected '{}')", magic, kModelMagic));
  }
  ModelFile m;
  HistogramGeometry& g = m.params.geometry;
  try {
    g.n = parse_int(r.value("n"), "n");
    g.bin_size = parse_double(r.value("bin_size"), "bin_size");
    g.u_lo = parse_double(r.value("u_lo"), "u_lo");
    g.v_lo = parse_double(r.value("v_lo"), "v_lo");
    g.validate();
    const int channels = parse_int(r.value("channels"), "channels");
    if (channels != kNumChannels) r.fail(fmt::format("{} channels, expected {}", channels, kNumChannels));
    m.dealias = parse_dealias_mode(r.value("dealias"));
    const int config_lines = parse_int(r.value("config"), "config");
    if (config_lines < 0) r.fail("negative config line count");
    std::string config;
    for (int k = 0; k < config_lines; ++k) config += r.line() + "\n";
    std::istringstream config_in(config);
    m.config = parse_config(config_in);
  } catch (const FormatError&) {
    throw;
  } catch (const Error& e) {
    r.fail(e.what());
  }
  for (int k = 0; k < kNumChannels; ++k) m.params.filters[k] = r.grid(fmt::format("filter {}", k), g.n);
  m.params.gain_log = r.grid("gain_log", g.n);
  m.params.bias = r.grid("bias", g.n);
  r.expect("end");
  return m;
}

void save_model(const std::string& path, const ModelFile& model) {
  std::ostringstream buf;
  write_model(buf, model);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(fmt::format("cannot write model file '{}'", path));
  out << buf.str();
  if (!out.flush()) throw Error(fmt::format("error writing model file '{}'", path));
}

ModelFile load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(fmt::format("cannot open model file '{}'", path));
  try {
    return read_model(in);
  } catch (const Error& e) {
    throw Error(fmt::format("{}: {}", path, e.what()));
  }
}

}  // namespace ffcc
