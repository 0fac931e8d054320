#include "ffcc/config_io.hpp"

#include <fmt/format.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>

namespace ffcc {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

double parse_double(std::string_view text, std::string_view what) {
  text = trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty() || !std::isfinite(value)) {
    throw Error(fmt::format("{}: '{}' is not a finite number", what, text));
  }
  return value;
}

int parse_int(std::string_view text, std::string_view what) {
  text = trim(text);
  int value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw Error(fmt::format("{}: '{}' is not an integer", what, text));
  }
  return value;
}

void set_config_value(TrainConfig& c, std::string_view key, std::string_view value) {
  key = trim(key);
  value = trim(value);
  if (key == "lambda0_filter") {
    c.filter.lambda0 = parse_double(value, key);
  } else if (key == "lambda1_filter") {
    c.filter.lambda1 = parse_double(value, key);
  } else if (key == "lambda0_gain") {
    c.gain.lambda0 = parse_double(value, key);
  } else if (key == "lambda1_gain") {
    c.gain.lambda1 = parse_double(value, key);
  } else if (key == "lambda0_bias") {
    c.bias.lambda0 = parse_double(value, key);
  } else if (key == "lambda1_bias") {
    c.bias.lambda1 = parse_double(value, key);
  } else if (key == "pretrain_iters") {
    c.pretrain_iters = parse_int(value, key);
  } else if (key == "refine_iters") {
    c.refine_iters = parse_int(value, key);
  } else if (key == "lbfgs_history") {
    c.lbfgs_history = parse_int(value, key);
  } else if (key == "dealias") {
    c.dealias = parse_dealias_mode(value);
  } else if (key == "n") {
    c.n = parse_int(value, key);
  } else if (key == "bin_size") {
    c.bin_size = parse_double(value, key);
  } else if (key == "u_lo") {
    c.u_lo = parse_double(value, key);
  } else if (key == "v_lo") {
    c.v_lo = parse_double(value, key);
  } else if (key == "parameterization") {
    if (value == "preconditioned") {
      c.parameterization = Parameterization::kPreconditioned;
    } else if (value == "time-domain") {
      c.parameterization = Parameterization::kTimeDomain;
    } else {
      throw Error(fmt::format("parameterization: unknown value '{}'", value));
    }
  } else {
    throw Error(fmt::format("unknown config key '{}'", key));
  }
}

TrainConfig parse_config(std::istream& in) {
  TrainConfig c;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view s = trim(line);
    if (s.empty() || s.front() == '#') continue;
    const auto eq = s.find('=');
    if (eq == std::string_view::npos) throw Error(fmt::format("config line {}: expected key = value", line_no));
    try {
      set_config_value(c, s.substr(0, eq), s.substr(eq + 1));
    } catch (const Error& e) {
      throw Error(fmt::format("config line {}: {}", line_no, e.what()));
    }
  }
  c.validate();
  return c;
}

TrainConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(fmt::format("cannot open config file '{}'", path));
  return parse_config(in);
}

std::string format_config(const TrainConfig& c) {
  std::string out;
  auto put = [&](std::string_view key, const auto& value) { out += fmt::format("{} = {}\n", key, value); };
  put("lambda0_filter", c.filter.lambda0);
  put("lambda1_filter", c.filter.lambda1);
  put("lambda0_gain", c.gain.lambda0);
  put("lambda1_gain", c.gain.lambda1);
  put("lambda0_bias", c.bias.lambda0);
  put("lambda1_bias", c.bias.lambda1);
  put("pretrain_iters", c.pretrain_iters);
  put("refine_iters", c.refine_iters);
  put("lbfgs_history", c.lbfgs_history);
  put("dealias", to_string(c.dealias));
  put("n", c.n);
  put("bin_size", c.bin_size);
  if (c.u_lo) put("u_lo", *c.u_lo);
  if (c.v_lo) put("v_lo", *c.v_lo);
  put("parameterization",
      c.parameterization == Parameterization::kPreconditioned ? "preconditioned" : "time-domain");
  return out;
}

}  // namespace ffcc
