#pragma once

#include <iosfwd>
#include <string>
#include <string_view>

#include "ffcc/trainer.hpp"

namespace ffcc {

/// Parses a double, rejecting trailing garbage and non-finite values.
double parse_double(std::string_view text, std::string_view what);
int parse_int(std::string_view text, std::string_view what);

/// Sets one training-config key from its text value. Keys:
///   lambda0_filter lambda1_filter lambda0_gain lambda1_gain lambda0_bias
///   lambda1_bias pretrain_iters refine_iters lbfgs_history dealias n
///   bin_size u_lo v_lo parameterization
void set_config_value(TrainConfig& config, std::string_view key, std::string_view value);

/// Reads "key = value" lines on top of the defaults. Blank lines and lines
/// starting with '#' are ignored. The result is validated.
TrainConfig parse_config(std::istream& in);
TrainConfig load_config(const std::string& path);

/// Every key of the config, one "key = value" line each, in a form that
/// parse_config reads back exactly.
std::string format_config(const TrainConfig& config);

/// Trims ASCII whitespace from both ends.
std::string_view trim(std::string_view s);

}  // namespace ffcc
