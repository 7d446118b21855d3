#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "crosswidth/model.hpp"
#include "crosswidth/oracle.hpp"

namespace cw::config {

struct RunConfig {
  model::Problem problem;
  double calib = 1.0;           // transfer-matrix constant multiplier
  double stphase_calib = 2.0;   // stationary-phase constant multiplier
  std::vector<double> h_list;   // strictly decreasing
  oracle::OracleOptions oracle;
};

// Sectioned `key = value` text; '#' starts a comment.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::string& path);

// "0.08, 0.06" -> {0.08, 0.06}; throws ConfigError(line) on malformed lists.
std::vector<double> parse_list(std::string_view text, int line = 0);

}  // namespace cw::config
