#pragma once

// Flat `key = value` experiment configuration. Lines starting with '#' and
// blank lines are ignored; unknown keys, repeated keys and malformed values
// are errors that name the line and the field.

#include <filesystem>
#include <map>
#include <string>

#include "gaf/clt.hpp"
#include "gaf/kernel.hpp"

namespace gaf {

struct Thresholds {
  double residual = 1e-8;         // basis.residual_threshold
  double slope_min = 0.9;         // asym.slope_min
  double slope_max = 1.1;         // asym.slope_max
  double r2_min = 0.99;           // asym.r2_min
  double offdiag_growth = 1.3;    // asym.growth_max
  double skewness = 0.15;         // clt.skewness_max
  double kurtosis = 0.3;          // clt.kurtosis_max
  double audit = 1e-3;            // clt.audit_tol
  double same_variance = 1e-3;    // clt.same_variance_tol
  double condition_i_floor = 0.0; // conditions.floor
};

struct AppConfig {
  ExperimentConfig experiment;
  AsymptoticsGrid asym_grid;
  Thresholds thresholds;
  std::map<std::string, std::string> entries;  // key -> raw value, as read
};

AppConfig parse_config(const std::string& text, const std::string& source = "<config>");
AppConfig load_config(const std::filesystem::path& path);

}  // namespace gaf
