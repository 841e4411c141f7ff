#pragma once

#include <cstdint>
#include <vector>

#include <json.hpp>

#include "pairchar/core_model.hpp"

namespace pairchar::cli {

struct ValidateConfig {
  std::vector<double> p = {0.01, 0.1, 0.3, 0.5};
  std::vector<double> eta = {0.01, 0.2, 0.5, 1.0};
  std::vector<double> p_dc = {0.0, 1e-4, 1e-2};
  std::vector<int> n_modes = {1, 2, 5};
  double tolerance = 1e-8;
  double identity_tolerance = 1e-10;
  /// Monte Carlo spot checks per cell of the statistics grid; 0 skips them.
  std::uint64_t mc_trials = 0;
  std::uint64_t mc_seed = 1;

  /// Same grid restricted to single-mode sources.
  static ValidateConfig quick();
};

struct ValidateReport {
  nlohmann::json json;
  bool pass = false;
};

ValidateReport run_validation(const ValidateConfig& config);

/// Closed form, oracle and both denominator readings of the multimode
/// visibilities at p = 0.3, N = 5, eta = 0.2, p_dc = 1e-4.
nlohmann::json denominator_reading_table();

int cmd_validate(const ValidateConfig& config, const std::string& out_path);

}  // namespace pairchar::cli
