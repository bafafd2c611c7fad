#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "granusense/harness.hpp"

namespace granusense::cli {

// Everything a run needs, resolvable from a flat key=value file plus
// command-line overrides. Defaults reproduce the standard study.
struct RunConfig {
  std::uint64_t seed = 42;
  std::string out_dir = ".";

  double test_fraction = 0.2;
  int holdout_extras = 6;
  bool eval_seen = true;
  bool eval_holdout = true;
  bool oracle_features = false;

  std::vector<double> ablation_rates_hz{800.0, 30.0};
  std::vector<double> humidity_levels_ml{0.1, 0.2, 0.3, 0.4, 0.5};
  int humidity_trials = 10;

  harness::GenerateOptions generate;
};

// Parses `key = value` lines; '#' starts a comment, blank lines are
// skipped. Unknown keys, malformed values, and out-of-range settings all
// raise ConfigError carrying the offending line number.
RunConfig parse_config(const std::string& text);

// Full command-line entry point (argv without the program name). Returns
// the process exit code: 0 success, 2 usage, 3 configuration, 4
// simulation, 5 training, 6 I/O.
int run_command(const std::vector<std::string>& args);

std::string usage();

}  // namespace granusense::cli
