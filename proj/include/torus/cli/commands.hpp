#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "torus/cli/config.hpp"
#include "torus/cli/report.hpp"

namespace torus::cli {

enum ExitCode : int { kExitOk = 0, kExitValidation = 1, kExitNumerical = 2 };

struct RunOptions {
  std::string command;
  std::string config_path;  // empty: embedded default
  std::string out_dir;      // empty: TORUSCTL_OUT, then "torusctl_out"
  std::optional<std::uint64_t> seed;
  int threads = 1;
};

const std::vector<std::string>& command_names();

/// Output directory precedence: explicit flag, then $TORUSCTL_OUT, then "torusctl_out".
std::string resolve_out_dir(const std::string& flag);

/// Runs one command, writing its reports (or error.json) to the output directory.
int run(const RunOptions& options, std::ostream& log);

struct SelftestCheck {
  std::string suite;
  std::string name;
  double value;
  double tolerance;
  bool passed;
};

/// The invariant suites run by `selftest`.
std::vector<SelftestCheck> selftest_checks(const ExperimentConfig& config);

}  // namespace torus::cli
