#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "diracnls/io.hpp"
#include "diracnls_cli/config.hpp"

namespace diracnls::cli {

enum ExitCode : int {
  kSuccess = 0,
  kConfigFailure = 2,
  kRegimeFailure = 3,
  kCertificationFailure = 4,
};

struct Invocation {
  std::string command;
  std::filesystem::path config;
  std::optional<std::filesystem::path> out;
  std::optional<int> cutoff;
  bool quiet = false;
  /// Mode JSON files or directories for verify.
  std::vector<std::filesystem::path> inputs;
};

/// Header shared by every output file: version, cutoff, tolerances and gauge.
Metadata run_metadata(const RunConfig& config, const GaugeRecord* gauge);

/// Each command writes below out/<command>/ and returns an exit code.
int cmd_spectrum(const RunConfig& config, const std::filesystem::path& out, std::ostream& log);
int cmd_integrals(const RunConfig& config, const std::filesystem::path& out, std::ostream& log);
int cmd_bifurcate(const RunConfig& config, const std::filesystem::path& out, std::ostream& log);
/// Defaults to out/bifurcate when no inputs are given.
int cmd_verify(const RunConfig& config, const std::filesystem::path& out,
               const std::vector<std::filesystem::path>& inputs, std::ostream& log);

/// Loads the config, applies overrides, dispatches and maps errors to exit codes.
int run(const Invocation& invocation, std::ostream& log, std::ostream& err);

/// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace diracnls::cli
