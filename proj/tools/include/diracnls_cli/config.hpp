#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "diracnls/bootstrap.hpp"
#include "diracnls/model.hpp"

namespace diracnls::cli {

/// Malformed or inconsistent run configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Settings of one batch run.
///
/// Text form: one `key = value` per line, `#` starts a comment, blank lines
/// are ignored. Unknown or repeated keys are errors. Lists are separated by
/// commas or whitespace.
struct RunConfig {
  /// "standard" or a path to a Fourier table, relative to the config file.
  std::string potential = "standard";
  std::filesystem::path potential_path;
  double epsilon_V = 0.5;
  NonlinearityKind nonlinearity = NonlinearityKind::Kerr;
  double K0 = 1.0;
  double background = 1.0;
  int cutoff = 6;
  int grid_resolution = 0;
  std::vector<double> epsilons{0.02, 0.04, 0.08};
  int beta_samples = 64;
  double inner_tol = 1e-12;
  double outer_tol = 1e-11;
  double pseudo_tol = 1e-3;
  int max_inner = 500;
  int max_outer = 200;
  double damping = 0.5;
  ShiftMode shift_mode = ShiftMode::RealE1;
  std::filesystem::path output_dir = "diracnls_out";
  std::uint64_t seed = 1;
  int restarts = 5;
  /// Restart perturbations have norm perturbation_scale * eps^3.
  double perturbation_scale = 1.0;
  int landscape_theta = 33;
  int landscape_phase = 64;

  /// Throws ConfigError when an invariant fails.
  void validate() const;

  ModelParameters model_parameters() const;
  BootstrapConfig bootstrap_config(double epsilon) const;
};

/// Parses the text form; relative potential paths resolve against base_dir.
RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

/// Keys accepted by parse_config, in documentation order.
const std::vector<std::string>& config_keys();

}  // namespace diracnls::cli
