#pragma once

// Batch experiments behind the command-line tool. Each command writes its files into the
// output directory and returns a process exit code; errors are reported as exceptions
// that exit_code_for() maps to codes.

#include <cstddef>
#include <exception>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fdirac/config.hpp"
#include "fdirac/model.hpp"

namespace fdirac {

enum ExitCode : int {
  exit_ok = 0,
  exit_config_error = 1,
  exit_partial_failure = 2,
  exit_insufficient_data = 3,
};

struct RunOptions {
  /// Overrides output.directory when non-empty.
  std::filesystem::path out_dir;
  std::size_t jobs = 1;
  /// Overrides solver.grid_points.
  std::optional<std::size_t> grid_points;
  std::ostream* out = nullptr;  // progress and tables; null for silence
};

/// Model on the configured grid; invalid coefficients raise ConfigError.
Model build_model(const ExperimentConfig& config, const RunOptions& opts);

/// Adds the constant kappa to p and r so that mu(pi) = 0. Returns the shifted spec and
/// stores kappa (0 when no shift was needed).
ModelSpec with_mu_pi_zero(const ModelSpec& spec, std::size_t grid_points, double* kappa);

int cmd_spectrum(const ExperimentConfig& config, const RunOptions& opts);
int cmd_nodes(const ExperimentConfig& config, const RunOptions& opts);
int cmd_invert(const ExperimentConfig& config, const std::filesystem::path& nodes_path,
               const RunOptions& opts);
int cmd_roundtrip(const ExperimentConfig& config, const RunOptions& opts);
int cmd_selftest(const RunOptions& opts);

struct CalculusCheck {
  std::string name;
  double alpha;
  double error;
  double tolerance;
  bool pass() const { return error <= tolerance; }
};

/// Derivative/integral identities on five smooth functions for alpha in {0.3, 0.5, 0.8, 1}.
std::vector<CalculusCheck> calculus_suite(std::size_t grid_points = 4097);

int exit_code_for(const std::exception& e);

}  // namespace fdirac
