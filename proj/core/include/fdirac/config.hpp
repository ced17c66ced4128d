#pragma once

// Experiment configuration. Native encoding is a flat sectioned key = value text:
//
//   [model]
//   alpha = 1
//   p = "cos(2*x) + sin(x)"
//   [spectrum]
//   n_lo = 1
//   n_hi = 64
//
// Strings are double-quoted (\" and \\ escapes), numbers use C syntax, booleans are
// true/false, lists are ["a", "b"]. '#' starts a comment outside strings. A document whose
// first non-blank character is '{' is read as JSON with the same sections and keys.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "fdirac/model.hpp"

namespace fdirac {

struct SolverConfig {
  std::size_t grid_points = 4097;
  int picard_iterations = 30;
  bool operator==(const SolverConfig&) const = default;
};

struct SpectrumConfig {
  int n_lo = 1;
  int n_hi = 64;
  bool operator==(const SpectrumConfig&) const = default;
};

struct InverseConfig {
  int n_max = 64;
  std::string known = "L";  // "L" (recover p, r) or "pr" (recover L)
  std::size_t smoothing = 0;
  std::string extrapolation = "richardson";  // or "largest"
  std::string transfer = "interpolate";      // or "nearest"
  /// Treat the model block as ground truth and report per-stage errors.
  bool compare_truth = true;
  bool operator==(const InverseConfig&) const = default;
};

struct OutputConfig {
  std::string directory = "out";
  std::vector<std::string> formats = {"json", "csv"};
  bool operator==(const OutputConfig&) const = default;
};

struct ExperimentConfig {
  ModelSpec model;
  SolverConfig solver;
  SpectrumConfig spectrum;
  InverseConfig inverse;
  OutputConfig output;
  bool operator==(const ExperimentConfig&) const = default;

  bool wants(std::string_view format) const;
};

/// Parses either encoding and validates. Throws ConfigError (with 1-based line when known).
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::string& path);

/// Native encoding; parse_config(serialize_config(c)) == c.
std::string serialize_config(const ExperimentConfig& config);

/// Throws ConfigError for out-of-range values or expressions that do not parse.
void validate_config(const ExperimentConfig& config);

}  // namespace fdirac
