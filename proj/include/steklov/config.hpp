#pragma once

#include <optional>
#include <string>
#include <vector>

#include "steklov/experiments.hpp"
#include "steklov/geometry.hpp"

namespace steklov {

/// Union of the geometry, oscillation, solver and sweep settings consumed by
/// the subcommands. Every field has a documented default; unknown config-file
/// keys are rejected.
struct RunConfig {
  std::string regime = "critical"; // subcritical | critical | supercritical
  std::optional<double> a;         // overrides the regime default when set
  double alpha = 0.3;
  double p = 2.0;
  std::vector<int> ks = {4, 8, 16, 32};
  double h_floor = 1.0 / 512;
  unsigned seed = 1234;
  int restarts = 3;

  std::string profile = "sin2"; // sin2 | fourier (empty coefficients = flat)
  std::vector<double> fourier_cos, fourier_sin;

  std::string domain = "square"; // square | disk
  double phi_height = 1.0;
  double phi_slope = 0.0;
  double phi_wave = 0.0; // sin(pi x) component of the chart

  double eps = 1.0 / 8; // single-run subcommands (solve, optimize, check-transform)
  bool perturbed = false;
  bool weighted = false; // optimize against d mu* instead of dS
  double h = 0.05;       // single-run mesh size
  int grid = 17;         // weight subcommand sample count

  std::string out;
  std::string report_from;
  int verbosity = 0;

  double regime_exponent() const;
  OscillationSpec osc() const;
  ChartFn phi() const;
  SweepConfig sweep() const;
};

/// Parse and validate a JSON config file. Errors carry the offending key.
RunConfig parse_config_file(const std::string& path);
RunConfig parse_config_text(const std::string& json_text);

/// Validation shared by file and flag paths; throws ConfigError.
void validate_config(const RunConfig& config);

/// Runs a subcommand: weight | solve | optimize | sweep | check-transform |
/// report. Returns the process exit code (0 success, 1 domain error,
/// 2 config error); messages go to stderr.
int dispatch(const std::string& subcommand, const RunConfig& config);

} // namespace steklov
