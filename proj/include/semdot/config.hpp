#pragma once

#include <string>

#include "semdot/core.hpp"
#include "semdot/problems.hpp"
#include "semdot/runner.hpp"

namespace semdot {

/// Resolved run configuration: preset selection plus every tunable knob.
/// Defaults follow the reference parameter set (beta0=0.5, lambda=0.5,
/// p=1.5, rho_min=0.001, 10x10 grid, tau=epsilon=0.001, max_iter=300,
/// upsilon_min=1).
struct RunConfig {
  std::string preset;
  int nx = 0, ny = 0;       ///< 0 selects the preset's reference mesh
  double volfrac = -1.0;    ///< <0 keeps the preset's target (0.3)
  double rmin = 2.0;
  double upsilon = 1.0;
  int grid = 10;
  double beta0 = 0.5;
  double lambda = 0.5;
  double penalty = 1.5;
  double rho_min = 1e-3;
  double young = 1.0;
  double poisson = 0.3;
  double tau = 1e-3;
  double epsilon = 1e-3;
  int max_iter = 300;
  int min_iter = 10;
  std::string mode = "smooth";        ///< step | smooth
  std::string optimizer = "mma";      ///< mma | oc | simp-d
  bool symmetry = false;
  std::string out_dir = "out";

  void validate() const;
  ProblemDefinition problem() const;
  RunParams params() const;
};

/// Parses a key = value file (# comments, blank lines allowed). Unknown keys
/// and malformed lines raise ConfigError with the line number; field values
/// are validated against their owning types.
RunConfig load_config(const std::string& path);

/// Same parser over an in-memory string (tests, bindings).
RunConfig parse_config(const std::string& text, const std::string& origin = "<string>");

}  // namespace semdot
