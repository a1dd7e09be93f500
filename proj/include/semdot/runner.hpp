#pragma once

#include <functional>
#include <string>
#include <vector>

#include "semdot/contour.hpp"
#include "semdot/core.hpp"
#include "semdot/fea.hpp"
#include "semdot/optimizer.hpp"
#include "semdot/problems.hpp"
#include "semdot/projection.hpp"

namespace semdot {

enum class OptimizerChoice { mma, oc, simp_d };

struct IterationRecord {
  int iter = 0;
  double objective = 0.0;
  double volume = 0.0;
  double alteration = 0.0;
  double boundary_error = 0.0;
  double beta = 0.0;
  double psi = 0.0;
  double wall_ms = 0.0;
};

struct RunHistory {
  std::vector<IterationRecord> records;
  bool converged = false;

  int iterations() const { return static_cast<int>(records.size()); }
};

struct RunResult {
  RunHistory history;
  Field x_raw;      ///< raw design variables
  Field x_tilde;    ///< density-filtered field
  Field x_new;      ///< recomposed volume fractions driving the FEA
  Field delta;      ///< x_new - x_tilde
  std::vector<double> rho_nodal;
  std::vector<Polyline> boundary;
  double objective = 0.0;
  double psi = 0.5;
  double beta = 0.0;
  int iterations = 0;
};

struct RunParams {
  double rmin = 2.0;
  double upsilon = 1.0;
  int grid_n = 10;
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
  ProjectionMode mode = ProjectionMode::smooth;
  OptimizerChoice optimizer = OptimizerChoice::mma;
  double move = 0.5;  ///< design-update move limit (fraction of the range)
  bool symmetry = false;
  SolveOptions solve;
  std::function<void(const IterationRecord&)> on_iteration;

  MaterialModel material() const {
    return MaterialModel{young, poisson, penalty, rho_min};
  }
};

/// Full optimization loop: equilibrium on the recomposed fractions, blended
/// sensitivities, filter chain rule, design update, multi-stage filtering,
/// grid projection under the volume target, convergence on the projected
/// fields. The boundary polylines of the final design are included.
RunResult run_semdot(const ProblemDefinition& problem, const RunParams& params);

/// Density-filtered SIMP baseline (gray-scale output, no grid projection).
/// Uses the power law with the configured penalty and an optimality-criteria
/// update; terminates on the alteration measure applied to the filtered
/// densities.
RunResult run_simp_baseline(const ProblemDefinition& problem, const RunParams& params);

}  // namespace semdot
