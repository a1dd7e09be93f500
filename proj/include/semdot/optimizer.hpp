#pragma once

#include <vector>

#include "semdot/core.hpp"
#include "semdot/projection.hpp"

namespace semdot {

/// Moving-asymptote state for the sequential convex update with a single
/// linear volume constraint. Standard parameters: a0=1, a=0, d=1, asymptote
/// initialization 0.5x range with 0.7/1.2 adaptation, move limit 0.5x range.
/// The constraint penalty c is set high enough that the elastic slack stays
/// inactive even when a projection shock inflates the compliance gradients;
/// whenever the multiplier stays below c the update is identical to the
/// published default c = 1000.
struct MmaState {
  int iteration = 0;
  std::vector<double> xold1, xold2, low, upp;
  double xmin = 1e-3, xmax = 1.0;
  double a0 = 1.0, a = 0.0, c = 1e6, d = 1.0;
  double move = 0.5;
  double asyinit = 0.5, asyincr = 1.2, asydecr = 0.7, albefa = 0.1;
};

/// One MMA step: builds the convex separable subproblem around x and solves
/// it exactly through its dual (bisection on the constraint multiplier).
/// The constraint is dot(dV, x) - vstar <= 0.
Field mma_update(const Field& x, const Field& dC, const Field& dV, double vstar,
                 MmaState& state);

/// Optimality-criteria fixed-point update with a bisected multiplier.
/// Requires dC <= 0 elementwise; the volume constraint dot(dV, xnew) = vstar
/// is met to 1e-6 when reachable within the move limit.
Field oc_update(const Field& x, const Field& dC, const Field& dV, double vstar,
                double move = 0.2, double xmin = 1e-3, double xmax = 1.0);

struct ConvergenceSpec {
  double tau = 1e-3;      ///< overall topological alteration tolerance
  double epsilon = 1e-3;  ///< boundary-error tolerance (smooth mode)
  int max_iter = 300;
  int min_iter = 10;  ///< iterations before convergence checks start

  void validate() const {
    if (tau <= 0.0) throw ConfigError("convergence: tau must be positive");
    if (epsilon <= 0.0) throw ConfigError("convergence: epsilon must be positive");
    if (max_iter < 1) throw ConfigError("convergence: max_iter must be >= 1");
  }
};

struct ConvergenceDecision {
  double alteration = 0.0;  ///< sum |x_k - x_{k-1}| / sum x_k
  bool converged = false;
};

/// Step mode converges on the alteration measure alone; smooth mode also
/// requires the boundary error to be within epsilon.
ConvergenceDecision check_convergence(const ConvergenceSpec& spec, ProjectionMode mode,
                                      int iteration, const Field& x_now, const Field& x_prev,
                                      double boundary_err);

}  // namespace semdot
