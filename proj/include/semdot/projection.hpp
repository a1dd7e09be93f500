#pragma once

#include <array>
#include <cstdint>
#include <unordered_map>
#include <utility>
#include <vector>

#include "semdot/core.hpp"
#include "semdot/mesh.hpp"

namespace semdot {

enum class ProjectionMode { step, smooth };

/// Sub-element sample lattice: n x n points per element placed at the
/// midpoints of an n x n subdivision of [-1,1]^2, strictly inside the element.
struct GridSpec {
  int n_per_axis = 10;
  std::vector<double> local;  ///< midpoint coordinates in [-1,1], size n_per_axis

  static GridSpec make(int n_per_axis);
  int points_per_element() const { return n_per_axis * n_per_axis; }

  /// Bilinear shape weights (BL, BR, TR, TL) for grid point g = gy*n + gx.
  std::array<double, 4> shape_weights(int g) const;
};

struct ProjectionState {
  double beta = 0.5;
  double lambda = 0.5;
  double psi = 0.5;
  double beta_cap = 5000.0;
  ProjectionMode mode = ProjectionMode::smooth;

  void validate() const {
    if (beta <= 0.0) throw ConfigError("projection: beta must be positive");
    if (psi < 0.0 || psi > 1.0) throw ConfigError("projection: psi must be in [0, 1]");
    if (beta > beta_cap) throw ConfigError("projection: beta above beta_cap");
  }
};

/// beta_k = min(beta_{k-1} + lambda, beta_cap).
ProjectionState update_beta(ProjectionState state);

/// Eq.-style step projection: solid above the threshold, void at or below it.
double heaviside_step(double rho, double psi, double rho_min);

/// tanh-based smooth projection, clamped to [rho_min, 1]. Saturated arguments
/// map to exactly 1.0 / rho_min so converged fields become bitwise binary.
double heaviside_smooth(double rho, double psi, double beta, double rho_min);

/// Per-element grid-point densities, g fastest within each element.
struct GridField {
  int nx = 0, ny = 0;
  int n_per_axis = 10;
  double rho_min = 1e-3;
  std::vector<double> rho_eg;  ///< element-major, points_per_element() per element

  int element_count() const { return nx * ny; }
  int points_per_element() const { return n_per_axis * n_per_axis; }
  const double* element(int e) const {
    return rho_eg.data() + static_cast<size_t>(e) * points_per_element();
  }
};

/// Grid points forced void for the whole run, plus volume accounting.
struct PassiveMask {
  std::vector<uint8_t> full;  ///< per element: 1 = every grid point passive
  std::unordered_map<int, std::vector<uint8_t>> partial;  ///< element -> per-point flags
  std::vector<uint8_t> counted;  ///< per element: 1 = counted in the volume target
  int counted_elements = 0;

  bool empty() const { return full.empty(); }
  bool is_full(int e) const { return !full.empty() && full[e]; }
  bool is_counted(int e) const { return counted.empty() || counted[e]; }
  const std::vector<uint8_t>* partial_row(int e) const {
    if (partial.empty()) return nullptr;
    auto it = partial.find(e);
    return it == partial.end() ? nullptr : &it->second;
  }
};

/// Bilinear interpolation of nodal densities at every grid point (raw field).
GridField interpolate_grid_densities(const Mesh& mesh, const GridSpec& spec,
                                     const std::vector<double>& rho_n, double rho_min);

struct BisectResult {
  double psi = 0.5;
  GridField projected;
  double volume = 0.0;  ///< mean projected density over counted elements
};

/// Bisection for the threshold on a materialized raw grid field: finds psi in
/// [0,1] whose projected (and passive-masked) mean matches the volume target.
BisectResult bisect_threshold(const GridField& raw, double vstar, const ProjectionState& state,
                              const PassiveMask& passive = {});

/// X_new per element (grid mean) and its deviation from the filtered field.
std::pair<Field, Field> recompose_volume_fractions(const GridField& projected,
                                                   const Field& xtilde);

/// Fraction of elements that are intermediate without containing a solid/void
/// transition: max grid density < 1 and min grid density > rho_min.
double boundary_error(const GridField& grid);

/// Fused per-iteration pipeline used by the optimizer loop: interpolation,
/// threshold bisection, projection and recomposition evaluated from nodal
/// densities without materializing the grid.
struct ProjectionResult {
  double psi = 0.5;
  Field x_new;
  Field elem_min, elem_max;  ///< projected per-element extremes
  double volume = 0.0;
  double boundary_error = 0.0;
};

ProjectionResult project_design(const Mesh& mesh, const GridSpec& spec,
                                const std::vector<double>& rho_n, double vstar,
                                const ProjectionState& state, const PassiveMask& passive,
                                double rho_min);

}  // namespace semdot
