#pragma once

#include <array>
#include <cmath>
#include <utility>
#include <vector>

#include "semdot/core.hpp"

namespace semdot {

/// Structured quad mesh of unit square elements.
///
/// Numbering is row-major with x fastest and the origin at the bottom-left
/// corner: node(ix, iy) = iy*(nx+1) + ix, element(ex, ey) = ey*nx + ex.
/// Each node carries two DOFs, x then y: dofs(n) = {2n, 2n+1}.
struct Mesh {
  int nx = 0;
  int ny = 0;
  static constexpr double element_size = 1.0;
  static constexpr double element_volume = 1.0;

  Mesh() = default;
  Mesh(int nx_, int ny_) : nx(nx_), ny(ny_) {
    if (nx <= 0 || ny <= 0) throw Error("mesh dimensions must be positive");
  }

  int node_count() const { return (nx + 1) * (ny + 1); }
  int element_count() const { return nx * ny; }
  int dof_count() const { return 2 * node_count(); }

  int node_id(int ix, int iy) const { return iy * (nx + 1) + ix; }
  int element_id(int ex, int ey) const { return ey * nx + ex; }
  std::pair<int, int> element_xy(int e) const { return {e % nx, e / nx}; }

  /// Element nodes in counter-clockwise order: BL, BR, TR, TL.
  std::array<int, 4> element_nodes(int e) const {
    const auto [ex, ey] = element_xy(e);
    return {node_id(ex, ey), node_id(ex + 1, ey), node_id(ex + 1, ey + 1),
            node_id(ex, ey + 1)};
  }

  /// Element DOFs, interleaved x/y per node, same node order as element_nodes.
  std::array<int, 8> element_dofs(int e) const {
    const auto n = element_nodes(e);
    return {2 * n[0], 2 * n[0] + 1, 2 * n[1], 2 * n[1] + 1,
            2 * n[2], 2 * n[2] + 1, 2 * n[3], 2 * n[3] + 1};
  }

  /// Element center in domain coordinates (element widths).
  std::pair<double, double> element_center(int e) const {
    const auto [ex, ey] = element_xy(e);
    return {ex + 0.5, ey + 0.5};
  }
};

/// Isotropic plane-stress material with the SIMP-style penalty exponent and
/// the artificial void density floor.
struct MaterialModel {
  double E1 = 1.0;       ///< Young's modulus of the base material (MPa)
  double nu = 0.3;       ///< Poisson ratio
  double p = 1.5;        ///< penalty exponent
  double rho_min = 1e-3; ///< void density floor

  void validate() const {
    if (E1 <= 0.0) throw ConfigError("material: E1 must be positive");
    if (nu <= 0.0 || nu >= 0.5) throw ConfigError("material: nu must be in (0, 0.5)");
    if (p < 1.0) throw ConfigError("material: p must be >= 1");
    if (rho_min <= 0.0 || rho_min >= 1.0) throw ConfigError("material: rho_min must be in (0, 1)");
  }
};

struct Spring {
  int dof = -1;
  double stiffness = 0.0;
};

/// Loads, supports, grounded springs and the mechanism output selector.
///
/// For mechanism problems the output selector L carries a single +/-1 entry
/// at the output DOF, oriented along the desired output direction; the
/// objective minimized is C = -u_out = -L^T u.
struct LoadCase {
  std::vector<std::pair<int, double>> forces;  ///< sparse force vector f
  std::vector<int> fixed_dofs;
  std::vector<Spring> springs;
  int output_dof = -1;
  double output_sign = 0.0;  ///< L entry at output_dof (+1 or -1)

  bool is_mechanism() const { return output_dof >= 0; }

  void validate(const Mesh& mesh) const {
    const int ndof = mesh.dof_count();
    for (const auto& [dof, value] : forces) {
      (void)value;
      if (dof < 0 || dof >= ndof) throw ConfigError("load case: force DOF out of range");
    }
    for (int dof : fixed_dofs)
      if (dof < 0 || dof >= ndof) throw ConfigError("load case: fixed DOF out of range");
    for (const auto& s : springs) {
      if (s.dof < 0 || s.dof >= ndof) throw ConfigError("load case: spring DOF out of range");
      if (s.stiffness < 0.0) throw ConfigError("load case: spring stiffness must be >= 0");
    }
    if (is_mechanism()) {
      if (output_dof >= ndof) throw ConfigError("load case: output DOF out of range");
      if (std::abs(std::abs(output_sign) - 1.0) > 1e-15)
        throw ConfigError("load case: output selector entry must have magnitude 1");
    }
  }
};

}  // namespace semdot
