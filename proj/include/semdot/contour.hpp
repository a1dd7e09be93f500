#pragma once

#include <array>
#include <vector>

#include "semdot/core.hpp"
#include "semdot/mesh.hpp"
#include "semdot/projection.hpp"

namespace semdot {

struct Polyline {
  std::vector<std::array<double, 2>> points;  ///< domain coordinates
  bool closed = false;

  /// Signed enclosed area (shoelace); positive when the solid side is inside.
  double signed_area() const;
};

/// Iso-contour of the interpolated density field at the level psi.
///
/// The field is sampled on the global grid-point lattice augmented with the
/// element borders (bilinear values from the shared nodes, so the lattice is
/// continuous across elements). Marching squares with linear interpolation
/// along lattice edges; solid (rho > psi) lies on the left of each polyline.
std::vector<Polyline> extract_boundary(const Mesh& mesh, const GridSpec& spec,
                                       const std::vector<double>& rho_n, double psi);

}  // namespace semdot
