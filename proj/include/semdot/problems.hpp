#pragma once

#include <optional>
#include <string>
#include <vector>

#include "semdot/core.hpp"
#include "semdot/mesh.hpp"
#include "semdot/projection.hpp"

namespace semdot {

enum class ProblemClass { compliance, mechanism };

/// Analytic passive-void geometry. Shapes either stay inside the design
/// domain (counted in the volume target, e.g. a prescribed hole) or carve
/// the domain itself (excluded from volume accounting, e.g. a bracket
/// cut-out).
struct PassiveShape {
  enum class Kind { circle, rectangle };
  Kind kind = Kind::circle;
  double cx = 0, cy = 0, radius = 0;      // circle
  double x0 = 0, y0 = 0, x1 = 0, y1 = 0;  // rectangle, [x0,x1) x [y0,y1)
  bool exclude_from_volume = false;

  bool contains(double x, double y) const {
    if (kind == Kind::circle) {
      const double dx = x - cx, dy = y - cy;
      return dx * dx + dy * dy <= radius * radius;
    }
    return x >= x0 && x < x1 && y >= y0 && y < y1;
  }
};

struct ProblemDefinition {
  std::string name;
  int nx = 0, ny = 0;
  double vstar = 0.3;
  ProblemClass problem_class = ProblemClass::compliance;
  LoadCase loads;
  std::vector<PassiveShape> passives;
  bool has_symmetry_axis = false;  ///< vertical mirror axis at x = nx/2

  Mesh mesh() const { return Mesh(nx, ny); }
  void validate() const;
};

/// Benchmark presets. Geometry scales with the requested mesh; passing 0 for
/// the dimensions selects the reference mesh of each preset.
///
/// Names: deep-beam (180x90), deep-beam-hole, mbb (150x50, half domain),
/// cantilever (150x100), l-bracket (400x400 with the upper-right quadrant
/// removed), force-inverter (80x40 half domain, mechanism).
ProblemDefinition preset_problem(const std::string& name, int nx = 0, int ny = 0);

std::vector<std::string> preset_names();

/// Grid-point membership mask for the problem's passive shapes.
PassiveMask build_passive_mask(const ProblemDefinition& problem, const Mesh& mesh,
                               const GridSpec& spec);

}  // namespace semdot
