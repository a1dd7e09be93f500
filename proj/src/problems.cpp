#include "semdot/problems.hpp"

#include <algorithm>
#include <cmath>

namespace semdot {

namespace {

int dof_x(const Mesh& mesh, int ix, int iy) { return 2 * mesh.node_id(ix, iy); }
int dof_y(const Mesh& mesh, int ix, int iy) { return 2 * mesh.node_id(ix, iy) + 1; }

void fix_node(ProblemDefinition& p, const Mesh& mesh, int ix, int iy) {
  p.loads.fixed_dofs.push_back(dof_x(mesh, ix, iy));
  p.loads.fixed_dofs.push_back(dof_y(mesh, ix, iy));
}

ProblemDefinition deep_beam(int nx, int ny, bool with_hole) {
  ProblemDefinition p;
  p.name = with_hole ? "deep-beam-hole" : "deep-beam";
  p.nx = nx;
  p.ny = ny;
  const Mesh mesh(nx, ny);
  // Hinge at the bottom-left corner, roller at the bottom-right, unit
  // downward load at the bottom center.
  fix_node(p, mesh, 0, 0);
  p.loads.fixed_dofs.push_back(dof_y(mesh, nx, 0));
  p.loads.forces.emplace_back(dof_y(mesh, nx / 2, 0), -1.0);
  if (with_hole) {
    PassiveShape hole;
    hole.kind = PassiveShape::Kind::circle;
    hole.cx = nx / 2.0;
    hole.cy = nx / 4.0;
    hole.radius = nx / 6.0;
    hole.exclude_from_volume = false;
    p.passives.push_back(hole);
  }
  p.has_symmetry_axis = true;
  return p;
}

ProblemDefinition mbb(int nx, int ny) {
  ProblemDefinition p;
  p.name = "mbb";
  p.nx = nx;
  p.ny = ny;
  const Mesh mesh(nx, ny);
  // Half domain: symmetry rollers on the left edge, support roller at the
  // bottom-right corner, unit downward load at the top-left corner.
  for (int iy = 0; iy <= ny; ++iy) p.loads.fixed_dofs.push_back(dof_x(mesh, 0, iy));
  p.loads.fixed_dofs.push_back(dof_y(mesh, nx, 0));
  p.loads.forces.emplace_back(dof_y(mesh, 0, ny), -1.0);
  return p;
}

ProblemDefinition cantilever(int nx, int ny) {
  ProblemDefinition p;
  p.name = "cantilever";
  p.nx = nx;
  p.ny = ny;
  const Mesh mesh(nx, ny);
  for (int iy = 0; iy <= ny; ++iy) {
    p.loads.fixed_dofs.push_back(dof_x(mesh, 0, iy));
    p.loads.fixed_dofs.push_back(dof_y(mesh, 0, iy));
  }
  p.loads.forces.emplace_back(dof_y(mesh, nx, ny / 2), -1.0);
  return p;
}

ProblemDefinition l_bracket(int nx, int ny) {
  ProblemDefinition p;
  p.name = "l-bracket";
  p.nx = nx;
  p.ny = ny;
  const Mesh mesh(nx, ny);
  // Full square mesh with the upper-right cut-out as a hard-void region that
  // does not belong to the design domain; both limbs are 0.4 L wide.
  const int limb_x = static_cast<int>(std::lround(0.4 * nx));
  const int limb_y = static_cast<int>(std::lround(0.4 * ny));
  PassiveShape cut;
  cut.kind = PassiveShape::Kind::rectangle;
  cut.x0 = limb_x;
  cut.y0 = limb_y;
  cut.x1 = nx + 1.0;
  cut.y1 = ny + 1.0;
  cut.exclude_from_volume = true;
  p.passives.push_back(cut);
  // Top edge of the vertical limb fixed; unit downward load at the top
  // corner of the right arm.
  for (int ix = 0; ix <= limb_x; ++ix) fix_node(p, mesh, ix, ny);
  p.loads.forces.emplace_back(dof_y(mesh, nx, limb_y), -1.0);
  return p;
}

ProblemDefinition force_inverter(int nx, int ny) {
  ProblemDefinition p;
  p.name = "force-inverter";
  p.nx = nx;
  p.ny = ny;
  p.problem_class = ProblemClass::mechanism;
  const Mesh mesh(nx, ny);
  // Half domain, symmetry line along the bottom edge. Input force pushes
  // right at the bottom-left corner; the output at the bottom-right corner
  // is meant to move left. Two corner nodes of the left edge are fixed.
  for (int ix = 0; ix <= nx; ++ix) p.loads.fixed_dofs.push_back(dof_y(mesh, ix, 0));
  fix_node(p, mesh, 0, ny);
  fix_node(p, mesh, 0, ny - 1);
  const int din = dof_x(mesh, 0, 0);
  const int dout = dof_x(mesh, nx, 0);
  p.loads.forces.emplace_back(din, 1.0);
  p.loads.springs.push_back({din, 1.0});
  p.loads.springs.push_back({dout, 0.001});
  p.loads.output_dof = dout;
  p.loads.output_sign = -1.0;
  return p;
}

}  // namespace

void ProblemDefinition::validate() const {
  if (nx <= 0 || ny <= 0) throw ConfigError("problem: mesh dimensions must be positive");
  if (vstar <= 0.0 || vstar >= 1.0) throw ConfigError("problem: vstar must be in (0, 1)");
  loads.validate(mesh());
  if (problem_class == ProblemClass::mechanism) {
    if (!loads.is_mechanism())
      throw ConfigError("problem: mechanism class requires an output selector");
    if (loads.springs.size() < 2)
      throw ConfigError("problem: mechanism class requires input and output springs");
    if (loads.forces.empty()) throw ConfigError("problem: mechanism class requires an input force");
  }
  for (const auto& shape : passives) {
    if (shape.kind == PassiveShape::Kind::circle) {
      if (shape.cx < 0 || shape.cx > nx || shape.cy < 0 || shape.cy > ny)
        throw ConfigError("problem: passive circle center outside the domain");
    }
  }
}

ProblemDefinition preset_problem(const std::string& name, int nx, int ny) {
  ProblemDefinition p;
  if (name == "deep-beam") {
    p = deep_beam(nx > 0 ? nx : 180, ny > 0 ? ny : 90, false);
  } else if (name == "deep-beam-hole") {
    p = deep_beam(nx > 0 ? nx : 180, ny > 0 ? ny : 90, true);
  } else if (name == "mbb") {
    p = mbb(nx > 0 ? nx : 150, ny > 0 ? ny : 50);
  } else if (name == "cantilever") {
    p = cantilever(nx > 0 ? nx : 150, ny > 0 ? ny : 100);
  } else if (name == "l-bracket") {
    p = l_bracket(nx > 0 ? nx : 400, ny > 0 ? ny : (nx > 0 ? nx : 400));
  } else if (name == "force-inverter") {
    p = force_inverter(nx > 0 ? nx : 80, ny > 0 ? ny : 40);
  } else {
    throw ConfigError("unknown preset '" + name + "'");
  }
  p.validate();
  return p;
}

std::vector<std::string> preset_names() {
  return {"deep-beam", "deep-beam-hole", "mbb", "cantilever", "l-bracket", "force-inverter"};
}

PassiveMask build_passive_mask(const ProblemDefinition& problem, const Mesh& mesh,
                               const GridSpec& spec) {
  PassiveMask mask;
  if (problem.passives.empty()) return mask;

  const int ne = mesh.element_count();
  const int n = spec.n_per_axis;
  const int npts = spec.points_per_element();
  mask.full.assign(ne, 0);
  mask.counted.assign(ne, 1);

  std::vector<uint8_t> flags(static_cast<size_t>(npts));
  for (int e = 0; e < ne; ++e) {
    const auto [ex, ey] = mesh.element_xy(e);
    int inside = 0;
    for (int gy = 0; gy < n; ++gy) {
      const double y = ey + 0.5 * (spec.local[gy] + 1.0);
      for (int gx = 0; gx < n; ++gx) {
        const double x = ex + 0.5 * (spec.local[gx] + 1.0);
        uint8_t hit = 0;
        for (const auto& shape : problem.passives)
          if (shape.contains(x, y)) {
            hit = 1;
            break;
          }
        flags[static_cast<size_t>(gy) * n + gx] = hit;
        inside += hit;
      }
    }
    if (inside == npts)
      mask.full[e] = 1;
    else if (inside > 0)
      mask.partial[e] = flags;

    // Volume accounting is decided at element granularity by the center.
    const auto [cxp, cyp] = mesh.element_center(e);
    for (const auto& shape : problem.passives)
      if (shape.exclude_from_volume && shape.contains(cxp, cyp)) {
        mask.counted[e] = 0;
        break;
      }
  }
  mask.counted_elements = 0;
  for (int e = 0; e < ne; ++e) mask.counted_elements += mask.counted[e];
  return mask;
}

}  // namespace semdot
