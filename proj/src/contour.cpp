#include "semdot/contour.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <unordered_map>

namespace semdot {

namespace {

// Lattice axis: per element the left border plus the n interior midpoints;
// one trailing border closes the axis. Index -> domain coordinate.
struct LatticeAxis {
  int cells = 0;  // elements along the axis
  int n = 0;      // grid points per element
  std::vector<double> offsets;  // size n+1: 0, then midpoint fractions

  int count() const { return cells * (n + 1) + 1; }
  double coord(int idx) const {
    const int e = idx / (n + 1);
    const int rem = idx % (n + 1);
    if (e >= cells) return static_cast<double>(cells);
    return e + offsets[rem];
  }
  // Element that provides the value and the local fraction within it.
  std::pair<int, double> locate(int idx) const {
    const int e = idx / (n + 1);
    const int rem = idx % (n + 1);
    if (e >= cells) return {cells - 1, 1.0};
    return {e, offsets[rem]};
  }
};

LatticeAxis make_axis(int cells, const GridSpec& spec) {
  LatticeAxis axis;
  axis.cells = cells;
  axis.n = spec.n_per_axis;
  axis.offsets.resize(spec.n_per_axis + 1);
  axis.offsets[0] = 0.0;
  for (int i = 0; i < spec.n_per_axis; ++i)
    axis.offsets[i + 1] = 0.5 * (spec.local[i] + 1.0);
  return axis;
}

struct Segment {
  int64_t from_key = 0, to_key = 0;
  std::array<double, 2> from{}, to{};
};

// Edge identity on the lattice: vertex index of the edge origin plus the
// orientation bit (0 = horizontal, toward +x; 1 = vertical, toward +y).
inline int64_t edge_key(int i, int j, int orient, int row_count) {
  return ((static_cast<int64_t>(j) * row_count + i) << 1) | orient;
}

}  // namespace

double Polyline::signed_area() const {
  double acc = 0.0;
  const size_t np = points.size();
  for (size_t i = 0; i + 1 < np; ++i)
    acc += points[i][0] * points[i + 1][1] - points[i + 1][0] * points[i][1];
  if (closed && np > 1)
    acc += points[np - 1][0] * points[0][1] - points[0][0] * points[np - 1][1];
  return 0.5 * acc;
}

std::vector<Polyline> extract_boundary(const Mesh& mesh, const GridSpec& spec,
                                       const std::vector<double>& rho_n, double psi) {
  if (static_cast<int>(rho_n.size()) != mesh.node_count())
    throw Error("contour: nodal field size mismatch");
  const LatticeAxis xa = make_axis(mesh.nx, spec);
  const LatticeAxis ya = make_axis(mesh.ny, spec);
  const int cx = xa.count();
  const int cy = ya.count();

  auto row_values = [&](int j, std::vector<double>& row) {
    row.resize(cx);
    const auto [ey, fy] = ya.locate(j);
    for (int i = 0; i < cx; ++i) {
      const auto [ex, fx] = xa.locate(i);
      const auto nodes = mesh.element_nodes(mesh.element_id(ex, ey));
      const double left = rho_n[nodes[0]] + (rho_n[nodes[3]] - rho_n[nodes[0]]) * fy;
      const double right = rho_n[nodes[1]] + (rho_n[nodes[2]] - rho_n[nodes[1]]) * fy;
      row[i] = left + (right - left) * fx;
    }
  };

  std::vector<double> lower, upper;
  row_values(0, lower);

  std::vector<Segment> segments;
  for (int j = 0; j + 1 < cy; ++j) {
    row_values(j + 1, upper);
    const double y0 = ya.coord(j), y1 = ya.coord(j + 1);
    for (int i = 0; i + 1 < cx; ++i) {
      const double v00 = lower[i], v10 = lower[i + 1];
      const double v01 = upper[i], v11 = upper[i + 1];
      const int code = (v00 > psi ? 1 : 0) | (v10 > psi ? 2 : 0) | (v11 > psi ? 4 : 0) |
                       (v01 > psi ? 8 : 0);
      if (code == 0 || code == 15) continue;
      const double x0 = xa.coord(i), x1 = xa.coord(i + 1);

      auto lerp = [&](double a, double b) { return (psi - a) / (b - a); };
      // Crossing points on the four cell edges with their lattice identities.
      const auto pB = std::array<double, 2>{x0 + (x1 - x0) * lerp(v00, v10), y0};
      const auto pT = std::array<double, 2>{x0 + (x1 - x0) * lerp(v01, v11), y1};
      const auto pL = std::array<double, 2>{x0, y0 + (y1 - y0) * lerp(v00, v01)};
      const auto pR = std::array<double, 2>{x1, y0 + (y1 - y0) * lerp(v10, v11)};
      const int64_t kB = edge_key(i, j, 0, cx);
      const int64_t kT = edge_key(i, j + 1, 0, cx);
      const int64_t kL = edge_key(i, j, 1, cx);
      const int64_t kR = edge_key(i + 1, j, 1, cx);

      auto emit = [&](int64_t ka, const std::array<double, 2>& a, int64_t kb,
                      const std::array<double, 2>& b) {
        segments.push_back({ka, kb, a, b});
      };

      // Solid stays on the left of the travel direction.
      switch (code) {
        case 1: emit(kB, pB, kL, pL); break;
        case 2: emit(kR, pR, kB, pB); break;
        case 4: emit(kT, pT, kR, pR); break;
        case 8: emit(kL, pL, kT, pT); break;
        case 3: emit(kR, pR, kL, pL); break;
        case 6: emit(kT, pT, kB, pB); break;
        case 12: emit(kL, pL, kR, pR); break;
        case 9: emit(kB, pB, kT, pT); break;
        case 7: emit(kT, pT, kL, pL); break;
        case 11: emit(kR, pR, kT, pT); break;
        case 13: emit(kB, pB, kR, pR); break;
        case 14: emit(kL, pL, kB, pB); break;
        case 5: {  // v00 & v11 solid
          const double center = 0.25 * (v00 + v10 + v01 + v11);
          if (center > psi) {
            emit(kT, pT, kL, pL);
            emit(kB, pB, kR, pR);
          } else {
            emit(kB, pB, kL, pL);
            emit(kT, pT, kR, pR);
          }
          break;
        }
        case 10: {  // v10 & v01 solid
          const double center = 0.25 * (v00 + v10 + v01 + v11);
          if (center > psi) {
            emit(kL, pL, kB, pB);
            emit(kR, pR, kT, pT);
          } else {
            emit(kR, pR, kB, pB);
            emit(kL, pL, kT, pT);
          }
          break;
        }
        default: break;
      }
    }
    lower.swap(upper);
  }

  // Stitch segments into polylines: every crossing edge has at most one
  // outgoing and one incoming segment.
  std::unordered_map<int64_t, int> by_from;
  by_from.reserve(segments.size() * 2);
  std::unordered_map<int64_t, bool> has_incoming;
  has_incoming.reserve(segments.size() * 2);
  for (size_t s = 0; s < segments.size(); ++s) {
    by_from[segments[s].from_key] = static_cast<int>(s);
    has_incoming[segments[s].to_key] = true;
  }

  std::vector<bool> used(segments.size(), false);
  std::vector<Polyline> polylines;

  auto walk = [&](int start, bool closed_expected) {
    Polyline line;
    int s = start;
    line.points.push_back(segments[s].from);
    while (true) {
      used[s] = true;
      line.points.push_back(segments[s].to);
      auto it = by_from.find(segments[s].to_key);
      if (it == by_from.end() || used[it->second]) break;
      s = it->second;
    }
    if (closed_expected && segments[s].to_key == segments[start].from_key) {
      line.closed = true;
      line.points.pop_back();  // identical to the first vertex
    }
    polylines.push_back(std::move(line));
  };

  // Open chains start on edges with no incoming segment (domain border).
  for (size_t s = 0; s < segments.size(); ++s)
    if (!used[s] && !has_incoming.count(segments[s].from_key)) walk(static_cast<int>(s), false);
  // Remaining segments belong to closed loops.
  for (size_t s = 0; s < segments.size(); ++s)
    if (!used[s]) walk(static_cast<int>(s), true);

  return polylines;
}

}  // namespace semdot
