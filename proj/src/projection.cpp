#include "semdot/projection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace semdot {

namespace {

// tanh(t) rounds to exactly +/-1.0 in double beyond this magnitude.
constexpr double kTanhSaturation = 19.5;

struct SmoothParams {
  double psi = 0.5, beta = 1.0, rho_min = 1e-3;
  double a = 0.0, denom = 1.0;
  double sat_lo = 0.0, sat_hi = 0.0;
};

SmoothParams make_smooth(double psi, double beta, double rho_min) {
  SmoothParams p;
  p.psi = psi;
  p.beta = beta;
  p.rho_min = rho_min;
  p.a = std::tanh(beta * psi);
  p.denom = p.a + std::tanh(beta * (1.0 - psi));
  p.sat_hi = psi + kTanhSaturation / beta;
  p.sat_lo = psi - kTanhSaturation / beta;
  return p;
}

inline double smooth_value(const SmoothParams& p, double rho) {
  if (rho >= p.sat_hi) return 1.0;
  if (rho <= p.sat_lo) return p.rho_min;
  const double v = (p.a + std::tanh(p.beta * (rho - p.psi))) / p.denom;
  return std::clamp(v, p.rho_min, 1.0);
}

// Corner values per element (BL, BR, TR, TL) gathered from nodal densities.
struct Corners {
  std::vector<double> c0, c1, c2, c3, cmin, cmax;
};

Corners gather_corners(const Mesh& mesh, const std::vector<double>& rho_n) {
  if (static_cast<int>(rho_n.size()) != mesh.node_count())
    throw Error("projection: nodal field size mismatch");
  const int ne = mesh.element_count();
  Corners c;
  c.c0.resize(ne);
  c.c1.resize(ne);
  c.c2.resize(ne);
  c.c3.resize(ne);
  c.cmin.resize(ne);
  c.cmax.resize(ne);
  for (int e = 0; e < ne; ++e) {
    const auto nodes = mesh.element_nodes(e);
    const double v0 = rho_n[nodes[0]], v1 = rho_n[nodes[1]], v2 = rho_n[nodes[2]],
                 v3 = rho_n[nodes[3]];
    c.c0[e] = v0;
    c.c1[e] = v1;
    c.c2[e] = v2;
    c.c3[e] = v3;
    c.cmin[e] = std::min(std::min(v0, v1), std::min(v2, v3));
    c.cmax[e] = std::max(std::max(v0, v1), std::max(v2, v3));
  }
  return c;
}

// Raw grid values of one element in g-order (gy*n + gx), separable bilinear.
inline void element_grid_values(const std::vector<double>& ax, int n, double c0, double c1,
                                double c2, double c3, double* out) {
  for (int gy = 0; gy < n; ++gy) {
    const double ay = ax[gy];
    const double left = c0 + (c3 - c0) * ay;
    const double right = c1 + (c2 - c1) * ay;
    double* row = out + static_cast<size_t>(gy) * n;
    for (int gx = 0; gx < n; ++gx) row[gx] = left + (right - left) * ax[gx];
  }
}

std::vector<double> axis_fractions(const GridSpec& spec) {
  std::vector<double> ax(spec.local.size());
  for (size_t i = 0; i < ax.size(); ++i) ax[i] = 0.5 * (spec.local[i] + 1.0);
  return ax;
}

}  // namespace

GridSpec GridSpec::make(int n_per_axis) {
  if (n_per_axis < 2) throw ConfigError("grid: n_per_axis must be >= 2");
  GridSpec spec;
  spec.n_per_axis = n_per_axis;
  spec.local.resize(n_per_axis);
  for (int i = 0; i < n_per_axis; ++i)
    spec.local[i] = -1.0 + (2.0 * i + 1.0) / n_per_axis;
  return spec;
}

std::array<double, 4> GridSpec::shape_weights(int g) const {
  const int n = n_per_axis;
  const double zeta = local[g % n];
  const double eta = local[g / n];
  return {0.25 * (1.0 - zeta) * (1.0 - eta), 0.25 * (1.0 + zeta) * (1.0 - eta),
          0.25 * (1.0 + zeta) * (1.0 + eta), 0.25 * (1.0 - zeta) * (1.0 + eta)};
}

ProjectionState update_beta(ProjectionState state) {
  state.beta = std::min(state.beta + state.lambda, state.beta_cap);
  return state;
}

double heaviside_step(double rho, double psi, double rho_min) {
  return rho > psi ? 1.0 : rho_min;
}

double heaviside_smooth(double rho, double psi, double beta, double rho_min) {
  return smooth_value(make_smooth(psi, beta, rho_min), rho);
}

GridField interpolate_grid_densities(const Mesh& mesh, const GridSpec& spec,
                                     const std::vector<double>& rho_n, double rho_min) {
  const Corners corners = gather_corners(mesh, rho_n);
  const auto ax = axis_fractions(spec);
  GridField field;
  field.nx = mesh.nx;
  field.ny = mesh.ny;
  field.n_per_axis = spec.n_per_axis;
  field.rho_min = rho_min;
  const int ne = mesh.element_count();
  const int npts = spec.points_per_element();
  field.rho_eg.resize(static_cast<size_t>(ne) * npts);
  for (int e = 0; e < ne; ++e)
    element_grid_values(ax, spec.n_per_axis, corners.c0[e], corners.c1[e], corners.c2[e],
                        corners.c3[e], field.rho_eg.data() + static_cast<size_t>(e) * npts);
  return field;
}

namespace {

// Shared bisection driver. S(psi) is the projected density sum over counted
// points; it is non-increasing in psi. Terminates when the bracket is below
// 1e-6 or the counted mean matches the target within 1e-6. A target outside
// the reachable range clamps to the nearest endpoint so the loop can recover
// on the next iteration; only degenerate all-void/all-solid fields throw.
template <class SumFn>
double bisect_psi(SumFn&& sum_at, double vstar, double counted_points, double rho_min) {
  const double target = vstar * counted_points;
  const double mean_tol = 1e-6;
  const double s0 = sum_at(0.0);
  if (std::abs(s0 / counted_points - vstar) <= mean_tol) return 0.0;
  if (s0 < target) {
    if (s0 / counted_points <= rho_min + 1e-9) {
      std::ostringstream msg;
      msg << "volume target " << vstar << " unreachable: the field projects void "
          << "even at psi=0 (mean " << s0 / counted_points << ")";
      throw VolumeBracketError(msg.str());
    }
    return 0.0;
  }
  const double s1 = sum_at(1.0);
  if (std::abs(s1 / counted_points - vstar) <= mean_tol) return 1.0;
  if (s1 > target) {
    if (s1 / counted_points >= 1.0 - 1e-9) {
      std::ostringstream msg;
      msg << "volume target " << vstar << " unreachable: the field projects solid "
          << "even at psi=1 (mean " << s1 / counted_points << ")";
      throw VolumeBracketError(msg.str());
    }
    return 1.0;
  }
  double lo = 0.0, hi = 1.0, psi = 0.5;
  for (int it = 0; it < 80 && (hi - lo) >= 1e-6; ++it) {
    psi = 0.5 * (lo + hi);
    const double s = sum_at(psi);
    if (std::abs(s / counted_points - vstar) <= mean_tol) return psi;
    if (s > target)
      lo = psi;
    else
      hi = psi;
  }
  return 0.5 * (lo + hi);
}

inline double project_value(ProjectionMode mode, const SmoothParams& sp, double psi,
                            double rho_min, double rho) {
  return mode == ProjectionMode::smooth ? smooth_value(sp, rho)
                                        : heaviside_step(rho, psi, rho_min);
}

}  // namespace

BisectResult bisect_threshold(const GridField& raw, double vstar, const ProjectionState& state,
                              const PassiveMask& passive) {
  state.validate();
  if (vstar <= raw.rho_min || vstar >= 1.0)
    throw ConfigError("volume target must be in (rho_min, 1)");
  const int ne = raw.element_count();
  const int npts = raw.points_per_element();
  const double rho_min = raw.rho_min;

  long long counted_elems = 0;
  for (int e = 0; e < ne; ++e)
    if (passive.is_counted(e)) ++counted_elems;
  const double counted_points = static_cast<double>(counted_elems) * npts;

  auto sum_at = [&](double psi) {
    const SmoothParams sp = make_smooth(psi, state.beta, rho_min);
    double total = 0.0;
    for (int e = 0; e < ne; ++e) {
      if (!passive.is_counted(e)) continue;
      if (passive.is_full(e)) {
        total += npts * rho_min;
        continue;
      }
      const double* vals = raw.element(e);
      const std::vector<uint8_t>* mask = passive.partial_row(e);
      double acc = 0.0;
      for (int g = 0; g < npts; ++g) {
        const bool masked = mask && (*mask)[g];
        acc += masked ? rho_min : project_value(state.mode, sp, psi, rho_min, vals[g]);
      }
      total += acc;
    }
    return total;
  };

  BisectResult result;
  result.psi = bisect_psi(sum_at, vstar, counted_points, rho_min);

  result.projected = raw;
  const SmoothParams sp = make_smooth(result.psi, state.beta, rho_min);
  double counted_sum = 0.0;
  for (int e = 0; e < ne; ++e) {
    double* vals = result.projected.rho_eg.data() + static_cast<size_t>(e) * npts;
    const std::vector<uint8_t>* mask = passive.partial_row(e);
    const bool full = passive.is_full(e);
    double acc = 0.0;
    for (int g = 0; g < npts; ++g) {
      const bool masked = full || (mask && (*mask)[g]);
      vals[g] = masked ? rho_min : project_value(state.mode, sp, result.psi, rho_min, vals[g]);
      acc += vals[g];
    }
    if (passive.is_counted(e)) counted_sum += acc;
  }
  result.volume = counted_sum / counted_points;
  return result;
}

std::pair<Field, Field> recompose_volume_fractions(const GridField& projected,
                                                   const Field& xtilde) {
  const int ne = projected.element_count();
  if (static_cast<int>(xtilde.size()) != ne)
    throw Error("recompose: filtered field size mismatch");
  const int npts = projected.points_per_element();
  Field xnew(ne), delta(ne);
  for (int e = 0; e < ne; ++e) {
    const double* vals = projected.element(e);
    double acc = 0.0;
    for (int g = 0; g < npts; ++g) acc += vals[g];
    xnew[e] = acc / npts;
    delta[e] = xnew[e] - xtilde[e];
  }
  return {std::move(xnew), std::move(delta)};
}

double boundary_error(const GridField& grid) {
  const int ne = grid.element_count();
  const int npts = grid.points_per_element();
  long long nv = 0;
  for (int e = 0; e < ne; ++e) {
    const double* vals = grid.element(e);
    double lo = vals[0], hi = vals[0];
    for (int g = 1; g < npts; ++g) {
      lo = std::min(lo, vals[g]);
      hi = std::max(hi, vals[g]);
    }
    if (hi < 1.0 && lo > grid.rho_min) ++nv;
  }
  return static_cast<double>(nv) / ne;
}

ProjectionResult project_design(const Mesh& mesh, const GridSpec& spec,
                                const std::vector<double>& rho_n, double vstar,
                                const ProjectionState& state, const PassiveMask& passive,
                                double rho_min) {
  state.validate();
  if (vstar <= rho_min || vstar >= 1.0)
    throw ConfigError("volume target must be in (rho_min, 1)");
  const Corners corners = gather_corners(mesh, rho_n);
  const auto ax = axis_fractions(spec);
  const int n = spec.n_per_axis;
  const int npts = spec.points_per_element();
  const int ne = mesh.element_count();

  long long counted_elems = 0;
  for (int e = 0; e < ne; ++e)
    if (passive.is_counted(e)) ++counted_elems;
  const double counted_points = static_cast<double>(counted_elems) * npts;

  std::vector<double> scratch(static_cast<size_t>(npts));

  auto element_sum = [&](int e, const SmoothParams& sp, double psi) {
    const std::vector<uint8_t>* mask = passive.partial_row(e);
    if (passive.is_full(e)) return npts * rho_min;
    if (!mask) {
      if (state.mode == ProjectionMode::smooth) {
        if (corners.cmin[e] >= sp.sat_hi) return static_cast<double>(npts);
        if (corners.cmax[e] <= sp.sat_lo) return npts * rho_min;
      } else {
        if (corners.cmin[e] > psi) return static_cast<double>(npts);
        if (corners.cmax[e] <= psi) return npts * rho_min;
      }
    }
    element_grid_values(ax, n, corners.c0[e], corners.c1[e], corners.c2[e], corners.c3[e],
                        scratch.data());
    double acc = 0.0;
    for (int g = 0; g < npts; ++g) {
      const bool masked = mask && (*mask)[g];
      acc += masked ? rho_min : project_value(state.mode, sp, psi, rho_min, scratch[g]);
    }
    return acc;
  };

  auto sum_at = [&](double psi) {
    const SmoothParams sp = make_smooth(psi, state.beta, rho_min);
    double total = 0.0;
    for (int e = 0; e < ne; ++e) {
      if (!passive.is_counted(e)) continue;
      total += element_sum(e, sp, psi);
    }
    return total;
  };

  ProjectionResult result;
  result.psi = bisect_psi(sum_at, vstar, counted_points, rho_min);

  // Final pass at the accepted threshold: recomposition and per-element extremes.
  result.x_new.resize(ne);
  result.elem_min.resize(ne);
  result.elem_max.resize(ne);
  const SmoothParams sp = make_smooth(result.psi, state.beta, rho_min);
  double counted_sum = 0.0;
  long long nv = 0;
  for (int e = 0; e < ne; ++e) {
    const std::vector<uint8_t>* mask = passive.partial_row(e);
    double acc, lo, hi;
    bool shortcut = false;
    if (passive.is_full(e)) {
      acc = npts * rho_min;
      lo = hi = rho_min;
      shortcut = true;
    } else if (!mask) {
      if (state.mode == ProjectionMode::smooth ? (corners.cmin[e] >= sp.sat_hi)
                                               : (corners.cmin[e] > result.psi)) {
        acc = static_cast<double>(npts);
        lo = hi = 1.0;
        shortcut = true;
      } else if (state.mode == ProjectionMode::smooth ? (corners.cmax[e] <= sp.sat_lo)
                                                      : (corners.cmax[e] <= result.psi)) {
        acc = npts * rho_min;
        lo = hi = rho_min;
        shortcut = true;
      }
    }
    if (!shortcut) {
      element_grid_values(ax, n, corners.c0[e], corners.c1[e], corners.c2[e], corners.c3[e],
                          scratch.data());
      acc = 0.0;
      lo = std::numeric_limits<double>::infinity();
      hi = -lo;
      for (int g = 0; g < npts; ++g) {
        const bool masked = mask && (*mask)[g];
        const double v =
            masked ? rho_min : project_value(state.mode, sp, result.psi, rho_min, scratch[g]);
        acc += v;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    }
    result.x_new[e] = acc / npts;
    result.elem_min[e] = lo;
    result.elem_max[e] = hi;
    if (passive.is_counted(e)) counted_sum += acc;
    if (hi < 1.0 && lo > rho_min) ++nv;
  }
  result.volume = counted_sum / counted_points;
  result.boundary_error = static_cast<double>(nv) / ne;
  return result;
}

}  // namespace semdot
