#include "semdot/optimizer.hpp"

#include <algorithm>
#include <cmath>

namespace semdot {

namespace {

constexpr double kRaa0 = 1e-5;

void require_finite(const Field& v, const char* what) {
  for (double x : v)
    if (!std::isfinite(x)) throw Error(std::string("optimizer: non-finite ") + what);
}

}  // namespace

Field mma_update(const Field& x, const Field& dC, const Field& dV, double vstar,
                 MmaState& state) {
  const size_t n = x.size();
  if (dC.size() != n || dV.size() != n) throw Error("mma: gradient size mismatch");
  require_finite(dC, "objective gradient");
  require_finite(dV, "constraint gradient");

  if (state.xold1.size() != n) {
    state.xold1 = x;
    state.xold2 = x;
    state.low.assign(n, 0.0);
    state.upp.assign(n, 0.0);
    state.iteration = 0;
  }
  state.iteration += 1;

  const double range = std::max(state.xmax - state.xmin, 1e-5);

  if (state.iteration <= 2) {
    for (size_t j = 0; j < n; ++j) {
      state.low[j] = x[j] - state.asyinit * range;
      state.upp[j] = x[j] + state.asyinit * range;
    }
  } else {
    for (size_t j = 0; j < n; ++j) {
      const double zzz = (x[j] - state.xold1[j]) * (state.xold1[j] - state.xold2[j]);
      const double factor = zzz > 0.0 ? state.asyincr : (zzz < 0.0 ? state.asydecr : 1.0);
      double lo = x[j] - factor * (state.xold1[j] - state.low[j]);
      double up = x[j] + factor * (state.upp[j] - state.xold1[j]);
      lo = std::max(lo, x[j] - 10.0 * range);
      lo = std::min(lo, x[j] - 0.01 * range);
      up = std::min(up, x[j] + 10.0 * range);
      up = std::max(up, x[j] + 0.01 * range);
      state.low[j] = lo;
      state.upp[j] = up;
    }
  }

  std::vector<double> alfa(n), beta(n), p0(n), q0(n), p1(n), q1(n);
  double b = 0.0;
  double fval = -vstar;
  for (size_t j = 0; j < n; ++j) fval += dV[j] * x[j];
  for (size_t j = 0; j < n; ++j) {
    alfa[j] = std::max({state.xmin, state.low[j] + state.albefa * (x[j] - state.low[j]),
                        x[j] - state.move * range});
    beta[j] = std::min({state.xmax, state.upp[j] - state.albefa * (state.upp[j] - x[j]),
                        x[j] + state.move * range});
    if (alfa[j] > beta[j]) throw Error("mma: infeasible subproblem bounds");

    const double ux = state.upp[j] - x[j];
    const double xl = x[j] - state.low[j];
    const double df = dC[j];
    double p = std::max(df, 0.0), q = std::max(-df, 0.0);
    const double pq = 0.001 * (p + q) + kRaa0 / range;
    p0[j] = (p + pq) * ux * ux;
    q0[j] = (q + pq) * xl * xl;

    const double dg = dV[j];
    double pp = std::max(dg, 0.0), qq = std::max(-dg, 0.0);
    const double ppqq = 0.001 * (pp + qq) + kRaa0 / range;
    p1[j] = (pp + ppqq) * ux * ux;
    q1[j] = (qq + ppqq) * xl * xl;
    b += p1[j] / ux + q1[j] / xl;
  }
  b -= fval;

  Field xnew(n);
  auto eval = [&](double lambda, bool store) {
    double g = 0.0;
    for (size_t j = 0; j < n; ++j) {
      const double pj = p0[j] + lambda * p1[j];
      const double qj = q0[j] + lambda * q1[j];
      const double sp = std::sqrt(pj), sq = std::sqrt(qj);
      double xj = (state.low[j] * sp + state.upp[j] * sq) / (sp + sq);
      xj = std::clamp(xj, alfa[j], beta[j]);
      if (store) xnew[j] = xj;
      g += p1[j] / (state.upp[j] - xj) + q1[j] / (xj - state.low[j]);
    }
    return g - b - std::max(0.0, (lambda - state.c) / state.d);
  };

  double lambda = 0.0;
  if (eval(0.0, false) > 0.0) {
    double lo = 0.0, hi = 1.0;
    int guard = 0;
    while (eval(hi, false) > 0.0 && guard++ < 80) {
      lo = hi;
      hi *= 2.0;
    }
    for (int it = 0; it < 120; ++it) {
      lambda = 0.5 * (lo + hi);
      if (eval(lambda, false) > 0.0)
        lo = lambda;
      else
        hi = lambda;
    }
    lambda = 0.5 * (lo + hi);
  }
  eval(lambda, true);

  state.xold2 = state.xold1;
  state.xold1 = x;
  return xnew;
}

Field oc_update(const Field& x, const Field& dC, const Field& dV, double vstar, double move,
                double xmin, double xmax) {
  const size_t n = x.size();
  if (dC.size() != n || dV.size() != n) throw Error("oc: gradient size mismatch");
  for (size_t j = 0; j < n; ++j)
    if (dC[j] > 1e-12) throw Error("oc: objective gradient must be non-positive");

  Field xnew(n);
  auto volume_at = [&](double lm) {
    double vol = 0.0;
    for (size_t j = 0; j < n; ++j) {
      double xj;
      if (dV[j] <= 0.0) {
        xj = x[j];
      } else {
        const double be = std::sqrt(std::max(0.0, -dC[j]) / (lm * dV[j]));
        xj = std::clamp(x[j] * be, x[j] - move, x[j] + move);
        xj = std::clamp(xj, xmin, xmax);
      }
      xnew[j] = xj;
      vol += dV[j] * xj;
    }
    return vol;
  };

  double l1 = 1e-12, l2 = 1e12;
  if (volume_at(l1) < vstar - 1e-6 || volume_at(l2) > vstar + 1e-6)
    throw Error("oc: multiplier bracket failure, volume target unreachable");
  double vol = 0.0;
  while ((l2 - l1) / (l1 + l2) > 1e-12) {
    const double lm = 0.5 * (l1 + l2);
    vol = volume_at(lm);
    if (std::abs(vol - vstar) <= 1e-9) break;
    if (vol > vstar)
      l1 = lm;
    else
      l2 = lm;
  }
  return xnew;
}

ConvergenceDecision check_convergence(const ConvergenceSpec& spec, ProjectionMode mode,
                                      int iteration, const Field& x_now, const Field& x_prev,
                                      double boundary_err) {
  spec.validate();
  if (x_now.size() != x_prev.size()) throw Error("convergence: field size mismatch");
  double num = 0.0, den = 0.0;
  for (size_t j = 0; j < x_now.size(); ++j) {
    num += std::abs(x_now[j] - x_prev[j]);
    den += x_now[j];
  }
  ConvergenceDecision decision;
  decision.alteration = den > 0.0 ? num / den : 0.0;
  decision.converged = iteration > spec.min_iter && decision.alteration <= spec.tau &&
                       (mode == ProjectionMode::step || boundary_err <= spec.epsilon);
  return decision;
}

}  // namespace semdot
