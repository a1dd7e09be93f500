#include <doctest.h>

#include <cmath>

#include "semdot/optimizer.hpp"
#include "semdot/problems.hpp"
#include "semdot/runner.hpp"
#include "semdot/sensitivity.hpp"
#include "support/oracles.hpp"

using namespace semdot;

TEST_CASE("mma leaves a stationary feasible iterate unchanged") {
  const int n = 12;
  Field x(n, 0.25);
  const Field dc(n, 0.0);
  const Field dv(n, 1.0 / n);
  MmaState state;
  const Field xn = mma_update(x, dc, dv, 0.3, state);
  for (int j = 0; j < n; ++j) CHECK(std::abs(xn[j] - x[j]) <= 1e-9);
}

TEST_CASE("mma drives a uniform linear objective to the volume bound") {
  const int n = 16;
  Field x(n, 0.5);
  const Field dv(n, 1.0 / n);
  MmaState state;
  for (int it = 0; it < 60; ++it) {
    const Field dc(n, -1.0);  // minimize -sum x: push everything up
    x = mma_update(x, dc, dv, 0.3, state);
  }
  for (int j = 0; j < n; ++j) CHECK(x[j] == doctest::Approx(0.3).epsilon(1e-6));
}

TEST_CASE("mma iterates converge to the analytic KKT point") {
  // minimize (x1 - 0.9)^2 + (x2 - 0.8)^2 subject to (x1 + x2)/2 <= 0.4,
  // bounds [0.001, 1]. The constraint is active; with equal curvature the
  // KKT point splits the violation evenly: x* = (0.45, 0.35).
  Field x = {0.2, 0.2};
  const Field dv = {0.5, 0.5};
  MmaState state;
  for (int it = 0; it < 200; ++it) {
    const Field dc = {2.0 * (x[0] - 0.9), 2.0 * (x[1] - 0.8)};
    x = mma_update(x, dc, dv, 0.4, state);
  }
  CHECK(x[0] == doctest::Approx(0.45).epsilon(1e-6));
  CHECK(x[1] == doctest::Approx(0.35).epsilon(1e-6));
}

TEST_CASE("mma respects bounds and move limits") {
  const int n = 8;
  Field x(n, 0.5);
  const Field dv(n, 1.0 / n);
  MmaState state;
  const Field dc(n, -100.0);
  const Field xn = mma_update(x, dc, dv, 0.9, state);
  for (int j = 0; j < n; ++j) {
    CHECK(xn[j] >= state.xmin);
    CHECK(xn[j] <= state.xmax);
    CHECK(std::abs(xn[j] - x[j]) <= state.move * (state.xmax - state.xmin) + 1e-12);
  }
  // The subproblem keeps its own constraint feasible.
  double vol = 0.0;
  for (int j = 0; j < n; ++j) vol += dv[j] * xn[j];
  CHECK(vol <= 0.9 + 1e-9);
}

TEST_CASE("oc reproduces the uniform solution under symmetric inputs") {
  const int n = 25;
  const Field x(n, 0.5);
  const Field dc(n, -2.0);
  const Field dv(n, 1.0 / n);
  const Field xn = oc_update(x, dc, dv, 0.3);
  for (int j = 0; j < n; ++j) CHECK(xn[j] == doctest::Approx(0.3).epsilon(1e-6));
}

TEST_CASE("oc clamps every element to the move limit") {
  const int n = 10;
  const Field x(n, 0.5);
  Field dc(n);
  for (int j = 0; j < n; ++j) dc[j] = -(j + 1.0);
  const Field dv(n, 1.0 / n);
  const Field xn = oc_update(x, dc, dv, 0.5, 0.2);
  for (int j = 0; j < n; ++j) CHECK(std::abs(xn[j] - x[j]) <= 0.2 + 1e-12);
  double vol = 0.0;
  for (int j = 0; j < n; ++j) vol += dv[j] * xn[j];
  CHECK(vol == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("oc rejects positive objective gradients") {
  CHECK_THROWS_AS(oc_update({0.5}, {1.0}, {1.0}, 0.3), Error);
}

TEST_CASE("one oc step on a small compliance problem decreases the objective") {
  ProblemDefinition p = preset_problem("cantilever", 3, 3);
  const Mesh mesh = p.mesh();
  const MaterialModel m{1.0, 0.3, 1.5, 1e-3};
  Field x(9, 0.5);
  const FeaResult before =
      solve_equilibrium(assemble_stiffness(mesh, m, x, p.loads), p.loads, false);
  const SensitivityField s = compliance_sensitivity(x, before, m, mesh);
  const Field xn = oc_update(x, s.dC_dX, s.dV_dX, 0.5);
  const FeaResult after =
      solve_equilibrium(assemble_stiffness(mesh, m, xn, p.loads), p.loads, false);
  CHECK(after.objective < before.objective);
}

TEST_CASE("convergence measure and decision") {
  ConvergenceSpec spec;
  const Field a = {0.2, 0.4, 0.4};
  SUBCASE("identical fields converge once past min_iter") {
    CHECK(check_convergence(spec, ProjectionMode::step, 11, a, a, 0.0).converged);
    CHECK(!check_convergence(spec, ProjectionMode::step, 5, a, a, 0.0).converged);
    CHECK(check_convergence(spec, ProjectionMode::step, 11, a, a, 0.0).alteration == 0.0);
  }
  SUBCASE("alteration is the normalized l1 change") {
    const Field b = {0.3, 0.4, 0.3};
    const auto d = check_convergence(spec, ProjectionMode::step, 11, a, b, 0.0);
    CHECK(d.alteration == doctest::Approx(0.2 / 1.0).epsilon(1e-12));
    CHECK(!d.converged);
  }
  SUBCASE("smooth mode also requires the boundary error bound") {
    CHECK(!check_convergence(spec, ProjectionMode::smooth, 11, a, a, 0.01).converged);
    CHECK(check_convergence(spec, ProjectionMode::smooth, 11, a, a, 0.0005).converged);
  }
}
