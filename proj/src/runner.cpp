#include "semdot/runner.hpp"

#include <chrono>
#include <cmath>

#include "semdot/filter.hpp"
#include "semdot/sensitivity.hpp"

namespace semdot {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

// Mirror-average a per-element field about the vertical center line.
void mirror_average(const Mesh& mesh, Field& f) {
  for (int ey = 0; ey < mesh.ny; ++ey)
    for (int ex = 0; ex < mesh.nx / 2; ++ex) {
      const int e = mesh.element_id(ex, ey);
      const int m = mesh.element_id(mesh.nx - 1 - ex, ey);
      const double avg = 0.5 * (f[e] + f[m]);
      f[e] = avg;
      f[m] = avg;
    }
}

struct Accounting {
  std::vector<uint8_t> excluded;  // hard cut-out elements, pinned at rho_min
  Field dV;                       // per-element volume gradient
  int active = 0;
};

Accounting make_accounting(const Mesh& mesh, const PassiveMask& passive) {
  Accounting acc;
  const int ne = mesh.element_count();
  acc.excluded.assign(ne, 0);
  acc.active = ne;
  if (!passive.counted.empty()) {
    acc.active = passive.counted_elements;
    for (int e = 0; e < ne; ++e) acc.excluded[e] = passive.counted[e] ? 0 : 1;
  }
  acc.dV.assign(ne, 0.0);
  for (int e = 0; e < ne; ++e)
    if (!acc.excluded[e]) acc.dV[e] = 1.0 / acc.active;
  return acc;
}

void pin_excluded(const Accounting& acc, double rho_min, Field& x) {
  for (size_t e = 0; e < x.size(); ++e)
    if (acc.excluded[e]) x[e] = rho_min;
}

}  // namespace

RunResult run_semdot(const ProblemDefinition& problem, const RunParams& params) {
  problem.validate();
  const Mesh mesh = problem.mesh();
  const MaterialModel material = params.material();
  material.validate();
  if (problem.vstar <= params.rho_min)
    throw ConfigError("problem: vstar must exceed rho_min");

  const FilterSpec fspec{params.rmin, params.upsilon};
  const FilterOperator filter = build_filter(mesh, fspec);
  const GridSpec grid = GridSpec::make(params.grid_n);
  const PassiveMask passive = build_passive_mask(problem, mesh, grid);
  const Accounting acc = make_accounting(mesh, passive);
  const ConvergenceSpec conv{params.tau, params.epsilon, params.max_iter, params.min_iter};
  conv.validate();

  const bool mechanism = problem.problem_class == ProblemClass::mechanism;
  FeaWorkspace fea(mesh, material, problem.loads, StiffnessLaw::blend, params.solve);

  const int ne = mesh.element_count();
  Field x(ne, problem.vstar);
  pin_excluded(acc, params.rho_min, x);
  Field x_new = x;
  Field x_tilde = x;

  ProjectionState state;
  state.beta = params.beta0;
  state.lambda = params.lambda;
  state.mode = params.mode;

  MmaState mma;
  mma.xmin = params.rho_min;
  mma.xmax = 1.0;
  mma.move = params.move;

  RunResult result;
  std::vector<double> rho_n;
  Field delta(ne, 0.0);
  double psi = 0.5;
  Field x_prev_raw = x;

  for (int iter = 1; iter <= params.max_iter; ++iter) {
    const auto t0 = Clock::now();

    const FeaResult sol = fea.analyze(x_new);
    SensitivityField sens = mechanism ? mechanism_sensitivity(x_new, sol, material, mesh)
                                      : compliance_sensitivity(x_new, sol, material, mesh);

    Field dc = filter.backproject(sens.dC_dX);
    if (params.symmetry && problem.has_symmetry_axis) mirror_average(mesh, dc);

    x_prev_raw = x;
    if (params.optimizer == OptimizerChoice::oc) {
      x = oc_update(x, dc, acc.dV, problem.vstar, std::min(params.move, 0.2), params.rho_min, 1.0);
    } else {
      x = mma_update(x, dc, acc.dV, problem.vstar, mma);
    }
    if (params.symmetry && problem.has_symmetry_axis) mirror_average(mesh, x);
    pin_excluded(acc, params.rho_min, x);

    x_tilde = filter.apply(x);
    rho_n = filter.nodal_densities(x_tilde);

    state = update_beta(state);
    ProjectionResult proj =
        project_design(mesh, grid, rho_n, problem.vstar, state, passive, params.rho_min);
    psi = proj.psi;
    state.psi = proj.psi;

    x_new = std::move(proj.x_new);
    for (int e = 0; e < ne; ++e) delta[e] = x_new[e] - x_tilde[e];

    // The alteration measure binds on the design variables the optimizer
    // moves; the projected field cannot settle under a sharp projection.
    const ConvergenceDecision decision =
        check_convergence(conv, params.mode, iter, x, x_prev_raw, proj.boundary_error);

    IterationRecord rec;
    rec.iter = iter;
    rec.objective = sol.objective;
    rec.volume = proj.volume;
    rec.alteration = decision.alteration;
    rec.boundary_error = proj.boundary_error;
    rec.beta = state.beta;
    rec.psi = proj.psi;
    rec.wall_ms = ms_since(t0);
    result.history.records.push_back(rec);
    if (params.on_iteration) params.on_iteration(rec);

    if (decision.converged) {
      result.history.converged = true;
      break;
    }
  }

  result.x_raw = std::move(x);
  result.x_tilde = std::move(x_tilde);
  result.x_new = std::move(x_new);
  result.delta = std::move(delta);
  result.rho_nodal = std::move(rho_n);
  result.psi = psi;
  result.beta = state.beta;
  result.iterations = result.history.iterations();
  result.objective = result.history.records.empty() ? 0.0
                                                    : result.history.records.back().objective;
  result.boundary = extract_boundary(mesh, grid, result.rho_nodal, psi);
  return result;
}

RunResult run_simp_baseline(const ProblemDefinition& problem, const RunParams& params) {
  problem.validate();
  if (problem.problem_class != ProblemClass::compliance)
    throw ConfigError("the SIMP baseline supports compliance problems only");
  const Mesh mesh = problem.mesh();
  MaterialModel material = params.material();
  material.validate();

  const FilterSpec fspec{params.rmin, 1.0};
  const FilterOperator filter = build_filter(mesh, fspec);
  const GridSpec grid = GridSpec::make(params.grid_n);
  const PassiveMask passive = build_passive_mask(problem, mesh, grid);
  const Accounting acc = make_accounting(mesh, passive);
  const ConvergenceSpec conv{params.tau, params.epsilon, params.max_iter, params.min_iter};

  // Counted passive elements (prescribed holes) are forced void on the
  // physical densities each iteration.
  std::vector<uint8_t> forced(mesh.element_count(), 0);
  if (!passive.full.empty())
    for (int e = 0; e < mesh.element_count(); ++e)
      if (passive.full[e] || acc.excluded[e]) forced[e] = 1;

  FeaWorkspace fea(mesh, material, problem.loads, StiffnessLaw::power, params.solve);

  const int ne = mesh.element_count();
  Field x(ne, problem.vstar);
  pin_excluded(acc, params.rho_min, x);
  auto physical = [&](const Field& raw) {
    Field xp = filter.apply(raw);
    for (int e = 0; e < ne; ++e)
      if (forced[e]) xp[e] = params.rho_min;
    return xp;
  };
  Field x_phys = physical(x);

  RunResult result;
  for (int iter = 1; iter <= params.max_iter; ++iter) {
    const auto t0 = Clock::now();

    const FeaResult sol = fea.analyze(x_phys);

    // Classic power-law sensitivity on the physical densities.
    const ElementMatrix ke = element_stiffness_q4(material);
    Field dc_phys(ne);
    for (int e = 0; e < ne; ++e) {
      const auto dofs = mesh.element_dofs(e);
      Eigen::Matrix<double, 8, 1> ue;
      for (int i = 0; i < 8; ++i) ue[i] = sol.u[dofs[i]];
      const double form = ue.dot(ke * ue);
      dc_phys[e] = -material.p * std::pow(x_phys[e], material.p - 1.0) * form;
    }
    Field dc = filter.backproject(dc_phys);
    Field dv = filter.backproject(acc.dV);

    // OC with the volume constraint measured on the physical densities.
    double l1 = 1e-12, l2 = 1e12;
    Field x_cand;
    Field xp_cand;
    const double move = 0.2;
    while ((l2 - l1) / (l1 + l2) > 1e-9) {
      const double lm = 0.5 * (l1 + l2);
      x_cand.resize(ne);
      for (int e = 0; e < ne; ++e) {
        if (acc.dV[e] <= 0.0) {
          x_cand[e] = x[e];
          continue;
        }
        const double be = std::sqrt(std::max(0.0, -dc[e]) / (lm * std::max(dv[e], 1e-30)));
        double xj = std::clamp(x[e] * be, x[e] - move, x[e] + move);
        x_cand[e] = std::clamp(xj, params.rho_min, 1.0);
      }
      pin_excluded(acc, params.rho_min, x_cand);
      xp_cand = physical(x_cand);
      double vol = 0.0;
      for (int e = 0; e < ne; ++e) vol += acc.dV[e] * xp_cand[e];
      if (vol > problem.vstar)
        l1 = lm;
      else
        l2 = lm;
    }
    x = std::move(x_cand);
    const Field x_phys_prev = std::move(x_phys);
    x_phys = std::move(xp_cand);

    const ConvergenceDecision decision =
        check_convergence(conv, ProjectionMode::step, iter, x_phys, x_phys_prev, 0.0);

    double volume = 0.0;
    for (int e = 0; e < ne; ++e) volume += acc.dV[e] * x_phys[e];

    IterationRecord rec;
    rec.iter = iter;
    rec.objective = sol.objective;
    rec.volume = volume;
    rec.alteration = decision.alteration;
    rec.wall_ms = ms_since(t0);
    result.history.records.push_back(rec);
    if (params.on_iteration) params.on_iteration(rec);

    if (decision.converged) {
      result.history.converged = true;
      break;
    }
  }

  result.x_raw = std::move(x);
  result.x_tilde = x_phys;
  result.x_new = std::move(x_phys);
  result.delta.assign(ne, 0.0);
  result.iterations = result.history.iterations();
  result.objective = result.history.records.empty() ? 0.0
                                                    : result.history.records.back().objective;
  return result;
}

}  // namespace semdot
