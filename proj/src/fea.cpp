#include "semdot/fea.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>
#ifdef SEMDOT_WITH_CHOLMOD
#include <Eigen/CholmodSupport>
#endif

#include <algorithm>
#include <cmath>
#include <sstream>

namespace semdot {

namespace {

// Analytic closed-form integration of the unit-modulus plane-stress Q4
// element on a unit square, nodes CCW from bottom-left. Eight distinct
// coefficients arranged in the classic symmetric pattern.
ElementMatrix unit_q4(double nu) {
  const double k[8] = {
      0.5 - nu / 6.0,         0.125 + nu / 8.0,  -0.25 - nu / 12.0,
      -0.125 + 3.0 * nu / 8.0, -0.25 + nu / 12.0, -0.125 - nu / 8.0,
      nu / 6.0,               0.125 - 3.0 * nu / 8.0};
  static constexpr int pattern[8][8] = {
      {0, 1, 2, 3, 4, 5, 6, 7}, {1, 0, 7, 6, 5, 4, 3, 2},
      {2, 7, 0, 5, 6, 3, 4, 1}, {3, 6, 5, 0, 7, 2, 1, 4},
      {4, 5, 6, 7, 0, 1, 2, 3}, {5, 4, 3, 2, 1, 0, 7, 6},
      {6, 3, 4, 1, 2, 7, 0, 5}, {7, 2, 1, 4, 3, 6, 5, 0}};
  ElementMatrix ke;
  const double scale = 1.0 / (1.0 - nu * nu);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) ke(i, j) = scale * k[pattern[i][j]];
  return ke;
}

struct Pattern {
  std::vector<int> full_to_free;
  std::vector<int> free_to_full;
  SparseMatrix skeleton;                 // lower triangle, zero values
  std::vector<int> element_slots;        // 64 per element, -1 = skipped entry
  std::vector<std::pair<int, double>> spring_slots;  // value index, stiffness
  Eigen::VectorXd f;                     // reduced force
  Eigen::VectorXd dummy;                 // reduced -L (mechanism), else empty
};

int find_slot(const SparseMatrix& m, int row, int col) {
  for (int idx = m.outerIndexPtr()[col]; idx < m.outerIndexPtr()[col + 1]; ++idx)
    if (m.innerIndexPtr()[idx] == row) return idx;
  return -1;
}

Pattern build_pattern(const Mesh& mesh, const LoadCase& loads) {
  loads.validate(mesh);
  if (loads.fixed_dofs.empty() && loads.springs.empty())
    throw SolverError("singular system: no fixed DOFs and no springs pin the rigid modes");

  Pattern pat;
  const int ndof = mesh.dof_count();
  pat.full_to_free.assign(ndof, -1);
  std::vector<bool> fixed(ndof, false);
  for (int dof : loads.fixed_dofs) fixed[dof] = true;
  for (int dof = 0; dof < ndof; ++dof) {
    if (!fixed[dof]) {
      pat.full_to_free[dof] = static_cast<int>(pat.free_to_full.size());
      pat.free_to_full.push_back(dof);
    }
  }
  const int nfree = static_cast<int>(pat.free_to_full.size());

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<size_t>(mesh.element_count()) * 36 + loads.springs.size());
  const int ne = mesh.element_count();
  for (int e = 0; e < ne; ++e) {
    const auto dofs = mesh.element_dofs(e);
    for (int a = 0; a < 8; ++a) {
      const int fi = pat.full_to_free[dofs[a]];
      if (fi < 0) continue;
      for (int b = 0; b < 8; ++b) {
        const int fj = pat.full_to_free[dofs[b]];
        if (fj < 0 || fi < fj) continue;
        trips.emplace_back(fi, fj, 0.0);
      }
    }
  }
  for (const auto& s : loads.springs) {
    const int fd = pat.full_to_free[s.dof];
    if (fd >= 0) trips.emplace_back(fd, fd, 0.0);
  }
  pat.skeleton.resize(nfree, nfree);
  pat.skeleton.setFromTriplets(trips.begin(), trips.end());
  pat.skeleton.makeCompressed();

  pat.element_slots.assign(static_cast<size_t>(ne) * 64, -1);
  for (int e = 0; e < ne; ++e) {
    const auto dofs = mesh.element_dofs(e);
    for (int a = 0; a < 8; ++a) {
      const int fi = pat.full_to_free[dofs[a]];
      if (fi < 0) continue;
      for (int b = 0; b < 8; ++b) {
        const int fj = pat.full_to_free[dofs[b]];
        if (fj < 0 || fi < fj) continue;
        pat.element_slots[static_cast<size_t>(e) * 64 + a * 8 + b] =
            find_slot(pat.skeleton, fi, fj);
      }
    }
  }
  for (const auto& s : loads.springs) {
    const int fd = pat.full_to_free[s.dof];
    if (fd >= 0) pat.spring_slots.emplace_back(find_slot(pat.skeleton, fd, fd), s.stiffness);
  }

  pat.f = Eigen::VectorXd::Zero(nfree);
  for (const auto& [dof, value] : loads.forces) {
    const int fd = pat.full_to_free[dof];
    if (fd >= 0) pat.f[fd] += value;
  }
  if (loads.is_mechanism()) {
    pat.dummy = Eigen::VectorXd::Zero(nfree);
    const int fd = pat.full_to_free[loads.output_dof];
    if (fd < 0) throw ConfigError("load case: output DOF is fixed");
    pat.dummy[fd] = -loads.output_sign;
  }
  return pat;
}

void fill_values(const Pattern& pat, const Mesh& mesh, const MaterialModel& material,
                 const ElementMatrix& ke, const Field& xnew, StiffnessLaw law,
                 SparseMatrix& K) {
  if (static_cast<int>(xnew.size()) != mesh.element_count())
    throw Error("design field size does not match the mesh");
  double* values = K.valuePtr();
  std::fill(values, values + K.nonZeros(), 0.0);
  const int ne = mesh.element_count();
  for (int e = 0; e < ne; ++e) {
    const double x = xnew[static_cast<size_t>(e)];
    if (x < material.rho_min - 1e-9 || x > 1.0 + 1e-9)
      throw Error("design value out of [rho_min, 1]");
    const double factor = stiffness_factor(law, material, std::clamp(x, material.rho_min, 1.0));
    const int* slots = pat.element_slots.data() + static_cast<size_t>(e) * 64;
    for (int a = 0; a < 8; ++a)
      for (int b = 0; b < 8; ++b) {
        const int slot = slots[a * 8 + b];
        if (slot >= 0) values[slot] += factor * ke(a, b);
      }
  }
  for (const auto& [slot, stiffness] : pat.spring_slots) values[slot] += stiffness;
}

double relative_residual(const SparseMatrix& K, const Eigen::VectorXd& x,
                         const Eigen::VectorXd& b) {
  const double bnorm = b.norm();
  if (bnorm == 0.0) return 0.0;
  return (K.selfadjointView<Eigen::Lower>() * x - b).norm() / bnorm;
}

Eigen::VectorXd scatter_full(const Pattern& pat, int ndof, const Eigen::VectorXd& reduced) {
  Eigen::VectorXd full = Eigen::VectorXd::Zero(ndof);
  for (size_t i = 0; i < pat.free_to_full.size(); ++i)
    full[pat.free_to_full[i]] = reduced[static_cast<Eigen::Index>(i)];
  return full;
}

double objective_from(const LoadCase& loads, bool mechanism, const Eigen::VectorXd& u_full) {
  if (mechanism) {
    return -loads.output_sign * u_full[loads.output_dof];
  }
  double c = 0.0;
  for (const auto& [dof, value] : loads.forces) c += value * u_full[dof];
  return c;
}

#ifdef SEMDOT_WITH_CHOLMOD
using DirectSolver = Eigen::CholmodSupernodalLLT<SparseMatrix, Eigen::Lower>;
#else
using DirectSolver = Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower>;
#endif

Eigen::VectorXd cg_solve(const SparseMatrix& K, const Eigen::VectorXd& b,
                         const SolveOptions& options) {
  Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower,
                           Eigen::IncompleteCholesky<double, Eigen::Lower>>
      cg;
  cg.setTolerance(options.tolerance * 0.1);
  cg.setMaxIterations(static_cast<Eigen::Index>(options.max_iter_per_dof) * K.rows());
  cg.compute(K);
  Eigen::VectorXd x = cg.solve(b);
  if (cg.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "iterative solver did not converge: " << cg.iterations()
        << " iterations, residual " << cg.error();
    throw SolverError(msg.str());
  }
  return x;
}

void check_residual(const SparseMatrix& K, const Eigen::VectorXd& x,
                    const Eigen::VectorXd& b, double tol) {
  const double res = relative_residual(K, x, b);
  if (!std::isfinite(res) || res > tol) {
    std::ostringstream msg;
    msg << "equilibrium solve failed: relative residual " << res << " exceeds " << tol;
    throw SolverError(msg.str());
  }
}

}  // namespace

ElementMatrix element_stiffness_q4(const MaterialModel& material) {
  material.validate();
  return material.E1 * unit_q4(material.nu);
}

double stiffness_factor(StiffnessLaw law, const MaterialModel& m, double x) {
  switch (law) {
    case StiffnessLaw::blend:
      return (1.0 - x) * std::pow(m.rho_min, m.p) + x;
    case StiffnessLaw::power:
      return std::pow(x, m.p);
  }
  return x;
}

AssembledSystem assemble_stiffness(const Mesh& mesh, const MaterialModel& material,
                                   const Field& xnew, const LoadCase& loads,
                                   StiffnessLaw law) {
  material.validate();
  Pattern pat = build_pattern(mesh, loads);
  const ElementMatrix ke = element_stiffness_q4(material);
  AssembledSystem sys;
  sys.K = pat.skeleton;
  fill_values(pat, mesh, material, ke, xnew, law, sys.K);
  sys.full_to_free = std::move(pat.full_to_free);
  sys.free_to_full = std::move(pat.free_to_full);
  sys.f = std::move(pat.f);
  sys.dummy = std::move(pat.dummy);
  return sys;
}

FeaResult solve_equilibrium(const AssembledSystem& system, const LoadCase& loads,
                            bool mechanism, const SolveOptions& options) {
  if (mechanism && system.dummy.size() == 0)
    throw Error("mechanism solve requested but the system has no dummy load");

  Eigen::VectorXd u_red, ut_red;
  if (options.method == SolveOptions::Method::direct) {
    DirectSolver solver;
    solver.compute(system.K);
    if (solver.info() != Eigen::Success)
      throw SolverError("sparse factorization failed: system is singular or indefinite");
    u_red = solver.solve(system.f);
    if (mechanism) ut_red = solver.solve(system.dummy);
  } else {
    u_red = cg_solve(system.K, system.f, options);
    if (mechanism) ut_red = cg_solve(system.K, system.dummy, options);
  }
  check_residual(system.K, u_red, system.f, options.tolerance);
  if (mechanism) check_residual(system.K, ut_red, system.dummy, options.tolerance);

  const int ndof = static_cast<int>(system.full_to_free.size());
  Pattern pat;  // only the mapping is needed for the scatter
  pat.free_to_full = system.free_to_full;
  FeaResult result;
  result.u = scatter_full(pat, ndof, u_red);
  if (mechanism) result.u_tilde = scatter_full(pat, ndof, ut_red);
  result.objective = objective_from(loads, mechanism, result.u);
  return result;
}

struct FeaWorkspace::Impl {
  Mesh mesh;
  MaterialModel material;
  LoadCase loads;
  StiffnessLaw law;
  SolveOptions options;
  Pattern pattern;
  ElementMatrix ke;
  SparseMatrix K;
  DirectSolver direct;
  bool analyzed = false;
};

FeaWorkspace::FeaWorkspace(const Mesh& mesh, const MaterialModel& material,
                           const LoadCase& loads, StiffnessLaw law, SolveOptions options)
    : impl_(std::make_unique<Impl>()) {
  material.validate();
  impl_->mesh = mesh;
  impl_->material = material;
  impl_->loads = loads;
  impl_->law = law;
  impl_->options = options;
  impl_->pattern = build_pattern(mesh, loads);
  impl_->ke = element_stiffness_q4(material);
  impl_->K = impl_->pattern.skeleton;
}

FeaWorkspace::~FeaWorkspace() = default;

const ElementMatrix& FeaWorkspace::unit_stiffness() const { return impl_->ke; }
const Mesh& FeaWorkspace::mesh() const { return impl_->mesh; }

FeaResult FeaWorkspace::analyze(const Field& xnew) {
  Impl& w = *impl_;
  fill_values(w.pattern, w.mesh, w.material, w.ke, xnew, w.law, w.K);
  const bool mechanism = w.loads.is_mechanism();

  Eigen::VectorXd u_red, ut_red;
  if (w.options.method == SolveOptions::Method::direct) {
    if (!w.analyzed) {
      w.direct.analyzePattern(w.K);
      w.analyzed = true;
    }
    w.direct.factorize(w.K);
    if (w.direct.info() != Eigen::Success)
      throw SolverError("sparse factorization failed: system is singular or indefinite");
    u_red = w.direct.solve(w.pattern.f);
    if (mechanism) ut_red = w.direct.solve(w.pattern.dummy);
  } else {
    u_red = cg_solve(w.K, w.pattern.f, w.options);
    if (mechanism) ut_red = cg_solve(w.K, w.pattern.dummy, w.options);
  }
  check_residual(w.K, u_red, w.pattern.f, w.options.tolerance);
  if (mechanism) check_residual(w.K, ut_red, w.pattern.dummy, w.options.tolerance);

  FeaResult result;
  result.u = scatter_full(w.pattern, w.mesh.dof_count(), u_red);
  if (mechanism) result.u_tilde = scatter_full(w.pattern, w.mesh.dof_count(), ut_red);
  result.objective = objective_from(w.loads, mechanism, result.u);
  return result;
}

}  // namespace semdot
