#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <memory>
#include <vector>

#include "semdot/core.hpp"
#include "semdot/mesh.hpp"

namespace semdot {

using ElementMatrix = Eigen::Matrix<double, 8, 8>;
using SparseMatrix = Eigen::SparseMatrix<double>;

/// Plane-stress four-node element stiffness for a unit square element,
/// scaled by the base Young's modulus. Symmetric positive semidefinite with
/// exactly three rigid-body modes.
ElementMatrix element_stiffness_q4(const MaterialModel& material);

/// How elemental stiffness scales with the design value x.
enum class StiffnessLaw {
  blend,  ///< (1 - x) * rho_min^p + x  (volume-fraction interpolation)
  power,  ///< x^p                      (classic SIMP)
};

double stiffness_factor(StiffnessLaw law, const MaterialModel& material, double x);

struct SolveOptions {
  enum class Method { direct, cg };
  Method method = Method::direct;
  double tolerance = 1e-8;       ///< relative residual bound
  int max_iter_per_dof = 10;     ///< iteration cap factor for the CG path
};

/// Equilibrium system reduced to free DOFs. The matrix stores the lower
/// triangle of the symmetric operator.
struct AssembledSystem {
  SparseMatrix K;
  std::vector<int> full_to_free;  ///< -1 for eliminated (fixed) DOFs
  std::vector<int> free_to_full;
  Eigen::VectorXd f;              ///< reduced force vector
  Eigen::VectorXd dummy;          ///< reduced -L for mechanism problems, else empty
};

struct FeaResult {
  Eigen::VectorXd u;        ///< full-length displacements, zero at fixed DOFs
  Eigen::VectorXd u_tilde;  ///< dummy-load displacements (mechanism only)
  double objective = 0.0;   ///< f^T u, or -u_out for mechanism problems
};

AssembledSystem assemble_stiffness(const Mesh& mesh, const MaterialModel& material,
                                   const Field& xnew, const LoadCase& loads,
                                   StiffnessLaw law = StiffnessLaw::blend);

FeaResult solve_equilibrium(const AssembledSystem& system, const LoadCase& loads,
                            bool mechanism, const SolveOptions& options = {});

/// Reusable FEA pipeline for one problem: the sparsity pattern and the
/// symbolic factorization are computed once, only values change per call.
class FeaWorkspace {
 public:
  FeaWorkspace(const Mesh& mesh, const MaterialModel& material, const LoadCase& loads,
               StiffnessLaw law = StiffnessLaw::blend, SolveOptions options = {});
  ~FeaWorkspace();
  FeaWorkspace(const FeaWorkspace&) = delete;
  FeaWorkspace& operator=(const FeaWorkspace&) = delete;

  /// Assembles K(x), factorizes and solves; returns displacements and objective.
  FeaResult analyze(const Field& xnew);

  const ElementMatrix& unit_stiffness() const;
  const Mesh& mesh() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace semdot
