#include "semdot/sensitivity.hpp"

#include <cmath>

namespace semdot {

namespace {

// Quadratic form a_e^T K1 b_e gathered from full displacement vectors.
double element_form(const Mesh& mesh, const ElementMatrix& ke, int e,
                    const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const auto dofs = mesh.element_dofs(e);
  Eigen::Matrix<double, 8, 1> ae, be;
  for (int i = 0; i < 8; ++i) {
    ae[i] = a[dofs[i]];
    be[i] = b[dofs[i]];
  }
  return ae.dot(ke * be);
}

double blend_factor(const MaterialModel& m, double x) {
  return m.p * ((1.0 - x) * std::pow(m.rho_min, m.p - 1.0) + x);
}

}  // namespace

SensitivityField compliance_sensitivity(const Field& xnew, const FeaResult& fea,
                                        const MaterialModel& material, const Mesh& mesh) {
  const int ne = mesh.element_count();
  if (static_cast<int>(xnew.size()) != ne) throw Error("sensitivity: field size mismatch");
  const ElementMatrix ke = element_stiffness_q4(material);
  SensitivityField out;
  out.dC_dX.resize(ne);
  for (int e = 0; e < ne; ++e)
    out.dC_dX[e] = -blend_factor(material, xnew[e]) * element_form(mesh, ke, e, fea.u, fea.u);
  out.dV_dX.assign(ne, 1.0 / ne);
  return out;
}

SensitivityField mechanism_sensitivity(const Field& xnew, const FeaResult& fea,
                                       const MaterialModel& material, const Mesh& mesh) {
  if (fea.u_tilde.size() == 0)
    throw Error("mechanism sensitivity requires the dummy-load solve");
  const int ne = mesh.element_count();
  if (static_cast<int>(xnew.size()) != ne) throw Error("sensitivity: field size mismatch");
  const ElementMatrix ke = element_stiffness_q4(material);
  SensitivityField out;
  out.dC_dX.resize(ne);
  for (int e = 0; e < ne; ++e)
    out.dC_dX[e] =
        -blend_factor(material, xnew[e]) * element_form(mesh, ke, e, fea.u_tilde, fea.u);
  out.dV_dX.assign(ne, 1.0 / ne);
  return out;
}

SensitivityField volume_sensitivity(const Mesh& mesh) {
  SensitivityField out;
  out.dC_dX.assign(mesh.element_count(), 0.0);
  out.dV_dX.assign(mesh.element_count(), 1.0 / mesh.element_count());
  return out;
}

}  // namespace semdot
