#pragma once

#include "semdot/core.hpp"
#include "semdot/fea.hpp"
#include "semdot/mesh.hpp"

namespace semdot {

struct SensitivityField {
  Field dC_dX;  ///< objective gradient per element
  Field dV_dX;  ///< volume-constraint gradient per element (V_e / sum V_e)
};

/// Compliance gradient with respect to elemental volume fractions: the
/// linear blend of the solid/void endpoint derivatives,
/// dC/dX_e = -p [(1-X_e) rho_min^(p-1) + X_e] u_e^T K1 u_e.
SensitivityField compliance_sensitivity(const Field& xnew, const FeaResult& fea,
                                        const MaterialModel& material, const Mesh& mesh);

/// Mechanism gradient, same blend with the dummy-load displacements:
/// dC/dX_e = -p [(1-X_e) rho_min^(p-1) + X_e] ut_e^T K1 u_e, where
/// K ut = -L. Entries may take either sign.
SensitivityField mechanism_sensitivity(const Field& xnew, const FeaResult& fea,
                                       const MaterialModel& material, const Mesh& mesh);

/// Uniform volume gradient 1/M.
SensitivityField volume_sensitivity(const Mesh& mesh);

}  // namespace semdot
