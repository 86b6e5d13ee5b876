#pragma once

#include "qmlp/structure.hpp"

namespace qmlp {

/// Root-mean-square error of per-atom energies over aligned datasets
/// (Hartree/atom). Both datasets must have equal length, matching atom
/// counts, and energy labels.
double rmse_energy(const Dataset& pred, const Dataset& ref);

/// Force RMSE (Hartree/Bohr): sqrt of the structure-average of the per-atom
/// component mean squared error, i.e. each structure's inner sum carries a
/// 1/(3 N_atoms) factor.
double rmse_forces(const Dataset& pred, const Dataset& ref);

}  // namespace qmlp
