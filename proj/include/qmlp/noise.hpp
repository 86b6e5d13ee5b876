#pragma once

#include <cstdint>

#include "qmlp/structure.hpp"

namespace qmlp {

/// Gaussian label-noise parameters. delta_e is a per-atom standard deviation
/// (Hartree/atom); the perturbation applied to a structure's total energy has
/// standard deviation delta_e * N_atoms. delta_f applies per force component
/// (Hartree/Bohr).
struct NoiseInjection {
  double delta_e = 0.0;
  double delta_f = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Adds zero-mean Gaussian noise to the labels. Deterministic under a fixed
/// seed (one derived stream per structure index, so results do not depend on
/// evaluation order). A zero delta leaves the corresponding label bytewise
/// untouched.
Dataset inject_noise(const Dataset& data, const NoiseInjection& spec);

}  // namespace qmlp
