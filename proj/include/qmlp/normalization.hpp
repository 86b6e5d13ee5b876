#pragma once

#include "qmlp/structure.hpp"

namespace qmlp {

/// Label-normalization parameters. The forward transform standardizes
/// per-atom energies (zero mean, unit population standard deviation) and
/// force components (unit standard deviation when forces are present):
///
///   E* = (E - N_a <e>) * conv_energy
///   F* = F * conv_energy / conv_length
///   R* = R * conv_length
///
/// with conv_energy = 1/sigma_E and conv_length = sigma_F/sigma_E. When the
/// dataset carries no forces, conv_length is pinned to 1.
struct NormParams {
  double mean_energy = 0.0;   // <e>, Hartree/atom
  double conv_energy = 1.0;   // 1/sigma_E
  double conv_length = 1.0;   // sigma_F/sigma_E, or 1 without forces
  bool has_forces = false;

  double sigma_energy() const { return 1.0 / conv_energy; }
  void validate() const;
};

enum class NormDirection { Forward, Inverse };

/// Moments over the dataset; throws on missing energies or degenerate
/// statistics (fewer than two structures, or zero per-atom energy spread).
NormParams compute_normalization(const Dataset& data);

Dataset apply_normalization(const Dataset& data, const NormParams& params,
                            NormDirection direction);

}  // namespace qmlp
