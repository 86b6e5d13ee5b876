#pragma once

#include <Eigen/Core>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qmlp/network.hpp"
#include "qmlp/normalization.hpp"
#include "qmlp/structure.hpp"
#include "qmlp/symfunc.hpp"

namespace qmlp {

/// Network geometry: per-element input widths (active descriptor counts),
/// shared hidden layer sizes and activation, scalar output.
struct MlpArchitecture {
  std::map<std::string, int> input_width;
  std::vector<int> hidden = {25, 25};
  std::string activation = "tanh";

  static MlpArchitecture for_descriptors(const DescriptorSet& set,
                                         std::vector<int> hidden = {25, 25});
  void validate() const;
};

/// High-dimensional neural-network potential: one atomic network per element,
/// total energy = sum of atomic outputs, de-normalized through NormParams.
struct MlpModel {
  MlpArchitecture arch;
  std::map<std::string, FeedForward> nets;
  DescriptorSet descriptors;
  NormParams norm;

  long n_params() const;
  Eigen::VectorXd to_flat() const;
  void from_flat(const Eigen::VectorXd& flat);
  /// Flat offset of an element's parameter block (elements in map order).
  long param_offset(const std::string& element) const;

  void validate() const;
  void save(const std::string& path) const;
  static MlpModel load(const std::string& path);
};

/// Deterministic fan-in-scaled initialization. Descriptor scaling must be
/// fitted; widths must match the active descriptor counts.
MlpModel init_model(const MlpArchitecture& arch, const DescriptorSet& descriptors,
                    const NormParams& norm, std::uint64_t seed);

/// Total energy in Hartree; optionally the per-atom decomposition.
double predict_energy(const MlpModel& model, const Structure& s,
                      std::vector<double>* per_atom = nullptr);

/// Analytic forces -dE/dR (Hartree/Bohr), including descriptor-scaling and
/// normalization factors.
std::vector<Eigen::Vector3d> predict_forces(const MlpModel& model, const Structure& s);

/// Training loss on normalized labels: mean over the batch of
/// (dE*)^2 + beta/(3N) sum_k (dF*_k)^2, with the exact parameter gradient.
struct LossResult {
  double loss = 0.0;
  double energy_term = 0.0;
  double force_term = 0.0;
  Eigen::VectorXd gradient;
};

LossResult loss_and_gradients(const MlpModel& model, const Dataset& batch,
                              const std::vector<int>& indices, double beta);
LossResult loss_and_gradients(const MlpModel& model, const Dataset& batch, double beta);

/// Energy RMSE (Hartree/atom) and, when both sides carry forces, force RMSE
/// (Hartree/Bohr) of model predictions against the dataset labels.
struct EvalResult {
  double rmse_energy = 0.0;
  std::optional<double> rmse_forces;
};

EvalResult evaluate(const MlpModel& model, const Dataset& data);

/// Dataset copy whose labels are model predictions (forces included when
/// with_forces is set).
Dataset predict_dataset(const MlpModel& model, const Dataset& data, bool with_forces);

}  // namespace qmlp
