#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "qmlp/circuit.hpp"
#include "qmlp/noise_model.hpp"
#include "qmlp/pauli.hpp"
#include "qmlp/sampling.hpp"
#include "qmlp/structure.hpp"

namespace qmlp {

enum class BackendKind { Exact, Sampled, Noisy };

BackendKind backend_from_name(const std::string& name);

/// Energy-evaluation backend. Exact: statevector expectation. Sampled:
/// statevector + finite shots. Noisy: density matrix with the thermal
/// channels + finite shots and readout corruption; shots_per_term == 0 means
/// the expectation is taken directly from rho (statistics suppressed).
struct EngineBackend {
  BackendKind kind = BackendKind::Exact;
  ShotPlan plan;
  NoiseModel noise = NoiseModel::ideal();
  bool mitigate = false;
};

/// Optimization budget and seeds. The exact backend uses parameter-shift
/// gradient descent with an adaptive step; sampled/noisy backends use
/// Nelder-Mead. max_evals counts every energy evaluation (shifted gradient
/// evaluations included) per restart.
struct OptimizerConfig {
  long max_evals = 4000;
  double tol = 1e-12;
  int restarts = 1;
  double learning_rate = 0.25;
  std::uint64_t seed = 0;

  void validate() const;
};

struct VqeResult {
  Eigen::VectorXd theta;
  double energy = 0.0;
  std::vector<double> trace;  // every energy evaluation of the winning restart
  bool converged = false;
  long n_evals = 0;
};

VqeResult vqe(const PauliHamiltonian& h, const Circuit& circuit, const OptimizerConfig& opt,
              const EngineBackend& backend);

/// VQE labeling of a dataset. One Hamiltonian file per structure index:
/// <ham_dir>/ham_<index 4 digits>.ham. Each structure's energy is the mean
/// of `repeats` VQE runs after discarding runs more than mad_threshold
/// median-absolute-deviations above the run median. Forces are left absent.
struct LabelConfig {
  std::string ham_dir;
  AnsatzKind ansatz = AnsatzKind::H2Minimal;
  int depth = 1;
  EngineBackend backend;
  OptimizerConfig opt;
  int repeats = 1;
  double mad_threshold = 3.0;
  std::uint64_t seed = 0;
};

Dataset label_dataset(const Dataset& data, const LabelConfig& config);

/// Path of the Hamiltonian file for one structure index.
std::string hamiltonian_path(const std::string& ham_dir, int index);

/// Filtered mean used for repeated VQE runs (one-sided: drops runs whose
/// energy exceeds the median by more than `threshold` MADs).
double filtered_mean(const std::vector<double>& energies, double threshold);

}  // namespace qmlp
