#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "qmlp/noise_model.hpp"
#include "qmlp/pauli.hpp"

namespace qmlp {

/// Shot allocation: uniform shots_per_term unless per_term overrides it
/// (variance-weighted plans are built by the caller).
struct ShotPlan {
  long shots_per_term = 1;
  std::vector<long> per_term;  // optional, one entry per Hamiltonian term
  std::uint64_t seed = 0;

  long shots_for(int k) const {
    return per_term.empty() ? shots_per_term : per_term.at(k);
  }
  void validate(int n_terms) const;
};

/// Histogram of measured bitstrings (basis index -> count).
using CountMap = std::map<std::uint64_t, long>;

struct SampledEnergy {
  double estimate = 0.0;
  double eps_stat = 0.0;
  std::vector<double> term_means;
  std::vector<double> term_variances;  // unbiased sample variance per term
  long total_shots = 0;
};

/// Estimates <H> by measuring each Pauli term independently: basis rotation
/// (H for X, S^dagger H for Y), then shots_for(k) projective samples.
/// Identity terms contribute exactly. eps_stat follows the per-term sample
/// variances: sqrt(sum_k c_k^2 s_k^2 / S_k).
SampledEnergy sample_energy(const Eigen::VectorXcd& state, const PauliHamiltonian& h,
                            const ShotPlan& plan);

/// Density-matrix variant; optional readout corruption (per-qubit bit flips
/// from the noise model) and optional mitigation through the exact
/// calibration matrix.
SampledEnergy sample_energy_density(const Eigen::MatrixXcd& rho, const PauliHamiltonian& h,
                                    const ShotPlan& plan, const NoiseModel* readout_noise,
                                    bool mitigate);

/// Erf(eps * sqrt(S / (2 sigma^2))): probability that the sampled-energy
/// deviation is below eps at S shots per term.
double shot_probability(double eps, double shots, double sigma2);

struct ShotBudget {
  long long shots_per_term = 0;
  long long total = 0;        // K * shots_per_term
  double sigma2_qc = 0.0;     // per-term aggregated variance of the state
  long long upper_shots_per_term = 0;
  long long upper_total = 0;  // with the L1 upper-bound variance
  double sigma2_max = 0.0;
};

/// Smallest uniform S with shot_probability(eps, S, sigma2_qc) >= p, plus the
/// loose upper bound using (sum|c_k|)^2. Requires p in (0, 1 - 1e-9].
ShotBudget estimate_shot_budget(const PauliHamiltonian& h, const Eigen::VectorXcd& state,
                                double eps, double p);

/// Non-default alternative to uniform allocation: splits a total measurement
/// budget proportionally to |c_k| sqrt(Var(P_k)) (at least one shot per
/// non-identity term).
ShotPlan variance_weighted_plan(const PauliHamiltonian& h, const Eigen::VectorXcd& state,
                                long total_shots, std::uint64_t seed);

}  // namespace qmlp
