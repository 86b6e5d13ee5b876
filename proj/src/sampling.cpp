#include "qmlp/sampling.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "qmlp/density.hpp"
#include "qmlp/readout.hpp"
#include "qmlp/rng.hpp"
#include "qmlp/statevector.hpp"

namespace qmlp {

void ShotPlan::validate(int n_terms) const {
  if (!per_term.empty() && static_cast<int>(per_term.size()) != n_terms) {
    throw std::invalid_argument("shot plan: per-term length mismatch");
  }
  for (int k = 0; k < n_terms; ++k) {
    if (shots_for(k) < 1) throw std::invalid_argument("shot plan: shots must be >= 1");
  }
}

namespace {

// S^dagger then H rotates the Y eigenbasis onto Z; H alone handles X.
void rotate_to_z_basis(Eigen::VectorXcd& state, const std::string& ops) {
  using namespace std::complex_literals;
  Eigen::Matrix2cd h;
  h << 1, 1, 1, -1;
  h /= std::sqrt(2.0);
  Eigen::Matrix2cd sdg = Eigen::Matrix2cd::Identity();
  sdg(1, 1) = -1.0i;
  for (std::size_t q = 0; q < ops.size(); ++q) {
    if (ops[q] == 'X') {
      apply_gate_1q(state, static_cast<int>(q), h);
    } else if (ops[q] == 'Y') {
      apply_gate_1q(state, static_cast<int>(q), sdg);
      apply_gate_1q(state, static_cast<int>(q), h);
    }
  }
}

void rotate_to_z_basis(Eigen::MatrixXcd& rho, const std::string& ops) {
  using namespace std::complex_literals;
  Eigen::Matrix2cd h;
  h << 1, 1, 1, -1;
  h /= std::sqrt(2.0);
  Eigen::Matrix2cd sdg = Eigen::Matrix2cd::Identity();
  sdg(1, 1) = -1.0i;
  for (std::size_t q = 0; q < ops.size(); ++q) {
    if (ops[q] == 'X') {
      apply_gate_1q(rho, static_cast<int>(q), h);
    } else if (ops[q] == 'Y') {
      apply_gate_1q(rho, static_cast<int>(q), sdg);
      apply_gate_1q(rho, static_cast<int>(q), h);
    }
  }
}

std::uint64_t sample_index(const std::vector<double>& cdf, double u) {
  auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  return static_cast<std::uint64_t>(std::min<std::ptrdiff_t>(
      std::distance(cdf.begin(), it), static_cast<std::ptrdiff_t>(cdf.size()) - 1));
}

struct TermSample {
  double mean = 0.0;
  double variance = 0.0;  // unbiased; 0 when S == 1
};

TermSample sample_term(const std::vector<double>& probs, std::uint64_t z_mask, long shots,
                       Rng& rng, const NoiseModel* readout_noise, int n_qubits, bool mitigate,
                       const Eigen::MatrixXd* calibration) {
  std::vector<double> cdf(probs.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += std::max(0.0, probs[i]);
    cdf[i] = acc;
  }
  for (auto& c : cdf) c /= acc;

  CountMap counts;
  for (long s = 0; s < shots; ++s) ++counts[sample_index(cdf, rng.uniform())];

  if (readout_noise && readout_noise->has_readout_error()) {
    counts = apply_readout(counts, n_qubits, *readout_noise, rng.next_u64());
  }

  TermSample out;
  if (mitigate && calibration) {
    Eigen::VectorXd corrected = mitigate_readout(counts, *calibration);
    double mean = 0.0;
    for (long x = 0; x < corrected.size(); ++x) {
      int sign = (std::popcount(static_cast<std::uint64_t>(x) & z_mask) & 1) ? -1 : 1;
      mean += sign * corrected[x];
    }
    out.mean = mean;
    out.variance = shots > 1 ? (1.0 - mean * mean) * shots / (shots - 1.0) : 0.0;
    return out;
  }

  long sum = 0;
  for (const auto& [outcome, count] : counts) {
    int sign = (std::popcount(outcome & z_mask) & 1) ? -1 : 1;
    sum += sign * count;
  }
  out.mean = static_cast<double>(sum) / shots;
  // outcomes are +-1, so the unbiased sample variance is S(1 - m^2)/(S-1)
  out.variance = shots > 1 ? (1.0 - out.mean * out.mean) * shots / (shots - 1.0) : 0.0;
  if (out.variance < 0.0) out.variance = 0.0;
  return out;
}

SampledEnergy assemble(const PauliHamiltonian& h, const ShotPlan& plan,
                       const std::vector<TermSample>& samples) {
  SampledEnergy out;
  out.term_means.resize(h.n_terms());
  out.term_variances.resize(h.n_terms());
  double eps2 = 0.0;
  for (int k = 0; k < h.n_terms(); ++k) {
    out.term_means[k] = samples[k].mean;
    out.term_variances[k] = samples[k].variance;
    out.estimate += h.terms[k].coeff * samples[k].mean;
    if (!h.terms[k].is_identity()) {
      long s = plan.shots_for(k);
      eps2 += h.terms[k].coeff * h.terms[k].coeff * samples[k].variance / s;
      out.total_shots += s;
    }
  }
  out.eps_stat = std::sqrt(eps2);
  return out;
}

}  // namespace

SampledEnergy sample_energy(const Eigen::VectorXcd& state, const PauliHamiltonian& h,
                            const ShotPlan& plan) {
  h.validate();
  plan.validate(h.n_terms());
  if (state.size() != (1ll << h.n_qubits)) {
    throw std::invalid_argument("sample_energy: state dimension mismatch");
  }
  Rng rng(plan.seed);
  std::vector<TermSample> samples(h.n_terms());
  for (int k = 0; k < h.n_terms(); ++k) {
    const auto& term = h.terms[k];
    if (term.is_identity()) {
      samples[k] = {1.0, 0.0};
      continue;
    }
    Eigen::VectorXcd rotated = state;
    rotate_to_z_basis(rotated, term.ops);
    std::vector<double> probs(rotated.size());
    for (std::int64_t x = 0; x < rotated.size(); ++x) probs[x] = std::norm(rotated[x]);
    std::uint64_t z_mask = 0;
    for (std::size_t q = 0; q < term.ops.size(); ++q) {
      if (term.ops[q] != 'I') z_mask |= 1ull << q;
    }
    samples[k] = sample_term(probs, z_mask, plan.shots_for(k), rng, nullptr, h.n_qubits, false,
                             nullptr);
  }
  return assemble(h, plan, samples);
}

SampledEnergy sample_energy_density(const Eigen::MatrixXcd& rho, const PauliHamiltonian& h,
                                    const ShotPlan& plan, const NoiseModel* readout_noise,
                                    bool mitigate) {
  h.validate();
  plan.validate(h.n_terms());
  if (rho.rows() != (1ll << h.n_qubits)) {
    throw std::invalid_argument("sample_energy: density dimension mismatch");
  }
  Eigen::MatrixXd calibration;
  if (mitigate) {
    if (!readout_noise) {
      throw std::invalid_argument("sample_energy: mitigation requires a readout noise model");
    }
    calibration = calibration_matrix(*readout_noise, h.n_qubits);
  }
  Rng rng(plan.seed);
  std::vector<TermSample> samples(h.n_terms());
  for (int k = 0; k < h.n_terms(); ++k) {
    const auto& term = h.terms[k];
    if (term.is_identity()) {
      samples[k] = {1.0, 0.0};
      continue;
    }
    Eigen::MatrixXcd rotated = rho;
    rotate_to_z_basis(rotated, term.ops);
    std::vector<double> probs(rotated.rows());
    for (std::int64_t x = 0; x < rotated.rows(); ++x) probs[x] = rotated(x, x).real();
    std::uint64_t z_mask = 0;
    for (std::size_t q = 0; q < term.ops.size(); ++q) {
      if (term.ops[q] != 'I') z_mask |= 1ull << q;
    }
    samples[k] = sample_term(probs, z_mask, plan.shots_for(k), rng, readout_noise, h.n_qubits,
                             mitigate, mitigate ? &calibration : nullptr);
  }
  return assemble(h, plan, samples);
}

double shot_probability(double eps, double shots, double sigma2) {
  if (!(sigma2 > 0.0)) throw std::invalid_argument("shot_probability: sigma^2 must be positive");
  if (shots < 1) throw std::invalid_argument("shot_probability: shots must be >= 1");
  if (eps < 0.0) throw std::invalid_argument("shot_probability: eps must be >= 0");
  return std::erf(eps * std::sqrt(shots / (2.0 * sigma2)));
}

namespace {

long long smallest_shots(double eps, double p, double sigma2) {
  if (sigma2 <= 0.0) return 1;  // every term is an eigenstate: one shot suffices
  auto ok = [&](long long s) { return shot_probability(eps, static_cast<double>(s), sigma2) >= p; };
  long long lo = 1, hi = 1;
  while (!ok(hi)) {
    hi *= 2;
    if (hi > (1ll << 62)) throw std::runtime_error("shot budget: target probability unreachable");
  }
  while (lo < hi) {
    long long mid = lo + (hi - lo) / 2;
    if (ok(mid)) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return lo;
}

}  // namespace

ShotPlan variance_weighted_plan(const PauliHamiltonian& h, const Eigen::VectorXcd& state,
                                long total_shots, std::uint64_t seed) {
  h.validate();
  if (total_shots < h.n_terms()) {
    throw std::invalid_argument("shot plan: budget below one shot per term");
  }
  std::vector<double> weight(h.n_terms(), 0.0);
  double wsum = 0.0;
  for (int k = 0; k < h.n_terms(); ++k) {
    if (h.terms[k].is_identity()) continue;
    double p_exp = pauli_expectation(h.terms[k], state);
    weight[k] = std::abs(h.terms[k].coeff) * std::sqrt(std::max(0.0, 1.0 - p_exp * p_exp));
    wsum += weight[k];
  }
  ShotPlan plan;
  plan.seed = seed;
  plan.per_term.assign(h.n_terms(), 1);
  if (wsum <= 0.0) return plan;  // all eigenstates: one shot each
  for (int k = 0; k < h.n_terms(); ++k) {
    plan.per_term[k] =
        std::max<long>(1, static_cast<long>(std::floor(total_shots * weight[k] / wsum)));
  }
  return plan;
}

ShotBudget estimate_shot_budget(const PauliHamiltonian& h, const Eigen::VectorXcd& state,
                                double eps, double p) {
  h.validate();
  if (!(eps > 0.0)) throw std::invalid_argument("shot budget: eps must be positive");
  if (!(p > 0.0) || p > 1.0 - 1e-9) {
    throw std::invalid_argument("shot budget: p must lie in (0, 1 - 1e-9]");
  }
  ShotBudget out;
  out.sigma2_qc = variance(state, h, VarianceMode::PerTerm);
  out.sigma2_max = variance(state, h, VarianceMode::UpperBound);
  out.shots_per_term = smallest_shots(eps, p, out.sigma2_qc);
  out.upper_shots_per_term = smallest_shots(eps, p, out.sigma2_max);
  out.total = out.shots_per_term * h.n_terms();
  out.upper_total = out.upper_shots_per_term * h.n_terms();
  return out;
}

}  // namespace qmlp
