#include "qmlp/vqe.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "qmlp/density.hpp"
#include "qmlp/readout.hpp"
#include "qmlp/rng.hpp"
#include "qmlp/statevector.hpp"

namespace qmlp {

BackendKind backend_from_name(const std::string& name) {
  if (name == "exact") return BackendKind::Exact;
  if (name == "sampled") return BackendKind::Sampled;
  if (name == "noisy") return BackendKind::Noisy;
  throw std::invalid_argument("unknown backend '" + name + "'");
}

void OptimizerConfig::validate() const {
  if (max_evals < 1) throw std::invalid_argument("optimizer: evaluation budget must be >= 1");
  if (!(tol >= 0.0)) throw std::invalid_argument("optimizer: tol must be >= 0");
  if (restarts < 1) throw std::invalid_argument("optimizer: restarts must be >= 1");
  if (!(learning_rate > 0.0)) throw std::invalid_argument("optimizer: learning rate must be > 0");
}

namespace {

class EnergyEvaluator {
 public:
  EnergyEvaluator(const PauliHamiltonian& h, const Circuit& circuit, const EngineBackend& backend,
                  std::uint64_t run_seed)
      : h_(h), circuit_(circuit), backend_(backend), rng_(Rng::derive(run_seed, 0x5A11)) {}

  double operator()(const Eigen::VectorXd& theta, std::vector<double>& trace) {
    double e = 0.0;
    switch (backend_.kind) {
      case BackendKind::Exact:
        e = expectation(simulate_statevector(circuit_, theta), h_);
        break;
      case BackendKind::Sampled: {
        ShotPlan plan = backend_.plan;
        plan.seed = rng_.next_u64();
        e = sample_energy(simulate_statevector(circuit_, theta), h_, plan).estimate;
        break;
      }
      case BackendKind::Noisy: {
        Eigen::MatrixXcd rho = simulate_density(circuit_, theta, backend_.noise);
        if (backend_.plan.shots_per_term == 0 && backend_.plan.per_term.empty() &&
            !backend_.noise.has_readout_error()) {
          e = expectation_density(rho, h_);
        } else if (backend_.plan.shots_per_term == 0 && backend_.plan.per_term.empty()) {
          // infinite-shot limit with readout: corrupt the outcome
          // distribution through the calibration matrix exactly
          e = infinite_shot_readout(rho);
        } else {
          ShotPlan plan = backend_.plan;
          plan.seed = rng_.next_u64();
          e = sample_energy_density(rho, h_, plan, &backend_.noise, backend_.mitigate).estimate;
        }
        break;
      }
    }
    trace.push_back(e);
    return e;
  }

 private:
  double infinite_shot_readout(const Eigen::MatrixXcd& rho) const;

  const PauliHamiltonian& h_;
  const Circuit& circuit_;
  const EngineBackend& backend_;
  Rng rng_;
};

double EnergyEvaluator::infinite_shot_readout(const Eigen::MatrixXcd& rho) const {
  // exact corrupted distribution per term: A * diag(rotated rho)
  Eigen::MatrixXd a = calibration_matrix(backend_.noise, h_.n_qubits);
  double e = 0.0;
  for (const auto& term : h_.terms) {
    if (term.is_identity()) {
      e += term.coeff;
      continue;
    }
    Eigen::MatrixXcd rotated = rho;
    Eigen::Matrix2cd had;
    had << 1, 1, 1, -1;
    had /= std::sqrt(2.0);
    using namespace std::complex_literals;
    Eigen::Matrix2cd sdg = Eigen::Matrix2cd::Identity();
    sdg(1, 1) = -1.0i;
    for (std::size_t q = 0; q < term.ops.size(); ++q) {
      if (term.ops[q] == 'X') {
        apply_gate_1q(rotated, static_cast<int>(q), had);
      } else if (term.ops[q] == 'Y') {
        apply_gate_1q(rotated, static_cast<int>(q), sdg);
        apply_gate_1q(rotated, static_cast<int>(q), had);
      }
    }
    Eigen::VectorXd probs(rotated.rows());
    for (std::int64_t x = 0; x < rotated.rows(); ++x) probs[x] = rotated(x, x).real();
    Eigen::VectorXd corrupted = a * probs;
    if (backend_.mitigate) {
      CountMap counts;
      // exact distribution as (large) relative weights
      const double scale = 1e15;
      for (long x = 0; x < corrupted.size(); ++x) {
        long c = static_cast<long>(std::llround(std::max(0.0, corrupted[x]) * scale));
        if (c > 0) counts[static_cast<std::uint64_t>(x)] = c;
      }
      corrupted = mitigate_readout(counts, a);
    }
    std::uint64_t z_mask = 0;
    for (std::size_t q = 0; q < term.ops.size(); ++q) {
      if (term.ops[q] != 'I') z_mask |= 1ull << q;
    }
    double mean = 0.0;
    for (long x = 0; x < corrupted.size(); ++x) {
      int sign = (std::popcount(static_cast<std::uint64_t>(x) & z_mask) & 1) ? -1 : 1;
      mean += sign * corrupted[x];
    }
    e += term.coeff * mean;
  }
  return e;
}

struct RunResult {
  Eigen::VectorXd theta;
  double energy = 0.0;
  std::vector<double> trace;
  bool converged = false;
};

RunResult run_parameter_shift(EnergyEvaluator& eval, Eigen::VectorXd theta,
                              const OptimizerConfig& opt) {
  RunResult out;
  double lr = opt.learning_rate;
  double e = eval(theta, out.trace);
  Eigen::VectorXd best_theta = theta;
  double best_e = e;

  const long budget = opt.max_evals;
  while (static_cast<long>(out.trace.size()) + 2 * theta.size() + 1 <= budget) {
    Eigen::VectorXd grad(theta.size());
    for (int i = 0; i < theta.size(); ++i) {
      Eigen::VectorXd tp = theta, tm = theta;
      tp[i] += M_PI / 2;
      tm[i] -= M_PI / 2;
      grad[i] = 0.5 * (eval(tp, out.trace) - eval(tm, out.trace));
    }
    Eigen::VectorXd proposal = theta - lr * grad;
    double e_new = eval(proposal, out.trace);
    if (e_new <= e) {
      theta = proposal;
      double delta = e - e_new;
      e = e_new;
      lr = std::min(lr * 1.1, 2.0);
      if (e < best_e) {
        best_e = e;
        best_theta = theta;
      }
      if (delta < opt.tol && grad.lpNorm<Eigen::Infinity>() < std::sqrt(opt.tol)) {
        out.converged = true;
        break;
      }
    } else {
      lr *= 0.5;
      if (lr < 1e-12) {
        out.converged = true;
        break;
      }
    }
  }
  out.theta = best_theta;
  out.energy = best_e;
  return out;
}

RunResult run_nelder_mead(EnergyEvaluator& eval, const Eigen::VectorXd& start,
                          const OptimizerConfig& opt, Rng& rng) {
  RunResult out;
  const int n = static_cast<int>(start.size());
  std::vector<Eigen::VectorXd> simplex;
  std::vector<double> energy;
  simplex.push_back(start);
  energy.push_back(eval(start, out.trace));
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd v = start;
    v[i] += 0.35 + 0.1 * rng.uniform();
    simplex.push_back(v);
    energy.push_back(eval(v, out.trace));
  }

  auto order = [&]() {
    std::vector<int> idx(simplex.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return energy[a] < energy[b]; });
    std::vector<Eigen::VectorXd> s2;
    std::vector<double> e2;
    for (int i : idx) {
      s2.push_back(simplex[i]);
      e2.push_back(energy[i]);
    }
    simplex.swap(s2);
    energy.swap(e2);
  };

  while (static_cast<long>(out.trace.size()) + 4 <= opt.max_evals) {
    order();
    if (energy.back() - energy.front() < opt.tol) {
      out.converged = true;
      break;
    }
    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) centroid += simplex[i];
    centroid /= n;

    Eigen::VectorXd reflected = centroid + (centroid - simplex.back());
    double e_r = eval(reflected, out.trace);
    if (e_r < energy.front()) {
      Eigen::VectorXd expanded = centroid + 2.0 * (centroid - simplex.back());
      double e_e = eval(expanded, out.trace);
      if (e_e < e_r) {
        simplex.back() = expanded;
        energy.back() = e_e;
      } else {
        simplex.back() = reflected;
        energy.back() = e_r;
      }
    } else if (e_r < energy[n - 1]) {
      simplex.back() = reflected;
      energy.back() = e_r;
    } else {
      Eigen::VectorXd contracted = centroid + 0.5 * (simplex.back() - centroid);
      double e_c = eval(contracted, out.trace);
      if (e_c < energy.back()) {
        simplex.back() = contracted;
        energy.back() = e_c;
      } else {
        // shrink toward the best vertex
        for (std::size_t i = 1; i < simplex.size(); ++i) {
          simplex[i] = simplex.front() + 0.5 * (simplex[i] - simplex.front());
          energy[i] = eval(simplex[i], out.trace);
          if (static_cast<long>(out.trace.size()) >= opt.max_evals) break;
        }
      }
    }
  }
  order();
  out.theta = simplex.front();
  out.energy = energy.front();
  return out;
}

}  // namespace

VqeResult vqe(const PauliHamiltonian& h, const Circuit& circuit, const OptimizerConfig& opt,
              const EngineBackend& backend) {
  h.validate();
  circuit.validate();
  opt.validate();
  if (circuit.n_qubits != h.n_qubits) {
    throw std::invalid_argument("vqe: circuit and Hamiltonian qubit counts differ");
  }

  VqeResult best;
  bool have = false;
  for (int restart = 0; restart < opt.restarts; ++restart) {
    Rng rng = Rng::derive(opt.seed, 0xB00 + restart);
    Eigen::VectorXd theta(circuit.n_params);
    for (int i = 0; i < theta.size(); ++i) theta[i] = rng.uniform(-M_PI, M_PI);
    EnergyEvaluator eval(h, circuit, backend, rng.next_u64());
    RunResult run = backend.kind == BackendKind::Exact
                        ? run_parameter_shift(eval, theta, opt)
                        : run_nelder_mead(eval, theta, opt, rng);
    if (!have || run.energy < best.energy) {
      best.theta = run.theta;
      best.energy = run.energy;
      best.trace = run.trace;
      best.converged = run.converged;
      best.n_evals = static_cast<long>(run.trace.size());
      have = true;
    }
  }
  if (!std::isfinite(best.energy)) throw std::runtime_error("vqe: non-finite energy");
  return best;
}

std::string hamiltonian_path(const std::string& ham_dir, int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "ham_%04d.ham", index);
  std::string dir = ham_dir;
  if (!dir.empty() && dir.back() != '/') dir += '/';
  return dir + buf;
}

double filtered_mean(const std::vector<double>& energies, double threshold) {
  if (energies.empty()) throw std::invalid_argument("filtered_mean: no energies");
  std::vector<double> sorted = energies;
  std::sort(sorted.begin(), sorted.end());
  double median = sorted[sorted.size() / 2];
  if (sorted.size() % 2 == 0) median = 0.5 * (median + sorted[sorted.size() / 2 - 1]);

  std::vector<double> dev;
  for (double e : energies) dev.push_back(std::abs(e - median));
  std::sort(dev.begin(), dev.end());
  double mad = dev[dev.size() / 2];
  if (dev.size() % 2 == 0) mad = 0.5 * (mad + dev[dev.size() / 2 - 1]);

  double sum = 0.0;
  int kept = 0;
  for (double e : energies) {
    if (mad > 0.0 && e - median > threshold * mad) continue;  // unconverged: too high
    sum += e;
    ++kept;
  }
  return sum / kept;
}

Dataset label_dataset(const Dataset& data, const LabelConfig& config) {
  if (data.empty()) throw std::invalid_argument("label: empty dataset");
  if (config.repeats < 1) throw std::invalid_argument("label: repeats must be >= 1");

  Dataset out = data;
  for (int i = 0; i < out.size(); ++i) {
    PauliHamiltonian h = PauliHamiltonian::parse(hamiltonian_path(config.ham_dir, i));
    Circuit circuit = build_ansatz(config.ansatz, h.n_qubits, config.depth);
    std::vector<double> energies;
    for (int r = 0; r < config.repeats; ++r) {
      OptimizerConfig opt = config.opt;
      opt.seed = Rng::derive(config.seed, (static_cast<std::uint64_t>(i) << 20) | r).next_u64();
      energies.push_back(vqe(h, circuit, opt, config.backend).energy);
    }
    out.structures[i].energy = filtered_mean(energies, config.mad_threshold);
    out.structures[i].forces.reset();
  }
  return out;
}

}  // namespace qmlp
