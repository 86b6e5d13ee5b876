#include "qmlp/density.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

#include "qmlp/statevector.hpp"

namespace qmlp {

void apply_gate_1q(Eigen::MatrixXcd& rho, int qubit, const Eigen::Matrix2cd& u) {
  // columns as kets, then rows as bras
  for (std::int64_t c = 0; c < rho.cols(); ++c) {
    Eigen::VectorXcd col = rho.col(c);
    apply_gate_1q(col, qubit, u);
    rho.col(c) = col;
  }
  Eigen::Matrix2cd uc = u.conjugate();
  for (std::int64_t r = 0; r < rho.rows(); ++r) {
    Eigen::VectorXcd row = rho.row(r).transpose();
    apply_gate_1q(row, qubit, uc);
    rho.row(r) = row.transpose();
  }
}

void apply_cx(Eigen::MatrixXcd& rho, int control, int target) {
  for (std::int64_t c = 0; c < rho.cols(); ++c) {
    Eigen::VectorXcd col = rho.col(c);
    apply_cx(col, control, target);
    rho.col(c) = col;
  }
  for (std::int64_t r = 0; r < rho.rows(); ++r) {
    Eigen::VectorXcd row = rho.row(r).transpose();
    apply_cx(row, control, target);
    rho.row(r) = row.transpose();
  }
}

namespace {

void apply_kraus_1q(Eigen::MatrixXcd& rho, int qubit,
                    const std::vector<Eigen::Matrix2cd>& kraus) {
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(rho.rows(), rho.cols());
  for (const auto& k : kraus) {
    Eigen::MatrixXcd term = rho;
    apply_gate_1q(term, qubit, k);  // K rho K^dagger via ket and bra sweeps
    out += term;
  }
  rho = out;
}

}  // namespace

void apply_thermal_channel(Eigen::MatrixXcd& rho, int qubit, double duration_ns,
                           const NoiseModel& noise) {
  noise.validate();
  if (duration_ns <= 0.0 || !noise.has_decoherence()) return;
  const double t_us = duration_ns * 1e-3;

  // amplitude damping from T1
  double gamma = std::isfinite(noise.t1_us) ? 1.0 - std::exp(-t_us / noise.t1_us) : 0.0;
  if (gamma > 0.0) {
    Eigen::Matrix2cd k0 = Eigen::Matrix2cd::Zero(), k1 = Eigen::Matrix2cd::Zero();
    k0(0, 0) = 1.0;
    k0(1, 1) = std::sqrt(1.0 - gamma);
    k1(0, 1) = std::sqrt(gamma);
    apply_kraus_1q(rho, qubit, {k0, k1});
  }

  // pure dephasing: 1/T_phi = 1/T2 - 1/(2 T1), so that coherences decay by
  // exp(-t/T2) overall
  double inv_tphi = 0.0;
  if (std::isfinite(noise.t2_us)) {
    inv_tphi = 1.0 / noise.t2_us - (std::isfinite(noise.t1_us) ? 0.5 / noise.t1_us : 0.0);
  }
  if (inv_tphi > 1e-300) {
    double p = 0.5 * (1.0 - std::exp(-t_us * inv_tphi));
    Eigen::Matrix2cd k0 = std::sqrt(1.0 - p) * Eigen::Matrix2cd::Identity();
    Eigen::Matrix2cd k1 = Eigen::Matrix2cd::Zero();
    k1(0, 0) = std::sqrt(p);
    k1(1, 1) = -std::sqrt(p);
    apply_kraus_1q(rho, qubit, {k0, k1});
  }
}

Eigen::MatrixXcd simulate_density(const Circuit& circuit, const Eigen::VectorXd& theta,
                                  const NoiseModel& noise) {
  circuit.validate();
  noise.validate();
  if (circuit.n_qubits > 6) {
    throw std::invalid_argument("density simulation: limited to 6 qubits");
  }
  if (theta.size() != circuit.n_params) {
    throw std::invalid_argument("density simulation: parameter count mismatch");
  }
  const std::int64_t dim = 1ll << circuit.n_qubits;
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim, dim);
  rho(0, 0) = 1.0;

  for (const auto& g : circuit.gates) {
    double duration = noise.gate_duration_ns(g);
    if (g.type == GateType::CX) {
      apply_cx(rho, g.qubit, g.target);
      apply_thermal_channel(rho, g.qubit, duration, noise);
      apply_thermal_channel(rho, g.target, duration, noise);
    } else {
      double angle = g.slot >= 0 ? theta[g.slot] : g.angle;
      apply_gate_1q(rho, g.qubit, gate_matrix(g.type, angle));
      apply_thermal_channel(rho, g.qubit, duration, noise);
    }
  }
  return rho;
}

double pauli_expectation_density(const Eigen::MatrixXcd& rho, const PauliTerm& term) {
  const PauliAction a = PauliAction::from_string(term.ops);
  const std::complex<double> iphase[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  const std::complex<double> base = iphase[a.n_y % 4];
  // tr(rho P) = sum_x phase(x) rho(x, x ^ flip) since P(y, x) = phase(x)
  // delta_{y, x^flip}
  std::complex<double> acc = 0.0;
  for (std::int64_t x = 0; x < rho.rows(); ++x) {
    int parity = std::popcount(static_cast<std::uint64_t>(x) & a.z_mask) & 1;
    std::complex<double> phase = parity ? -base : base;
    acc += phase * rho(x, x ^ a.flip_mask);
  }
  return acc.real();
}

double expectation_density(const Eigen::MatrixXcd& rho, const PauliHamiltonian& h) {
  h.validate();
  if (rho.rows() != (1ll << h.n_qubits)) {
    throw std::invalid_argument("expectation: density dimension mismatch");
  }
  double e = 0.0;
  for (const auto& t : h.terms) e += t.coeff * pauli_expectation_density(rho, t);
  return e;
}

}  // namespace qmlp
