#include "qmlp/statevector.hpp"

#include <cmath>
#include <stdexcept>

namespace qmlp {

void apply_gate_1q(Eigen::VectorXcd& state, int qubit, const Eigen::Matrix2cd& u) {
  const std::int64_t stride = 1ll << qubit;
  for (std::int64_t base = 0; base < state.size(); base += 2 * stride) {
    for (std::int64_t i = base; i < base + stride; ++i) {
      std::complex<double> a0 = state[i];
      std::complex<double> a1 = state[i + stride];
      state[i] = u(0, 0) * a0 + u(0, 1) * a1;
      state[i + stride] = u(1, 0) * a0 + u(1, 1) * a1;
    }
  }
}

void apply_cx(Eigen::VectorXcd& state, int control, int target) {
  const std::uint64_t cbit = 1ull << control;
  const std::uint64_t tbit = 1ull << target;
  for (std::uint64_t x = 0; x < static_cast<std::uint64_t>(state.size()); ++x) {
    if ((x & cbit) && !(x & tbit)) {
      std::swap(state[x], state[x | tbit]);
    }
  }
}

Eigen::Matrix2cd gate_matrix(GateType type, double angle) {
  using namespace std::complex_literals;
  Eigen::Matrix2cd u;
  switch (type) {
    case GateType::X:
      u << 0, 1, 1, 0;
      return u;
    case GateType::SX:
      u << 0.5 + 0.5i, 0.5 - 0.5i, 0.5 - 0.5i, 0.5 + 0.5i;
      return u;
    case GateType::RY: {
      double c = std::cos(angle / 2), s = std::sin(angle / 2);
      u << c, -s, s, c;
      return u;
    }
    case GateType::RZ: {
      u << std::exp(-0.5i * angle), 0, 0, std::exp(0.5i * angle);
      return u;
    }
    case GateType::Id:
      return Eigen::Matrix2cd::Identity();
    case GateType::CX:
      throw std::logic_error("gate_matrix: CX is not a 1-qubit gate");
  }
  throw std::logic_error("gate_matrix: unknown gate");
}

Eigen::VectorXcd simulate_statevector(const Circuit& circuit, const Eigen::VectorXd& theta) {
  circuit.validate();
  if (circuit.n_qubits > 20) {
    throw std::invalid_argument("statevector: limited to 20 qubits");
  }
  if (theta.size() != circuit.n_params) {
    throw std::invalid_argument("statevector: parameter count mismatch (" +
                                std::to_string(theta.size()) + " given, " +
                                std::to_string(circuit.n_params) + " slots)");
  }
  Eigen::VectorXcd state = Eigen::VectorXcd::Zero(1ll << circuit.n_qubits);
  state[0] = 1.0;
  for (const auto& g : circuit.gates) {
    if (g.type == GateType::CX) {
      apply_cx(state, g.qubit, g.target);
    } else {
      double angle = g.slot >= 0 ? theta[g.slot] : g.angle;
      apply_gate_1q(state, g.qubit, gate_matrix(g.type, angle));
    }
  }
  return state;
}

}  // namespace qmlp
