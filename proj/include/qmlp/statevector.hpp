#pragma once

#include <Eigen/Core>
#include <complex>

#include "qmlp/circuit.hpp"

namespace qmlp {

/// In-place single-qubit gate |psi> -> (u otimes I)|psi> on qubit q.
void apply_gate_1q(Eigen::VectorXcd& state, int qubit, const Eigen::Matrix2cd& u);

/// In-place controlled-X.
void apply_cx(Eigen::VectorXcd& state, int control, int target);

Eigen::Matrix2cd gate_matrix(GateType type, double angle);

/// Runs the circuit on |0...0>. theta must match the circuit's slot count;
/// n_qubits <= 20. The result is normalized to within numerical error.
Eigen::VectorXcd simulate_statevector(const Circuit& circuit, const Eigen::VectorXd& theta);

}  // namespace qmlp
