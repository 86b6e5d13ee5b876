#pragma once

#include <Eigen/Core>

#include "qmlp/circuit.hpp"
#include "qmlp/noise_model.hpp"
#include "qmlp/pauli.hpp"

namespace qmlp {

/// rho -> U rho U^dagger for a 1-qubit gate.
void apply_gate_1q(Eigen::MatrixXcd& rho, int qubit, const Eigen::Matrix2cd& u);
void apply_cx(Eigen::MatrixXcd& rho, int control, int target);

/// Thermal-relaxation channel on one qubit for a gate of duration t:
/// amplitude damping with gamma = 1 - exp(-t/T1) composed with pure
/// dephasing so that coherences decay by exp(-t/T2). Requires T2 <= 2*T1.
void apply_thermal_channel(Eigen::MatrixXcd& rho, int qubit, double duration_ns,
                           const NoiseModel& noise);

/// Runs the circuit on |0..0><0..0| applying the thermal channel to the
/// acted qubits after every gate. n_qubits <= 6.
Eigen::MatrixXcd simulate_density(const Circuit& circuit, const Eigen::VectorXd& theta,
                                  const NoiseModel& noise);

/// Re tr(rho P) summed over terms.
double expectation_density(const Eigen::MatrixXcd& rho, const PauliHamiltonian& h);
double pauli_expectation_density(const Eigen::MatrixXcd& rho, const PauliTerm& term);

}  // namespace qmlp
