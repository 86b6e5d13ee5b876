#pragma once

#include <string>
#include <vector>

namespace qmlp {

enum class GateType { X, SX, RY, RZ, CX, Id };

/// One gate. Parameterized RY gates reference a slot in the circuit's
/// parameter table (slot >= 0); fixed-angle rotations carry `angle`.
/// duration_ns feeds the hardware-noise channels.
struct Gate {
  GateType type = GateType::Id;
  int qubit = 0;
  int target = -1;   // CX only
  int slot = -1;     // parameter slot, RY/RZ
  double angle = 0;  // fixed angle when slot < 0
  double duration_ns = 0;
};

struct Circuit {
  int n_qubits = 0;
  std::vector<Gate> gates;
  int n_params = 0;

  void validate() const;
  int cx_count() const;
};

enum class AnsatzKind { H2Minimal, RyCnot };

AnsatzKind ansatz_from_name(const std::string& name);

/// h2_minimal: X(0), RY(theta) on qubit 1, CX(1 -> 0); one parameter, one CX.
/// ry_cnot: `depth` blocks of a full RY layer plus a linear CX cascade,
/// followed by a final RY layer; n_qubits*(depth+1) parameters.
Circuit build_ansatz(AnsatzKind kind, int n_qubits, int depth = 1);

/// Default Table-style gate durations: 35.6 ns for 1-qubit gates, 430 ns for
/// CX, 0 for the virtual RZ and identity.
double default_gate_duration_ns(GateType type);

}  // namespace qmlp
