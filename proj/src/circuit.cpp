#include "qmlp/circuit.hpp"

#include <stdexcept>
#include <vector>

namespace qmlp {

double default_gate_duration_ns(GateType type) {
  switch (type) {
    case GateType::CX: return 430.0;
    case GateType::RZ: return 0.0;  // applied virtually
    case GateType::Id: return 0.0;
    default: return 35.6;
  }
}

void Circuit::validate() const {
  if (n_qubits < 1) throw std::invalid_argument("circuit: n_qubits must be >= 1");
  std::vector<int> slot_uses(n_params, 0);
  for (const auto& g : gates) {
    if (g.qubit < 0 || g.qubit >= n_qubits) {
      throw std::invalid_argument("circuit: qubit index out of range");
    }
    if (g.type == GateType::CX) {
      if (g.target < 0 || g.target >= n_qubits || g.target == g.qubit) {
        throw std::invalid_argument("circuit: bad CX target");
      }
    }
    if (g.slot >= 0) {
      if (g.type != GateType::RY && g.type != GateType::RZ) {
        throw std::invalid_argument("circuit: only rotations take parameter slots");
      }
      if (g.slot >= n_params) throw std::invalid_argument("circuit: slot out of range");
      ++slot_uses[g.slot];
    }
  }
  for (int s = 0; s < n_params; ++s) {
    if (slot_uses[s] == 0) {
      throw std::invalid_argument("circuit: unused parameter slot " + std::to_string(s));
    }
  }
}

int Circuit::cx_count() const {
  int n = 0;
  for (const auto& g : gates) {
    if (g.type == GateType::CX) ++n;
  }
  return n;
}

AnsatzKind ansatz_from_name(const std::string& name) {
  if (name == "h2_minimal") return AnsatzKind::H2Minimal;
  if (name == "ry_cnot") return AnsatzKind::RyCnot;
  throw std::invalid_argument("unknown ansatz '" + name + "'");
}

Circuit build_ansatz(AnsatzKind kind, int n_qubits, int depth) {
  Circuit c;
  c.n_qubits = n_qubits;

  auto push = [&c](GateType type, int qubit, int target = -1, int slot = -1) {
    Gate g;
    g.type = type;
    g.qubit = qubit;
    g.target = target;
    g.slot = slot;
    g.duration_ns = default_gate_duration_ns(type);
    c.gates.push_back(g);
  };

  switch (kind) {
    case AnsatzKind::H2Minimal: {
      if (n_qubits != 2) throw std::invalid_argument("h2_minimal ansatz requires 2 qubits");
      c.n_params = 1;
      push(GateType::X, 0);
      push(GateType::RY, 1, -1, 0);
      push(GateType::CX, 1, 0);
      break;
    }
    case AnsatzKind::RyCnot: {
      if (depth < 1) throw std::invalid_argument("ry_cnot ansatz requires depth >= 1");
      if (n_qubits < 2) throw std::invalid_argument("ry_cnot ansatz requires >= 2 qubits");
      c.n_params = n_qubits * (depth + 1);
      int slot = 0;
      for (int d = 0; d < depth; ++d) {
        for (int q = 0; q < n_qubits; ++q) push(GateType::RY, q, -1, slot++);
        for (int q = 0; q + 1 < n_qubits; ++q) push(GateType::CX, q, q + 1);
      }
      for (int q = 0; q < n_qubits; ++q) push(GateType::RY, q, -1, slot++);
      break;
    }
  }
  c.validate();
  return c;
}

}  // namespace qmlp
