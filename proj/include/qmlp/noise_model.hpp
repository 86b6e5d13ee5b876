#pragma once

#include <string>

#include "qmlp/circuit.hpp"

namespace qmlp {

/// Hardware-noise parameters: thermal relaxation (T1) and dephasing (T2)
/// applied per gate duration, plus per-qubit readout confusion rates.
/// Baseline values mirror a current superconducting backend: T1 = T2 =
/// 100 us, 1q gates 35.6 ns, CX 430 ns, p(read 0|1) = 4%, p(read 1|0) = 2%.
struct NoiseModel {
  double t1_us = 100.0;
  double t2_us = 100.0;
  double gate_time_1q_ns = 35.6;
  double gate_time_cx_ns = 430.0;
  double readout_p01 = 0.04;  // p(read 0 | state 1)
  double readout_p10 = 0.02;  // p(read 1 | state 0)

  static NoiseModel baseline() { return NoiseModel{}; }
  /// No decoherence, no readout error.
  static NoiseModel ideal();

  bool has_decoherence() const;
  bool has_readout_error() const;
  double gate_duration_ns(const Gate& g) const;

  void validate() const;

  /// key=value file mirroring the field names (t1_us, t2_us,
  /// gate_time_1q_ns, gate_time_cx_ns, readout_p01, readout_p10).
  static NoiseModel load(const std::string& path);
  void save(const std::string& path) const;
};

}  // namespace qmlp
