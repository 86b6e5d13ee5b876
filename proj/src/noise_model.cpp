#include "qmlp/noise_model.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace qmlp {

NoiseModel NoiseModel::ideal() {
  NoiseModel m;
  m.t1_us = std::numeric_limits<double>::infinity();
  m.t2_us = std::numeric_limits<double>::infinity();
  m.readout_p01 = 0.0;
  m.readout_p10 = 0.0;
  return m;
}

bool NoiseModel::has_decoherence() const {
  return std::isfinite(t1_us) || std::isfinite(t2_us);
}

bool NoiseModel::has_readout_error() const { return readout_p01 > 0.0 || readout_p10 > 0.0; }

double NoiseModel::gate_duration_ns(const Gate& g) const {
  switch (g.type) {
    case GateType::CX: return gate_time_cx_ns;
    case GateType::RZ:
    case GateType::Id: return 0.0;
    default: return gate_time_1q_ns;
  }
}

void NoiseModel::validate() const {
  if (!(t1_us > 0.0) || !(t2_us > 0.0)) {
    throw std::invalid_argument("noise model: T1 and T2 must be positive");
  }
  if (t2_us > 2.0 * t1_us + 1e-12 * t1_us) {
    throw std::invalid_argument("noise model: T2 must be <= 2*T1");
  }
  if (gate_time_1q_ns < 0.0 || gate_time_cx_ns < 0.0) {
    throw std::invalid_argument("noise model: negative gate time");
  }
  for (double p : {readout_p01, readout_p10}) {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("noise model: readout rate outside [0,1]");
  }
}

NoiseModel NoiseModel::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open noise model file: " + path);
  NoiseModel m;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::string trimmed;
    for (char c : line) {
      if (!std::isspace(static_cast<unsigned char>(c))) trimmed += c;
    }
    if (trimmed.empty()) continue;
    auto eq = trimmed.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected key=value");
    }
    std::string key = trimmed.substr(0, eq);
    double value = std::stod(trimmed.substr(eq + 1));
    if (key == "t1_us") m.t1_us = value;
    else if (key == "t2_us") m.t2_us = value;
    else if (key == "gate_time_1q_ns") m.gate_time_1q_ns = value;
    else if (key == "gate_time_cx_ns") m.gate_time_cx_ns = value;
    else if (key == "readout_p01") m.readout_p01 = value;
    else if (key == "readout_p10") m.readout_p10 = value;
    else {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }
  m.validate();
  return m;
}

void NoiseModel::save(const std::string& path) const {
  validate();
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << "t1_us=" << t1_us << "\n"
      << "t2_us=" << t2_us << "\n"
      << "gate_time_1q_ns=" << gate_time_1q_ns << "\n"
      << "gate_time_cx_ns=" << gate_time_cx_ns << "\n"
      << "readout_p01=" << readout_p01 << "\n"
      << "readout_p10=" << readout_p10 << "\n";
}

}  // namespace qmlp
