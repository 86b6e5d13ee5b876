#include "qmlp/pauli.hpp"

#include <Eigen/Eigenvalues>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace qmlp {

double PauliHamiltonian::coeff_l1() const {
  double s = 0.0;
  for (const auto& t : terms) s += std::abs(t.coeff);
  return s;
}

void PauliHamiltonian::validate() const {
  if (n_qubits < 1) throw std::invalid_argument("hamiltonian: n_qubits must be >= 1");
  std::map<std::string, int> seen;
  for (const auto& t : terms) {
    if (!std::isfinite(t.coeff)) throw std::invalid_argument("hamiltonian: non-finite coefficient");
    if (static_cast<int>(t.ops.size()) != n_qubits) {
      throw std::invalid_argument("hamiltonian: string length != n_qubits");
    }
    for (char c : t.ops) {
      if (c != 'I' && c != 'X' && c != 'Y' && c != 'Z') {
        throw std::invalid_argument(std::string("hamiltonian: bad Pauli character '") + c + "'");
      }
    }
    if (seen.count(t.ops)) throw std::invalid_argument("hamiltonian: duplicate string " + t.ops);
    seen[t.ops] = 1;
  }
}

PauliHamiltonian PauliHamiltonian::parse(std::istream& in, const std::string& name) {
  PauliHamiltonian h;
  std::map<std::string, double> merged;
  std::vector<std::string> order;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ss(line);
    std::string first;
    if (!(ss >> first) || first[0] == '#') continue;
    double coeff;
    try {
      std::size_t pos = 0;
      coeff = std::stod(first, &pos);
      if (pos != first.size()) throw std::invalid_argument(first);
    } catch (const std::exception&) {
      throw std::runtime_error(name + ":" + std::to_string(lineno) + ": expected coefficient, got '" +
                               first + "'");
    }
    std::string ops;
    if (!(ss >> ops)) {
      throw std::runtime_error(name + ":" + std::to_string(lineno) + ": missing Pauli string");
    }
    for (char c : ops) {
      if (c != 'I' && c != 'X' && c != 'Y' && c != 'Z') {
        throw std::runtime_error(name + ":" + std::to_string(lineno) +
                                 ": bad Pauli character '" + std::string(1, c) + "'");
      }
    }
    if (h.n_qubits == 0) {
      h.n_qubits = static_cast<int>(ops.size());
    } else if (static_cast<int>(ops.size()) != h.n_qubits) {
      throw std::runtime_error(name + ":" + std::to_string(lineno) +
                               ": inconsistent Pauli string length");
    }
    if (!merged.count(ops)) order.push_back(ops);
    merged[ops] += coeff;
  }
  if (merged.empty()) throw std::runtime_error(name + ": no Hamiltonian terms");
  for (const auto& ops : order) {
    if (merged[ops] != 0.0) h.terms.push_back({merged[ops], ops});
  }
  h.validate();
  return h;
}

PauliHamiltonian PauliHamiltonian::parse(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open hamiltonian file: " + path);
  return parse(in, path);
}

void PauliHamiltonian::save(const std::string& path) const {
  validate();
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  char buf[40];
  for (const auto& t : terms) {
    std::snprintf(buf, sizeof(buf), "%.16e", t.coeff);
    out << buf << " " << t.ops << "\n";
  }
}

PauliAction PauliAction::from_string(const std::string& ops) {
  PauliAction a;
  for (std::size_t q = 0; q < ops.size(); ++q) {
    switch (ops[q]) {
      case 'X': a.flip_mask |= 1ull << q; break;
      case 'Y':
        a.flip_mask |= 1ull << q;
        a.z_mask |= 1ull << q;
        ++a.n_y;
        break;
      case 'Z': a.z_mask |= 1ull << q; break;
      default: break;
    }
  }
  return a;
}

void apply_pauli(const PauliTerm& term, const Eigen::VectorXcd& in, Eigen::VectorXcd& out) {
  const PauliAction a = PauliAction::from_string(term.ops);
  const std::complex<double> iphase[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  const std::complex<double> base = iphase[a.n_y % 4];
  out.resize(in.size());
  for (std::int64_t x = 0; x < in.size(); ++x) {
    // Y|b> = i(-1)^b |1-b>, Z|b> = (-1)^b |b>; phases collected from the
    // source basis state
    int parity = std::popcount(static_cast<std::uint64_t>(x) & a.z_mask) & 1;
    std::complex<double> phase = parity ? -base : base;
    out[x ^ a.flip_mask] = phase * in[x];
  }
}

double pauli_expectation(const PauliTerm& term, const Eigen::VectorXcd& state) {
  const PauliAction a = PauliAction::from_string(term.ops);
  const std::complex<double> iphase[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  const std::complex<double> base = iphase[a.n_y % 4];
  std::complex<double> acc = 0.0;
  for (std::int64_t x = 0; x < state.size(); ++x) {
    int parity = std::popcount(static_cast<std::uint64_t>(x) & a.z_mask) & 1;
    std::complex<double> phase = parity ? -base : base;
    acc += std::conj(state[x ^ a.flip_mask]) * phase * state[x];
  }
  return acc.real();
}

double expectation(const Eigen::VectorXcd& state, const PauliHamiltonian& h) {
  h.validate();
  if (state.size() != (1ll << h.n_qubits)) {
    throw std::invalid_argument("expectation: state dimension mismatch");
  }
  double e = 0.0;
  for (const auto& t : h.terms) e += t.coeff * pauli_expectation(t, state);
  return e;
}

double variance(const Eigen::VectorXcd& state, const PauliHamiltonian& h, VarianceMode mode) {
  h.validate();
  if (mode == VarianceMode::UpperBound) {
    double l1 = h.coeff_l1();
    return l1 * l1;
  }
  if (state.size() != (1ll << h.n_qubits)) {
    throw std::invalid_argument("variance: state dimension mismatch");
  }
  double var = 0.0;
  for (const auto& t : h.terms) {
    double p = pauli_expectation(t, state);
    var += t.coeff * t.coeff * (1.0 - p * p);
  }
  return var;
}

Eigen::MatrixXcd PauliHamiltonian::to_matrix() const {
  validate();
  if (n_qubits > 12) {
    throw std::invalid_argument("hamiltonian: dense matrix limited to 12 qubits");
  }
  const std::int64_t dim = 1ll << n_qubits;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  const std::complex<double> iphase[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  for (const auto& t : terms) {
    const PauliAction a = PauliAction::from_string(t.ops);
    const std::complex<double> base = t.coeff * iphase[a.n_y % 4];
    for (std::int64_t x = 0; x < dim; ++x) {
      int parity = std::popcount(static_cast<std::uint64_t>(x) & a.z_mask) & 1;
      m(x ^ a.flip_mask, x) += parity ? -base : base;
    }
  }
  return m;
}

std::pair<double, Eigen::VectorXcd> exact_ground_state(const PauliHamiltonian& h) {
  Eigen::MatrixXcd m = h.to_matrix();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("exact_ground_state: eigensolver failed");
  }
  return {solver.eigenvalues()(0), solver.eigenvectors().col(0)};
}

}  // namespace qmlp
