#pragma once

#include <Eigen/Core>
#include <complex>
#include <iosfwd>
#include <string>
#include <vector>

namespace qmlp {

/// One weighted Pauli string. ops[q] is the operator on qubit q, i.e. the
/// leftmost character of the string acts on qubit 0.
struct PauliTerm {
  double coeff = 0.0;
  std::string ops;

  bool is_identity() const { return ops.find_first_not_of('I') == std::string::npos; }
};

/// Real-weighted sum of N-qubit Pauli strings.
struct PauliHamiltonian {
  int n_qubits = 0;
  std::vector<PauliTerm> terms;

  int n_terms() const { return static_cast<int>(terms.size()); }
  /// sum_k |c_k|
  double coeff_l1() const;
  void validate() const;

  /// Text format: one `<coefficient> <pauli_string>` per line, `#` comments.
  /// Duplicate strings are merged by coefficient addition (exact zero sums
  /// are dropped).
  static PauliHamiltonian parse(const std::string& path);
  static PauliHamiltonian parse(std::istream& in, const std::string& name = "<stream>");
  void save(const std::string& path) const;

  /// Dense Hermitian matrix, basis index bit q = qubit q. n_qubits <= 12.
  Eigen::MatrixXcd to_matrix() const;
};

/// Lowest eigenvalue and eigenvector of the dense Hamiltonian (n <= 12).
std::pair<double, Eigen::VectorXcd> exact_ground_state(const PauliHamiltonian& h);

/// P|x> = phase * |x ^ flip_mask>; tabulated masks for fast application.
struct PauliAction {
  std::uint64_t flip_mask = 0;  // X and Y positions
  std::uint64_t z_mask = 0;     // Z and Y positions contribute (-1)^bit
  int n_y = 0;                  // each Y contributes a factor i
  static PauliAction from_string(const std::string& ops);
};

/// |out> = P|in>
void apply_pauli(const PauliTerm& term, const Eigen::VectorXcd& in, Eigen::VectorXcd& out);

/// <state| P |state> (real for Hermitian P).
double pauli_expectation(const PauliTerm& term, const Eigen::VectorXcd& state);

/// <state| H |state> = sum_k c_k <P_k>, exact (no sampling).
double expectation(const Eigen::VectorXcd& state, const PauliHamiltonian& h);

enum class VarianceMode { PerTerm, UpperBound };

/// PerTerm: sum_k |c_k|^2 (1 - <P_k>^2). UpperBound: (sum_k |c_k|)^2,
/// independent of the state.
double variance(const Eigen::VectorXcd& state, const PauliHamiltonian& h, VarianceMode mode);

}  // namespace qmlp
