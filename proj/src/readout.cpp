#include "qmlp/readout.hpp"

#include <Eigen/Dense>
#include <stdexcept>

#include "qmlp/rng.hpp"

namespace qmlp {

CountMap apply_readout(const CountMap& counts, int n_qubits, const NoiseModel& noise,
                       std::uint64_t seed) {
  noise.validate();
  if (!noise.has_readout_error()) return counts;
  Rng rng(seed);
  CountMap out;
  for (const auto& [outcome, count] : counts) {
    for (long shot = 0; shot < count; ++shot) {
      std::uint64_t corrupted = outcome;
      for (int q = 0; q < n_qubits; ++q) {
        bool bit = (outcome >> q) & 1;
        double p_flip = bit ? noise.readout_p01 : noise.readout_p10;
        if (p_flip > 0.0 && rng.uniform() < p_flip) corrupted ^= 1ull << q;
      }
      ++out[corrupted];
    }
  }
  return out;
}

Eigen::MatrixXd calibration_matrix(const NoiseModel& noise, int n_qubits) {
  noise.validate();
  Eigen::Matrix2d q;
  // columns = prepared state, rows = measured value
  q(0, 0) = 1.0 - noise.readout_p10;
  q(1, 0) = noise.readout_p10;
  q(0, 1) = noise.readout_p01;
  q(1, 1) = 1.0 - noise.readout_p01;

  Eigen::MatrixXd a = Eigen::MatrixXd::Ones(1, 1);
  for (int k = 0; k < n_qubits; ++k) {
    // qubit k toggles bit k of the index: kron with the 2x2 block so that the
    // new bit is the most significant of the accumulated index
    Eigen::MatrixXd next(a.rows() * 2, a.cols() * 2);
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        next.block(i * a.rows(), j * a.cols(), a.rows(), a.cols()) = q(i, j) * a;
      }
    }
    a = next;
  }
  return a;
}

Eigen::VectorXd nnls(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
  const int n = static_cast<int>(a.cols());
  std::vector<bool> passive(n, false);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd w = a.transpose() * (b - a * x);

  const double tol = 1e-12 * a.norm() * std::max(1.0, b.norm());
  int iterations = 0;
  const int max_iterations = 3 * n * std::max(10, n);

  while (iterations++ < max_iterations) {
    int best = -1;
    double best_w = tol;
    for (int i = 0; i < n; ++i) {
      if (!passive[i] && w[i] > best_w) {
        best_w = w[i];
        best = i;
      }
    }
    if (best < 0) break;  // KKT satisfied
    passive[best] = true;

    while (true) {
      // least squares on the passive set
      std::vector<int> idx;
      for (int i = 0; i < n; ++i) {
        if (passive[i]) idx.push_back(i);
      }
      Eigen::MatrixXd ap(a.rows(), idx.size());
      for (std::size_t c = 0; c < idx.size(); ++c) ap.col(c) = a.col(idx[c]);
      Eigen::VectorXd z = ap.colPivHouseholderQr().solve(b);

      bool feasible = true;
      for (int c = 0; c < z.size(); ++c) {
        if (z[c] <= 0.0) {
          feasible = false;
          break;
        }
      }
      if (feasible) {
        x.setZero();
        for (std::size_t c = 0; c < idx.size(); ++c) x[idx[c]] = z[c];
        break;
      }
      // step toward z until the first passive variable hits zero
      double alpha = 1.0;
      for (std::size_t c = 0; c < idx.size(); ++c) {
        if (z[c] <= 0.0) {
          double xi = x[idx[c]];
          if (xi - z[c] > 0.0) alpha = std::min(alpha, xi / (xi - z[c]));
        }
      }
      for (std::size_t c = 0; c < idx.size(); ++c) {
        x[idx[c]] += alpha * (z[c] - x[idx[c]]);
        if (x[idx[c]] <= 1e-14) {
          x[idx[c]] = 0.0;
          passive[idx[c]] = false;
        }
      }
    }
    w = a.transpose() * (b - a * x);
  }
  return x;
}

Eigen::VectorXd mitigate_readout(const CountMap& counts, const Eigen::MatrixXd& calibration) {
  if (calibration.rows() != calibration.cols()) {
    throw std::invalid_argument("mitigation: calibration matrix must be square");
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(calibration);
  const auto& sv = svd.singularValues();
  if (sv(sv.size() - 1) < 1e-12 * sv(0)) {
    throw std::invalid_argument("mitigation: singular calibration matrix");
  }

  long total = 0;
  for (const auto& [outcome, count] : counts) total += count;
  if (total <= 0) throw std::invalid_argument("mitigation: empty counts");

  Eigen::VectorXd measured = Eigen::VectorXd::Zero(calibration.rows());
  for (const auto& [outcome, count] : counts) {
    if (outcome >= static_cast<std::uint64_t>(calibration.rows())) {
      throw std::invalid_argument("mitigation: outcome outside calibration dimension");
    }
    measured[static_cast<long>(outcome)] = static_cast<double>(count) / total;
  }

  Eigen::VectorXd x = nnls(calibration, measured);
  double sum = x.sum();
  if (sum <= 0.0) throw std::runtime_error("mitigation: degenerate corrected distribution");
  return x / sum;
}

}  // namespace qmlp
