#pragma once

#include <Eigen/Core>
#include <cstdint>

#include "qmlp/noise_model.hpp"
#include "qmlp/sampling.hpp"

namespace qmlp {

/// Flips each measured bit independently with the model's confusion rates.
/// Deterministic under the seed.
CountMap apply_readout(const CountMap& counts, int n_qubits, const NoiseModel& noise,
                       std::uint64_t seed);

/// Exact calibration matrix A(i, j) = p(measure i | prepared j) for
/// independent per-qubit confusion; tensor product of 2x2 blocks.
Eigen::MatrixXd calibration_matrix(const NoiseModel& noise, int n_qubits);

/// Corrected outcome distribution: nonnegative least squares fit of
/// A x ~ measured frequencies, renormalized onto the probability simplex.
/// Throws if the calibration matrix is singular.
Eigen::VectorXd mitigate_readout(const CountMap& counts, const Eigen::MatrixXd& calibration);

/// min ||A x - b||_2 subject to x >= 0 (Lawson-Hanson active set).
Eigen::VectorXd nnls(const Eigen::MatrixXd& a, const Eigen::VectorXd& b);

}  // namespace qmlp
