#pragma once

#include <Eigen/Core>
#include <vector>

#include "qmlp/rng.hpp"

namespace qmlp {

/// Fully connected scalar-output network: tanh hidden layers, linear output
/// of width one. Used as the per-element atomic energy function.
class FeedForward {
 public:
  FeedForward() = default;

  /// widths = {input, hidden..., 1}; weights uniform in +-1/sqrt(fan_in),
  /// biases zero, drawn in declared order from the stream.
  static FeedForward init(const std::vector<int>& widths, Rng& rng);

  int input_width() const { return weights_.empty() ? 0 : static_cast<int>(weights_[0].cols()); }
  int n_layers() const { return static_cast<int>(weights_.size()); }
  long n_params() const;

  const std::vector<Eigen::MatrixXd>& weights() const { return weights_; }
  const std::vector<Eigen::VectorXd>& biases() const { return biases_; }

  /// Intermediate activations of one forward pass, reused by the gradient
  /// routines. a[0] is the input; a[l] the post-activation of layer l.
  struct Trace {
    std::vector<Eigen::VectorXd> a;
  };

  double forward(const Eigen::VectorXd& x) const;
  double forward(const Eigen::VectorXd& x, Trace& trace) const;

  /// dE/dx for the traced pass.
  Eigen::VectorXd input_gradient(const Trace& trace) const;

  /// grad += scale * dE/dtheta, flat layout (per layer: W row-major, then b).
  void accumulate_gradient(const Trace& trace, double scale, Eigen::VectorXd& grad,
                           long offset) const;

  /// grad += scale * d/dtheta (tangent . dE/dx) for the traced pass. This is
  /// the second-order term needed when the loss contains forces.
  void accumulate_directional_gradient(const Trace& trace, const Eigen::VectorXd& tangent,
                                       double scale, Eigen::VectorXd& grad, long offset) const;

  /// Flat parameter vector round trip (same layout as the gradients).
  Eigen::VectorXd to_flat() const;
  void from_flat(const Eigen::VectorXd& flat);

  void validate() const;

 private:
  std::vector<Eigen::MatrixXd> weights_;
  std::vector<Eigen::VectorXd> biases_;
};

}  // namespace qmlp
