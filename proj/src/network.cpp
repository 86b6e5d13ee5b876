#include "qmlp/network.hpp"

#include <cmath>
#include <stdexcept>

namespace qmlp {

FeedForward FeedForward::init(const std::vector<int>& widths, Rng& rng) {
  if (widths.size() < 2) throw std::invalid_argument("network: need at least input and output");
  if (widths.back() != 1) throw std::invalid_argument("network: output width must be 1");
  for (int w : widths) {
    if (w < 1) throw std::invalid_argument("network: layer width must be positive");
  }
  FeedForward net;
  for (std::size_t l = 1; l < widths.size(); ++l) {
    Eigen::MatrixXd w(widths[l], widths[l - 1]);
    double bound = 1.0 / std::sqrt(static_cast<double>(widths[l - 1]));
    for (int i = 0; i < w.rows(); ++i) {
      for (int j = 0; j < w.cols(); ++j) w(i, j) = rng.uniform(-bound, bound);
    }
    net.weights_.push_back(std::move(w));
    net.biases_.push_back(Eigen::VectorXd::Zero(widths[l]));
  }
  return net;
}

long FeedForward::n_params() const {
  long n = 0;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    n += weights_[l].size() + biases_[l].size();
  }
  return n;
}

double FeedForward::forward(const Eigen::VectorXd& x) const {
  Trace t;
  return forward(x, t);
}

double FeedForward::forward(const Eigen::VectorXd& x, Trace& trace) const {
  if (x.size() != input_width()) throw std::invalid_argument("network: input width mismatch");
  const int L = n_layers();
  trace.a.resize(L + 1);
  trace.a[0] = x;
  for (int l = 0; l < L; ++l) {
    Eigen::VectorXd z = weights_[l] * trace.a[l] + biases_[l];
    trace.a[l + 1] = (l + 1 < L) ? z.array().tanh().matrix() : z;
  }
  return trace.a[L](0);
}

Eigen::VectorXd FeedForward::input_gradient(const Trace& trace) const {
  const int L = n_layers();
  Eigen::VectorXd delta = Eigen::VectorXd::Ones(1);
  for (int l = L - 1; l >= 0; --l) {
    Eigen::VectorXd up = weights_[l].transpose() * delta;
    if (l == 0) return up;
    delta = up.cwiseProduct(
        (1.0 - trace.a[l].array().square()).matrix());
  }
  return delta;  // unreachable for valid nets
}

void FeedForward::accumulate_gradient(const Trace& trace, double scale, Eigen::VectorXd& grad,
                                      long offset) const {
  const int L = n_layers();
  // offsets of each layer inside the flat block
  long pos = offset + n_params();
  Eigen::VectorXd delta = Eigen::VectorXd::Ones(1) * scale;
  for (int l = L - 1; l >= 0; --l) {
    pos -= weights_[l].size() + biases_[l].size();
    Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> gw(
        grad.data() + pos, weights_[l].rows(), weights_[l].cols());
    Eigen::Map<Eigen::VectorXd> gb(grad.data() + pos + weights_[l].size(), biases_[l].size());
    gw += delta * trace.a[l].transpose();
    gb += delta;
    if (l > 0) {
      delta = (weights_[l].transpose() * delta)
                  .cwiseProduct((1.0 - trace.a[l].array().square()).matrix());
    }
  }
}

void FeedForward::accumulate_directional_gradient(const Trace& trace,
                                                  const Eigen::VectorXd& tangent, double scale,
                                                  Eigen::VectorXd& grad, long offset) const {
  const int L = n_layers();
  if (tangent.size() != input_width()) {
    throw std::invalid_argument("network: tangent width mismatch");
  }

  // forward sweep of the directional derivative da[l] = d(a[l])/deps
  std::vector<Eigen::VectorXd> da(L + 1);
  da[0] = tangent;
  for (int l = 0; l < L; ++l) {
    Eigen::VectorXd dz = weights_[l] * da[l];
    da[l + 1] =
        (l + 1 < L) ? dz.cwiseProduct((1.0 - trace.a[l + 1].array().square()).matrix()) : dz;
  }

  // reverse sweep. r = adjoint of dz, s = adjoint of z.
  Eigen::VectorXd r = Eigen::VectorXd::Ones(1) * scale;
  Eigen::VectorXd s = Eigen::VectorXd::Zero(1);
  long pos = offset + n_params();
  for (int l = L - 1; l >= 0; --l) {
    pos -= weights_[l].size() + biases_[l].size();
    Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> gw(
        grad.data() + pos, weights_[l].rows(), weights_[l].cols());
    Eigen::Map<Eigen::VectorXd> gb(grad.data() + pos + weights_[l].size(), biases_[l].size());

    // dz_{l+1} = W_l da[l] and z_{l+1} = W_l a[l] + b_l
    gw += r * da[l].transpose() + s * trace.a[l].transpose();
    gb += s;

    if (l > 0) {
      Eigen::VectorXd wr = weights_[l].transpose() * r;
      Eigen::VectorXd ws = weights_[l].transpose() * s;
      Eigen::ArrayXd a = trace.a[l].array();
      Eigen::ArrayXd phi1 = 1.0 - a.square();            // tanh'
      Eigen::ArrayXd phi2 = -2.0 * a * phi1;             // tanh''
      // dz[l] (pre-activation tangent of this hidden layer) = da[l] / phi1;
      // recompute it directly to avoid dividing by ~0
      Eigen::VectorXd dz = weights_[l - 1] * da[l - 1];
      s = (ws.array() * phi1 + wr.array() * phi2 * dz.array()).matrix();
      r = (wr.array() * phi1).matrix();
    }
  }
}

Eigen::VectorXd FeedForward::to_flat() const {
  Eigen::VectorXd flat(n_params());
  long pos = 0;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    for (int i = 0; i < weights_[l].rows(); ++i) {
      for (int j = 0; j < weights_[l].cols(); ++j) flat(pos++) = weights_[l](i, j);
    }
    for (int i = 0; i < biases_[l].size(); ++i) flat(pos++) = biases_[l](i);
  }
  return flat;
}

void FeedForward::from_flat(const Eigen::VectorXd& flat) {
  if (flat.size() != n_params()) throw std::invalid_argument("network: flat size mismatch");
  long pos = 0;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    for (int i = 0; i < weights_[l].rows(); ++i) {
      for (int j = 0; j < weights_[l].cols(); ++j) weights_[l](i, j) = flat(pos++);
    }
    for (int i = 0; i < biases_[l].size(); ++i) biases_[l](i) = flat(pos++);
  }
}

void FeedForward::validate() const {
  if (weights_.empty()) throw std::invalid_argument("network: empty");
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    if (!weights_[l].allFinite() || !biases_[l].allFinite()) {
      throw std::invalid_argument("network: non-finite parameters");
    }
    if (weights_[l].rows() != biases_[l].size()) {
      throw std::invalid_argument("network: weight/bias shape mismatch");
    }
    if (l > 0 && weights_[l].cols() != weights_[l - 1].rows()) {
      throw std::invalid_argument("network: layer shape mismatch");
    }
  }
  if (weights_.back().rows() != 1) throw std::invalid_argument("network: output width must be 1");
}

}  // namespace qmlp
