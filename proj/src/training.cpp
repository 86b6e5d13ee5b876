#include "qmlp/training.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "qmlp/rng.hpp"

namespace qmlp {

void TrainConfig::validate() const {
  if (max_epochs < 0) throw std::invalid_argument("train config: max_epochs must be >= 0");
  if (batch_size < 0) throw std::invalid_argument("train config: batch_size must be >= 0");
  if (!(learning_rate > 0.0)) throw std::invalid_argument("train config: learning rate <= 0");
  if (!(lr_decay > 0.0) || lr_decay > 1.0) {
    throw std::invalid_argument("train config: lr_decay must be in (0, 1]");
  }
  if (beta < 0.0) throw std::invalid_argument("train config: beta must be >= 0");
  if (validation_split < 0.0 || validation_split >= 1.0) {
    throw std::invalid_argument("train config: validation_split must be in [0, 1)");
  }
  if (patience < 1) throw std::invalid_argument("train config: patience must be >= 1");
}

TrainResult train(const MlpModel& model, const Dataset& train_set, const Dataset& val_set,
                  const TrainConfig& config) {
  config.validate();
  model.validate();
  if (train_set.empty()) throw std::invalid_argument("train: empty training set");
  if (val_set.empty()) throw std::invalid_argument("train: empty validation set");
  if (!train_set.all_have_energy() || !val_set.all_have_energy()) {
    throw std::invalid_argument("train: missing energy labels");
  }
  if (config.beta > 0.0 && !train_set.all_have_forces()) {
    throw std::invalid_argument("train: beta > 0 requires force labels");
  }

  TrainResult result;
  result.model = model;
  if (config.max_epochs == 0) return result;

  MlpModel current = model;
  Eigen::VectorXd theta = current.to_flat();
  Eigen::VectorXd m = Eigen::VectorXd::Zero(theta.size());
  Eigen::VectorXd v = Eigen::VectorXd::Zero(theta.size());
  const double b1 = 0.9, b2 = 0.999, eps = 1e-8;
  long step = 0;
  double lr = config.learning_rate;

  Rng rng(config.seed);
  std::vector<int> order(train_set.size());
  for (int i = 0; i < train_set.size(); ++i) order[i] = i;
  const int batch = config.batch_size > 0
                        ? std::min(config.batch_size, train_set.size())
                        : train_set.size();

  Eigen::VectorXd best_theta = theta;
  double best_val = std::numeric_limits<double>::infinity();
  int best_epoch = -1;
  int stall = 0;

  for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
    rng.shuffle(order);
    double epoch_loss = 0.0;
    int n_batches = 0;
    for (int start = 0; start < train_set.size(); start += batch) {
      int stop = std::min(start + batch, train_set.size());
      std::vector<int> idx(order.begin() + start, order.begin() + stop);
      LossResult lr_res = loss_and_gradients(current, train_set, idx, config.beta);
      if (!std::isfinite(lr_res.loss)) {
        throw std::runtime_error("train: NaN loss at epoch " + std::to_string(epoch));
      }
      epoch_loss += lr_res.loss;
      ++n_batches;

      ++step;
      m = b1 * m + (1.0 - b1) * lr_res.gradient;
      v = b2 * v + (1.0 - b2) * lr_res.gradient.cwiseAbs2();
      double c1 = 1.0 - std::pow(b1, static_cast<double>(step));
      double c2 = 1.0 - std::pow(b2, static_cast<double>(step));
      theta.array() -=
          lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
      current.from_flat(theta);
    }
    lr *= config.lr_decay;

    EpochStats stats;
    stats.epoch = epoch;
    stats.loss = epoch_loss / std::max(1, n_batches);
    stats.train_rmse_e = evaluate(current, train_set).rmse_energy;
    stats.val_rmse_e = evaluate(current, val_set).rmse_energy;
    result.history.push_back(stats);

    if (stats.val_rmse_e < best_val) {
      best_val = stats.val_rmse_e;
      best_theta = theta;
      best_epoch = epoch;
      stall = 0;
    } else if (++stall >= config.patience) {
      break;
    }
  }

  result.model.from_flat(best_theta);
  result.best_epoch = best_epoch;
  result.best_val_rmse = best_val;
  return result;
}

TrainResult train(const MlpModel& model, const Dataset& train_set, const TrainConfig& config) {
  config.validate();
  if (train_set.size() < 2) throw std::invalid_argument("train: need >= 2 structures to split");
  int n_val = static_cast<int>(std::round(config.validation_split * train_set.size()));
  n_val = std::max(1, std::min(n_val, train_set.size() - 1));

  std::vector<int> order(train_set.size());
  for (int i = 0; i < train_set.size(); ++i) order[i] = i;
  Rng rng(Rng::derive(config.seed, 0xC0FFEE).next_u64());
  rng.shuffle(order);

  std::vector<int> val_idx(order.begin(), order.begin() + n_val);
  std::vector<int> train_idx(order.begin() + n_val, order.end());
  return train(model, subsample(train_set, train_idx), subsample(train_set, val_idx), config);
}

}  // namespace qmlp
