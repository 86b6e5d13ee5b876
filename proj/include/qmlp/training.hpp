#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "qmlp/mlp.hpp"
#include "qmlp/structure.hpp"

namespace qmlp {

/// Training hyperparameters. beta = 0 disables force training. When no
/// explicit validation set is passed to train(), validation_split of the
/// training data is held out (seeded shuffle).
struct TrainConfig {
  int max_epochs = 2000;
  int batch_size = 0;          // 0 = full batch
  double learning_rate = 1e-3;
  double lr_decay = 1.0;       // per-epoch multiplicative schedule
  double beta = 0.0;
  double validation_split = 0.2;
  int patience = 50;           // early stop after this many non-improving epochs
  std::uint64_t seed = 0;

  void validate() const;
};

struct EpochStats {
  int epoch = 0;
  double loss = 0.0;
  double train_rmse_e = 0.0;  // Hartree/atom
  double val_rmse_e = 0.0;    // Hartree/atom
};

struct TrainResult {
  MlpModel model;  // parameters of the best validation epoch
  std::vector<EpochStats> history;
  int best_epoch = -1;
  double best_val_rmse = 0.0;
};

/// Adam on the normalized-label loss; returns the parameters with the lowest
/// validation energy RMSE seen. Deterministic under fixed seeds (single
/// threaded, fixed reduction order). Throws on NaN loss.
TrainResult train(const MlpModel& model, const Dataset& train_set, const Dataset& val_set,
                  const TrainConfig& config);

/// Split variant: holds out config.validation_split of train_set.
TrainResult train(const MlpModel& model, const Dataset& train_set, const TrainConfig& config);

}  // namespace qmlp
