#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qmlp/datagen.hpp"
#include "qmlp/structure.hpp"
#include "qmlp/symfunc.hpp"
#include "qmlp/training.hpp"
#include "qmlp/vqe.hpp"

namespace qmlp {

/// Candidate descriptor generation knobs shared by the studies.
struct DescriptorParams {
  double r_c = 12.0;
  int n_radial = 3;
  int n_eta_angular = 1;
  std::vector<double> zetas = {1.0, 4.0, 16.0};

  DescriptorSet build_for(const Dataset& data) const;  // build + fit scaling
};

/// Grid sweep configuration. Noise levels are stored in internal units
/// (Hartree/atom and Hartree/Bohr); a zero entry (the noiseless reference
/// cell) is prepended automatically when missing. For the dataset-size sweep
/// the delta_f grid is replaced by `sizes`.
struct SweepConfig {
  std::vector<double> delta_e;
  std::vector<double> delta_f = {0.0};
  std::vector<int> sizes;
  int repeats = 3;
  int threads = 1;
  std::uint64_t master_seed = 0;
  TrainConfig train;
  std::vector<int> hidden = {25, 25};
  DescriptorParams descriptors;
};

struct SweepCell {
  double delta_e = 0.0;
  double delta_f = 0.0;
  int size = 0;  // dataset-size sweep only
  std::vector<double> rmse_e;  // one per repeat, Hartree/atom
  std::vector<double> rmse_f;  // empty when force labels are absent
  std::vector<std::uint64_t> seeds;

  double mean_e() const;
  double std_e() const;
  double mean_f() const;
  double std_f() const;
};

struct SweepResult {
  std::vector<SweepCell> cells;
  bool has_force_metric = false;
  bool size_sweep = false;
};

/// Fig.-2-style grid: per (delta_E, delta_F) cell and repeat, inject noise
/// into the training labels, train, evaluate against the untouched clean
/// validation set.
SweepResult run_noise_sweep(const Dataset& train_pool, const Dataset& validation,
                            const SweepConfig& config);

/// Grid over (delta_E, training-set size); subsets are CUR row selections of
/// the scaled-descriptor feature matrix (nested: size s takes the first s
/// picks). Energy-only training (beta forced to 0).
SweepResult run_dataset_size_sweep(const Dataset& train_pool, const Dataset& validation,
                                   const SweepConfig& config);

/// Summary + per-structure CSV rows of the noise-sweep results. Columns, in
/// order: grid coordinates, metric means, metric stds, seeds. Refuses
/// non-finite results. Writes <prefix>_summary.csv and <prefix>_raw.csv.
void emit_report(const SweepResult& result, const std::string& prefix);

/// Optimization-noise study: label train/validation structures with
/// budget-capped VQE, train an MLP on the labels, compare label and MLP
/// errors against exact diagonalization.
struct OptNoiseConfig {
  std::string ham_dir_train;
  std::string ham_dir_val;
  AnsatzKind ansatz = AnsatzKind::H2Minimal;
  int depth = 1;
  long budget = 60;  // optimizer evaluations per VQE run (the cap)
  int restarts = 1;
  int repeats = 1;  // VQE runs averaged per structure
  std::uint64_t master_seed = 0;
  TrainConfig train;
  std::vector<int> hidden = {25, 25};
  DescriptorParams descriptors;
};

struct OptNoiseRow {
  int index = 0;
  double exact_e = 0.0;
  double label_e = 0.0;
  double mlp_e = 0.0;
};

struct OptNoiseResult {
  std::vector<OptNoiseRow> rows;  // validation structures
  // residual statistics per atom (Hartree/atom)
  double label_rmse = 0.0, label_std = 0.0, label_mean = 0.0;
  double mlp_rmse = 0.0, mlp_std = 0.0, mlp_mean = 0.0;
};

OptNoiseResult run_optimization_noise_study(const Dataset& train_structs,
                                            const Dataset& val_structs,
                                            const OptNoiseConfig& config);

void emit_report(const OptNoiseResult& result, const std::string& prefix);

/// Hardware-noise study on the bundled H2 grid: a T1 = T2 sweep of
/// coherence-limited gate errors, a readout study at baseline and reduced
/// rates, and a calibration-matrix mitigation comparison.
struct HwNoiseConfig {
  std::string h2_grid_dir = "data/h2";
  std::vector<double> t1_grid_us = {100, 200, 400, 800, 1600, 2000};
  int n_sets = 5;           // independent training sets per noise level
  int configs_per_set = 20;
  int select_pool = 120;    // random pool size per set before CUR selection
  long readout_shots = 100000;
  long vqe_budget = 160;
  std::uint64_t master_seed = 0;
  TrainConfig train;
  std::vector<int> hidden = {25, 25};
  DescriptorParams descriptors;
  double readout_reduction = 0.01;
};

struct GateErrorPoint {
  double t1_us = 0.0;
  double label_rmse = 0.0;     // noisy vs noiseless-VQE validation labels
  double mlp_rmse_mean = 0.0;  // over the independent training sets
  double mlp_rmse_std = 0.0;
  double ref_mlp_rmse_mean = 0.0;  // MLPs trained on noiseless labels
};

struct ReadoutCase {
  std::string name;
  double label_rmse = 0.0;  // labels vs noiseless-VQE labels
  double mlp_rmse = 0.0;    // MLP vs noiseless-VQE validation labels
};

struct MitigationRow {
  int index = 0;
  double bond_length = 0.0;
  double exact_e = 0.0;
  double unmitigated_e = 0.0;
  double mitigated_e = 0.0;
};

struct HwNoiseResult {
  std::vector<GateErrorPoint> gate_curve;
  std::vector<ReadoutCase> readout_cases;
  std::vector<MitigationRow> mitigation;
};

HwNoiseResult run_hardware_noise_study(const HwNoiseConfig& config);

void emit_report(const HwNoiseResult& result, const std::string& prefix);

/// CUR configuration selection from a generated pool: greedy row picks on
/// the scaled-descriptor feature matrix (geometry only, labels not needed).
/// Pads with the first unpicked pool entries if the residual vanishes early.
GeneratedH2 cur_select(const GeneratedH2& pool, const DescriptorParams& descriptors, int n);

/// Deterministic job pool: results must be written to per-index slots.
void parallel_for(int n_jobs, int threads, const std::function<void(int)>& fn);

}  // namespace qmlp
