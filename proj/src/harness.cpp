#include "qmlp/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "qmlp/cur.hpp"
#include "qmlp/density.hpp"
#include "qmlp/metrics.hpp"
#include "qmlp/noise.hpp"
#include "qmlp/rng.hpp"
#include "qmlp/statevector.hpp"
#include "qmlp/units.hpp"

namespace qmlp {

namespace {

double vec_mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / v.size();
}

double vec_std(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  double m = vec_mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / (v.size() - 1));
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

void check_finite(double v, const std::string& where) {
  if (!std::isfinite(v)) throw std::runtime_error("report: non-finite value in " + where);
}

std::ofstream open_csv(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open report file: " + path);
  return out;
}

std::vector<double> with_zero_first(std::vector<double> grid) {
  std::sort(grid.begin(), grid.end());
  if (grid.empty() || grid.front() > 0.0) grid.insert(grid.begin(), 0.0);
  return grid;
}

// One trained model from a (possibly noisy) labeled training set. Model
// selection follows the procedure of picking the epoch with the lowest
// energy RMSE on the given validation set.
MlpModel train_on(const Dataset& labeled_train, const Dataset& val_select,
                  const DescriptorSet& set, const std::vector<int>& hidden,
                  const TrainConfig& cfg, std::uint64_t seed) {
  NormParams norm = compute_normalization(labeled_train);
  MlpArchitecture arch = MlpArchitecture::for_descriptors(set, hidden);
  MlpModel model = init_model(arch, set, norm, Rng::derive(seed, 0x11).next_u64());
  TrainConfig tc = cfg;
  tc.seed = Rng::derive(seed, 0x22).next_u64();
  return train(model, labeled_train, val_select, tc).model;
}

}  // namespace

DescriptorSet DescriptorParams::build_for(const Dataset& data) const {
  std::set<std::string> elems;
  for (const auto& s : data.structures) {
    for (const auto& e : s.species) elems.insert(e);
  }
  DescriptorSet set = build_descriptor_set(std::vector<std::string>(elems.begin(), elems.end()),
                                           n_radial, n_eta_angular, zetas, r_c);
  return fit_scaling(data, set);
}

double SweepCell::mean_e() const { return vec_mean(rmse_e); }
double SweepCell::std_e() const { return vec_std(rmse_e); }
double SweepCell::mean_f() const { return vec_mean(rmse_f); }
double SweepCell::std_f() const { return vec_std(rmse_f); }

GeneratedH2 cur_select(const GeneratedH2& pool, const DescriptorParams& descriptors, int n) {
  if (n < 1 || n > pool.data.size()) {
    throw std::invalid_argument("cur_select: n outside [1, pool size]");
  }
  DescriptorSet set = descriptors.build_for(pool.data);
  std::set<std::string> elems;
  for (const auto& s : pool.data.structures) {
    for (const auto& e : s.species) elems.insert(e);
  }
  Eigen::MatrixXd joined(pool.data.size(), 0);
  for (const auto& e : elems) {
    FeatureMatrix fm = build_feature_matrix(pool.data, set, e);
    Eigen::MatrixXd tmp(pool.data.size(), joined.cols() + fm.values.cols());
    tmp << joined, fm.values;
    joined = tmp;
  }
  FeatureMatrix features;
  features.values = joined;
  SelectionResult picks = select_rows(features, n, 1);
  std::vector<int> idx = picks.indices;
  std::set<int> chosen(idx.begin(), idx.end());
  for (int i = 0; i < pool.data.size() && static_cast<int>(idx.size()) < n; ++i) {
    if (!chosen.count(i)) idx.push_back(i);
  }
  GeneratedH2 out;
  out.data = subsample(pool.data, idx);
  for (int i : idx) out.grid_index.push_back(pool.grid_index[i]);
  return out;
}

void parallel_for(int n_jobs, int threads, const std::function<void(int)>& fn) {
  if (threads <= 1 || n_jobs <= 1) {
    for (int i = 0; i < n_jobs; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&]() {
    while (true) {
      int i = next.fetch_add(1);
      if (i >= n_jobs) break;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  int n_threads = std::min(threads, n_jobs);
  pool.reserve(n_threads);
  for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

SweepResult run_noise_sweep(const Dataset& train_pool, const Dataset& validation,
                            const SweepConfig& config) {
  if (train_pool.empty() || validation.empty()) {
    throw std::invalid_argument("noise sweep: empty dataset");
  }
  if (!train_pool.all_have_energy() || !validation.all_have_energy()) {
    throw std::invalid_argument("noise sweep: clean labels required on both sets");
  }

  std::vector<double> grid_e = with_zero_first(config.delta_e);
  std::vector<double> grid_f = with_zero_first(config.delta_f);
  bool want_force_noise = grid_f.size() > 1;
  if (want_force_noise && !train_pool.all_have_forces()) {
    throw std::invalid_argument("noise sweep: force-noise grid needs force labels");
  }

  DescriptorSet set = config.descriptors.build_for(train_pool);

  SweepResult result;
  result.has_force_metric = config.train.beta > 0.0 && validation.all_have_forces();
  const int n_cells = static_cast<int>(grid_e.size() * grid_f.size());
  result.cells.resize(n_cells);
  for (std::size_t ie = 0; ie < grid_e.size(); ++ie) {
    for (std::size_t jf = 0; jf < grid_f.size(); ++jf) {
      auto& cell = result.cells[ie * grid_f.size() + jf];
      cell.delta_e = grid_e[ie];
      cell.delta_f = grid_f[jf];
      cell.rmse_e.resize(config.repeats);
      if (result.has_force_metric) cell.rmse_f.resize(config.repeats);
      cell.seeds.resize(config.repeats);
    }
  }

  const int jobs = n_cells * config.repeats;
  parallel_for(jobs, config.threads, [&](int job) {
    const int cell_id = job / config.repeats;
    const int repeat = job % config.repeats;
    auto& cell = result.cells[cell_id];
    std::uint64_t seed =
        Rng::derive(config.master_seed, (static_cast<std::uint64_t>(cell_id) << 16) | repeat)
            .next_u64();
    try {
      Dataset noisy = inject_noise(train_pool, {cell.delta_e, cell.delta_f, seed});
      MlpModel model = train_on(noisy, validation, set, config.hidden, config.train, seed);
      EvalResult ev = evaluate(model, validation);
      cell.rmse_e[repeat] = ev.rmse_energy;
      if (result.has_force_metric) cell.rmse_f[repeat] = ev.rmse_forces.value_or(0.0);
      cell.seeds[repeat] = seed;
    } catch (const std::exception& e) {
      throw std::runtime_error("noise sweep cell (delta_e=" + fmt(cell.delta_e) +
                               ", delta_f=" + fmt(cell.delta_f) + ", repeat " +
                               std::to_string(repeat) + "): " + e.what());
    }
  });
  return result;
}

SweepResult run_dataset_size_sweep(const Dataset& train_pool, const Dataset& validation,
                                   const SweepConfig& config) {
  if (config.sizes.empty()) throw std::invalid_argument("size sweep: no sizes given");
  for (int s : config.sizes) {
    if (s < 2 || s > train_pool.size()) {
      throw std::invalid_argument("size sweep: size " + std::to_string(s) +
                                  " outside [2, pool size]");
    }
  }
  DescriptorSet set = config.descriptors.build_for(train_pool);

  // one greedy CUR row selection; size s uses the first s picks
  std::set<std::string> elems;
  for (const auto& s : train_pool.structures) {
    for (const auto& e : s.species) elems.insert(e);
  }
  Eigen::MatrixXd joined(train_pool.size(), 0);
  for (const auto& e : elems) {
    FeatureMatrix fm = build_feature_matrix(train_pool, set, e);
    Eigen::MatrixXd tmp(train_pool.size(), joined.cols() + fm.values.cols());
    tmp << joined, fm.values;
    joined = tmp;
  }
  FeatureMatrix pool_features;
  pool_features.values = joined;
  int max_size = *std::max_element(config.sizes.begin(), config.sizes.end());
  SelectionResult picks = select_rows(pool_features, max_size, 1);
  if (static_cast<int>(picks.indices.size()) < max_size) {
    // residual vanished early; pad with unpicked indices in order
    std::set<int> chosen(picks.indices.begin(), picks.indices.end());
    for (int i = 0; i < train_pool.size() && static_cast<int>(picks.indices.size()) < max_size;
         ++i) {
      if (!chosen.count(i)) picks.indices.push_back(i);
    }
  }

  std::vector<double> grid_e = with_zero_first(config.delta_e);
  SweepConfig inner = config;
  inner.train.beta = 0.0;  // energy-only by contract

  SweepResult result;
  result.size_sweep = true;
  result.cells.resize(grid_e.size() * config.sizes.size());
  for (std::size_t ie = 0; ie < grid_e.size(); ++ie) {
    for (std::size_t js = 0; js < config.sizes.size(); ++js) {
      auto& cell = result.cells[ie * config.sizes.size() + js];
      cell.delta_e = grid_e[ie];
      cell.size = config.sizes[js];
      cell.rmse_e.resize(config.repeats);
      cell.seeds.resize(config.repeats);
    }
  }

  const int jobs = static_cast<int>(result.cells.size()) * config.repeats;
  parallel_for(jobs, config.threads, [&](int job) {
    const int cell_id = job / config.repeats;
    const int repeat = job % config.repeats;
    auto& cell = result.cells[cell_id];
    std::uint64_t seed =
        Rng::derive(config.master_seed, 0x51ULL << 32 |
                                            (static_cast<std::uint64_t>(cell_id) << 16) | repeat)
            .next_u64();
    try {
      std::vector<int> idx(picks.indices.begin(), picks.indices.begin() + cell.size);
      Dataset subset = subsample(train_pool, idx);
      Dataset noisy = inject_noise(subset, {cell.delta_e, 0.0, seed});
      MlpModel model = train_on(noisy, validation, set, inner.hidden, inner.train, seed);
      cell.rmse_e[repeat] = evaluate(model, validation).rmse_energy;
      cell.seeds[repeat] = seed;
    } catch (const std::exception& e) {
      throw std::runtime_error("size sweep cell (delta_e=" + fmt(cell.delta_e) +
                               ", size=" + std::to_string(cell.size) + ", repeat " +
                               std::to_string(repeat) + "): " + e.what());
    }
  });
  return result;
}

void emit_report(const SweepResult& result, const std::string& prefix) {
  const char* coord2 = result.size_sweep ? "train_size" : "delta_f_ev_ang";
  auto coord2_value = [&](const SweepCell& c) {
    return result.size_sweep ? static_cast<double>(c.size) : units::au_to_ev_per_angstrom(c.delta_f);
  };

  std::ofstream summary = open_csv(prefix + "_summary.csv");
  summary << "delta_e_mev_atom," << coord2
          << ",rmse_e_mean_mev_atom,rmse_f_mean_ev_ang,rmse_e_std_mev_atom,rmse_f_std_ev_ang,"
             "seeds\n";
  for (const auto& c : result.cells) {
    for (double v : c.rmse_e) check_finite(v, "sweep cell");
    for (double v : c.rmse_f) check_finite(v, "sweep cell");
    summary << fmt(units::hartree_to_mev(c.delta_e)) << "," << fmt(coord2_value(c)) << ","
            << fmt(units::hartree_to_mev(c.mean_e())) << ","
            << fmt(c.rmse_f.empty() ? 0.0 : units::au_to_ev_per_angstrom(c.mean_f())) << ","
            << fmt(units::hartree_to_mev(c.std_e())) << ","
            << fmt(c.rmse_f.empty() ? 0.0 : units::au_to_ev_per_angstrom(c.std_f())) << ",";
    for (std::size_t i = 0; i < c.seeds.size(); ++i) {
      if (i) summary << ";";
      summary << c.seeds[i];
    }
    summary << "\n";
  }

  std::ofstream raw = open_csv(prefix + "_raw.csv");
  raw << "delta_e_mev_atom," << coord2 << ",repeat,seed,rmse_e_mev_atom,rmse_f_ev_ang\n";
  for (const auto& c : result.cells) {
    for (std::size_t r = 0; r < c.rmse_e.size(); ++r) {
      raw << fmt(units::hartree_to_mev(c.delta_e)) << "," << fmt(coord2_value(c)) << "," << r
          << "," << c.seeds[r] << "," << fmt(units::hartree_to_mev(c.rmse_e[r])) << ","
          << fmt(c.rmse_f.empty() ? 0.0 : units::au_to_ev_per_angstrom(c.rmse_f[r])) << "\n";
    }
  }
}

OptNoiseResult run_optimization_noise_study(const Dataset& train_structs,
                                            const Dataset& val_structs,
                                            const OptNoiseConfig& config) {
  if (train_structs.empty() || val_structs.empty()) {
    throw std::invalid_argument("opt-noise study: empty dataset");
  }

  LabelConfig label;
  label.ansatz = config.ansatz;
  label.depth = config.depth;
  label.backend.kind = BackendKind::Exact;
  label.opt.max_evals = config.budget;
  label.opt.restarts = config.restarts;
  label.repeats = config.repeats;

  label.ham_dir = config.ham_dir_train;
  label.seed = Rng::derive(config.master_seed, 1).next_u64();
  Dataset train_labeled = label_dataset(train_structs, label);

  label.ham_dir = config.ham_dir_val;
  label.seed = Rng::derive(config.master_seed, 2).next_u64();
  Dataset val_labeled = label_dataset(val_structs, label);

  DescriptorSet set = config.descriptors.build_for(train_labeled);
  TrainConfig tc = config.train;
  tc.beta = 0.0;  // VQE labels carry no forces
  MlpModel model = train_on(train_labeled, val_labeled, set, config.hidden, tc,
                            Rng::derive(config.master_seed, 3).next_u64());

  OptNoiseResult result;
  std::vector<double> dlabel, dmlp;
  for (int i = 0; i < val_structs.size(); ++i) {
    OptNoiseRow row;
    row.index = i;
    PauliHamiltonian h = PauliHamiltonian::parse(hamiltonian_path(config.ham_dir_val, i));
    row.exact_e = exact_ground_state(h).first;
    row.label_e = *val_labeled.structures[i].energy;
    row.mlp_e = predict_energy(model, val_structs.structures[i]);
    result.rows.push_back(row);
    int na = val_structs.structures[i].n_atoms();
    dlabel.push_back((row.label_e - row.exact_e) / na);
    dmlp.push_back((row.mlp_e - row.exact_e) / na);
  }

  auto rmse = [](const std::vector<double>& d) {
    double s = 0.0;
    for (double x : d) s += x * x;
    return std::sqrt(s / d.size());
  };
  result.label_rmse = rmse(dlabel);
  result.label_std = vec_std(dlabel);
  result.label_mean = vec_mean(dlabel);
  result.mlp_rmse = rmse(dmlp);
  result.mlp_std = vec_std(dmlp);
  result.mlp_mean = vec_mean(dmlp);
  return result;
}

void emit_report(const OptNoiseResult& result, const std::string& prefix) {
  std::ofstream triples = open_csv(prefix + "_triples.csv");
  triples << "index,exact_e_ha,label_e_ha,mlp_e_ha\n";
  for (const auto& r : result.rows) {
    check_finite(r.exact_e, "opt-noise row");
    check_finite(r.label_e, "opt-noise row");
    check_finite(r.mlp_e, "opt-noise row");
    triples << r.index << "," << fmt(r.exact_e) << "," << fmt(r.label_e) << "," << fmt(r.mlp_e)
            << "\n";
  }
  std::ofstream summary = open_csv(prefix + "_summary.csv");
  summary << "series,rmse_mev_atom,std_mev_atom,mean_offset_mev_atom\n";
  summary << "label_vs_exact," << fmt(units::hartree_to_mev(result.label_rmse)) << ","
          << fmt(units::hartree_to_mev(result.label_std)) << ","
          << fmt(units::hartree_to_mev(result.label_mean)) << "\n";
  summary << "mlp_vs_exact," << fmt(units::hartree_to_mev(result.mlp_rmse)) << ","
          << fmt(units::hartree_to_mev(result.mlp_std)) << ","
          << fmt(units::hartree_to_mev(result.mlp_mean)) << "\n";
}

namespace {

struct H2Study {
  std::vector<H2GridEntry> grid;
  std::vector<PauliHamiltonian> hams;  // parsed once per grid entry
  Circuit ansatz;

  explicit H2Study(const std::string& dir) : grid(load_h2_grid(dir)) {
    hams.reserve(grid.size());
    for (const auto& e : grid) hams.push_back(PauliHamiltonian::parse(e.path));
    ansatz = build_ansatz(AnsatzKind::H2Minimal, 2);
  }
};

// VQE label for one grid entry under the given backend. For noisy backends
// the optimization runs on the deterministic infinite-shot landscape and the
// final estimate is re-sampled at `final_shots` when nonzero.
double vqe_label(const H2Study& study, int grid_index, const EngineBackend& backend,
                 long budget, long final_shots, std::uint64_t seed) {
  OptimizerConfig opt;
  opt.max_evals = budget;
  opt.tol = 1e-12;
  opt.seed = seed;
  VqeResult r = vqe(study.hams[grid_index], study.ansatz, opt, backend);
  if (backend.kind == BackendKind::Noisy && final_shots > 0) {
    Eigen::MatrixXcd rho = simulate_density(study.ansatz, r.theta, backend.noise);
    ShotPlan plan;
    plan.shots_per_term = final_shots;
    plan.seed = Rng::derive(seed, 0xF1).next_u64();
    return sample_energy_density(rho, study.hams[grid_index], plan, &backend.noise,
                                 backend.mitigate)
        .estimate;
  }
  return r.energy;
}

Dataset labeled_copy(const GeneratedH2& set, const std::vector<double>& energies) {
  Dataset out = set.data;
  for (int i = 0; i < out.size(); ++i) {
    out.structures[i].energy = energies[i];
    out.structures[i].forces.reset();
  }
  return out;
}

}  // namespace

HwNoiseResult run_hardware_noise_study(const HwNoiseConfig& config) {
  H2Study study(config.h2_grid_dir);

  // independent training sets (CUR-selected from random pools) + one
  // randomly sampled validation set
  std::vector<GeneratedH2> train_sets;
  for (int s = 0; s < config.n_sets; ++s) {
    GeneratedH2 pool = make_h2_dataset(study.grid, config.select_pool,
                                       Rng::derive(config.master_seed, 100 + s).next_u64());
    train_sets.push_back(cur_select(pool, config.descriptors, config.configs_per_set));
  }
  GeneratedH2 val =
      make_h2_dataset(study.grid, config.configs_per_set,
                      Rng::derive(config.master_seed, 99).next_u64());

  EngineBackend exact;
  exact.kind = BackendKind::Exact;

  // noiseless VQE labels, cached per grid index
  std::vector<double> noiseless_by_grid(study.grid.size(),
                                        std::numeric_limits<double>::quiet_NaN());
  auto noiseless_label = [&](int gi) {
    if (std::isnan(noiseless_by_grid[gi])) {
      OptimizerConfig opt;
      opt.max_evals = 4000;
      opt.seed = Rng::derive(config.master_seed, 0xE0 + gi).next_u64();
      noiseless_by_grid[gi] = vqe(study.hams[gi], study.ansatz, opt, exact).energy;
    }
    return noiseless_by_grid[gi];
  };

  auto labels_for = [&](const GeneratedH2& set, const EngineBackend& backend, long budget,
                        long final_shots, std::uint64_t seed) {
    std::vector<double> out(set.data.size());
    for (int i = 0; i < set.data.size(); ++i) {
      out[i] = backend.kind == BackendKind::Exact
                   ? noiseless_label(set.grid_index[i])
                   : vqe_label(study, set.grid_index[i], backend, budget, final_shots,
                               Rng::derive(seed, i).next_u64());
    }
    return out;
  };

  std::vector<double> val_noiseless = labels_for(val, exact, 0, 0, 0);
  Dataset val_reference = labeled_copy(val, val_noiseless);

  TrainConfig tc = config.train;
  tc.beta = 0.0;

  // reference MLPs trained on noiseless labels
  std::vector<double> ref_rmse;
  std::vector<DescriptorSet> set_descriptors;
  for (int s = 0; s < config.n_sets; ++s) {
    std::vector<double> labels = labels_for(train_sets[s], exact, 0, 0, 0);
    Dataset train_labeled = labeled_copy(train_sets[s], labels);
    DescriptorSet dset = config.descriptors.build_for(train_labeled);
    set_descriptors.push_back(dset);
    MlpModel model = train_on(train_labeled, val_reference, dset, config.hidden, tc,
                              Rng::derive(config.master_seed, 0xA0 + s).next_u64());
    ref_rmse.push_back(rmse_energy(predict_dataset(model, val_reference, false), val_reference));
  }
  const double ref_mean = vec_mean(ref_rmse);

  HwNoiseResult result;

  // ---- gate-error sweep: T1 = T2, readout off, statistics suppressed ----
  for (double t1 : config.t1_grid_us) {
    EngineBackend noisy;
    noisy.kind = BackendKind::Noisy;
    noisy.noise = NoiseModel::ideal();
    noisy.noise.t1_us = t1;
    noisy.noise.t2_us = t1;
    noisy.plan.shots_per_term = 0;  // expectation straight from rho

    GateErrorPoint point;
    point.t1_us = t1;
    point.ref_mlp_rmse_mean = ref_mean;

    std::vector<double> val_noisy = labels_for(
        val, noisy, config.vqe_budget, 0, Rng::derive(config.master_seed, 0xD0).next_u64());
    Dataset val_noisy_set = labeled_copy(val, val_noisy);
    point.label_rmse = rmse_energy(val_noisy_set, val_reference);

    std::vector<double> mlp_rmse;
    for (int s = 0; s < config.n_sets; ++s) {
      std::vector<double> labels =
          labels_for(train_sets[s], noisy, config.vqe_budget, 0,
                     Rng::derive(config.master_seed, 0xB0 + s * 31 + static_cast<int>(t1)).next_u64());
      Dataset train_labeled = labeled_copy(train_sets[s], labels);
      // model selection sees only labels available at this noise level
      MlpModel model = train_on(train_labeled, val_noisy_set, set_descriptors[s], config.hidden,
                                tc, Rng::derive(config.master_seed, 0xC0 + s).next_u64());
      mlp_rmse.push_back(
          rmse_energy(predict_dataset(model, val_reference, false), val_reference));
    }
    point.mlp_rmse_mean = vec_mean(mlp_rmse);
    point.mlp_rmse_std = vec_std(mlp_rmse);
    result.gate_curve.push_back(point);
  }

  // ---- readout study: decoherence off, baseline vs reduced rates ----
  for (int reduced = 0; reduced < 2; ++reduced) {
    EngineBackend noisy;
    noisy.kind = BackendKind::Noisy;
    noisy.noise = NoiseModel::ideal();
    NoiseModel base = NoiseModel::baseline();
    double scale = reduced ? config.readout_reduction : 1.0;
    noisy.noise.readout_p01 = base.readout_p01 * scale;
    noisy.noise.readout_p10 = base.readout_p10 * scale;
    noisy.plan.shots_per_term = 0;  // optimize on the infinite-shot landscape

    ReadoutCase rc;
    rc.name = reduced ? "reduced_x0.01" : "baseline";

    std::uint64_t seed = Rng::derive(config.master_seed, 0xF00 + reduced).next_u64();
    std::vector<double> train_labels =
        labels_for(train_sets[0], noisy, config.vqe_budget, config.readout_shots, seed);
    std::vector<double> val_labels = labels_for(val, noisy, config.vqe_budget,
                                                config.readout_shots, Rng::derive(seed, 7).next_u64());
    Dataset val_labeled = labeled_copy(val, val_labels);
    rc.label_rmse = rmse_energy(val_labeled, val_reference);

    Dataset train_labeled = labeled_copy(train_sets[0], train_labels);
    MlpModel model = train_on(train_labeled, val_labeled, set_descriptors[0], config.hidden, tc,
                              Rng::derive(config.master_seed, 0xF10 + reduced).next_u64());
    rc.mlp_rmse = rmse_energy(predict_dataset(model, val_reference, false), val_reference);
    result.readout_cases.push_back(rc);
  }

  // ---- mitigation comparison at baseline readout rates ----
  {
    EngineBackend unmitigated;
    unmitigated.kind = BackendKind::Noisy;
    unmitigated.noise = NoiseModel::ideal();
    NoiseModel base = NoiseModel::baseline();
    unmitigated.noise.readout_p01 = base.readout_p01;
    unmitigated.noise.readout_p10 = base.readout_p10;
    unmitigated.plan.shots_per_term = 0;

    EngineBackend mitigated = unmitigated;
    mitigated.mitigate = true;

    for (int i = 0; i < val.data.size(); ++i) {
      MitigationRow row;
      row.index = i;
      int gi = val.grid_index[i];
      row.bond_length = study.grid[gi].bond_length;
      row.exact_e = exact_ground_state(study.hams[gi]).first;
      std::uint64_t seed = Rng::derive(config.master_seed, 0xF20 + i).next_u64();
      row.unmitigated_e = vqe_label(study, gi, unmitigated, config.vqe_budget,
                                    config.readout_shots, seed);
      row.mitigated_e =
          vqe_label(study, gi, mitigated, config.vqe_budget, config.readout_shots, seed);
      result.mitigation.push_back(row);
    }
  }

  return result;
}

void emit_report(const HwNoiseResult& result, const std::string& prefix) {
  std::ofstream gate = open_csv(prefix + "_gate_error.csv");
  gate << "t1_us,label_rmse_mev_atom,mlp_rmse_mean_mev_atom,mlp_rmse_std_mev_atom,"
          "ref_mlp_rmse_mean_mev_atom\n";
  for (const auto& p : result.gate_curve) {
    check_finite(p.label_rmse, "gate curve");
    check_finite(p.mlp_rmse_mean, "gate curve");
    gate << fmt(p.t1_us) << "," << fmt(units::hartree_to_mev(p.label_rmse)) << ","
         << fmt(units::hartree_to_mev(p.mlp_rmse_mean)) << ","
         << fmt(units::hartree_to_mev(p.mlp_rmse_std)) << ","
         << fmt(units::hartree_to_mev(p.ref_mlp_rmse_mean)) << "\n";
  }

  std::ofstream readout = open_csv(prefix + "_readout.csv");
  readout << "case,label_rmse_mev_atom,mlp_rmse_mev_atom\n";
  for (const auto& c : result.readout_cases) {
    check_finite(c.label_rmse, "readout case");
    check_finite(c.mlp_rmse, "readout case");
    readout << c.name << "," << fmt(units::hartree_to_mev(c.label_rmse)) << ","
            << fmt(units::hartree_to_mev(c.mlp_rmse)) << "\n";
  }

  std::ofstream mit = open_csv(prefix + "_mitigation.csv");
  mit << "index,bond_length_bohr,exact_e_ha,unmitigated_e_ha,mitigated_e_ha\n";
  for (const auto& r : result.mitigation) {
    check_finite(r.exact_e, "mitigation row");
    check_finite(r.unmitigated_e, "mitigation row");
    check_finite(r.mitigated_e, "mitigation row");
    mit << r.index << "," << fmt(r.bond_length) << "," << fmt(r.exact_e) << ","
        << fmt(r.unmitigated_e) << "," << fmt(r.mitigated_e) << "\n";
  }
}

}  // namespace qmlp
