#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "qmlp/config.hpp"
#include "qmlp/cur.hpp"
#include "qmlp/datagen.hpp"
#include "qmlp/harness.hpp"
#include "qmlp/metrics.hpp"
#include "qmlp/mlp.hpp"
#include "qmlp/noise.hpp"
#include "qmlp/structure_io.hpp"
#include "qmlp/training.hpp"
#include "qmlp/units.hpp"
#include "qmlp/vqe.hpp"

namespace {

using namespace qmlp;

TrainConfig train_config_from(const KeyValueConfig& cfg) {
  TrainConfig tc;
  tc.max_epochs = static_cast<int>(cfg.get_long("epochs", tc.max_epochs));
  tc.batch_size = static_cast<int>(cfg.get_long("batch_size", tc.batch_size));
  tc.learning_rate = cfg.get_double("learning_rate", tc.learning_rate);
  tc.lr_decay = cfg.get_double("lr_decay", tc.lr_decay);
  tc.beta = cfg.get_double("beta", tc.beta);
  tc.validation_split = cfg.get_double("validation_split", tc.validation_split);
  tc.patience = static_cast<int>(cfg.get_long("patience", tc.patience));
  tc.seed = cfg.get_seed("train_seed", tc.seed);
  return tc;
}

DescriptorParams descriptor_params_from(const KeyValueConfig& cfg) {
  DescriptorParams dp;
  dp.r_c = cfg.get_double("r_c", dp.r_c);
  dp.n_radial = static_cast<int>(cfg.get_long("n_radial", dp.n_radial));
  dp.n_eta_angular = static_cast<int>(cfg.get_long("n_eta_angular", dp.n_eta_angular));
  dp.zetas = cfg.get_doubles("zetas", dp.zetas);
  return dp;
}

std::vector<int> hidden_from(const KeyValueConfig& cfg) {
  return cfg.get_ints("hidden", {25, 25});
}

DescriptorSet descriptors_for_training(const KeyValueConfig& cfg, const Dataset& train_data) {
  if (cfg.has("descriptors")) {
    DescriptorSet set = DescriptorSet::load(cfg.get_string("descriptors"));
    return set.scaled() ? set : fit_scaling(train_data, set);
  }
  return descriptor_params_from(cfg).build_for(train_data);
}

int cmd_train(const std::string& config_path) {
  KeyValueConfig cfg = KeyValueConfig::load(config_path);
  Dataset train_data = parse_structures(cfg.get_string("train_data"));
  DescriptorSet set = descriptors_for_training(cfg, train_data);
  NormParams norm = compute_normalization(train_data);
  MlpArchitecture arch = MlpArchitecture::for_descriptors(set, hidden_from(cfg));
  MlpModel model = init_model(arch, set, norm, cfg.get_seed("init_seed", 0));

  TrainConfig tc = train_config_from(cfg);
  TrainResult result =
      cfg.has("valid_data")
          ? train(model, train_data, parse_structures(cfg.get_string("valid_data")), tc)
          : train(model, train_data, tc);

  std::string out = cfg.get_string("model_out", "model.qmlp");
  result.model.save(out);
  std::printf("trained %s: epochs %zu, best epoch %d, validation rmse %.6g meV/atom\n",
              out.c_str(), result.history.size(), result.best_epoch,
              units::hartree_to_mev(result.best_val_rmse));
  if (cfg.has("history_out")) {
    std::ofstream h(cfg.get_string("history_out"));
    h << "epoch,loss,train_rmse_mev_atom,val_rmse_mev_atom\n";
    for (const auto& e : result.history) {
      h << e.epoch << "," << e.loss << "," << units::hartree_to_mev(e.train_rmse_e) << ","
        << units::hartree_to_mev(e.val_rmse_e) << "\n";
    }
  }
  return 0;
}

int cmd_evaluate(const std::string& model_path, const std::string& data_path, bool ev_units) {
  MlpModel model = MlpModel::load(model_path);
  Dataset data = parse_structures(data_path);
  EvalResult r = evaluate(model, data);
  if (ev_units) {
    std::printf("rmse_energy %.8g meV/atom\n", units::hartree_to_mev(r.rmse_energy));
    if (r.rmse_forces) {
      std::printf("rmse_forces %.8g eV/Angstrom\n", units::au_to_ev_per_angstrom(*r.rmse_forces));
    }
  } else {
    std::printf("rmse_energy %.12g Ha/atom\n", r.rmse_energy);
    if (r.rmse_forces) std::printf("rmse_forces %.12g Ha/Bohr\n", *r.rmse_forces);
  }
  if (!r.rmse_forces) std::printf("rmse_forces n/a (no force labels)\n");
  return 0;
}

int cmd_predict(const std::string& model_path, const std::string& data_path,
                const std::string& out_path, bool with_forces) {
  MlpModel model = MlpModel::load(model_path);
  Dataset data = parse_structures(data_path);
  write_structures(predict_dataset(model, data, with_forces), out_path);
  std::printf("wrote %d predicted structures to %s\n", data.size(), out_path.c_str());
  return 0;
}

int cmd_vqe(const std::string& ham_path, const std::string& ansatz, int depth,
            const std::string& backend_name, long shots, const std::string& noise_file,
            bool mitigate, long budget, int restarts, std::uint64_t seed,
            const std::string& trace_out) {
  PauliHamiltonian h = PauliHamiltonian::parse(ham_path);
  Circuit circuit = build_ansatz(ansatz_from_name(ansatz), h.n_qubits, depth);

  EngineBackend backend;
  backend.kind = backend_from_name(backend_name);
  backend.plan.shots_per_term = shots;
  backend.mitigate = mitigate;
  if (backend.kind == BackendKind::Noisy) {
    backend.noise = noise_file.empty() ? NoiseModel::baseline() : NoiseModel::load(noise_file);
  }
  if (backend.kind == BackendKind::Sampled && shots < 1) {
    throw std::runtime_error("sampled backend requires --shots >= 1");
  }

  OptimizerConfig opt;
  opt.max_evals = budget;
  opt.restarts = restarts;
  opt.seed = seed;
  VqeResult r = vqe(h, circuit, opt, backend);
  std::printf("energy %.12g Ha (converged %s, evaluations %ld)\n", r.energy,
              r.converged ? "yes" : "no", r.n_evals);
  if (!trace_out.empty()) {
    std::ofstream t(trace_out);
    t << "evaluation,energy_ha\n";
    for (std::size_t i = 0; i < r.trace.size(); ++i) t << i << "," << r.trace[i] << "\n";
  }
  return 0;
}

int cmd_sample(const std::string& ham_path, long shots, std::uint64_t seed) {
  PauliHamiltonian h = PauliHamiltonian::parse(ham_path);
  if (h.n_qubits > 12) throw std::runtime_error("sample: ground state requires <= 12 qubits");
  auto [e0, ground] = exact_ground_state(h);
  ShotPlan plan;
  plan.shots_per_term = shots;
  plan.seed = seed;
  SampledEnergy s = sample_energy(ground, h, plan);
  std::printf("exact %.12g Ha\n", e0);
  std::printf("estimate %.12g Ha\n", s.estimate);
  std::printf("eps_stat %.6g Ha\n", s.eps_stat);
  std::printf("deviation %.6g Ha over %ld total shots\n", s.estimate - e0, s.total_shots);
  return 0;
}

int cmd_budget(const std::string& ham_path, double eps_mev, double prob) {
  PauliHamiltonian h = PauliHamiltonian::parse(ham_path);
  if (h.n_qubits > 12) throw std::runtime_error("budget: ground state requires <= 12 qubits");
  auto [e0, ground] = exact_ground_state(h);
  ShotBudget b = estimate_shot_budget(h, ground, units::mev_to_hartree(eps_mev), prob);
  std::printf("terms %d\n", h.n_terms());
  std::printf("sigma2_qc %.8g Ha^2\n", b.sigma2_qc);
  std::printf("sigma2_max %.8g Ha^2\n", b.sigma2_max);
  std::printf("shots_per_term %lld\n", b.shots_per_term);
  std::printf("total_measurements %lld\n", b.total);
  std::printf("upper_shots_per_term %lld\n", b.upper_shots_per_term);
  std::printf("upper_total_measurements %lld\n", b.upper_total);
  return 0;
}

int cmd_label(const std::string& data_path, const std::string& ham_dir,
              const std::string& config_path, const std::string& out_path) {
  KeyValueConfig cfg =
      config_path.empty() ? KeyValueConfig::from_string("") : KeyValueConfig::load(config_path);
  Dataset data = parse_structures(data_path);

  LabelConfig lc;
  lc.ham_dir = ham_dir;
  lc.ansatz = ansatz_from_name(cfg.get_string("ansatz", "h2_minimal"));
  lc.depth = static_cast<int>(cfg.get_long("depth", 1));
  lc.backend.kind = backend_from_name(cfg.get_string("backend", "exact"));
  lc.backend.plan.shots_per_term = cfg.get_long("shots", 0);
  lc.backend.mitigate = cfg.get_bool("mitigate", false);
  if (lc.backend.kind == BackendKind::Noisy) {
    lc.backend.noise = cfg.has("noise_model") ? NoiseModel::load(cfg.get_string("noise_model"))
                                              : NoiseModel::baseline();
  }
  if (lc.backend.kind == BackendKind::Sampled && lc.backend.plan.shots_per_term < 1) {
    throw std::runtime_error("label: sampled backend requires shots >= 1");
  }
  lc.opt.max_evals = cfg.get_long("budget", 4000);
  lc.opt.restarts = static_cast<int>(cfg.get_long("restarts", 1));
  lc.repeats = static_cast<int>(cfg.get_long("repeats", 1));
  lc.mad_threshold = cfg.get_double("mad_threshold", 3.0);
  lc.seed = cfg.get_seed("seed", 0);

  Dataset labeled = label_dataset(data, lc);
  write_structures(labeled, out_path);
  std::printf("labeled %d structures -> %s\n", labeled.size(), out_path.c_str());
  return 0;
}

int cmd_select(const std::string& data_path, const std::string& desc_path,
               const std::string& mode, const std::string& element, int n, int k,
               const std::string& out_path) {
  Dataset data = parse_structures(data_path);
  DescriptorSet set = DescriptorSet::load(desc_path);
  if (!set.scaled()) set = fit_scaling(data, set);
  FeatureMatrix x = build_feature_matrix(data, set, element);

  SelectionResult r;
  if (mode == "columns") {
    r = select_columns(x, n, k);
  } else if (mode == "rows") {
    r = select_rows(x, n, k);
  } else {
    throw std::runtime_error("select: mode must be 'columns' or 'rows'");
  }
  write_selection_csv(r, out_path);
  std::printf("selected %zu %s (final eps %.6g) -> %s\n", r.indices.size(), mode.c_str(),
              r.eps_trace.empty() ? 1.0 : r.eps_trace.back(), out_path.c_str());
  return 0;
}

SweepConfig sweep_config_from(const KeyValueConfig& cfg) {
  SweepConfig sc;
  for (double v : cfg.get_doubles("delta_e_mev", {})) {
    sc.delta_e.push_back(units::mev_to_hartree(v));
  }
  sc.delta_f.clear();
  for (double v : cfg.get_doubles("delta_f_ev_ang", {0.0})) {
    sc.delta_f.push_back(units::ev_per_angstrom_to_au(v));
  }
  sc.sizes = cfg.get_ints("sizes", {});
  sc.repeats = static_cast<int>(cfg.get_long("repeats", sc.repeats));
  sc.threads = static_cast<int>(cfg.get_long("threads", sc.threads));
  sc.master_seed = cfg.get_seed("seed", 0);
  sc.train = train_config_from(cfg);
  sc.hidden = hidden_from(cfg);
  sc.descriptors = descriptor_params_from(cfg);
  return sc;
}

int cmd_sweep(const std::string& config_path, bool size_sweep) {
  KeyValueConfig cfg = KeyValueConfig::load(config_path);
  Dataset train_pool = parse_structures(cfg.get_string("train_data"));
  Dataset validation = parse_structures(cfg.get_string("valid_data"));
  SweepConfig sc = sweep_config_from(cfg);
  std::string prefix = cfg.get_string("output_prefix", size_sweep ? "sweep_size" : "sweep_noise");
  SweepResult result = size_sweep ? run_dataset_size_sweep(train_pool, validation, sc)
                                  : run_noise_sweep(train_pool, validation, sc);
  emit_report(result, prefix);
  std::printf("wrote %s_summary.csv and %s_raw.csv (%zu cells x %d repeats)\n", prefix.c_str(),
              prefix.c_str(), result.cells.size(), sc.repeats);
  return 0;
}

int cmd_study_opt_noise(const std::string& config_path) {
  KeyValueConfig cfg = KeyValueConfig::load(config_path);
  Dataset train_structs = parse_structures(cfg.get_string("train_data"));
  Dataset val_structs = parse_structures(cfg.get_string("valid_data"));

  OptNoiseConfig oc;
  oc.ham_dir_train = cfg.get_string("train_ham_dir");
  oc.ham_dir_val = cfg.get_string("valid_ham_dir");
  oc.ansatz = ansatz_from_name(cfg.get_string("ansatz", "h2_minimal"));
  oc.depth = static_cast<int>(cfg.get_long("depth", 1));
  oc.budget = cfg.get_long("budget", 30);
  oc.restarts = static_cast<int>(cfg.get_long("restarts", 1));
  oc.repeats = static_cast<int>(cfg.get_long("repeats", 1));
  oc.master_seed = cfg.get_seed("seed", 0);
  oc.train = train_config_from(cfg);
  oc.hidden = hidden_from(cfg);
  oc.descriptors = descriptor_params_from(cfg);

  OptNoiseResult r = run_optimization_noise_study(train_structs, val_structs, oc);
  std::string prefix = cfg.get_string("output_prefix", "study_opt_noise");
  emit_report(r, prefix);
  std::printf("label vs exact: rmse %.6g std %.6g mean %.6g meV/atom\n",
              units::hartree_to_mev(r.label_rmse), units::hartree_to_mev(r.label_std),
              units::hartree_to_mev(r.label_mean));
  std::printf("mlp   vs exact: rmse %.6g std %.6g mean %.6g meV/atom\n",
              units::hartree_to_mev(r.mlp_rmse), units::hartree_to_mev(r.mlp_std),
              units::hartree_to_mev(r.mlp_mean));
  return 0;
}

int cmd_study_hw_noise(const std::string& config_path) {
  KeyValueConfig cfg = KeyValueConfig::load(config_path);
  HwNoiseConfig hc;
  hc.h2_grid_dir = cfg.get_string("h2_grid", hc.h2_grid_dir);
  hc.t1_grid_us = cfg.get_doubles("t1_grid_us", hc.t1_grid_us);
  hc.n_sets = static_cast<int>(cfg.get_long("n_sets", hc.n_sets));
  hc.configs_per_set = static_cast<int>(cfg.get_long("configs_per_set", hc.configs_per_set));
  hc.select_pool = static_cast<int>(cfg.get_long("select_pool", hc.select_pool));
  hc.readout_shots = cfg.get_long("readout_shots", hc.readout_shots);
  hc.vqe_budget = cfg.get_long("vqe_budget", hc.vqe_budget);
  hc.master_seed = cfg.get_seed("seed", 0);
  hc.train = train_config_from(cfg);
  hc.hidden = hidden_from(cfg);
  hc.descriptors = descriptor_params_from(cfg);
  hc.readout_reduction = cfg.get_double("readout_reduction", hc.readout_reduction);

  HwNoiseResult r = run_hardware_noise_study(hc);
  std::string prefix = cfg.get_string("output_prefix", "study_hw_noise");
  emit_report(r, prefix);
  std::printf("wrote %s_gate_error.csv, %s_readout.csv, %s_mitigation.csv\n", prefix.c_str(),
              prefix.c_str(), prefix.c_str());
  return 0;
}

int cmd_report(const std::string& raw_path, const std::string& out_path) {
  std::ifstream in(raw_path);
  if (!in) throw std::runtime_error("cannot open raw csv: " + raw_path);
  std::string header;
  if (!std::getline(in, header)) throw std::runtime_error("report: empty raw csv");
  std::istringstream hs(header);
  std::vector<std::string> cols;
  std::string col;
  while (std::getline(hs, col, ',')) cols.push_back(col);
  if (cols.size() < 5) throw std::runtime_error("report: unexpected raw csv header");

  // group rows by the two leading grid coordinates; metric columns start
  // after the repeat and seed columns
  std::map<std::pair<std::string, std::string>, std::vector<std::vector<double>>> groups;
  std::vector<std::pair<std::string, std::string>> order;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::vector<std::string> fields;
    std::string f;
    while (std::getline(ls, f, ',')) fields.push_back(f);
    if (fields.size() != cols.size()) throw std::runtime_error("report: ragged raw csv row");
    auto key = std::make_pair(fields[0], fields[1]);
    if (!groups.count(key)) order.push_back(key);
    std::vector<double> metrics;
    for (std::size_t i = 4; i < fields.size(); ++i) metrics.push_back(std::stod(fields[i]));
    groups[key].push_back(metrics);
  }

  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot open output file: " + out_path);
  out << cols[0] << "," << cols[1];
  for (std::size_t i = 4; i < cols.size(); ++i) out << "," << cols[i] << "_mean";
  for (std::size_t i = 4; i < cols.size(); ++i) out << "," << cols[i] << "_std";
  out << ",n\n";
  char buf[40];
  for (const auto& key : order) {
    const auto& rows = groups[key];
    out << key.first << "," << key.second;
    std::size_t nm = rows[0].size();
    std::vector<double> mean(nm, 0.0), var(nm, 0.0);
    for (const auto& r : rows) {
      for (std::size_t i = 0; i < nm; ++i) mean[i] += r[i];
    }
    for (auto& m : mean) m /= rows.size();
    for (const auto& r : rows) {
      for (std::size_t i = 0; i < nm; ++i) var[i] += (r[i] - mean[i]) * (r[i] - mean[i]);
    }
    for (std::size_t i = 0; i < nm; ++i) {
      std::snprintf(buf, sizeof(buf), "%.12g", mean[i]);
      out << "," << buf;
    }
    for (std::size_t i = 0; i < nm; ++i) {
      std::snprintf(buf, sizeof(buf), "%.12g",
                    rows.size() > 1 ? std::sqrt(var[i] / (rows.size() - 1)) : 0.0);
      out << "," << buf;
    }
    out << "," << rows.size() << "\n";
  }
  std::printf("aggregated %zu raw groups -> %s\n", order.size(), out_path.c_str());
  return 0;
}

int cmd_make_dataset(const std::string& system, int count, std::uint64_t seed,
                     const std::string& out_dir, const std::string& grid_dir, int pool,
                     bool label_exact) {
  namespace fs = std::filesystem;
  if (system == "h2") {
    auto grid = load_h2_grid(grid_dir);
    GeneratedH2 set;
    if (pool > 0) {
      DescriptorParams dp;
      dp.r_c = 6.0;
      dp.n_radial = 10;
      dp.n_eta_angular = 0;
      set = cur_select(make_h2_dataset(grid, pool, seed), dp, count);
    } else {
      set = make_h2_dataset(grid, count, seed);
    }
    if (label_exact) set.data = label_h2_exact(set, grid);
    export_h2_dataset(set, grid, out_dir);
    std::printf("wrote %d H2 structures (+ per-structure Hamiltonians) to %s\n", count,
                out_dir.c_str());
  } else if (system == "h2h2") {
    Dataset data = make_h2h2_dataset(count, seed);
    fs::create_directories(out_dir);
    write_structures(data, out_dir + "/structures.data");
    std::printf("wrote %d surrogate-labeled H2-H2 clusters to %s\n", count, out_dir.c_str());
  } else {
    throw std::runtime_error("make-dataset: system must be 'h2' or 'h2h2'");
  }
  return 0;
}

int cmd_make_descriptors(const std::string& elements_csv, double r_c, int n_radial,
                         int n_eta_angular, const std::string& zetas_csv,
                         const std::string& fit_data, const std::string& out_path) {
  std::vector<std::string> elements;
  std::istringstream es(elements_csv);
  std::string e;
  while (std::getline(es, e, ',')) {
    if (!e.empty()) elements.push_back(e);
  }
  std::vector<double> zetas;
  std::istringstream zs(zetas_csv);
  std::string z;
  while (std::getline(zs, z, ',')) {
    if (!z.empty()) zetas.push_back(std::stod(z));
  }
  DescriptorSet set = build_descriptor_set(elements, n_radial, n_eta_angular, zetas, r_c);
  if (!fit_data.empty()) set = fit_scaling(parse_structures(fit_data), set);
  set.save(out_path);
  int total = 0;
  for (const auto& el : set.elements()) total += set.n_functions(el);
  std::printf("wrote %d candidate functions (%zu elements) to %s\n", total,
              set.elements().size(), out_path.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Neural-network potentials trained on small-qubit quantum labels"};
  app.require_subcommand(1);

  std::string config_path, model_path, data_path, out_path, ham_path, ham_dir;
  std::string ansatz = "h2_minimal", backend = "exact", noise_file, trace_out;
  std::string mode = "columns", element = "H", system = "h2", grid_dir = "data/h2";
  std::string elements_csv = "H", zetas_csv = "1,4,16", desc_path, raw_path;
  bool ev_units = false, with_forces = false, mitigate = false, label_exact = false;
  int depth = 1, restarts = 1, n_pick = 10, k_svd = 1, count = 20, pool = 0;
  int n_radial = 3, n_eta_angular = 1;
  long shots = 1024, budget = 4000;
  double eps_mev = 30.0, prob = 0.99, r_c = 12.0;
  std::uint64_t seed = 0;

  auto* train_cmd = app.add_subcommand("train", "Train a model from a key=value config file");
  train_cmd->add_option("--config", config_path)->required();

  auto* eval_cmd = app.add_subcommand("evaluate", "Energy/force RMSE of a model on a dataset");
  eval_cmd->add_option("--model", model_path)->required();
  eval_cmd->add_option("--data", data_path)->required();
  eval_cmd->add_flag("--ev", ev_units, "report meV/atom and eV/Angstrom");

  auto* predict_cmd = app.add_subcommand("predict", "Write model predictions as a structure file");
  predict_cmd->add_option("--model", model_path)->required();
  predict_cmd->add_option("--data", data_path)->required();
  predict_cmd->add_option("--out", out_path)->required();
  predict_cmd->add_flag("--forces", with_forces);

  auto* vqe_cmd = app.add_subcommand("vqe", "Variational ground-state search on a Hamiltonian file");
  vqe_cmd->add_option("--ham", ham_path)->required();
  vqe_cmd->add_option("--ansatz", ansatz, "h2_minimal | ry_cnot");
  vqe_cmd->add_option("--depth", depth);
  vqe_cmd->add_option("--backend", backend, "exact | sampled | noisy");
  vqe_cmd->add_option("--shots", shots);
  vqe_cmd->add_option("--noise", noise_file, "noise model file (noisy backend)");
  vqe_cmd->add_flag("--mitigate", mitigate);
  vqe_cmd->add_option("--budget", budget, "energy-evaluation budget");
  vqe_cmd->add_option("--restarts", restarts);
  vqe_cmd->add_option("--seed", seed);
  vqe_cmd->add_option("--trace", trace_out, "CSV of every energy evaluation");

  auto* sample_cmd = app.add_subcommand("sample", "Shot-sample the exact ground state");
  sample_cmd->add_option("--ham", ham_path)->required();
  sample_cmd->add_option("--shots", shots);
  sample_cmd->add_option("--seed", seed);

  auto* budget_cmd = app.add_subcommand("budget", "Measurement budget for a target accuracy");
  budget_cmd->add_option("--ham", ham_path)->required();
  budget_cmd->add_option("--eps-mev", eps_mev, "target accuracy (meV)");
  budget_cmd->add_option("--prob", prob, "target probability");

  auto* label_cmd = app.add_subcommand("label", "VQE-label a structure file");
  label_cmd->add_option("--data", data_path)->required();
  label_cmd->add_option("--ham-dir", ham_dir)->required();
  label_cmd->add_option("--config", config_path, "engine key=value config");
  label_cmd->add_option("--out", out_path)->required();

  auto* select_cmd = app.add_subcommand("select", "CUR selection of functions or configurations");
  select_cmd->add_option("--data", data_path)->required();
  select_cmd->add_option("--descriptors", desc_path)->required();
  select_cmd->add_option("--mode", mode, "columns | rows");
  select_cmd->add_option("--element", element);
  select_cmd->add_option("--n", n_pick)->required();
  select_cmd->add_option("--k", k_svd);
  select_cmd->add_option("--out", out_path)->required();

  auto* sweep_noise_cmd = app.add_subcommand("sweep-noise", "Label-noise RMSE grid");
  sweep_noise_cmd->add_option("--config", config_path)->required();
  auto* sweep_size_cmd = app.add_subcommand("sweep-size", "Noise x dataset-size RMSE grid");
  sweep_size_cmd->add_option("--config", config_path)->required();
  auto* opt_noise_cmd = app.add_subcommand("study-opt-noise", "Budget-capped VQE label study");
  opt_noise_cmd->add_option("--config", config_path)->required();
  auto* hw_noise_cmd = app.add_subcommand("study-hw-noise", "Gate/readout noise study");
  hw_noise_cmd->add_option("--config", config_path)->required();

  auto* report_cmd = app.add_subcommand("report", "Aggregate a raw sweep CSV");
  report_cmd->add_option("--raw", raw_path)->required();
  report_cmd->add_option("--out", out_path)->required();

  auto* make_data_cmd = app.add_subcommand("make-dataset", "Generate bundled-system datasets");
  make_data_cmd->add_option("--system", system, "h2 | h2h2");
  make_data_cmd->add_option("--count", count);
  make_data_cmd->add_option("--seed", seed);
  make_data_cmd->add_option("--out", out_path)->required();
  make_data_cmd->add_option("--grid", grid_dir, "H2 Hamiltonian grid directory");
  make_data_cmd->add_option("--pool", pool, "CUR-select count from a random pool of this size");
  make_data_cmd->add_flag("--label-exact", label_exact, "label H2 with exact grid energies");

  auto* make_desc_cmd = app.add_subcommand("make-descriptors", "Generate candidate functions");
  make_desc_cmd->add_option("--elements", elements_csv, "comma separated");
  make_desc_cmd->add_option("--r-c", r_c);
  make_desc_cmd->add_option("--n-radial", n_radial);
  make_desc_cmd->add_option("--n-eta-angular", n_eta_angular);
  make_desc_cmd->add_option("--zetas", zetas_csv);
  make_desc_cmd->add_option("--fit", data_path, "fit scaling on this structure file");
  make_desc_cmd->add_option("--out", out_path)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (train_cmd->parsed()) return cmd_train(config_path);
    if (eval_cmd->parsed()) return cmd_evaluate(model_path, data_path, ev_units);
    if (predict_cmd->parsed()) return cmd_predict(model_path, data_path, out_path, with_forces);
    if (vqe_cmd->parsed()) {
      return cmd_vqe(ham_path, ansatz, depth, backend, shots, noise_file, mitigate, budget,
                     restarts, seed, trace_out);
    }
    if (sample_cmd->parsed()) return cmd_sample(ham_path, shots, seed);
    if (budget_cmd->parsed()) return cmd_budget(ham_path, eps_mev, prob);
    if (label_cmd->parsed()) return cmd_label(data_path, ham_dir, config_path, out_path);
    if (select_cmd->parsed()) {
      return cmd_select(data_path, desc_path, mode, element, n_pick, k_svd, out_path);
    }
    if (sweep_noise_cmd->parsed()) return cmd_sweep(config_path, false);
    if (sweep_size_cmd->parsed()) return cmd_sweep(config_path, true);
    if (opt_noise_cmd->parsed()) return cmd_study_opt_noise(config_path);
    if (hw_noise_cmd->parsed()) return cmd_study_hw_noise(config_path);
    if (report_cmd->parsed()) return cmd_report(raw_path, out_path);
    if (make_data_cmd->parsed()) {
      return cmd_make_dataset(system, count, seed, out_path, grid_dir, pool, label_exact);
    }
    if (make_desc_cmd->parsed()) {
      return cmd_make_descriptors(elements_csv, r_c, n_radial, n_eta_angular, zetas_csv,
                                  data_path, out_path);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
