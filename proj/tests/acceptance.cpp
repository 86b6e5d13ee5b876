// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Heavier end-to-end checks (training studies) run on the bundled
// H2 Hamiltonian grid with fixed seeds.
#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "qmlp/cur.hpp"
#include "qmlp/datagen.hpp"
#include "qmlp/harness.hpp"
#include "qmlp/metrics.hpp"
#include "qmlp/mlp.hpp"
#include "qmlp/noise.hpp"
#include "qmlp/normalization.hpp"
#include "qmlp/rng.hpp"
#include "qmlp/sampling.hpp"
#include "qmlp/statevector.hpp"
#include "qmlp/training.hpp"
#include "qmlp/units.hpp"
#include "qmlp/vqe.hpp"

namespace {

using namespace qmlp;
namespace fs = std::filesystem;

std::string data_dir() {
  if (const char* env = std::getenv("QMLP_DATA")) return env;
  for (const char* p : {"../../data/h2", "../data/h2", "data/h2", "../../../data/h2"}) {
    if (fs::exists(std::string(p) + "/grid.txt")) return p;
  }
  throw std::runtime_error("h2 data directory not found (set QMLP_DATA)");
}

struct Outcome {
  enum Kind { Pass, Fail, Skip } kind = Fail;
  std::string detail;
};

Outcome pass(const std::string& d) { return {Outcome::Pass, d}; }
Outcome fail(const std::string& d) { return {Outcome::Fail, d}; }
Outcome skip(const std::string& d) { return {Outcome::Skip, d}; }

std::string num(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

Structure random_h2o(Rng& rng) {
  Structure s;
  s.species = {"O", "H", "H"};
  s.positions = {{rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3)},
                 {1.43 + rng.uniform(-0.25, 0.25), 1.11 + rng.uniform(-0.25, 0.25),
                  rng.uniform(-0.25, 0.25)},
                 {-1.43 + rng.uniform(-0.25, 0.25), 1.11 + rng.uniform(-0.25, 0.25),
                  rng.uniform(-0.25, 0.25)}};
  return s;
}

Structure random_h2(Rng& rng) {
  Structure s;
  double bond = rng.uniform(0.8, 3.5);
  s.species = {"H", "H"};
  s.positions = {{0, 0, -bond / 2}, {0, 0, bond / 2}};
  Eigen::AngleAxisd rot(rng.uniform(0, 2 * M_PI),
                        Eigen::Vector3d{rng.normal(), rng.normal(), rng.normal()}.normalized());
  for (auto& p : s.positions) p = rot * p + Eigen::Vector3d{rng.normal(), rng.normal(), rng.normal()};
  return s;
}

// Random-weight model spanning H and O used by the analytic-vs-FD checks.
MlpModel probe_model(std::uint64_t seed) {
  Rng rng(seed);
  Dataset fitset;
  for (int i = 0; i < 12; ++i) {
    Structure s = random_h2o(rng);
    s.energy = -76.0 + 0.05 * rng.normal();
    fitset.structures.push_back(s);
  }
  for (int i = 0; i < 12; ++i) {
    Structure s = random_h2(rng);
    s.energy = -1.1 + 0.05 * rng.normal();
    fitset.structures.push_back(s);
  }
  // mixed-size dataset in one fit so both elements have statistics
  DescriptorSet set =
      fit_scaling(fitset, build_descriptor_set({"H", "O"}, 3, 1, {1.0, 4.0}, 7.0));
  NormParams norm = compute_normalization(fitset);
  return init_model(MlpArchitecture::for_descriptors(set, {12, 12}), set, norm, seed + 1);
}

// ---------------------------------------------------------------- criterion 1
Outcome criterion_force_consistency() {
  MlpModel model = probe_model(101);
  Rng rng(55);
  const double h = 1e-5;
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    Structure s = trial % 2 == 0 ? random_h2o(rng) : random_h2(rng);
    auto forces = predict_forces(model, s);
    double fscale = 1e-8;
    for (const auto& f : forces) fscale = std::max(fscale, f.lpNorm<Eigen::Infinity>());
    for (int a = 0; a < s.n_atoms(); ++a) {
      for (int k = 0; k < 3; ++k) {
        Structure sp = s, sm = s;
        sp.positions[a][k] += h;
        sm.positions[a][k] -= h;
        double fd = -(predict_energy(model, sp) - predict_energy(model, sm)) / (2 * h);
        worst = std::max(worst, std::abs(forces[a][k] - fd) / fscale);
      }
    }
  }
  std::string d = "max relative deviation " + num(worst) + " over 50 geometries";
  return worst < 1e-6 ? pass(d) : fail(d);
}

// ---------------------------------------------------------------- criterion 2
Outcome criterion_invariance() {
  MlpModel model = probe_model(202);
  Rng rng(56);
  double worst_g = 0.0, worst_e = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    Structure s = trial % 2 == 0 ? random_h2o(rng) : random_h2(rng);
    auto base = compute_descriptors(s, model.descriptors, true, false);
    double e0 = predict_energy(model, s);

    Structure t = s;
    Eigen::AngleAxisd rot(rng.uniform(0, 2 * M_PI),
                          Eigen::Vector3d{rng.normal(), rng.normal(), rng.normal()}.normalized());
    Eigen::Vector3d shift{rng.uniform(-8, 8), rng.uniform(-8, 8), rng.uniform(-8, 8)};
    for (auto& p : t.positions) p = rot * p + shift;
    auto moved = compute_descriptors(t, model.descriptors, true, false);
    for (std::size_t i = 0; i < base.values.size(); ++i) {
      worst_g = std::max(worst_g,
                         (base.values[i] - moved.values[i]).lpNorm<Eigen::Infinity>());
    }
    worst_e = std::max(worst_e, std::abs(predict_energy(model, t) - e0));

    // swap the two like atoms (H in both systems)
    Structure perm = s;
    int a = s.n_atoms() == 3 ? 1 : 0;
    int b = s.n_atoms() == 3 ? 2 : 1;
    std::swap(perm.positions[a], perm.positions[b]);
    worst_e = std::max(worst_e, std::abs(predict_energy(model, perm) - e0));
  }
  std::string d = "max |dG| " + num(worst_g) + ", max |dE| " + num(worst_e) + " Ha";
  return (worst_g < 1e-10 && worst_e < 1e-10) ? pass(d) : fail(d);
}

// ---------------------------------------------------------------- criterion 3
Outcome criterion_vqe_oracle() {
  auto grid = load_h2_grid(data_dir());
  Circuit ansatz = build_ansatz(AnsatzKind::H2Minimal, 2);
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    int gi = i * static_cast<int>(grid.size() - 1) / 19;
    PauliHamiltonian h = PauliHamiltonian::parse(grid[gi].path);
    auto [e0, ground] = exact_ground_state(h);
    OptimizerConfig opt;
    opt.max_evals = 4000;
    opt.seed = 900 + i;
    EngineBackend backend;
    backend.kind = BackendKind::Exact;
    VqeResult r = vqe(h, ansatz, opt, backend);
    worst = std::max(worst, std::abs(r.energy - e0));
  }
  std::string d = "max |E_vqe - E_diag| " + num(worst) + " Ha over 20 bond lengths";
  return worst < 1e-6 ? pass(d) : fail(d);
}

// ---------------------------------------------------------------- criterion 4
Outcome criterion_shot_scaling() {
  auto grid = load_h2_grid(data_dir());
  PauliHamiltonian h = PauliHamiltonian::parse(grid[20].path);
  auto [e0, ground] = exact_ground_state(h);
  double sigma2 = variance(ground, h, VarianceMode::PerTerm);

  const std::vector<long> shot_grid = {100, 1000, 10000, 100000};
  std::vector<double> log_s, log_std;
  double worst_p_gap = 0.0;
  for (std::size_t gi = 0; gi < shot_grid.size(); ++gi) {
    long shots = shot_grid[gi];
    int repeats = shots >= 100000 ? 400 : 600;
    double eps = std::sqrt(2.0 * sigma2 / shots);  // Erf argument 1 -> p = 0.8427
    double mean = 0.0;
    std::vector<double> estimates(repeats);
    int within = 0;
    for (int r = 0; r < repeats; ++r) {
      ShotPlan plan;
      plan.shots_per_term = shots;
      plan.seed = Rng::derive(4000 + gi, r).next_u64();
      estimates[r] = sample_energy(ground, h, plan).estimate;
      mean += estimates[r];
      if (std::abs(estimates[r] - e0) < eps) ++within;
    }
    mean /= repeats;
    double var = 0.0;
    for (double e : estimates) var += (e - mean) * (e - mean);
    var /= (repeats - 1);
    log_s.push_back(std::log10(static_cast<double>(shots)));
    log_std.push_back(std::log10(std::sqrt(var)));

    double p_pred = shot_probability(eps, static_cast<double>(shots), sigma2);
    worst_p_gap = std::max(worst_p_gap,
                           std::abs(static_cast<double>(within) / repeats - p_pred));
  }

  // least-squares slope of log10(std) vs log10(S)
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(log_s.size());
  for (std::size_t i = 0; i < log_s.size(); ++i) {
    sx += log_s[i];
    sy += log_std[i];
    sxx += log_s[i] * log_s[i];
    sxy += log_s[i] * log_std[i];
  }
  double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);

  std::string d = "slope " + num(slope) + " (target -0.5 +- 0.05), max |p_emp - p_erf| " +
                  num(worst_p_gap) + " (<= 0.05)";
  return (std::abs(slope + 0.5) <= 0.05 && worst_p_gap <= 0.05) ? pass(d) : fail(d);
}

// ---------------------------------------------------------------- criterion 5
Outcome criterion_shot_budget_water() {
  std::string path;
  if (const char* env = std::getenv("QMLP_WATER_HAM")) {
    path = env;
  } else {
    std::string fallback = data_dir() + "/../external/h2o_9q.ham";
    if (fs::exists(fallback)) path = fallback;
  }
  if (path.empty()) {
    return skip("no external 9-qubit water Hamiltonian (set QMLP_WATER_HAM to enable)");
  }
  PauliHamiltonian h = PauliHamiltonian::parse(path);
  auto [e0, ground] = exact_ground_state(h);
  ShotBudget b = estimate_shot_budget(h, ground, units::mev_to_hartree(30.0), 0.99);
  double log_m = std::log10(static_cast<double>(b.total));
  std::string d = "K=" + std::to_string(h.n_terms()) + ", log10(M)=" + num(log_m) +
                  ", upper bound " + num(static_cast<double>(b.upper_total));
  bool ok = log_m >= 9.3 && log_m <= 10.7 && static_cast<double>(b.upper_total) > 1e12;
  return ok ? pass(d) : fail(d);
}

// shared H2 dataset construction for the training criteria
struct H2Sets {
  std::vector<H2GridEntry> grid;
  GeneratedH2 train;  // CUR-selected 20 from a random pool
  GeneratedH2 val;    // random 20
};

H2Sets make_h2_sets(std::uint64_t seed) {
  H2Sets sets;
  sets.grid = load_h2_grid(data_dir());
  DescriptorParams dp;
  dp.r_c = 6.0;
  dp.n_radial = 10;
  dp.n_eta_angular = 0;
  sets.train = cur_select(make_h2_dataset(sets.grid, 160, seed), dp, 20);
  sets.val = make_h2_dataset(sets.grid, 20, seed + 1);
  return sets;
}

SweepConfig h2_sweep_config() {
  SweepConfig sc;
  sc.repeats = 3;
  sc.master_seed = 11;
  sc.train.max_epochs = 4000;
  sc.train.learning_rate = 0.01;
  sc.train.lr_decay = 0.9995;
  sc.train.patience = 800;
  sc.hidden = {25, 25};
  sc.descriptors.r_c = 6.0;
  sc.descriptors.n_radial = 10;
  sc.descriptors.n_eta_angular = 0;
  return sc;
}

// ---------------------------------------------------------------- criterion 6
Outcome criterion_noise_plateau() {
  H2Sets sets = make_h2_sets(600);
  Dataset train = label_h2_exact(sets.train, sets.grid);
  Dataset val = label_h2_exact(sets.val, sets.grid);

  // stage 1: noiseless baseline model error
  SweepConfig base_cfg = h2_sweep_config();
  base_cfg.delta_e = {};
  SweepResult base = run_noise_sweep(train, val, base_cfg);
  double baseline = base.cells[0].mean_e();

  // stage 2: one tenth of and one hundred times the baseline
  SweepConfig cfg = h2_sweep_config();
  cfg.delta_e = {baseline / 10.0, baseline * 100.0};
  SweepResult r = run_noise_sweep(train, val, cfg);
  double rmse_ref = r.cells[0].mean_e();
  double rmse_low = r.cells[1].mean_e();
  double rmse_high = r.cells[2].mean_e();

  std::string d = "baseline " + num(units::hartree_to_mev(baseline)) + " meV/atom; low-noise x" +
                  num(rmse_low / rmse_ref) + " (<= 2), high-noise x" + num(rmse_high / rmse_ref) +
                  " (>= 10)";
  return (rmse_low <= 2.0 * rmse_ref && rmse_high >= 10.0 * rmse_ref) ? pass(d) : fail(d);
}

// ---------------------------------------------------------------- criterion 7
Outcome criterion_variance_reduction() {
  H2Sets sets = make_h2_sets(700);
  fs::path dir = fs::temp_directory_path() / "qmlp_acceptance_opt_noise";
  fs::remove_all(dir);
  export_h2_dataset(sets.train, sets.grid, (dir / "train").string());
  export_h2_dataset(sets.val, sets.grid, (dir / "val").string());

  OptNoiseConfig oc;
  oc.ham_dir_train = (dir / "train").string();
  oc.ham_dir_val = (dir / "val").string();
  oc.budget = 12;   // capped optimizer: labels carry organic optimization noise
  oc.repeats = 3;   // filtered average over repeated runs
  oc.master_seed = 71;
  oc.train = h2_sweep_config().train;
  oc.hidden = {25, 25};
  oc.descriptors = h2_sweep_config().descriptors;

  OptNoiseResult r =
      run_optimization_noise_study(sets.train.data, sets.val.data, oc);
  fs::remove_all(dir);

  bool reduced = r.mlp_std < r.label_std;
  bool means_agree = std::abs(r.mlp_mean - r.label_mean) <= r.label_std;
  std::string d = "residual std " + num(units::hartree_to_mev(r.label_std)) + " -> " +
                  num(units::hartree_to_mev(r.mlp_std)) + " meV/atom; mean offsets " +
                  num(units::hartree_to_mev(r.label_mean)) + " vs " +
                  num(units::hartree_to_mev(r.mlp_mean));
  return (reduced && means_agree) ? pass(d) : fail(d);
}

// ---------------------------------------------------------------- criterion 8
Outcome criterion_readout_ordering() {
  HwNoiseConfig hc;
  hc.h2_grid_dir = data_dir();
  hc.t1_grid_us = {};  // gate-error sweep not needed here
  hc.n_sets = 1;
  hc.configs_per_set = 20;
  hc.select_pool = 140;
  hc.readout_shots = 100000;
  hc.vqe_budget = 400;
  hc.master_seed = 81;
  hc.train = h2_sweep_config().train;
  hc.hidden = {25, 25};
  hc.descriptors = h2_sweep_config().descriptors;

  HwNoiseResult r = run_hardware_noise_study(hc);
  double rmse_base = r.readout_cases[0].mlp_rmse;
  double rmse_redu = r.readout_cases[1].mlp_rmse;
  int closer = 0;
  for (const auto& m : r.mitigation) {
    if (std::abs(m.mitigated_e - m.exact_e) < std::abs(m.unmitigated_e - m.exact_e)) ++closer;
  }
  bool ordering = rmse_redu < rmse_base;
  bool all_closer = closer == static_cast<int>(r.mitigation.size());
  std::string d = "validation rmse baseline " + num(units::hartree_to_mev(rmse_base)) +
                  " vs reduced " + num(units::hartree_to_mev(rmse_redu)) + " meV/atom; mitigated closer " +
                  std::to_string(closer) + "/" + std::to_string(r.mitigation.size());
  return (ordering && all_closer) ? pass(d) : fail(d);
}

// ---------------------------------------------------------------- criterion 9
Outcome criterion_cur_properties() {
  Rng rng(90);
  // monotone trace + exact recovery at n_target = rank on low-rank matrices
  for (int rank : {2, 3}) {
    Eigen::MatrixXd a(8, rank), b(rank, 6);
    for (int i = 0; i < a.size(); ++i) a.data()[i] = rng.normal();
    for (int i = 0; i < b.size(); ++i) b.data()[i] = rng.normal();
    FeatureMatrix x;
    x.values = a * b;
    SelectionResult r = select_columns(x, rank, 1);
    for (std::size_t i = 1; i < r.eps_trace.size(); ++i) {
      if (r.eps_trace[i] > r.eps_trace[i - 1] + 1e-12) {
        return fail("eps trace increased at pick " + std::to_string(i));
      }
    }
    if (r.eps_trace.back() >= 1e-8) {
      return fail("rank-" + std::to_string(rank) + " recovery eps " + num(r.eps_trace.back()));
    }
  }
  // brute force: first pick maximizes the importance score on 6 columns
  for (int trial = 0; trial < 5; ++trial) {
    FeatureMatrix x;
    x.values.resize(9, 6);
    for (int i = 0; i < x.values.size(); ++i) x.values.data()[i] = rng.normal();
    Eigen::VectorXd scores = importance_scores(x, 1);
    int argmax = 0;
    for (int c = 1; c < 6; ++c) {
      if (scores[c] > scores[argmax]) argmax = c;
    }
    SelectionResult r = select_columns(x, 1, 1);
    if (r.indices[0] != argmax) return fail("first pick != argmax pi_c");
  }
  return pass("monotone trace, rank recovery < 1e-8, first pick matches brute force");
}

// --------------------------------------------------------------- criterion 10
Outcome criterion_normalization() {
  Rng rng(100);
  double worst_mean = 0.0, worst_std = 0.0, worst_round = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    Dataset d;
    int m = 30 + static_cast<int>(rng.uniform_int(20));
    for (int i = 0; i < m; ++i) {
      Structure s;
      int na = 1 + static_cast<int>(rng.uniform_int(4));
      for (int a = 0; a < na; ++a) {
        s.species.push_back("H");
        s.positions.push_back({rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-3, 3)});
      }
      s.energy = na * rng.normal(-0.6, 0.05);
      std::vector<Eigen::Vector3d> f;
      for (int a = 0; a < na; ++a) {
        f.push_back({rng.normal(0, 0.08), rng.normal(0, 0.08), rng.normal(0, 0.08)});
      }
      s.forces = f;
      d.structures.push_back(s);
    }
    NormParams p = compute_normalization(d);
    Dataset fwd = apply_normalization(d, p, NormDirection::Forward);

    double mean = 0.0;
    for (const auto& s : fwd.structures) mean += *s.energy / s.n_atoms();
    mean /= fwd.size();
    double var = 0.0;
    for (const auto& s : fwd.structures) {
      double x = *s.energy / s.n_atoms() - mean;
      var += x * x;
    }
    var /= fwd.size();
    worst_mean = std::max(worst_mean, std::abs(mean));
    worst_std = std::max(worst_std, std::abs(std::sqrt(var) - 1.0));

    Dataset round = apply_normalization(fwd, p, NormDirection::Inverse);
    for (int i = 0; i < d.size(); ++i) {
      const auto& a = d.structures[i];
      const auto& b = round.structures[i];
      worst_round = std::max(worst_round,
                             std::abs(*a.energy - *b.energy) / std::max(1.0, std::abs(*a.energy)));
      for (int at = 0; at < a.n_atoms(); ++at) {
        worst_round = std::max(worst_round, (a.positions[at] - b.positions[at]).norm() /
                                                std::max(1.0, a.positions[at].norm()));
        worst_round = std::max(worst_round, ((*a.forces)[at] - (*b.forces)[at]).norm() /
                                                std::max(1.0, (*a.forces)[at].norm()));
      }
    }
  }
  std::string d = "|mean| " + num(worst_mean) + ", |std-1| " + num(worst_std) +
                  ", round-trip " + num(worst_round);
  return (worst_mean < 1e-10 && worst_std < 1e-10 && worst_round < 1e-12) ? pass(d) : fail(d);
}

}  // namespace

int main() {
  struct Entry {
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Entry> criteria = {
      {"force-gradient consistency", criterion_force_consistency},
      {"descriptor and energy invariance", criterion_invariance},
      {"vqe oracle equivalence", criterion_vqe_oracle},
      {"shot-scaling law and Erf prediction", criterion_shot_scaling},
      {"water shot-budget reproduction", criterion_shot_budget_water},
      {"noise-threshold plateau", criterion_noise_plateau},
      {"optimization-noise variance reduction", criterion_variance_reduction},
      {"readout ordering and mitigation", criterion_readout_ordering},
      {"cur selection properties", criterion_cur_properties},
      {"normalization moments and round trip", criterion_normalization},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].run();
    } catch (const std::exception& e) {
      o = {Outcome::Fail, std::string("exception: ") + e.what()};
    }
    const char* tag = o.kind == Outcome::Pass ? "PASS" : o.kind == Outcome::Fail ? "FAIL" : "SKIP";
    std::printf("[%s] criterion %zu: %s — %s\n", tag, i + 1, criteria[i].name, o.detail.c_str());
    if (o.kind == Outcome::Fail) ++failures;
  }
  if (failures > 0) std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
