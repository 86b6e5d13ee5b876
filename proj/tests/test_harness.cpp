#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qmlp/config.hpp"
#include "qmlp/harness.hpp"
#include "qmlp/metrics.hpp"
#include "qmlp/noise.hpp"
#include "qmlp/units.hpp"

using namespace qmlp;

namespace {

namespace fs = std::filesystem;

std::string data_dir() {
  for (const char* p : {"../../data/h2", "../data/h2", "data/h2"}) {
    if (fs::exists(std::string(p) + "/grid.txt")) return p;
  }
  throw std::runtime_error("h2 data directory not found");
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TrainConfig quick_train() {
  TrainConfig tc;
  tc.max_epochs = 150;
  tc.learning_rate = 8e-3;
  tc.patience = 150;
  tc.validation_split = 0.25;
  return tc;
}

DescriptorParams h2_descriptors() {
  DescriptorParams dp;
  dp.r_c = 9.0;
  dp.n_radial = 3;
  dp.n_eta_angular = 0;  // a 2-atom molecule has no triplets
  return dp;
}

}  // namespace

TEST_CASE("key=value config parsing") {
  KeyValueConfig cfg = KeyValueConfig::from_string(
      "# a comment\n"
      "alpha = 1.5\n"
      "name= hello world \n"
      "grid = 1, 2.5, 10\n"
      "flag = true\n");
  CHECK(cfg.get_double("alpha") == 1.5);
  CHECK(cfg.get_string("name") == "hello world");
  CHECK(cfg.get_doubles("grid") == std::vector<double>{1.0, 2.5, 10.0});
  CHECK(cfg.get_bool("flag", false));
  CHECK(cfg.get_long("missing", 7) == 7);
  CHECK_THROWS_AS(cfg.get_string("missing"), std::runtime_error);
  CHECK_THROWS_AS(KeyValueConfig::from_string("no equals sign\n"), std::runtime_error);
}

TEST_CASE("surrogate PES forces match finite differences") {
  Dataset d = make_h2h2_dataset(3, 5);
  SurrogatePes pes;
  const double h = 1e-6;
  for (const auto& s : d.structures) {
    auto f = pes.forces(s);
    for (int a = 0; a < s.n_atoms(); ++a) {
      for (int k = 0; k < 3; ++k) {
        Structure sp = s, sm = s;
        sp.positions[a][k] += h;
        sm.positions[a][k] -= h;
        double fd = -(pes.energy(sp) - pes.energy(sm)) / (2 * h);
        CHECK(f[a][k] == doctest::Approx(fd).epsilon(1e-5));
      }
    }
    // sampling ranges: intermolecular separation within [4.5, 10]
    Eigen::Vector3d ca = 0.5 * (s.positions[0] + s.positions[1]);
    Eigen::Vector3d cb = 0.5 * (s.positions[2] + s.positions[3]);
    double sep = (cb - ca).norm();
    CHECK(sep >= 4.5);
    CHECK(sep <= 10.0);
  }
}

TEST_CASE("h2 grid loading and dataset generation") {
  auto grid = load_h2_grid(data_dir());
  REQUIRE(grid.size() == 64);
  CHECK(grid.front().bond_length == doctest::Approx(0.6));
  CHECK(grid.back().bond_length == doctest::Approx(4.2));

  GeneratedH2 set = make_h2_dataset(grid, 12, 42);
  REQUIRE(set.data.size() == 12);
  for (int i = 0; i < 12; ++i) {
    double bond = (set.data.structures[i].positions[1] - set.data.structures[i].positions[0]).norm();
    CHECK(bond == doctest::Approx(grid[set.grid_index[i]].bond_length).epsilon(1e-12));
  }

  // determinism
  GeneratedH2 again = make_h2_dataset(grid, 12, 42);
  CHECK(again.grid_index == set.grid_index);

  Dataset labeled = label_h2_exact(set, grid);
  CHECK(labeled.all_have_energy());
}

TEST_CASE("export_h2_dataset writes label_dataset's expected layout") {
  auto grid = load_h2_grid(data_dir());
  GeneratedH2 set = make_h2_dataset(grid, 3, 9);
  fs::path dir = fs::temp_directory_path() / "qmlp_export_test";
  fs::remove_all(dir);
  export_h2_dataset(set, grid, dir.string());
  CHECK(fs::exists(dir / "structures.data"));
  CHECK(fs::exists(dir / "ham_0000.ham"));
  CHECK(fs::exists(dir / "ham_0002.ham"));
  fs::remove_all(dir);
}

TEST_CASE("noise sweep: reference cell present, validation untouched, deterministic") {
  auto grid = load_h2_grid(data_dir());
  Dataset train = label_h2_exact(make_h2_dataset(grid, 14, 1), grid);
  Dataset val = label_h2_exact(make_h2_dataset(grid, 10, 2), grid);
  Dataset val_before = val;

  SweepConfig cfg;
  cfg.delta_e = {units::mev_to_hartree(100.0)};
  cfg.repeats = 2;
  cfg.master_seed = 77;
  cfg.train = quick_train();
  cfg.hidden = {10};
  cfg.descriptors = h2_descriptors();

  SweepResult r1 = run_noise_sweep(train, val, cfg);
  REQUIRE(r1.cells.size() == 2);  // zero cell prepended
  CHECK(r1.cells[0].delta_e == 0.0);
  CHECK(r1.cells[1].delta_e == doctest::Approx(units::mev_to_hartree(100.0)));
  for (const auto& c : r1.cells) {
    REQUIRE(c.rmse_e.size() == 2);
    for (double v : c.rmse_e) CHECK(std::isfinite(v));
  }

  // validation labels were never modified
  for (int i = 0; i < val.size(); ++i) {
    CHECK(*val.structures[i].energy == *val_before.structures[i].energy);
  }

  // bit-for-bit reproducible under the master seed
  SweepResult r2 = run_noise_sweep(train, val, cfg);
  for (std::size_t c = 0; c < r1.cells.size(); ++c) {
    CHECK(r1.cells[c].rmse_e == r2.cells[c].rmse_e);
    CHECK(r1.cells[c].seeds == r2.cells[c].seeds);
  }
}

TEST_CASE("emit_report: identical bytes on rerun, refuses NaN, header-only when empty") {
  auto grid = load_h2_grid(data_dir());
  Dataset train = label_h2_exact(make_h2_dataset(grid, 12, 3), grid);
  Dataset val = label_h2_exact(make_h2_dataset(grid, 8, 4), grid);

  SweepConfig cfg;
  cfg.delta_e = {units::mev_to_hartree(10.0)};
  cfg.repeats = 1;
  cfg.master_seed = 5;
  cfg.train = quick_train();
  cfg.hidden = {8};
  cfg.descriptors = h2_descriptors();

  SweepResult r = run_noise_sweep(train, val, cfg);
  fs::path dir = fs::temp_directory_path() / "qmlp_report_test";
  fs::create_directories(dir);
  emit_report(r, (dir / "a").string());
  emit_report(r, (dir / "b").string());
  CHECK(slurp((dir / "a_summary.csv").string()) == slurp((dir / "b_summary.csv").string()));
  CHECK(slurp((dir / "a_raw.csv").string()) == slurp((dir / "b_raw.csv").string()));

  SweepResult empty;
  emit_report(empty, (dir / "empty").string());
  std::string content = slurp((dir / "empty_summary.csv").string());
  CHECK(content.find("delta_e_mev_atom") == 0);
  CHECK(std::count(content.begin(), content.end(), '\n') == 1);

  SweepResult bad = r;
  bad.cells[0].rmse_e[0] = std::nan("");
  CHECK_THROWS_AS(emit_report(bad, (dir / "bad").string()), std::runtime_error);
  fs::remove_all(dir);
}

TEST_CASE("size sweep produces nested CUR subsets and energy-only training") {
  auto grid = load_h2_grid(data_dir());
  Dataset train = label_h2_exact(make_h2_dataset(grid, 16, 6), grid);
  Dataset val = label_h2_exact(make_h2_dataset(grid, 8, 7), grid);

  SweepConfig cfg;
  cfg.delta_e = {};
  cfg.sizes = {6, 12};
  cfg.repeats = 1;
  cfg.master_seed = 13;
  cfg.train = quick_train();
  cfg.train.beta = 1.0;  // must be ignored (forced to 0)
  cfg.hidden = {8};
  cfg.descriptors = h2_descriptors();

  SweepResult r = run_dataset_size_sweep(train, val, cfg);
  REQUIRE(r.cells.size() == 2);  // 1 delta (0) x 2 sizes
  CHECK(r.size_sweep);
  CHECK(r.cells[0].size == 6);
  CHECK(r.cells[1].size == 12);
  for (const auto& c : r.cells) CHECK(std::isfinite(c.mean_e()));

  SweepConfig too_big = cfg;
  too_big.sizes = {100};
  CHECK_THROWS_AS(run_dataset_size_sweep(train, val, too_big), std::invalid_argument);
}

TEST_CASE("parallel_for covers all jobs and propagates errors") {
  std::vector<int> hits(20, 0);
  parallel_for(20, 4, [&](int i) { hits[i] = i + 1; });
  for (int i = 0; i < 20; ++i) CHECK(hits[i] == i + 1);

  CHECK_THROWS_AS(
      parallel_for(4, 2, [&](int i) {
        if (i == 2) throw std::runtime_error("boom");
      }),
      std::runtime_error);
}

TEST_CASE("size sweep: 20 CUR-selected configs reach 10 meV/atom noiseless") {
  auto grid = load_h2_grid(data_dir());
  GeneratedH2 pool_gen = make_h2_dataset(grid, 160, 21);
  Dataset pool = label_h2_exact(pool_gen, grid);
  Dataset val = label_h2_exact(make_h2_dataset(grid, 20, 22), grid);

  SweepConfig cfg;
  cfg.delta_e = {};
  cfg.sizes = {20};
  cfg.repeats = 2;
  cfg.master_seed = 23;
  cfg.train.max_epochs = 4000;
  cfg.train.learning_rate = 0.01;
  cfg.train.lr_decay = 0.9995;
  cfg.train.patience = 800;
  cfg.hidden = {25, 25};
  cfg.descriptors.r_c = 6.0;
  cfg.descriptors.n_radial = 10;
  cfg.descriptors.n_eta_angular = 0;

  SweepResult r = run_dataset_size_sweep(pool, val, cfg);
  REQUIRE(r.cells.size() == 1);
  CHECK(units::hartree_to_mev(r.cells[0].mean_e()) <= 10.0);
}

TEST_CASE("smoothing: model trained on zero-mean-noisy labels beats the labels") {
  auto grid = load_h2_grid(data_dir());
  DescriptorParams dp;
  dp.r_c = 6.0;
  dp.n_radial = 10;
  dp.n_eta_angular = 0;
  GeneratedH2 train_gen = cur_select(make_h2_dataset(grid, 160, 31), dp, 20);
  Dataset clean = label_h2_exact(train_gen, grid);
  Dataset val = label_h2_exact(make_h2_dataset(grid, 20, 32), grid);

  const double delta = units::mev_to_hartree(60.0);
  Dataset noisy = inject_noise(clean, {delta, 0.0, 33});
  double label_rmse = rmse_energy(noisy, clean);

  DescriptorSet set = dp.build_for(clean);
  NormParams norm = compute_normalization(noisy);
  MlpModel model =
      init_model(MlpArchitecture::for_descriptors(set, {25, 25}), set, norm, 34);
  TrainConfig tc;
  tc.max_epochs = 4000;
  tc.learning_rate = 0.01;
  tc.lr_decay = 0.9995;
  tc.patience = 800;
  tc.seed = 35;
  TrainResult tr = train(model, noisy, val, tc);

  // RMSE of the trained model against the clean labels of the training set
  double model_rmse = rmse_energy(predict_dataset(tr.model, clean, false), clean);
  CHECK(model_rmse <= label_rmse);
}

TEST_CASE("noise sweep: reference cell is the row minimum within jitter") {
  auto grid = load_h2_grid(data_dir());
  DescriptorParams dp;
  dp.r_c = 6.0;
  dp.n_radial = 10;
  dp.n_eta_angular = 0;
  Dataset train = label_h2_exact(cur_select(make_h2_dataset(grid, 160, 41), dp, 20), grid);
  Dataset val = label_h2_exact(make_h2_dataset(grid, 20, 42), grid);

  SweepConfig cfg;
  cfg.delta_e = {units::mev_to_hartree(1.0), units::mev_to_hartree(50.0)};
  cfg.repeats = 3;
  cfg.master_seed = 43;
  cfg.train.max_epochs = 2500;
  cfg.train.learning_rate = 0.01;
  cfg.train.lr_decay = 0.9995;
  cfg.train.patience = 600;
  cfg.hidden = {25, 25};
  cfg.descriptors = dp;

  SweepResult r = run_noise_sweep(train, val, cfg);
  REQUIRE(r.cells.size() == 3);
  const auto& ref = r.cells[0];
  for (std::size_t c = 1; c < r.cells.size(); ++c) {
    CHECK(ref.mean_e() <= r.cells[c].mean_e() + 2.0 * (r.cells[c].std_e() + ref.std_e()));
  }
}

TEST_CASE("opt-noise study with an uncapped optimizer has tiny residuals") {
  auto grid = load_h2_grid(data_dir());
  DescriptorParams dp;
  dp.r_c = 6.0;
  dp.n_radial = 10;
  dp.n_eta_angular = 0;
  GeneratedH2 train_gen = cur_select(make_h2_dataset(grid, 120, 51), dp, 16);
  GeneratedH2 val_gen = make_h2_dataset(grid, 16, 52);
  fs::path dir = fs::temp_directory_path() / "qmlp_opt_uncapped";
  fs::remove_all(dir);
  export_h2_dataset(train_gen, grid, (dir / "t").string());
  export_h2_dataset(val_gen, grid, (dir / "v").string());

  OptNoiseConfig oc;
  oc.ham_dir_train = (dir / "t").string();
  oc.ham_dir_val = (dir / "v").string();
  oc.budget = 4000;  // effectively uncapped for one parameter
  oc.master_seed = 53;
  oc.train.max_epochs = 3000;
  oc.train.learning_rate = 0.01;
  oc.train.lr_decay = 0.9995;
  oc.train.patience = 600;
  oc.hidden = {25, 25};
  oc.descriptors = dp;

  OptNoiseResult r = run_optimization_noise_study(train_gen.data, val_gen.data, oc);
  fs::remove_all(dir);
  // converged labels: residuals against exact diagonalization vanish
  CHECK(units::hartree_to_mev(r.label_rmse) < 0.01);
  // and the MLP sits at its noiseless model error
  CHECK(units::hartree_to_mev(r.mlp_rmse) < 20.0);
}
