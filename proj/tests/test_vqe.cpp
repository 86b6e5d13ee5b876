#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "qmlp/pauli.hpp"
#include "qmlp/rng.hpp"
#include "qmlp/statevector.hpp"
#include "qmlp/vqe.hpp"

using namespace qmlp;

namespace {

// repo-root data path; tests run from the build tree
std::string data_dir() {
  for (const char* p : {"../../data/h2", "../data/h2", "data/h2"}) {
    if (std::filesystem::exists(std::string(p) + "/grid.txt")) return p;
  }
  throw std::runtime_error("h2 data directory not found");
}

std::string grid_file(int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "/h2_%03d.ham", index);
  return data_dir() + buf;
}

}  // namespace

TEST_CASE("h2_minimal exact VQE matches dense diagonalization") {
  for (int index : {0, 14, 31, 63}) {
    PauliHamiltonian h = PauliHamiltonian::parse(grid_file(index));
    REQUIRE(h.n_qubits == 2);
    auto [e0, ground] = exact_ground_state(h);

    Circuit ansatz = build_ansatz(AnsatzKind::H2Minimal, 2);
    OptimizerConfig opt;
    opt.max_evals = 4000;
    opt.seed = 7;
    EngineBackend backend;
    backend.kind = BackendKind::Exact;
    VqeResult r = vqe(h, ansatz, opt, backend);
    CHECK(std::abs(r.energy - e0) < 1e-6);
    CHECK(!r.trace.empty());
  }
}

TEST_CASE("budget-capped VQE does not converge and sits above the ground state") {
  PauliHamiltonian h = PauliHamiltonian::parse(grid_file(20));
  auto [e0, ground] = exact_ground_state(h);

  Circuit ansatz = build_ansatz(AnsatzKind::H2Minimal, 2);
  OptimizerConfig opt;
  opt.max_evals = 3;
  opt.seed = 3;
  EngineBackend backend;
  backend.kind = BackendKind::Exact;
  VqeResult r = vqe(h, ansatz, opt, backend);
  CHECK(!r.converged);
  CHECK(r.energy >= e0 - 1e-12);
  CHECK(r.n_evals <= 3);

  OptimizerConfig zero = opt;
  zero.max_evals = 0;
  CHECK_THROWS_AS(vqe(h, ansatz, zero, backend), std::invalid_argument);
}

TEST_CASE("ry_cnot with restarts reaches the ground state of H2") {
  PauliHamiltonian h = PauliHamiltonian::parse(grid_file(14));
  auto [e0, ground] = exact_ground_state(h);

  Circuit ansatz = build_ansatz(AnsatzKind::RyCnot, 2, 1);
  OptimizerConfig opt;
  opt.max_evals = 20000;
  opt.restarts = 3;
  opt.seed = 11;
  EngineBackend backend;
  backend.kind = BackendKind::Exact;
  VqeResult r = vqe(h, ansatz, opt, backend);
  CHECK(std::abs(r.energy - e0) < 1e-4);
}

TEST_CASE("sampled backend uses the Nelder-Mead path and lands near the minimum") {
  PauliHamiltonian h = PauliHamiltonian::parse(grid_file(14));
  auto [e0, ground] = exact_ground_state(h);

  Circuit ansatz = build_ansatz(AnsatzKind::H2Minimal, 2);
  OptimizerConfig opt;
  opt.max_evals = 200;
  opt.tol = 0.0;  // spread never reaches exactly zero under sampling noise
  opt.seed = 5;
  EngineBackend backend;
  backend.kind = BackendKind::Sampled;
  backend.plan.shots_per_term = 4096;
  VqeResult r = vqe(h, ansatz, opt, backend);
  // statistical floor: a few times eps_stat of the plan
  CHECK(std::abs(r.energy - e0) < 0.05);
}

TEST_CASE("filtered mean drops one-sided outliers") {
  CHECK(filtered_mean({1.0, 1.1, 0.9, 1.0, 50.0}, 3.0) == doctest::Approx(1.0).epsilon(1e-12));
  // symmetric data with zero MAD keeps everything
  CHECK(filtered_mean({2.0, 2.0, 2.0}, 3.0) == doctest::Approx(2.0));
  // low outliers are kept (filter is one-sided toward unconverged runs)
  double m = filtered_mean({1.0, 1.02, 0.98, -5.0, 1.0}, 3.0);
  CHECK(m < 0.0);
}

TEST_CASE("label_dataset writes VQE energies and clears forces") {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "qmlp_label_test";
  fs::create_directories(dir);
  Dataset data;
  std::vector<int> grid_indices = {5, 25, 45};
  for (int i = 0; i < 3; ++i) {
    fs::copy_file(grid_file(grid_indices[i]), dir / ("ham_000" + std::to_string(i) + ".ham"),
                  fs::copy_options::overwrite_existing);
    Structure s;
    s.species = {"H", "H"};
    s.positions = {{0, 0, 0}, {0, 0, 1.4}};
    s.forces = std::vector<Eigen::Vector3d>{{0, 0, 0}, {0, 0, 0}};
    data.structures.push_back(s);
  }

  LabelConfig cfg;
  cfg.ham_dir = dir.string();
  cfg.backend.kind = BackendKind::Exact;
  cfg.opt.max_evals = 3000;
  cfg.repeats = 2;
  cfg.seed = 21;
  Dataset labeled = label_dataset(data, cfg);

  for (int i = 0; i < 3; ++i) {
    PauliHamiltonian h = PauliHamiltonian::parse(grid_file(grid_indices[i]));
    auto [e0, g] = exact_ground_state(h);
    REQUIRE(labeled.structures[i].energy.has_value());
    CHECK(std::abs(*labeled.structures[i].energy - e0) < 1e-5);
    CHECK(!labeled.structures[i].forces.has_value());
  }

  // missing hamiltonian file is an error
  Dataset more = data;
  more.structures.push_back(data.structures[0]);
  CHECK_THROWS_AS(label_dataset(more, cfg), std::runtime_error);
  fs::remove_all(dir);
}

TEST_CASE("sampled labels scatter consistently with eps_stat") {
  PauliHamiltonian h = PauliHamiltonian::parse(grid_file(30));
  auto [e0, ground] = exact_ground_state(h);
  // evaluate the statistical spread of the *estimator* at fixed theta
  Circuit ansatz = build_ansatz(AnsatzKind::H2Minimal, 2);
  OptimizerConfig opt;
  opt.max_evals = 4000;
  opt.seed = 9;
  EngineBackend exact;
  exact.kind = BackendKind::Exact;
  VqeResult best = vqe(h, ansatz, opt, exact);
  Eigen::VectorXcd state = simulate_statevector(ansatz, best.theta);

  const long shots = 64;
  std::vector<double> estimates;
  double eps_sum = 0.0;
  for (int r = 0; r < 160; ++r) {
    ShotPlan plan;
    plan.shots_per_term = shots;
    plan.seed = 777 + r;
    SampledEnergy s = sample_energy(state, h, plan);
    estimates.push_back(s.estimate);
    eps_sum += s.eps_stat;
  }
  double mean = 0, var = 0;
  for (double e : estimates) mean += e;
  mean /= estimates.size();
  for (double e : estimates) var += (e - mean) * (e - mean);
  var /= (estimates.size() - 1);
  double empirical = std::sqrt(var);
  double predicted = eps_sum / estimates.size();
  CHECK(empirical == doctest::Approx(predicted).epsilon(0.25));
}
