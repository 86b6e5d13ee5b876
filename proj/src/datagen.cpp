#include "qmlp/datagen.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "qmlp/rng.hpp"
#include "qmlp/structure_io.hpp"

namespace qmlp {

namespace {

Eigen::Matrix3d random_rotation(Rng& rng) {
  // Rodrigues rotation about a random axis by a random angle
  Eigen::Vector3d axis;
  do {
    axis = {rng.normal(), rng.normal(), rng.normal()};
  } while (axis.norm() < 1e-8);
  axis.normalize();
  double angle = rng.uniform(0.0, 2.0 * M_PI);
  Eigen::Matrix3d k;
  k << 0, -axis.z(), axis.y(), axis.z(), 0, -axis.x(), -axis.y(), axis.x(), 0;
  return Eigen::Matrix3d::Identity() + std::sin(angle) * k + (1 - std::cos(angle)) * k * k;
}

}  // namespace

std::vector<H2GridEntry> load_h2_grid(const std::string& dir) {
  std::string manifest = dir + "/grid.txt";
  std::ifstream in(manifest);
  if (!in) throw std::runtime_error("cannot open H2 grid manifest: " + manifest);
  std::vector<H2GridEntry> grid;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ss(line);
    std::string first;
    if (!(ss >> first) || first[0] == '#') continue;
    H2GridEntry e;
    e.index = std::stoi(first);
    int n_terms;
    if (!(ss >> e.bond_length >> e.energy >> n_terms)) {
      throw std::runtime_error(manifest + ": malformed grid line");
    }
    char buf[32];
    std::snprintf(buf, sizeof(buf), "/h2_%03d.ham", e.index);
    e.path = dir + buf;
    grid.push_back(e);
  }
  if (grid.empty()) throw std::runtime_error(manifest + ": empty grid");
  return grid;
}

GeneratedH2 make_h2_dataset(const std::vector<H2GridEntry>& grid, int count, std::uint64_t seed) {
  if (grid.empty()) throw std::invalid_argument("h2 dataset: empty grid");
  if (count < 1) throw std::invalid_argument("h2 dataset: count must be >= 1");
  Rng rng(seed);
  GeneratedH2 out;
  for (int i = 0; i < count; ++i) {
    int gi = static_cast<int>(rng.uniform_int(grid.size()));
    double bond = grid[gi].bond_length;
    Eigen::Matrix3d rot = random_rotation(rng);
    Eigen::Vector3d shift{rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};
    Structure s;
    s.species = {"H", "H"};
    s.positions = {rot * Eigen::Vector3d{0, 0, -bond / 2} + shift,
                   rot * Eigen::Vector3d{0, 0, bond / 2} + shift};
    s.comment = "h2 grid_index " + std::to_string(gi);
    out.data.structures.push_back(std::move(s));
    out.grid_index.push_back(gi);
  }
  return out;
}

void export_h2_dataset(const GeneratedH2& set, const std::vector<H2GridEntry>& grid,
                       const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  write_structures(set.data, out_dir + "/structures.data");
  for (std::size_t i = 0; i < set.grid_index.size(); ++i) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "/ham_%04zu.ham", i);
    fs::copy_file(grid.at(set.grid_index[i]).path, out_dir + std::string(buf),
                  fs::copy_options::overwrite_existing);
  }
}

Dataset label_h2_exact(const GeneratedH2& set, const std::vector<H2GridEntry>& grid) {
  Dataset out = set.data;
  for (std::size_t i = 0; i < set.grid_index.size(); ++i) {
    out.structures[i].energy = grid.at(set.grid_index[i]).energy;
    out.structures[i].forces.reset();
  }
  return out;
}

double SurrogatePes::energy(const Structure& s) const {
  if (s.n_atoms() % 2 != 0) throw std::invalid_argument("surrogate: needs H2 units (2k atoms)");
  const int n_mol = s.n_atoms() / 2;
  double e = 0.0;
  for (int m = 0; m < n_mol; ++m) {
    double r = (s.positions[2 * m + 1] - s.positions[2 * m]).norm();
    double x = 1.0 - std::exp(-morse_width * (r - morse_r0));
    e += morse_depth * (x * x - 1.0);
  }
  for (int a = 0; a < n_mol; ++a) {
    for (int b = a + 1; b < n_mol; ++b) {
      Eigen::Vector3d ca = 0.5 * (s.positions[2 * a] + s.positions[2 * a + 1]);
      Eigen::Vector3d cb = 0.5 * (s.positions[2 * b] + s.positions[2 * b + 1]);
      double d = (cb - ca).norm();
      double sr6 = std::pow(lj_sigma / d, 6.0);
      e += 4.0 * lj_epsilon * (sr6 * sr6 - sr6);
    }
  }
  return e;
}

std::vector<Eigen::Vector3d> SurrogatePes::forces(const Structure& s) const {
  if (s.n_atoms() % 2 != 0) throw std::invalid_argument("surrogate: needs H2 units (2k atoms)");
  const int n_mol = s.n_atoms() / 2;
  std::vector<Eigen::Vector3d> f(s.n_atoms(), Eigen::Vector3d::Zero());
  for (int m = 0; m < n_mol; ++m) {
    Eigen::Vector3d d = s.positions[2 * m + 1] - s.positions[2 * m];
    double r = d.norm();
    double ex = std::exp(-morse_width * (r - morse_r0));
    double x = 1.0 - ex;
    double de_dr = 2.0 * morse_depth * x * morse_width * ex;
    Eigen::Vector3d g = de_dr * d / r;  // dE/dR of atom 2m+1
    f[2 * m + 1] -= g;
    f[2 * m] += g;
  }
  for (int a = 0; a < n_mol; ++a) {
    for (int b = a + 1; b < n_mol; ++b) {
      Eigen::Vector3d ca = 0.5 * (s.positions[2 * a] + s.positions[2 * a + 1]);
      Eigen::Vector3d cb = 0.5 * (s.positions[2 * b] + s.positions[2 * b + 1]);
      Eigen::Vector3d d = cb - ca;
      double r = d.norm();
      double sr6 = std::pow(lj_sigma / r, 6.0);
      double de_dr = 4.0 * lj_epsilon * (-12.0 * sr6 * sr6 + 6.0 * sr6) / r;
      Eigen::Vector3d g = de_dr * d / r;  // dE/d(cb)
      // centers move at half the atomic displacement
      f[2 * b] -= 0.5 * g;
      f[2 * b + 1] -= 0.5 * g;
      f[2 * a] += 0.5 * g;
      f[2 * a + 1] += 0.5 * g;
    }
  }
  return f;
}

void SurrogatePes::label(Structure& s) const {
  s.energy = energy(s);
  s.forces = forces(s);
}

Dataset make_h2h2_dataset(int count, std::uint64_t seed, const SurrogatePes& pes) {
  if (count < 1) throw std::invalid_argument("h2h2 dataset: count must be >= 1");
  Rng rng(seed);
  Dataset out;
  for (int i = 0; i < count; ++i) {
    double sep;
    if (rng.uniform() < 0.5) {
      do {
        sep = 6.0 - std::abs(rng.normal(0.0, 0.55));
      } while (sep < 4.5);
    } else {
      do {
        sep = 6.0 + std::abs(rng.normal(0.0, 1.35));
      } while (sep > 10.0);
    }
    Structure s;
    s.species = {"H", "H", "H", "H"};
    for (int m = 0; m < 2; ++m) {
      double bond = rng.normal(1.42, 0.03);
      Eigen::Matrix3d rot = random_rotation(rng);
      Eigen::Vector3d center = m == 0 ? Eigen::Vector3d::Zero() : Eigen::Vector3d{sep, 0, 0};
      s.positions.push_back(rot * Eigen::Vector3d{0, 0, -bond / 2} + center);
      s.positions.push_back(rot * Eigen::Vector3d{0, 0, bond / 2} + center);
    }
    Eigen::Matrix3d global = random_rotation(rng);
    for (auto& p : s.positions) p = global * p;
    pes.label(s);
    s.comment = "h2h2 cluster";
    out.structures.push_back(std::move(s));
  }
  return out;
}

}  // namespace qmlp
