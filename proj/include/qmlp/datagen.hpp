#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "qmlp/structure.hpp"

namespace qmlp {

/// One entry of the bundled H2 Hamiltonian grid (data/h2): bond length in
/// Bohr, reference ground-state energy, file path.
struct H2GridEntry {
  int index = 0;
  double bond_length = 0.0;
  double energy = 0.0;
  std::string path;
};

/// Loads grid.txt and resolves the per-index Hamiltonian paths.
std::vector<H2GridEntry> load_h2_grid(const std::string& dir);

/// Randomly rotated/translated H2 configurations whose bond lengths are
/// drawn from the grid. grid_index[i] names the Hamiltonian of structure i.
struct GeneratedH2 {
  Dataset data;
  std::vector<int> grid_index;
};

GeneratedH2 make_h2_dataset(const std::vector<H2GridEntry>& grid, int count, std::uint64_t seed);

/// Writes structures.data plus per-structure Hamiltonian copies
/// (ham_<index>.ham) into out_dir, the layout label_dataset expects.
void export_h2_dataset(const GeneratedH2& set, const std::vector<H2GridEntry>& grid,
                       const std::string& out_dir);

/// Labels the dataset with the grid's exact ground-state energies (no VQE).
Dataset label_h2_exact(const GeneratedH2& set, const std::vector<H2GridEntry>& grid);

/// Smooth analytic surrogate for H2/H2-H2 clusters: a Morse bond per H2 unit
/// plus a weak Lennard-Jones term between molecular centers. Provides the
/// labels (energy and analytic forces) for noise-injection studies where no
/// electronic-structure input is in scope.
struct SurrogatePes {
  double morse_depth = 0.1745;   // Hartree
  double morse_width = 1.02;     // 1/Bohr
  double morse_r0 = 1.401;       // Bohr
  double lj_epsilon = 2.0e-4;    // Hartree
  double lj_sigma = 5.0;         // Bohr

  /// The structure must contain consecutive H pairs (2k atoms = k molecules).
  double energy(const Structure& s) const;
  std::vector<Eigen::Vector3d> forces(const Structure& s) const;
  void label(Structure& s) const;
};

/// Random H2-H2 clusters: intramolecular bonds ~ N(1.42, 0.03) Bohr,
/// intermolecular separation from a two-sided Gaussian (mean 6.0 Bohr, tails
/// clamped to [4.5, 10]), random orientations. Labeled by the surrogate.
Dataset make_h2h2_dataset(int count, std::uint64_t seed,
                          const SurrogatePes& pes = SurrogatePes{});

}  // namespace qmlp
