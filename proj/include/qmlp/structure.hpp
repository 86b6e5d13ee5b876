#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>
#include <vector>

namespace qmlp {

/// One atomic configuration: species, Cartesian positions (Bohr) and optional
/// energy (Hartree) / force (Hartree/Bohr) labels.
struct Structure {
  std::vector<std::string> species;
  std::vector<Eigen::Vector3d> positions;
  std::optional<double> energy;
  std::optional<std::vector<Eigen::Vector3d>> forces;
  std::string comment;

  int n_atoms() const { return static_cast<int>(species.size()); }

  /// Throws std::invalid_argument if sizes disagree or coordinates are
  /// non-finite.
  void validate() const;
};

/// Ordered collection of structures. On-disk units are fixed to Hartree/Bohr.
struct Dataset {
  std::vector<Structure> structures;

  static constexpr const char* kUnits = "hartree_bohr";

  int size() const { return static_cast<int>(structures.size()); }
  bool empty() const { return structures.empty(); }
  bool all_have_energy() const;
  bool all_have_forces() const;
  void validate() const;
};

/// Ordered selection by index. Indices must be unique and in range.
Dataset subsample(const Dataset& data, const std::vector<int>& indices);

}  // namespace qmlp
