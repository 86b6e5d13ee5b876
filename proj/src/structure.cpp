#include "qmlp/structure.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

namespace qmlp {

void Structure::validate() const {
  if (positions.size() != species.size()) {
    throw std::invalid_argument("structure: positions/species length mismatch");
  }
  if (forces && forces->size() != species.size()) {
    throw std::invalid_argument("structure: forces length mismatch");
  }
  for (const auto& p : positions) {
    if (!p.allFinite()) throw std::invalid_argument("structure: non-finite coordinate");
  }
  if (energy && !std::isfinite(*energy)) {
    throw std::invalid_argument("structure: non-finite energy");
  }
  if (forces) {
    for (const auto& f : *forces) {
      if (!f.allFinite()) throw std::invalid_argument("structure: non-finite force");
    }
  }
}

bool Dataset::all_have_energy() const {
  for (const auto& s : structures) {
    if (!s.energy) return false;
  }
  return true;
}

bool Dataset::all_have_forces() const {
  for (const auto& s : structures) {
    if (!s.forces) return false;
  }
  return true;
}

void Dataset::validate() const {
  for (const auto& s : structures) s.validate();
}

Dataset subsample(const Dataset& data, const std::vector<int>& indices) {
  std::set<int> seen;
  Dataset out;
  out.structures.reserve(indices.size());
  for (int i : indices) {
    if (i < 0 || i >= data.size()) {
      throw std::out_of_range("subsample: index " + std::to_string(i) + " out of range");
    }
    if (!seen.insert(i).second) {
      throw std::invalid_argument("subsample: duplicate index " + std::to_string(i));
    }
    out.structures.push_back(data.structures[i]);
  }
  return out;
}

}  // namespace qmlp
