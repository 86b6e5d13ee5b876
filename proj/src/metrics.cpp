#include "qmlp/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace qmlp {

namespace {

void check_aligned(const Dataset& pred, const Dataset& ref) {
  if (pred.size() != ref.size()) {
    throw std::invalid_argument("rmse: dataset length mismatch");
  }
  if (pred.empty()) throw std::invalid_argument("rmse: empty dataset");
  for (int i = 0; i < pred.size(); ++i) {
    if (pred.structures[i].n_atoms() != ref.structures[i].n_atoms()) {
      throw std::invalid_argument("rmse: atom count mismatch at structure " + std::to_string(i));
    }
  }
}

}  // namespace

double rmse_energy(const Dataset& pred, const Dataset& ref) {
  check_aligned(pred, ref);
  double acc = 0.0;
  for (int i = 0; i < pred.size(); ++i) {
    const auto& p = pred.structures[i];
    const auto& r = ref.structures[i];
    if (!p.energy || !r.energy) {
      throw std::invalid_argument("rmse_energy: missing energy label at structure " +
                                  std::to_string(i));
    }
    double d = (*p.energy - *r.energy) / p.n_atoms();
    acc += d * d;
  }
  return std::sqrt(acc / pred.size());
}

double rmse_forces(const Dataset& pred, const Dataset& ref) {
  check_aligned(pred, ref);
  double acc = 0.0;
  for (int i = 0; i < pred.size(); ++i) {
    const auto& p = pred.structures[i];
    const auto& r = ref.structures[i];
    if (!p.forces || !r.forces) {
      throw std::invalid_argument("rmse_forces: missing force labels at structure " +
                                  std::to_string(i));
    }
    double inner = 0.0;
    for (int a = 0; a < p.n_atoms(); ++a) {
      inner += ((*p.forces)[a] - (*r.forces)[a]).squaredNorm();
    }
    acc += inner / (3.0 * p.n_atoms());
  }
  return std::sqrt(acc / pred.size());
}

}  // namespace qmlp
