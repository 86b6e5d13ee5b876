#include "qmlp/normalization.hpp"

#include <cmath>
#include <stdexcept>

namespace qmlp {

void NormParams::validate() const {
  if (!(conv_energy > 0.0) || !std::isfinite(conv_energy)) {
    throw std::invalid_argument("norm params: conv_energy must be positive");
  }
  if (!(conv_length > 0.0) || !std::isfinite(conv_length)) {
    throw std::invalid_argument("norm params: conv_length must be positive");
  }
  if (!std::isfinite(mean_energy)) {
    throw std::invalid_argument("norm params: non-finite mean energy");
  }
}

NormParams compute_normalization(const Dataset& data) {
  data.validate();
  if (data.empty()) throw std::invalid_argument("normalization: empty dataset");
  if (!data.all_have_energy()) {
    throw std::invalid_argument("normalization: all structures must carry energies");
  }
  if (data.size() < 2) {
    throw std::runtime_error("normalization: degenerate statistics (need >= 2 structures)");
  }

  const int m = data.size();
  double mean = 0.0;
  for (const auto& s : data.structures) {
    if (s.n_atoms() == 0) throw std::invalid_argument("normalization: empty structure");
    mean += *s.energy / s.n_atoms();
  }
  mean /= m;

  double var = 0.0;
  for (const auto& s : data.structures) {
    double d = *s.energy / s.n_atoms() - mean;
    var += d * d;
  }
  var /= m;  // population variance
  double sigma_e = std::sqrt(var);
  if (!(sigma_e > 0.0) || sigma_e < 1e-300) {
    throw std::runtime_error("normalization: degenerate statistics (zero energy spread)");
  }

  NormParams params;
  params.mean_energy = mean;
  params.conv_energy = 1.0 / sigma_e;
  params.has_forces = data.all_have_forces();

  if (params.has_forces) {
    double fmean = 0.0;
    long n = 0;
    for (const auto& s : data.structures) {
      for (const auto& f : *s.forces) {
        fmean += f.sum();
        n += 3;
      }
    }
    fmean /= n;
    double fvar = 0.0;
    for (const auto& s : data.structures) {
      for (const auto& f : *s.forces) {
        for (int k = 0; k < 3; ++k) {
          double d = f[k] - fmean;
          fvar += d * d;
        }
      }
    }
    double sigma_f = std::sqrt(fvar / n);
    if (!(sigma_f > 0.0)) {
      throw std::runtime_error("normalization: degenerate statistics (zero force spread)");
    }
    params.conv_length = sigma_f / sigma_e;
  } else {
    params.conv_length = 1.0;
  }
  params.validate();
  return params;
}

Dataset apply_normalization(const Dataset& data, const NormParams& params,
                            NormDirection direction) {
  params.validate();
  const double ce = params.conv_energy;
  const double cl = params.conv_length;
  const double cf = ce / cl;

  Dataset out = data;
  for (auto& s : out.structures) {
    if (direction == NormDirection::Forward) {
      for (auto& r : s.positions) r *= cl;
      if (s.energy) s.energy = (*s.energy - s.n_atoms() * params.mean_energy) * ce;
      if (s.forces) {
        for (auto& f : *s.forces) f *= cf;
      }
    } else {
      for (auto& r : s.positions) r /= cl;
      if (s.energy) s.energy = *s.energy / ce + s.n_atoms() * params.mean_energy;
      if (s.forces) {
        for (auto& f : *s.forces) f /= cf;
      }
    }
  }
  return out;
}

}  // namespace qmlp
