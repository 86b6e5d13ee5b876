#include "qmlp/noise.hpp"

#include <stdexcept>

#include "qmlp/rng.hpp"

namespace qmlp {

void NoiseInjection::validate() const {
  if (delta_e < 0.0 || delta_f < 0.0) {
    throw std::invalid_argument("noise injection: negative standard deviation");
  }
}

Dataset inject_noise(const Dataset& data, const NoiseInjection& spec) {
  spec.validate();
  Dataset out = data;
  for (int i = 0; i < out.size(); ++i) {
    auto& s = out.structures[i];
    Rng rng = Rng::derive(spec.seed, static_cast<std::uint64_t>(i));
    if (spec.delta_e > 0.0) {
      if (!s.energy) throw std::invalid_argument("noise injection: missing energy label");
      s.energy = *s.energy + rng.normal(0.0, spec.delta_e * s.n_atoms());
    }
    if (spec.delta_f > 0.0) {
      if (!s.forces) throw std::invalid_argument("noise injection: missing force labels");
      for (auto& f : *s.forces) {
        for (int k = 0; k < 3; ++k) f[k] += rng.normal(0.0, spec.delta_f);
      }
    }
  }
  return out;
}

}  // namespace qmlp
