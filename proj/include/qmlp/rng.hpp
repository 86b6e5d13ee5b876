#pragma once

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

namespace qmlp {

/// Counter-based pseudo-random stream (splitmix64). All randomness in the
/// library flows through this type so that runs are bit-for-bit reproducible
/// across platforms; std:: distributions are implementation-defined and are
/// deliberately not used.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  /// Independent substream for (master seed, stream index) pairs, e.g.
  /// (sweep seed, cell index) or (label seed, structure index).
  static Rng derive(std::uint64_t master, std::uint64_t stream) {
    Rng r(master ^ mix(stream + 0x9E3779B97F4A7C15ULL));
    r.next_u64();
    return r;
  }

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix(state_);
  }

  /// Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n).
  std::uint64_t uniform_int(std::uint64_t n) {
    // modulo bias is < 2^-53 for the n used here (shuffles, subset picks)
    return next_u64() % n;
  }

  /// Standard normal via Box-Muller (deterministic, no internal cache).
  double normal() {
    double u1 = 1.0 - uniform();  // (0, 1]
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[uniform_int(i)]);
    }
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
};

}  // namespace qmlp
