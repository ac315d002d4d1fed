#pragma once

#include <cstdint>

#include "sympack/types.hpp"

namespace sympack {

// Counter-based generator: value = f(seed, index). Split-safe, so parallel
// sampling is deterministic given (seed, index) regardless of scheduling.
struct CounterRng {
  std::uint64_t seed;

  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t bits(std::uint64_t index, std::uint64_t stream = 0) const {
    std::uint64_t h = mix(seed ^ 0x8f1bbcdcbfa53e0bULL);
    h = mix(h ^ index);
    h = mix(h ^ (stream * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL));
    return h;
  }

  // Uniform in [0,1).
  double uniform(std::uint64_t index, std::uint64_t stream = 0) const {
    return static_cast<double>(bits(index, stream) >> 11) * 0x1.0p-53;
  }

  double uniform(std::uint64_t index, std::uint64_t stream, double lo, double hi) const {
    return lo + (hi - lo) * uniform(index, stream);
  }
};

// Sequential convenience wrapper around CounterRng.
struct SeqRng {
  CounterRng rng;
  std::uint64_t ctr = 0;
  explicit SeqRng(std::uint64_t seed) : rng{seed} {}
  double uniform() { return rng.uniform(ctr++); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  Vec uniform_vec(int dim, double lo, double hi) {
    Vec z(dim);
    for (int i = 0; i < dim; ++i) z[i] = uniform(lo, hi);
    return z;
  }
};

}  // namespace sympack
