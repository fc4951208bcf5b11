#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>
#include <random>
#include <span>
#include <vector>

#include "lar/errors.hpp"

namespace lar {

// splitmix64 step, used for seed derivation only.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deterministic seed for a named stream, e.g. (base_seed, trial, player, purpose).
// Order-sensitive, so distinct roles get distinct streams.
inline std::uint64_t derive_seed(std::initializer_list<std::uint64_t> parts) {
  std::uint64_t state = 0x6a09e667f3bcc908ULL;
  std::uint64_t out = 0;
  for (std::uint64_t p : parts) {
    state ^= p + 0x9e3779b97f4a7c15ULL + (state << 6) + (state >> 2);
    out = splitmix64(state);
  }
  return out;
}

// mt19937_64 wrapper that produces uniforms and bounded ints without going
// through std::*_distribution, whose output is not pinned by the standard.
// Keeps trajectories reproducible across standard library versions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // Uniform in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Uniform integer in [0, n), rejection sampled to avoid modulo bias.
  int below(int n) {
    if (n <= 0) throw DomainError("Rng::below: n must be positive");
    const std::uint64_t un = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % un;
    std::uint64_t x;
    do {
      x = gen_();
    } while (x >= limit);
    return static_cast<int>(x % un);
  }

  bool bernoulli(double p) { return uniform01() < p; }

  // Index sampled from a probability vector via CDF scan. The final index
  // absorbs any rounding slack in the cumulative sum.
  int sample(std::span<const double> weights) {
    const double u = uniform01();
    double cum = 0.0;
    for (std::size_t j = 0; j + 1 < weights.size(); ++j) {
      cum += weights[j];
      if (u < cum) return static_cast<int>(j);
    }
    return static_cast<int>(weights.size()) - 1;
  }

  template <typename T>
  void shuffle(std::vector<T>& xs) {
    for (int i = static_cast<int>(xs.size()) - 1; i > 0; --i) {
      std::swap(xs[i], xs[below(i + 1)]);
    }
  }

  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
};

}  // namespace lar
