#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>

namespace adacot {

// splitmix64 step; used to derive independent stream seeds from
// (run seed, purpose, step, prompt, sample) tuples so that workers can
// sample in any order and still reproduce bit-identical trajectories.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t mix_seed(std::initializer_list<std::uint64_t> parts) {
  std::uint64_t state = 0x8f1bbcdcbfa53e0bULL;
  std::uint64_t out = 0;
  for (std::uint64_t p : parts) {
    state ^= p;
    out = splitmix64(state);
  }
  return out;
}

inline std::mt19937_64 make_rng(std::initializer_list<std::uint64_t> parts) {
  return std::mt19937_64(mix_seed(parts));
}

// Uniform double in [0, 1) with 53 bits of the raw output. Avoids
// std::uniform_real_distribution so draws do not depend on the standard
// library implementation.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [lo, hi], inclusive.
inline long uniform_long(std::mt19937_64& rng, long lo, long hi) {
  const double u = uniform01(rng);
  long v = lo + static_cast<long>(u * static_cast<double>(hi - lo + 1));
  return v > hi ? hi : v;
}

// Draws an index from a probability vector by CDF walk. Probabilities are
// assumed nonnegative; any rounding slack lands on the last index.
inline int sample_categorical(std::mt19937_64& rng, std::span<const double> probs) {
  const double u = uniform01(rng);
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
    acc += probs[i];
    if (u < acc) return static_cast<int>(i);
  }
  return static_cast<int>(probs.size()) - 1;
}

}  // namespace adacot
