#pragma once

#include <cstdint>
#include <random>
#include <sstream>
#include <string>

namespace e2boost {

using Rng = std::mt19937_64;

// SplitMix64 finalizer; used to derive independent stream seeds from a
// master seed and a counter so that trial sets do not depend on execution order.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  return splitmix64(splitmix64(master) ^ splitmix64(stream + 0x632BE59BD9B4E019ULL));
}

constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b) {
  return derive_seed(derive_seed(master, a), b);
}

inline Rng make_rng(std::uint64_t master, std::uint64_t stream) {
  return Rng(derive_seed(master, stream));
}

// Uniform index in [0, n). Consumes no randomness when n == 1.
inline int uniform_index(Rng& rng, int n) {
  if (n <= 1) return 0;
  return std::uniform_int_distribution<int>(0, n - 1)(rng);
}

inline double uniform01(Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

// Bernoulli draw that short-circuits the degenerate probabilities.
inline bool bernoulli(Rng& rng, double p) {
  if (p >= 1.0) return true;
  if (p <= 0.0) return false;
  return uniform01(rng) < p;
}

// Engine state as text, for checkpoints.
inline std::string rng_state(const Rng& rng) {
  std::ostringstream os;
  os << rng;
  return os.str();
}

inline void set_rng_state(Rng& rng, const std::string& state) {
  std::istringstream is(state);
  is >> rng;
}

}  // namespace e2boost
