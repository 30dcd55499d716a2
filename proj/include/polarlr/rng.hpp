// Deterministic, counter-friendly random number utilities. Everything the
// library randomizes (channel noise, path sampling, tie-breaking, generators
// for property tests) derives from these so results are reproducible across
// platforms and thread counts.

#pragma once

#include <cstdint>

namespace polarlr {

// splitmix64 step: advances the state and returns a 64-bit value.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Stateless mix of up to three words; used to derive independent streams
// (per trial, per bit index) from one user seed.
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b = 0,
                              std::uint64_t c = 0) {
  std::uint64_t s = a;
  std::uint64_t h = splitmix64(s);
  s ^= b + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
  h ^= splitmix64(s);
  s ^= c + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
  return splitmix64(s);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() { return splitmix64(state_); }

  // Uniform in [0, 1).
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform in [lo, hi).
  double uniform(double lo, double hi) {
    return lo + (hi - lo) * next_double();
  }

  // Uniform integer in [0, n).
  std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }

  bool next_bool() { return (next_u64() & 1) != 0; }

  // Standard normal via Box-Muller; hand-rolled so draws are identical on
  // every platform.
  double next_normal();

 private:
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace polarlr
