#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace levyrd {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Seed for a derived task (replica index, subsystem tag, ...).
inline std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t index) {
  std::uint64_t s = base_seed;
  (void)splitmix64(s);
  s ^= 0x9E3779B97F4A7C15ULL * (index + 1);
  return splitmix64(s);
}

// Deterministic RNG stream.  All samplers in the library draw through this
// class rather than std::*_distribution so that realizations are bit-exact
// functions of (config, seed) independent of the standard library build.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : engine_(seed) {}

  static RngStream derive(std::uint64_t base_seed, std::uint64_t index) {
    return RngStream(derive_seed(base_seed, index));
  }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on the open interval (0,1).
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  double exponential(double rate) { return -std::log(uniform()) / rate; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace levyrd
