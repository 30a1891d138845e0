#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>
#include <string_view>

namespace citysim {

// SplitMix64: a 64-bit state generator that is cheap to construct. The
// simulator derives a fresh stream per (purpose, key...) tuple so results do
// not depend on the order in which agents or spaces are processed.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

std::uint64_t mix64(std::uint64_t x);

// Seed for the named substream `stream` of `root`, further keyed by `keys`.
std::uint64_t derive_seed(std::uint64_t root, std::string_view stream, std::initializer_list<std::uint64_t> keys = {});

inline Rng substream(std::uint64_t root, std::string_view stream, std::initializer_list<std::uint64_t> keys = {}) {
  return Rng(derive_seed(root, stream, keys));
}

// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline double uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

// Uniform integer in [0, n). n must be positive.
std::uint64_t uniform_index(Rng& rng, std::uint64_t n);

inline bool bernoulli(Rng& rng, double p) { return uniform01(rng) < p; }

double standard_normal(Rng& rng);

}  // namespace citysim
