#include "citysim/rng.hpp"

#include <random>

namespace citysim {

std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 33;
  x *= 0xFF51AFD7ED558CCDULL;
  x ^= x >> 33;
  x *= 0xC4CEB9FE1A85EC53ULL;
  x ^= x >> 33;
  return x;
}

std::uint64_t derive_seed(std::uint64_t root, std::string_view stream, std::initializer_list<std::uint64_t> keys) {
  // FNV-1a over the stream name, then fold in each key.
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : stream) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  std::uint64_t s = mix64(root ^ mix64(h));
  for (std::uint64_t k : keys) s = mix64(s ^ mix64(k + 0x9E3779B97F4A7C15ULL));
  return s;
}

std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
  return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(rng);
}

double standard_normal(Rng& rng) {
  // A fresh distribution per call so no value is cached between draws.
  return std::normal_distribution<double>(0.0, 1.0)(rng);
}

}  // namespace citysim
