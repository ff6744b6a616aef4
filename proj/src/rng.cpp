#include "polyglot/rng.hpp"

#include <cmath>

namespace polyglot {

std::uint64_t Rng::below(std::uint64_t bound) {
  // Rejection sampling keeps the mapping exact and engine-defined.
  const std::uint64_t limit = bound * ((~std::uint64_t{0}) / bound);
  std::uint64_t v;
  do {
    v = engine_();
  } while (v >= limit);
  return v % bound;
}

double Rng::unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

std::uint64_t Rng::log_uniform(std::uint64_t lo, std::uint64_t hi) {
  if (lo >= hi) return lo;
  const double a = std::log(static_cast<double>(lo));
  const double b = std::log(static_cast<double>(hi) + 1.0);
  auto v = static_cast<std::uint64_t>(std::exp(a + (b - a) * unit()));
  return v < lo ? lo : (v > hi ? hi : v);
}

std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t tag) {
  // splitmix64 finalizer over the combined value
  std::uint64_t z = parent ^ (tag * 0x9E3779B97F4A7C15ull) ^ 0xD1B54A32D192ED03ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace polyglot
