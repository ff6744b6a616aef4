#pragma once

#include <cstdint>
#include <random>

namespace polyglot {

/// Deterministic generator with platform-stable distributions. The engine
/// sequence is fixed by the standard; the std:: distributions are not, so
/// the bounded/real mappings are done here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform in [0, bound). bound must be > 0.
  std::uint64_t below(std::uint64_t bound);
  /// Uniform in [lo, hi] inclusive.
  std::uint64_t between(std::uint64_t lo, std::uint64_t hi) { return lo + below(hi - lo + 1); }
  /// Uniform in [0, 1).
  double unit();
  /// Log-uniform integer in [lo, hi].
  std::uint64_t log_uniform(std::uint64_t lo, std::uint64_t hi);
  std::uint8_t byte() { return static_cast<std::uint8_t>(engine_() >> 56); }

 private:
  std::mt19937_64 engine_;
};

/// Derives an independent seed from a parent seed and a stream tag.
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t tag);

}  // namespace polyglot
