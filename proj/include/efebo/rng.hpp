#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace efebo {

/// Deterministic pseudo-random source passed explicitly to every randomized
/// operation. Two instances built from the same seed produce the same stream.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : engine_(seed), seed_(seed) {}

  double normal();
  /// Uniform on [lo, hi).
  double uniform(double lo, double hi);
  bool bernoulli(double p);

  std::uint64_t seed() const noexcept { return seed_; }
  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::uint64_t seed_;
};

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Derives an independent sub-seed from a parent seed and a list of integer
/// keys. The result depends only on the values, never on how many draws any
/// other stream has consumed.
std::uint64_t derive_seed(std::uint64_t parent, std::initializer_list<std::uint64_t> keys) noexcept;

}  // namespace efebo
