#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace mipt {

/// SplitMix64 finalizer. Used for counter-based seed derivation.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Derives a child seed from a master seed and a tuple of counters
/// (e.g. p-index, trajectory index). Independent of evaluation order.
std::uint64_t derive_seed(std::uint64_t master,
                          std::initializer_list<std::uint64_t> counters) noexcept;

/// Seeded random stream owned by a single trajectory or task.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53-bit resolution.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Uniform on (0, 1]; `uniform_open_closed() <= p` is never true for p = 0
  /// and always true for p = 1.
  double uniform_open_closed() {
    return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
  }

  double normal() { return normal_(engine_); }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace mipt
