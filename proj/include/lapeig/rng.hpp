#pragma once

#include <cstdint>
#include <random>

namespace lapeig {

/// SplitMix64 finalizer; advances `state` and returns the mixed output.
std::uint64_t splitmix64(std::uint64_t& state) noexcept;

/// Derives an independent sub-seed from a master seed and two stream labels
/// (e.g. sample size and trial index).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b) noexcept;

// Uniform and normal variates are produced from raw engine bits so clouds are
// bit-identical across standard libraries (std distributions are not).
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on (0, 1].
  double uniform_open_left();
  double normal();

 private:
  std::mt19937_64 engine_;
};

}  // namespace lapeig
