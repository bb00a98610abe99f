#pragma once

#include <array>
#include <cstdint>

namespace svelab {

/// Philox4x32 with 10 rounds.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter, std::array<std::uint32_t, 2> key);

/// 64 uniform bits at address (a, b, c) of the stream keyed by seed.
std::uint64_t counter_bits(std::uint64_t seed, std::uint64_t a, std::uint32_t b, std::uint32_t c);

/// Counter-based standard normal stream: every (path, step, mode) address maps
/// to one variate, independent of the order in which addresses are visited.
class CounterNormal {
  static void box_muller(const std::array<std::uint32_t, 4>& r, double& z0, double& z1);

 public:
  explicit CounterNormal(std::uint64_t master_seed) : seed_(master_seed) {}

  /// Modes 2m and 2m+1 share one Philox block through the two Box-Muller outputs.
  double operator()(std::uint64_t path, std::uint32_t step, std::uint32_t mode) const;

  /// Variates for modes 0..count-1 at (path, step); same values as operator().
  void fill(std::uint64_t path, std::uint32_t step, double* out, std::uint32_t count) const;

  std::uint64_t seed() const noexcept { return seed_; }

 private:
  std::uint64_t seed_;
};

}  // namespace svelab
