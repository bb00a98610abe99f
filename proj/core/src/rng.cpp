#include "svelab/rng.hpp"

#include <cmath>
#include <numbers>

namespace svelab {

namespace {

constexpr std::uint32_t kM0 = 0xD2511F53u;
constexpr std::uint32_t kM1 = 0xCD9E8D57u;
constexpr std::uint32_t kW0 = 0x9E3779B9u;
constexpr std::uint32_t kW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> c, std::array<std::uint32_t, 2> k) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      k[0] += kW0;
      k[1] += kW1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kM0, c[0], hi0, lo0);
    mulhilo(kM1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
  }
  return c;
}

namespace {

std::array<std::uint32_t, 4> block(std::uint64_t seed, std::uint64_t path, std::uint32_t step, std::uint32_t pair) {
  return philox4x32({step, pair, static_cast<std::uint32_t>(path), static_cast<std::uint32_t>(path >> 32)},
                    {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)});
}

}  // namespace

std::uint64_t counter_bits(std::uint64_t seed, std::uint64_t a, std::uint32_t b, std::uint32_t c) {
  const auto r = philox4x32({b, c, static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32)},
                            {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)});
  return (static_cast<std::uint64_t>(r[0]) << 32) | r[1];
}

void CounterNormal::box_muller(const std::array<std::uint32_t, 4>& r, double& z0, double& z1) {
  const std::uint64_t a = ((static_cast<std::uint64_t>(r[0]) << 32) | r[1]) >> 11;
  const std::uint64_t b = ((static_cast<std::uint64_t>(r[2]) << 32) | r[3]) >> 11;
  const double u1 = (static_cast<double>(a) + 1.0) * 0x1p-53;  // (0, 1]
  const double u2 = static_cast<double>(b) * 0x1p-53;
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  z0 = radius * std::cos(angle);
  z1 = radius * std::sin(angle);
}

double CounterNormal::operator()(std::uint64_t path, std::uint32_t step, std::uint32_t mode) const {
  double z0, z1;
  box_muller(block(seed_, path, step, mode / 2u), z0, z1);
  return (mode & 1u) ? z1 : z0;
}

void CounterNormal::fill(std::uint64_t path, std::uint32_t step, double* out, std::uint32_t count) const {
  for (std::uint32_t m = 0; m < count; m += 2) {
    double z0, z1;
    box_muller(block(seed_, path, step, m / 2u), z0, z1);
    out[m] = z0;
    if (m + 1 < count) out[m + 1] = z1;
  }
}

}  // namespace svelab
