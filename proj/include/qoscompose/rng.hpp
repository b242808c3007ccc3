#pragma once

#include <bit>
#include <cassert>
#include <cstdint>
#include <random>

namespace qoscompose {

// splitmix64 finalizer, used to whiten seeds and derive per-cell streams.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Seedable generator with a fixed draw protocol. All stochastic code in this
// project draws through this wrapper rather than through std:: distributions,
// whose output is implementation-defined; a (seed, call sequence) pair
// therefore produces the same values on every toolchain.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(mix64(seed)) {}
  Rng(std::uint64_t seed, std::uint64_t stream) : engine_(mix64(seed ^ mix64(stream))) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform over [0, n). Rejection sampling on a power-of-two mask; unbiased.
  std::size_t uniform_index(std::size_t n) {
    assert(n > 0);
    const std::uint64_t mask = std::bit_ceil(static_cast<std::uint64_t>(n)) - 1;
    std::uint64_t v = next_u64() & mask;
    while (v >= n) {
      v = next_u64() & mask;
    }
    return static_cast<std::size_t>(v);
  }

  // Uniform over [0, 1) with 53-bit resolution.
  double uniform_real() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform_range(double lo, double hi) { return lo + (hi - lo) * uniform_real(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace qoscompose
