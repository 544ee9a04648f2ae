#pragma once
// Deterministic counter-based random streams.
//
// Monte Carlo trials need per-trial streams keyed as (base_seed + trial)
// that are reproducible, order-independent under parallel execution, and
// byte-stable across runs of the same binary.  A SplitMix64 generator keyed
// directly by the stream id provides exactly that: every stream is a pure
// function of its 64-bit key, with no global state.

#include <cmath>
#include <complex>
#include <cstdint>

#include "lse_lab/special.hpp"

namespace lse_lab {

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Uniform in (0, 1]: never returns 0 so log() is always finite.
  double uniform_pos() {
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  }

 private:
  std::uint64_t state_;
};

// Gaussian stream via Box-Muller on top of SplitMix64.
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t stream_key) : rng_(stream_key) {}

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = rng_.uniform_pos();
    const double u2 = rng_.uniform_pos();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * kPi * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  // Circularly symmetric complex Gaussian with E|z|^2 = variance.
  std::complex<double> cnormal(double variance = 1.0) {
    const double s = std::sqrt(0.5 * variance);
    return {s * normal(), s * normal()};
  }

  std::uint64_t uniform_index(std::uint64_t n) { return rng_.next_u64() % n; }
  double uniform_pos() { return rng_.uniform_pos(); }

 private:
  SplitMix64 rng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace lse_lab
