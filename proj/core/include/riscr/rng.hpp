#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

#include "riscr/types.hpp"

namespace riscr {

/// splitmix64 step; used to hash seed material into independent stream keys.
std::uint64_t splitmix64_next(std::uint64_t& state);

/// Derives a stream seed from a base seed and a path of indices, so that
/// e.g. (base, {trial, M}) identifies a reproducible stream regardless of
/// the order streams are consumed in.
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> path);

/// Deterministic random source: mt19937_64 plus self-contained uniform and
/// Gaussian transforms (no std::distribution, whose output is
/// implementation-defined). Identical seeds give identical draws everywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next_u64() { return eng_(); }

  /// Uniform in [0, 1) with 53-bit resolution.
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller; one spare value is cached.
  double normal();

  /// Circularly-symmetric complex Gaussian with unit total variance.
  Complex cnormal() {
    const double re = normal();
    const double im = normal();
    return Complex(re * M_SQRT1_2, im * M_SQRT1_2);
  }

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace riscr
