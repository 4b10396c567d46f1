#pragma once

/// \file rng.hpp
/// Deterministic random number generation. All transforms (uniform mantissa,
/// Box-Muller, Marsaglia-Tsang gamma) are spelled out here instead of using
/// std::*_distribution, whose output is implementation-defined; identical
/// seeds therefore give identical streams on every platform this builds on.

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string>

namespace aese {

class Rng {
 public:
  explicit Rng(uint64_t seed) : eng_(seed) {}

  uint64_t next_u64() { return eng_(); }

  /// Uniform on [0, 1) with 53-bit mantissa.
  double uniform() { return (eng_() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1].
  double uniform_pos() { return 1.0 - uniform(); }

  /// Standard normal via Box-Muller (two fresh uniforms per draw).
  double normal();

  /// Gamma(shape, 1), shape > 0, by Marsaglia-Tsang; the shape < 1 case uses
  /// the boosting identity Gamma(a) = Gamma(a+1) U^{1/a}.
  double gamma(double shape);

  /// Uniform integer in [0, n), n >= 1.
  uint64_t bounded(uint64_t n);

 private:
  std::mt19937_64 eng_;
};

/// Independent stream seeds derived from a base seed and salts (splitmix64
/// finalizer chain).
uint64_t derive_seed(uint64_t base, std::initializer_list<uint64_t> salts);

/// FNV-1a for salting seeds with names.
uint64_t hash_name(const std::string& s);

}  // namespace aese
