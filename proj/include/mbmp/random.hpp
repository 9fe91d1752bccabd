#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace mbmp {

using Seed = std::uint64_t;
using Rng = std::mt19937_64;

// splitmix64 finalizer
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Pure function of its arguments; the per-trial seed for (point, trial) under a master seed.
constexpr Seed derive_seed(Seed master, std::uint64_t a, std::uint64_t b = 0) {
  return mix64(mix64(mix64(master) ^ a) ^ (b * 0x2545f4914f6cdd1dULL + 1));
}

/// Circular complex Gaussian with E|z|^2 = variance.
inline std::complex<double> complex_gaussian(Rng& rng, double variance = 1.0) {
  std::normal_distribution<double> normal(0.0, std::sqrt(variance / 2.0));
  const double re = normal(rng);
  const double im = normal(rng);
  return {re, im};
}

}  // namespace mbmp
