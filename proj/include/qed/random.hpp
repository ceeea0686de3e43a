// SPDX-License-Identifier: Apache-2.0
//
// Seeded random variate generation. Algorithms are implemented here rather
// than taken from <random> distributions so that a fixed seed yields the
// same stream on every standard library, which the replication harness
// relies on.

#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

namespace qed {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(splitmix64(seed)) {}

  // Independent per-replication stream derived from a master seed.
  static Rng for_replication(std::uint64_t master, std::uint64_t replication) {
    return Rng(splitmix64(master ^ splitmix64(replication + 1)));
  }

  std::uint64_t next_u64() { return eng_(); }

  // Uniform on [0, 1), 53-bit resolution.
  double uniform01() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  // Standard normal via the Marsaglia polar method (no cached spare).
  double normal() {
    for (;;) {
      double u = 2.0 * uniform01() - 1.0;
      double v = 2.0 * uniform01() - 1.0;
      double s = u * u + v * v;
      if (s > 0.0 && s < 1.0) {
        return u * std::sqrt(-2.0 * std::log(s) / s);
      }
    }
  }

  // Gamma(shape, 1) via Marsaglia-Tsang squeeze; shape < 1 boosted through
  // Gamma(shape+1) * U^(1/shape).
  double gamma(double shape) {
    if (!(shape > 0)) throw std::invalid_argument("gamma: shape <= 0");
    if (shape < 1.0) {
      double u = uniform01();
      return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x = normal();
      double t = 1.0 + c * x;
      if (t <= 0.0) continue;
      double v = t * t * t;
      double u = uniform01();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) {
        return d * v;
      }
    }
  }

  // Poisson by inversion (product of uniforms); adequate for the means used
  // by the compound Poisson-Gamma sampler.
  long poisson(double mean) {
    if (!(mean >= 0)) throw std::invalid_argument("poisson: mean < 0");
    if (mean > 600.0) throw std::invalid_argument("poisson: mean too large");
    const double limit = std::exp(-mean);
    long k = 0;
    double p = 1.0;
    do {
      ++k;
      p *= uniform01();
    } while (p > limit);
    return k - 1;
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace qed
