#pragma once

// Seedable deterministic pseudo-random stream. All variate transforms are
// implemented here rather than via std:: distributions so that a given seed
// produces the same sequence on every standard library.

#include <cmath>
#include <cstdint>
#include <random>

#include "difit/common.hpp"
#include "difit/special.hpp"

namespace difit {

class RngStream {
 public:
  explicit RngStream(std::uint64_t seed = 0) : engine_(seed) {}

  /// Uniform on (0, 1), 53-bit resolution, never exactly 0 or 1.
  double uniform() {
    double u = (engine_() >> 11) * 0x1.0p-53;
    return u > 0.0 ? u : 0x1.0p-53;
  }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  /// Standard normal via Box-Muller (two uniforms per call; no caching, so the
  /// stream position is a pure function of the call count).
  double normal() {
    double u1 = uniform(), u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * special::pi * u2);
  }

  double exponential(double rate = 1.0) { return -std::log(uniform()) / rate; }

  /// Gamma(shape, scale) via Marsaglia-Tsang squeeze; shape < 1 boosted.
  double gamma(double shape, double scale = 1.0) {
    require(shape > 0.0 && scale > 0.0, "gamma sampler: shape and scale must be > 0");
    if (shape < 1.0) {
      double u = uniform();
      return gamma(shape + 1.0, scale) * std::pow(u, 1.0 / shape);
    }
    double d = shape - 1.0 / 3.0;
    double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x = normal();
      double v = 1.0 + c * x;
      if (v <= 0.0) continue;
      v = v * v * v;
      double u = uniform();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v * scale;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v * scale;
    }
  }

  std::uint64_t raw() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace difit
