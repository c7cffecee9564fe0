#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>

#include "biostate/error.hpp"

namespace biostate {

/// Deterministic random source. The engine is the standard-specified
/// mt19937_64 stream, but all distributions are implemented here rather than
/// taken from <random>: standard-library distributions are not reproducible
/// across implementations, and every sampled artifact in this project must be
/// identical for a given seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform double in [0, 1), 53-bit resolution.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform index in [0, n).
  std::size_t next_index(std::size_t n) {
    require(n > 0, Errc::BadArgument, "next_index needs n > 0");
    return static_cast<std::size_t>(next_double() * static_cast<double>(n));
  }

  /// Standard normal via Box-Muller; the second deviate is cached.
  double next_normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - next_double();  // (0, 1]
    const double u2 = next_double();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(t);
    has_spare_ = true;
    return r * std::cos(t);
  }

  /// Categorical draw proportional to nonnegative weights. Zero total weight
  /// falls back to a uniform index.
  std::size_t next_weighted(std::span<const double> weights) {
    require(!weights.empty(), Errc::BadArgument, "next_weighted needs weights");
    double total = 0.0;
    for (double w : weights) total += w;
    if (!(total > 0.0)) return next_index(weights.size());
    const double x = next_double() * total;
    double cum = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      cum += weights[i];
      if (x < cum) return i;
    }
    return weights.size() - 1;
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace biostate
