#pragma once

#include <cmath>
#include <cstdint>
#include <span>

namespace plumeloc {

/// Deterministic random stream keyed by (root seed, phase, index).
///
/// Every stochastic operation in the samplers draws from a stream derived
/// from a counter-style key: proposal j of iteration t uses the stream
/// (seed, t, j). Streams with different keys never share state, so a
/// parallel evaluation of proposals sees exactly the same draws as a
/// sequential one.
///
/// The draw protocol is fixed because reference reimplementations have to
/// reproduce it draw for draw:
///   - base generator: splitmix64 over the key-derived state
///   - uniform01:  ((next_u64() >> 12) + 0.5) * 2^-52, strictly inside (0,1)
///   - normal01:   Box-Muller cosine branch, always consumes two uniforms
///   - gamma:      Marsaglia-Tsang squeeze; shape < 1 via Gamma(k+1)*U^(1/k)
///   - beta(p,q):  Gamma(p,1) / (Gamma(p,1) + Gamma(q,1)), valid for any p,q > 0
///   - discrete:   one uniform against the cumulative weights
class RngStream {
 public:
  explicit RngStream(std::uint64_t root_seed, std::uint64_t phase = 0,
                     std::uint64_t index = 0) {
    state_ = mix(root_seed + 0x9E3779B97F4A7C15ull * (phase + 1));
    state_ = mix(state_ + 0xD1B54A32D192ED03ull * (index + 1));
  }

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ull;
    return mix(state_);
  }

  double uniform01() {
    return (static_cast<double>(next_u64() >> 12) + 0.5) * 0x1.0p-52;
  }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  double normal01() {
    const double u1 = uniform01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
  }

  double gamma(double shape, double scale) {
    if (shape < 1.0) {
      const double boosted = gamma(shape + 1.0, scale);
      const double u = uniform01();
      return boosted * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x = 0.0;
      double v = 0.0;
      do {
        x = normal01();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform01();
      if (u < 1.0 - 0.0331 * (x * x) * (x * x)) return d * v * scale;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v * scale;
    }
  }

  double beta(double p, double q) {
    const double x = gamma(p, 1.0);
    const double y = gamma(q, 1.0);
    return x / (x + y);
  }

  /// Index drawn with probability weights[i]; weights must be normalised.
  std::size_t discrete(std::span<const double> weights) {
    const double u = uniform01();
    double cum = 0.0;
    for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
      cum += weights[i];
      if (u <= cum) return i;
    }
    return weights.size() - 1;
  }

 private:
  static constexpr double kPi = 3.14159265358979323846;

  // splitmix64 finalizer
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
};

}  // namespace plumeloc
