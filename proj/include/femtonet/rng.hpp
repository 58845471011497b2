#pragma once
// Deterministic random streams with explicit per-trial derivation.
//
// All distributions are implemented in-repo (not via std::<random>
// distributions, whose algorithms are implementation-defined) so that a given
// (seed, stream id, trial index) produces bit-identical draws on every run
// and under every worker count.

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace femtonet {

// SplitMix64 output function: high-quality 64-bit mixing.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// One-shot stateless mix, used to derive independent stream seeds.
inline std::uint64_t mix64(std::uint64_t x) {
  std::uint64_t s = x;
  return splitmix64_next(s);
}

class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : state_(mix64(seed)) {}

  // Stream for a (seed, point, trial) triple; any two distinct triples give
  // statistically independent streams.
  static RandomStream derived(std::uint64_t seed, std::uint64_t point,
                              std::uint64_t trial = 0) {
    std::uint64_t h = mix64(seed);
    h = mix64(h ^ (0x9E3779B97F4A7C15ULL + point));
    h = mix64(h ^ (0xC2B2AE3D27D4EB4FULL + trial));
    return RandomStream(h);
  }

  // Independent child stream keyed by (point, trial) off this stream's
  // current state; does not advance this stream.
  RandomStream substream(std::uint64_t point, std::uint64_t trial = 0) const {
    return derived(state_, point, trial);
  }

  std::uint64_t next_u64() { return splitmix64_next(state_); }

  // Uniform on [0, 1).
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform on (0, 1]; safe under log().
  double uniform_pos() {
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller; caches the second draw of each pair.
  double gauss() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    const double u1 = uniform_pos();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.28318530717958647692 * u2;
    cached_ = r * std::sin(a);
    have_cached_ = true;
    return r * std::cos(a);
  }

  // Exponential with the given mean (inverse-CDF method).
  double expo(double mean = 1.0) { return -mean * std::log(uniform_pos()); }

  // Poisson: Knuth product method for small means, Hormann's PTRS
  // transformed-rejection for large means.
  std::uint64_t poisson(double mean) {
    if (!(mean >= 0.0)) throw std::domain_error("poisson: mean must be >= 0");
    if (mean == 0.0) return 0;
    if (mean < 30.0) {
      const double limit = std::exp(-mean);
      std::uint64_t k = 0;
      double prod = uniform();
      while (prod > limit) {
        ++k;
        prod *= uniform();
      }
      return k;
    }
    // PTRS (W. Hormann, "The transformed rejection method for generating
    // Poisson random variables").
    const double mu = mean;
    const double b = 0.931 + 2.53 * std::sqrt(mu);
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);
    const double log_mu = std::log(mu);
    for (;;) {
      const double u = uniform() - 0.5;
      const double v = uniform();
      const double us = 0.5 - std::fabs(u);
      const double kf = std::floor((2.0 * a / us + b) * u + mu + 0.43);
      if (us >= 0.07 && v <= v_r) return static_cast<std::uint64_t>(kf);
      if (kf < 0.0 || (us < 0.013 && v > us)) continue;
      const double lhs = std::log(v * inv_alpha / (a / (us * us) + b));
      const double rhs = kf * log_mu - mu - std::lgamma(kf + 1.0);
      if (lhs <= rhs) return static_cast<std::uint64_t>(kf);
    }
  }

 private:
  std::uint64_t state_;
  double cached_ = 0.0;
  bool have_cached_ = false;
};

}  // namespace femtonet
