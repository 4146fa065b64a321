#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "amicus/errors.hpp"

namespace amicus {

// splitmix64 finalizer.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deterministic sub-stream seed: the same (base, stream, index) triple always
// yields the same seed, independent of thread scheduling or call order.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream,
                                 std::uint64_t index = 0) {
  return mix64(mix64(mix64(base) ^ stream) ^ index);
}

// mt19937_64 plus fixed transforms. The standard <random> distributions are
// implementation-defined, so sampled artifacts would not be stable across
// standard libraries; everything here is pinned.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next() { return eng_(); }

  // Uniform on [0, 1), 53-bit resolution.
  double uniform() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  // Uniform on (0, 1].
  double uniform_pos() { return 1.0 - uniform(); }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Unbiased integer in [0, n).
  std::uint64_t uniform_int(std::uint64_t n) {
    if (n == 0) throw ValidationError("uniform_int: n must be positive");
    const std::uint64_t bound = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t r = eng_();
    while (r >= bound) r = eng_();
    return r % n;
  }

  bool bernoulli(double p) { return uniform() < p; }

  // Standard normal via Box-Muller (cosine branch only, no cached state).
  double normal() {
    const double u1 = uniform_pos();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  // Gamma(shape, 1) via Marsaglia-Tsang; boosted for shape < 1.
  double gamma(double shape) {
    if (shape <= 0.0) throw ValidationError("gamma: shape must be positive");
    if (shape < 1.0) {
      const double u = uniform_pos();
      return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x, v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform_pos();
      if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) {
        return d * v;
      }
    }
  }

  // Symmetric Dirichlet(alpha) of the given dimension.
  std::vector<double> dirichlet(double alpha, int dim) {
    std::vector<double> out(static_cast<std::size_t>(dim));
    double sum = 0.0;
    for (auto& x : out) {
      x = gamma(alpha);
      sum += x;
    }
    if (sum <= 0.0) {
      // All gamma draws underflowed; fall back to a uniform point.
      for (auto& x : out) x = 1.0 / dim;
      return out;
    }
    for (auto& x : out) x /= sum;
    return out;
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace amicus
