#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace riscov {

/// Deterministic random stream. Distribution transforms are implemented here
/// (not via std::*_distribution) so that identical seeds give identical draws
/// on any standard library. Substreams derived from (seed, stream) are
/// independent streams for per-trial parallelism.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  Rng(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    gen_.seed(seq);
  }

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  double exponential(double mean) { return -mean * std::log1p(-uniform()); }

  /// Poisson count by accumulating unit-exponential arrivals; exact for any mean.
  long poisson(double mean) {
    if (!(mean > 0.0)) return 0;
    long n = 0;
    double acc = exponential(1.0);
    while (acc < mean) {
      ++n;
      acc += exponential(1.0);
    }
    return n;
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace riscov
