#pragma once

#include "branchlab/numeric.hpp"

#include <algorithm>
#include <cstdint>
#include <random>
#include <utility>

namespace branchlab {

std::uint64_t splitmix64(std::uint64_t x);

/// Seed of stream `index` under `master`: splitmix64 applied to master, then
/// to the combination with the index. Streams for distinct indices are
/// statistically independent for all practical purposes.
std::uint64_t stream_seed(std::uint64_t master, std::uint64_t index);

/// Random source handed explicitly to every sampler. Wraps a 64-bit Mersenne
/// Twister so a given seed reproduces the same stream on every platform.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  static Rng stream(std::uint64_t master, std::uint64_t index) { return Rng(stream_seed(master, index)); }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  result_type operator()() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  /// Uniform on (0, 1).
  double uniform_open() {
    double u;
    do u = uniform(); while (u == 0.0);
    return u;
  }
  /// Uniform integer in [0, bound), bound > 0, without modulo bias.
  std::uint64_t below(std::uint64_t bound);
  /// Uniform integer in [0, bound), bound > 0.
  BigCount below(const BigCount& bound);
  bool bernoulli(double p) { return uniform() < p; }
  /// Number of failures before the first success, success probability p in (0, 1].
  std::uint64_t geometric_failures(double p);
  std::uint64_t binomial(std::uint64_t n, double p);
  double exponential() { return -std::log(uniform_open()); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(*this); }

  template <class It>
  void shuffle(It first, It last) {
    auto n = static_cast<std::uint64_t>(last - first);
    for (std::uint64_t i = n; i > 1; --i) std::iter_swap(first + (i - 1), first + below(i));
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace branchlab
