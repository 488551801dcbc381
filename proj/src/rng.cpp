#include "branchlab/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace branchlab {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t stream_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(splitmix64(master) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

std::uint64_t Rng::below(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("Rng::below: zero bound");
  // Lemire's nearly-divisionless method.
  unsigned __int128 m = static_cast<unsigned __int128>(engine_()) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    std::uint64_t threshold = -bound % bound;
    while (low < threshold) {
      m = static_cast<unsigned __int128>(engine_()) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

BigCount Rng::below(const BigCount& bound) {
  if (bound <= 0) throw std::invalid_argument("Rng::below: nonpositive bound");
  if (bound <= std::numeric_limits<std::uint64_t>::max()) return BigCount(below(bound.convert_to<std::uint64_t>()));
  std::size_t bits = boost::multiprecision::msb(bound) + 1;
  // Mask-and-reject: each round accepts with probability above 1/2.
  for (;;) {
    BigCount r = 0;
    std::size_t filled = 0;
    while (filled < bits) {
      r <<= 64;
      r += engine_();
      filled += 64;
    }
    r >>= (filled - bits);
    if (r < bound) return r;
  }
}

std::uint64_t Rng::geometric_failures(double p) {
  if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("Rng::geometric_failures: p outside (0,1]");
  if (p == 1.0) return 0;
  double g = std::floor(std::log(uniform_open()) / std::log1p(-p));
  if (g > 1e18) throw std::overflow_error("geometric hold exceeds 1e18");
  return static_cast<std::uint64_t>(g);
}

std::uint64_t Rng::binomial(std::uint64_t n, double p) {
  if (n == 0 || p <= 0.0) return 0;
  if (p >= 1.0) return n;
  return std::binomial_distribution<std::uint64_t>(n, p)(*this);
}

}  // namespace branchlab
