#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace branchlab {

using BigCount = boost::multiprecision::mpz_int;
using Rational = boost::multiprecision::mpq_rational;

/// Raised when a request exceeds a documented size or memory cap.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

BigCount factorial(unsigned n);
BigCount binomial(const BigCount& n, unsigned k);
/// Falling factorial (x)_k = x(x-1)...(x-k+1).
BigCount falling(const BigCount& x, unsigned k);
/// Number of multisets of size k drawn from a universe of u elements.
BigCount multiset_count(const BigCount& u, unsigned k);

double to_double(const BigCount& x);
double to_double(const Rational& x);
/// Natural log of a positive integer, accurate for arbitrarily large values.
double log_big(const BigCount& x);
/// x / y as a double, accurate even when both overflow a double.
double ratio(const BigCount& x, const BigCount& y);
std::string to_decimal(const BigCount& x);

/// A positive real held as its natural logarithm; zero is -inf.
struct LogValue {
  double lg = -std::numeric_limits<double>::infinity();

  static LogValue zero() { return {}; }
  static LogValue one() { return {0.0}; }
  static LogValue from(double x) { return {x > 0 ? std::log(x) : -std::numeric_limits<double>::infinity()}; }
  static LogValue from(const BigCount& x) {
    return {x > 0 ? log_big(x) : -std::numeric_limits<double>::infinity()};
  }
  bool is_zero() const { return std::isinf(lg) && lg < 0; }
  double value() const { return std::exp(lg); }

  friend LogValue operator*(LogValue a, LogValue b) {
    if (a.is_zero() || b.is_zero()) return zero();
    return {a.lg + b.lg};
  }
  friend LogValue operator+(LogValue a, LogValue b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    if (a.lg < b.lg) std::swap(a, b);
    return {a.lg + std::log1p(std::exp(b.lg - a.lg))};
  }
  LogValue& operator+=(LogValue o) { return *this = *this + o; }
  LogValue& operator*=(LogValue o) { return *this = *this * o; }
  /// a / b, with b nonzero.
  friend double operator/(LogValue a, LogValue b) { return a.is_zero() ? 0.0 : std::exp(a.lg - b.lg); }
};

/// log(u + i) for u held in log form and a nonnegative integer offset i.
double log_add_int(LogValue u, std::uint64_t i);
/// log C(u+k-1, k) for u in log form.
LogValue multiset_count(LogValue u, unsigned k);

}  // namespace branchlab
