#include "branchlab/numeric.hpp"

#include <gmp.h>

namespace branchlab {

BigCount factorial(unsigned n) {
  BigCount r;
  mpz_fac_ui(r.backend().data(), n);
  return r;
}

BigCount binomial(const BigCount& n, unsigned k) {
  if (n < 0) throw std::invalid_argument("binomial: negative n");
  BigCount r;
  mpz_bin_ui(r.backend().data(), n.backend().data(), k);
  return r;
}

BigCount falling(const BigCount& x, unsigned k) {
  BigCount r = 1;
  for (unsigned i = 0; i < k; ++i) r *= (x - i);
  return r;
}

BigCount multiset_count(const BigCount& u, unsigned k) {
  if (k == 0) return 1;
  if (u == 0) return 0;
  return binomial(u + k - 1, k);
}

double to_double(const BigCount& x) { return x.convert_to<double>(); }

double to_double(const Rational& x) {
  return ratio(boost::multiprecision::numerator(x), boost::multiprecision::denominator(x));
}

double log_big(const BigCount& x) {
  if (x <= 0) throw std::domain_error("log_big: nonpositive argument");
  long exp = 0;
  double mant = mpz_get_d_2exp(&exp, x.backend().data());
  return std::log(mant) + static_cast<double>(exp) * std::log(2.0);
}

double ratio(const BigCount& x, const BigCount& y) {
  if (y == 0) throw std::domain_error("ratio: zero denominator");
  if (x == 0) return 0.0;
  long ex = 0, ey = 0;
  double mx = mpz_get_d_2exp(&ex, x.backend().data());
  double my = mpz_get_d_2exp(&ey, y.backend().data());
  return std::ldexp(mx / my, static_cast<int>(ex - ey));
}

std::string to_decimal(const BigCount& x) { return x.str(); }

double log_add_int(LogValue u, std::uint64_t i) {
  if (i == 0) return u.lg;
  if (u.is_zero()) return std::log(static_cast<double>(i));
  if (u.lg < 40.0) return std::log(std::exp(u.lg) + static_cast<double>(i));
  return u.lg + std::log1p(static_cast<double>(i) * std::exp(-u.lg));
}

LogValue multiset_count(LogValue u, unsigned k) {
  if (k == 0) return LogValue::one();
  if (u.is_zero()) return LogValue::zero();
  double s = -std::lgamma(static_cast<double>(k) + 1.0);
  for (unsigned i = 0; i < k; ++i) s += log_add_int(u, i);
  return {s};
}

}  // namespace branchlab
