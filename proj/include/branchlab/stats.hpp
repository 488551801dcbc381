#pragma once

#include "branchlab/numeric.hpp"
#include "branchlab/rng.hpp"

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace branchlab {

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// Kolmogorov survival function Q(x) = 2 Σ (-1)^{k-1} exp(-2 k² x²).
double kolmogorov_q(double x);

/// Two-sample Kolmogorov-Smirnov: exact sup distance between empirical CDFs,
/// asymptotic p-value with the Stephens small-sample correction.
TestResult ks_two_sample(std::vector<double> a, std::vector<double> b);

/// One-sample KS against a continuous CDF.
TestResult ks_one_sample(std::vector<double> a, const std::function<double(double)>& cdf);

/// Pearson goodness of fit against cell probabilities summing to 1. Bins whose expected count is below 5 are pooled
/// (smallest first) until every pooled bin reaches 5; dof = bins - 1.
TestResult chi_square_gof(const std::vector<std::uint64_t>& observed, const std::vector<double>& probabilities);

/// Two-sample homogeneity χ² on a contingency table of two count vectors.
TestResult chi_square_two_sample(const std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b);

/// Chi-square upper tail P(X > x) with k degrees of freedom.
double chi_square_sf(double x, double dof);

/// (1/2) Σ |p - q| over the union of supports.
template <class Key, class Num, class Cmp>
Num tv_distance(const std::map<Key, Num, Cmp>& p, const std::map<Key, Num, Cmp>& q) {
  Num total = 0;
  auto ip = p.begin();
  auto iq = q.begin();
  Cmp less;
  auto absdiff = [](const Num& x) { return x < 0 ? Num(-x) : x; };
  while (ip != p.end() || iq != q.end()) {
    if (iq == q.end() || (ip != p.end() && less(ip->first, iq->first))) {
      total += absdiff(ip->second);
      ++ip;
    } else if (ip == p.end() || less(iq->first, ip->first)) {
      total += absdiff(iq->second);
      ++iq;
    } else {
      total += absdiff(Num(ip->second - iq->second));
      ++ip;
      ++iq;
    }
  }
  return total / 2;
}

/// Empirical pmf from a list of outcomes.
template <class Key>
std::map<Key, double> empirical_pmf(const std::vector<Key>& draws) {
  std::map<Key, double> m;
  for (const auto& d : draws) m[d] += 1.0;
  for (auto& [k, v] : m) v /= static_cast<double>(draws.size());
  return m;
}

struct SampleSummary {
  std::size_t count = 0;
  double mean = 0.0;
  double variance = 0.0;  ///< unbiased
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;  ///< central moments
  double ci_low = 0.0, ci_high = 0.0;  ///< percentile bootstrap 95% CI of the mean
  double stderr_mean() const { return count > 0 ? std::sqrt(variance / static_cast<double>(count)) : 0.0; }
};

SampleSummary summarize(const std::vector<double>& xs, std::uint64_t seed = 1, int bootstrap = 1000);

/// Least-squares slope of y on x.
double regression_slope(const std::vector<double>& x, const std::vector<double>& y);

/// One CSV row: test_name,statistic,p_value,n,seed.
std::string stats_csv_row(const std::string& test_name, const TestResult& r, std::uint64_t n, std::uint64_t seed);

}  // namespace branchlab
