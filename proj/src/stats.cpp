#include "branchlab/stats.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <functional>
#include <numeric>
#include <sstream>

namespace branchlab {

double kolmogorov_q(double x) {
  if (x <= 0.0) return 1.0;
  if (x < 0.2) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 200; ++k) {
    double term = std::exp(-2.0 * k * k * x * x);
    sum += (k % 2 ? term : -term);
    if (term < 1e-18) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

TestResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  double ne = std::sqrt(na * nb / (na + nb));
  return {d, kolmogorov_q((ne + 0.12 + 0.11 / ne) * d)};
}

TestResult ks_one_sample(std::vector<double> a, const std::function<double(double)>& cdf) {
  if (a.empty()) throw std::invalid_argument("ks_one_sample: empty sample");
  std::sort(a.begin(), a.end());
  const double n = static_cast<double>(a.size());
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double f = cdf(a[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  double ne = std::sqrt(n);
  return {d, kolmogorov_q((ne + 0.12 + 0.11 / ne) * d)};
}

double chi_square_sf(double x, double dof) {
  if (x <= 0.0) return 1.0;
  return boost::math::gamma_q(dof / 2.0, x / 2.0);
}

TestResult chi_square_gof(const std::vector<std::uint64_t>& observed, const std::vector<double>& expected) {
  if (observed.size() != expected.size()) throw std::invalid_argument("chi_square_gof: size mismatch");
  double psum = std::accumulate(expected.begin(), expected.end(), 0.0);
  if (std::abs(psum - 1.0) > 1e-9) throw std::invalid_argument("chi_square_gof: expected probabilities must sum to 1");
  double total = 0.0;
  for (auto o : observed) total += static_cast<double>(o);
  if (total <= 0.0) throw std::invalid_argument("chi_square_gof: no observations");

  std::vector<std::size_t> order(observed.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return expected[x] < expected[y]; });
  std::vector<std::pair<double, double>> bins;  // (observed, expected count)
  double po = 0.0, pe = 0.0;
  for (std::size_t idx : order) {
    po += static_cast<double>(observed[idx]);
    pe += expected[idx] * total;
    if (pe >= 5.0) {
      bins.emplace_back(po, pe);
      po = pe = 0.0;
    }
  }
  if (pe > 0.0 || po > 0.0) {
    if (bins.empty()) throw std::invalid_argument("chi_square_gof: degenerate binning");
    bins.back().first += po;
    bins.back().second += pe;
  }
  if (bins.size() < 2) throw std::invalid_argument("chi_square_gof: degenerate binning (fewer than 2 bins)");
  double stat = 0.0;
  for (auto [o, e] : bins) stat += (o - e) * (o - e) / e;
  return {stat, chi_square_sf(stat, static_cast<double>(bins.size() - 1))};
}

TestResult chi_square_two_sample(const std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("chi_square_two_sample: size mismatch");
  double na = 0.0, nb = 0.0;
  for (auto x : a) na += static_cast<double>(x);
  for (auto x : b) nb += static_cast<double>(x);
  if (na <= 0.0 || nb <= 0.0) throw std::invalid_argument("chi_square_two_sample: empty sample");
  // Pool sparse categories so every expected cell count is at least 5.
  std::vector<std::size_t> order(a.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return a[x] + b[x] < a[y] + b[y]; });
  const double mn = std::min(na, nb) / (na + nb);
  std::vector<std::pair<double, double>> cells;
  double ca = 0.0, cb = 0.0;
  for (std::size_t idx : order) {
    ca += static_cast<double>(a[idx]);
    cb += static_cast<double>(b[idx]);
    if ((ca + cb) * mn >= 5.0) {
      cells.emplace_back(ca, cb);
      ca = cb = 0.0;
    }
  }
  if (ca + cb > 0.0) {
    if (cells.empty()) throw std::invalid_argument("chi_square_two_sample: degenerate binning");
    cells.back().first += ca;
    cells.back().second += cb;
  }
  if (cells.size() < 2) throw std::invalid_argument("chi_square_two_sample: degenerate binning");
  double stat = 0.0;
  for (auto [x, y] : cells) {
    double row = x + y;
    double ea = row * na / (na + nb), eb = row * nb / (na + nb);
    stat += (x - ea) * (x - ea) / ea + (y - eb) * (y - eb) / eb;
  }
  return {stat, chi_square_sf(stat, static_cast<double>(cells.size() - 1))};
}

SampleSummary summarize(const std::vector<double>& xs, std::uint64_t seed, int bootstrap) {
  SampleSummary s;
  s.count = xs.size();
  if (xs.empty()) return s;
  const double n = static_cast<double>(xs.size());
  s.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  for (double x : xs) {
    double d = x - s.mean;
    s.m2 += d * d;
    s.m3 += d * d * d;
    s.m4 += d * d * d * d;
  }
  s.m2 /= n;
  s.m3 /= n;
  s.m4 /= n;
  s.variance = xs.size() > 1 ? s.m2 * n / (n - 1.0) : 0.0;
  if (bootstrap > 0 && xs.size() > 1) {
    Rng rng(seed);
    std::vector<double> means(static_cast<std::size_t>(bootstrap));
    for (auto& m : means) {
      double acc = 0.0;
      for (std::size_t i = 0; i < xs.size(); ++i) acc += xs[rng.below(xs.size())];
      m = acc / n;
    }
    std::sort(means.begin(), means.end());
    s.ci_low = std::min(s.mean, means[static_cast<std::size_t>(0.025 * (bootstrap - 1))]);
    s.ci_high = std::max(s.mean, means[static_cast<std::size_t>(0.975 * (bootstrap - 1))]);
  } else {
    s.ci_low = s.ci_high = s.mean;
  }
  return s;
}

double regression_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("regression_slope: need two or more paired points");
  const double n = static_cast<double>(x.size());
  double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

std::string stats_csv_row(const std::string& test_name, const TestResult& r, std::uint64_t n, std::uint64_t seed) {
  std::ostringstream os;
  os.precision(10);
  os << test_name << ',' << r.statistic << ',' << r.p_value << ',' << n << ',' << seed;
  return os.str();
}

}  // namespace branchlab
