#include "branchlab/stats.hpp"

#include <doctest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>

using namespace branchlab;

TEST_CASE("Kolmogorov survival function reference values") {
  // Q(x) = 2 Σ (-1)^{k-1} e^{-2k²x²}, summed here to convergence.
  auto q = [](double x) {
    double s = 0;
    for (int k = 1; k <= 200; ++k) s += (k % 2 ? 2.0 : -2.0) * std::exp(-2.0 * k * k * x * x);
    return s;
  };
  for (double x : {0.5, 0.8, 1.0, 1.358, 2.0})
    CHECK(kolmogorov_q(x) == doctest::Approx(q(x)).epsilon(1e-10));
  CHECK(kolmogorov_q(1.3581) == doctest::Approx(0.05).epsilon(1e-3));
  CHECK(kolmogorov_q(0.0) == doctest::Approx(1.0));
}

TEST_CASE("two-sample KS statistic is the exact sup distance") {
  auto r = ks_two_sample({1, 2, 3, 4}, {3.5, 5, 6, 7});
  CHECK(r.statistic == doctest::Approx(0.75));
  auto same = ks_two_sample({1, 2, 3}, {1, 2, 3});
  CHECK(same.statistic == 0.0);
  CHECK(same.p_value == doctest::Approx(1.0));
  // Ties across samples are stepped together.
  CHECK(ks_two_sample({1, 1, 2}, {1, 2, 2}).statistic == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("KS p-values are calibrated under the null") {
  Rng rng(3);
  int rejections = 0;
  const int trials = 400;
  for (int t = 0; t < trials; ++t) {
    std::vector<double> a(300), b(300);
    for (auto& x : a) x = rng.uniform();
    for (auto& x : b) x = rng.uniform();
    if (ks_two_sample(a, b).p_value < 0.05) ++rejections;
  }
  // Binomial(400, 0.05): mean 20, sd ≈ 4.4.
  CHECK(rejections < 36);
  std::vector<double> c(2000);
  for (auto& x : c) x = rng.uniform();
  auto r = ks_one_sample(c, [](double x) { return std::clamp(x, 0.0, 1.0); });
  CHECK(r.p_value > 0.001);
  auto shifted = ks_one_sample(c, [](double x) { return std::clamp(x - 0.1, 0.0, 1.0); });
  CHECK(shifted.p_value < 1e-6);
}

TEST_CASE("chi-square survival function agrees with Boost") {
  for (double dof : {1.0, 3.0, 10.0, 47.0})
    for (double x : {0.5, 2.0, 10.0, 60.0}) {
      boost::math::chi_squared d(dof);
      CHECK(chi_square_sf(x, dof) == doctest::Approx(boost::math::cdf(boost::math::complement(d, x))).epsilon(1e-10));
    }
}

TEST_CASE("chi-square goodness of fit: statistic and pooling") {
  auto r = chi_square_gof({10, 20, 30}, {1.0 / 3, 1.0 / 3, 1.0 / 3});
  CHECK(r.statistic == doctest::Approx(10.0));
  CHECK(r.p_value == doctest::Approx(std::exp(-5.0)));  // dof 2
  // Sparse bins merge until every expected count reaches 5.
  auto pooled = chi_square_gof({3, 3, 3, 3, 88}, {0.03, 0.03, 0.03, 0.03, 0.88});
  CHECK(pooled.statistic == doctest::Approx(0.0));
  auto hom = chi_square_two_sample({50, 50}, {50, 50});
  CHECK(hom.statistic == doctest::Approx(0.0));
  CHECK(chi_square_two_sample({90, 10}, {10, 90}).p_value < 1e-10);
}

TEST_CASE("total variation distance") {
  std::map<int, double> p{{1, 0.5}, {2, 0.5}};
  std::map<int, double> q{{2, 0.25}, {3, 0.75}};
  CHECK(tv_distance(p, q) == doctest::Approx(0.75));
  CHECK(tv_distance(p, p) == 0.0);
  std::map<int, Rational> a{{0, Rational(1, 3)}, {1, Rational(2, 3)}};
  std::map<int, Rational> b{{0, Rational(1, 2)}, {1, Rational(1, 2)}};
  CHECK(tv_distance(a, b) == Rational(1, 6));
  CHECK(tv_distance(a, b) == tv_distance(b, a));
}

TEST_CASE("summaries and regression") {
  std::vector<double> xs{1, 2, 3, 4, 5};
  auto s = summarize(xs);
  CHECK(s.mean == doctest::Approx(3.0));
  CHECK(s.variance == doctest::Approx(2.5));
  CHECK(s.m2 == doctest::Approx(2.0));
  CHECK(s.m3 == doctest::Approx(0.0));
  CHECK(s.ci_low <= s.mean);
  CHECK(s.ci_high >= s.mean);
  CHECK(regression_slope({0, 1, 2, 3}, {1, 3, 5, 7}) == doctest::Approx(2.0));
  auto pmf = empirical_pmf(std::vector<int>{1, 1, 2, 3});
  CHECK(pmf[1] == doctest::Approx(0.5));
  CHECK(stats_csv_row("ks", {0.25, 0.5}, 10, 7) == "ks,0.25,0.5,10,7");
}
