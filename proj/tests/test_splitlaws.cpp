#include "branchlab/samplers.hpp"
#include "branchlab/splitlaws.hpp"
#include "branchlab/stats.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace branchlab;

namespace {

// GW(#t = n) from the tree recursion: a root with k children whose subtree
// sizes sum to n - 1. No random walk is involved.
std::vector<long double> gw_size_by_recursion(const std::vector<double>& xi, int nmax) {
  std::vector<long double> size(static_cast<std::size_t>(nmax) + 1, 0.0L);
  // forest[k][s]: k independent trees of total size s.
  std::vector<std::vector<long double>> forest(xi.size(), std::vector<long double>(static_cast<std::size_t>(nmax) + 1, 0.0L));
  forest[0][0] = 1.0L;
  for (int n = 1; n <= nmax; ++n) {
    for (std::size_t k = 1; k < xi.size(); ++k) {
      long double s = 0.0L;
      for (int a = 1; a <= n - 1; ++a) s += size[static_cast<std::size_t>(a)] * forest[k - 1][static_cast<std::size_t>(n - 1 - a)];
      forest[k][static_cast<std::size_t>(n - 1)] = s;
    }
    long double p = 0.0L;
    for (std::size_t k = 0; k < xi.size(); ++k) p += static_cast<long double>(xi[k]) * forest[k][static_cast<std::size_t>(n - 1)];
    size[static_cast<std::size_t>(n)] = p;
  }
  return size;
}

// P(S_n = -1) for the walk with steps ξ - 1, by plain convolution.
long double walk_minus_one(const std::vector<double>& xi, int n) {
  std::map<int, long double> dist{{0, 1.0L}};
  for (int step = 0; step < n; ++step) {
    std::map<int, long double> next;
    for (auto [pos, p] : dist)
      for (std::size_t k = 0; k < xi.size(); ++k)
        if (xi[k] > 0 && pos + static_cast<int>(k) - 1 >= -n) next[pos + static_cast<int>(k) - 1] += p * xi[k];
    dist = std::move(next);
  }
  return dist[-1];
}

// Exhaustive GW law of the unordered shape, conditioned on n vertices.
TreeLaw exhaustive_gw(const std::vector<double>& xi, int n) {
  TreeLaw law;
  double total = 0;
  for (const auto& p : oracle::plane_trees(n)) {
    double w = oracle::plane_gw_weight(p, xi);
    if (w == 0) continue;
    law[canonicalize(p)] += w;
    total += w;
  }
  for (auto& [t, w] : law) w /= total;
  return law;
}

}  // namespace

TEST_CASE("tabulated laws: validation and sampling") {
  auto two = tabulated_law({{2, {{IntPartition({1, 1}), 1.0}}}});
  Rng rng(1);
  for (int i = 0; i < 10; ++i) CHECK(two->sample(2, rng) == IntPartition({1, 1}));
  auto three = tabulated_law({{3, {{IntPartition({2, 1}), 0.7}, {IntPartition::trivial(3), 0.3}}}});
  int hits = 0;
  const int draws = 100000;
  for (int i = 0; i < draws; ++i)
    if (three->sample(3, rng) == IntPartition({2, 1})) ++hits;
  CHECK(std::abs(hits / double(draws) - 0.7) < 3 * std::sqrt(0.21 / draws) + 1e-9);
  CHECK(three->pmf(3, IntPartition({1, 1, 1})) == 0.0);
  CHECK_THROWS(tabulated_law({{2, {{IntPartition::trivial(2), 1.0}}}}));
  CHECK_THROWS(tabulated_law({{2, {{IntPartition({1, 1}), 0.9}}}}));
}

TEST_CASE("GW split law: hand values") {
  auto q = gw_law(OffspringLaw::binary(), 64);
  CHECK(q->pmf(2, IntPartition({1, 1})) == doctest::Approx(1.0));
  CHECK(q->pmf(4, IntPartition({3, 1})) == doctest::Approx(1.0));
  CHECK(q->pmf(4, IntPartition({2, 2})) == 0.0);
  CHECK(q->scaling().gamma == 0.5);
}

TEST_CASE("cyclic identity: walk tables against the tree recursion") {
  for (const auto& xi : {OffspringLaw::binary(), OffspringLaw::poisson()}) {
    GwLaw q(xi, 40);
    auto by_tree = gw_size_by_recursion(xi.pmf, 12);
    for (int n = 1; n <= 12; ++n) {
      long double walk = walk_minus_one(xi.pmf, n);
      CHECK(std::abs(n * static_cast<long double>(q.tree_size_probability(n)) - walk) < 1e-14L);
      CHECK(std::abs(static_cast<long double>(q.tree_size_probability(n)) - by_tree[static_cast<std::size_t>(n)]) < 1e-14L);
      CHECK(std::abs(static_cast<long double>(q.walk_probability(n, 1)) - walk) < 1e-14L);
    }
  }
}

TEST_CASE("GW split law reproduces exhaustive conditioned GW trees") {
  for (const auto& xi : {OffspringLaw::binary(), OffspringLaw::poisson()}) {
    auto q = gw_law(xi, 40);
    for (int n = 2; n <= 7; ++n) {
      auto exact = exact_Q_law(*q, n);
      auto brute = exhaustive_gw(xi.pmf, n);
      CHECK(tv_distance(exact, brute) <= 1e-12);
    }
  }
}

TEST_CASE("GW split law normalizes, exactly in rationals") {
  auto q = gw_law(OffspringLaw::poisson(), 64);
  for (int n = 1; n <= 30; ++n) {
    double s = 0;
    const auto dist = *q->distribution(n);
    for (const auto& [l, p] : dist) s += p;
    CHECK(s == doctest::Approx(1.0).epsilon(1e-9));
  }
  // Dyadic masses are exact in binary, so the rational pmf is kept.
  auto b = gw_law(OffspringLaw::binary(), 64);
  auto g = gw_law(OffspringLaw::from_pmf({0.375, 0.375, 0.125, 0.125}), 64);
  for (const auto& law : {b, g})
    for (int n = 1; n <= 12; ++n) {
      auto d = law->exact_distribution(n);
      // Binary trees have an odd number n + 1 of vertices.
      REQUIRE(d.has_value() == (law == g || n % 2 == 0));
      if (!d) continue;
      Rational s = 0;
      for (const auto& [l, p] : *d) s += p;
      CHECK(s == Rational(1));
    }
  CHECK_FALSE(OffspringLaw::from_pmf({0.3, 0.45, 0.2, 0.05}).exact_pmf.size());
}

TEST_CASE("GW sampler follows the pmf") {
  auto q = gw_law(OffspringLaw::poisson(), 64);
  const int n = 6;
  auto d = *q->distribution(n);
  std::map<IntPartition, std::uint64_t> counts;
  Rng rng(33);
  const int draws = 50000;
  for (int i = 0; i < draws; ++i) ++counts[q->sample(n, rng)];
  std::vector<std::uint64_t> obs;
  std::vector<double> expected;
  for (const auto& [l, p] : d) {
    obs.push_back(counts[l]);
    expected.push_back(p);
  }
  CHECK(chi_square_gof(obs, expected).p_value > 0.001);
}

TEST_CASE("stable offspring law is critical") {
  auto xi = OffspringLaw::stable(1.5, 100000);
  double mass = xi.tail_mass;
  for (double p : xi.pmf) mass += p;
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(xi.at(1) == doctest::Approx(0.5));
  GwLaw q(xi, 200);
  CHECK(q.scaling().gamma == doctest::Approx(1.0 - 1.0 / 1.5));
  double s = 0;
  for (int p = 1; p <= 50; ++p) s += q.root_degree_probability(50, p);
  CHECK(s == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("(α, θ) law: normalization and growth-free identities") {
  auto q = alpha_theta_law(0.5, 0.5);
  CHECK(q->pmf(2, IntPartition({1, 1})) == doctest::Approx(1.0));
  for (int n = 2; n <= 30; ++n) {
    double s = 0;
    const auto dist = *q->distribution(n);
    for (const auto& [l, p] : dist) s += p;
    CHECK(s == doctest::Approx(1.0).epsilon(1e-10));
  }
  // q_{α,θ}(n, ·) is itself a probability law on {1, ..., n}.
  for (int n = 1; n <= 20; ++n) {
    double s = 0;
    for (int k = 1; k <= n; ++k) s += q_alpha_theta(0.3, 1.2, n, k);
    CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK_THROWS(alpha_theta_law(1.0, 0.5));
}

TEST_CASE("consistent law: point mass hand values and Brownian normalization") {
  auto half = DislocationMeasure::point_mass(MassPartition({0.5, 0.5}));
  auto q = consistent_law(half, 20);
  CHECK(q->pmf(2, IntPartition({1, 1})) == doctest::Approx(1.0));
  CHECK(q->pmf(4, IntPartition({2, 2})) == doctest::Approx(3.0 / 7.0));
  CHECK(q->pmf(4, IntPartition({3, 1})) == doctest::Approx(4.0 / 7.0));
  auto nu = nu2().cut_off(1e-4);
  auto c = consistent_law(nu, 30);
  for (int n = 2; n <= 30; ++n) {
    double s = 0;
    const auto dist = *c->distribution(n);
    for (const auto& [l, p] : dist) s += p;
    CHECK(s == doctest::Approx(1.0).epsilon(1e-9));
  }
  CHECK_THROWS(consistent_law(DislocationMeasure::point_mass(MassPartition({0.5, 0.25, 0.25})), 10));
}

TEST_CASE("propexemple law: point mass at (1/2, 1/2) with γ = 1") {
  auto q = propexemple_law(DislocationMeasure::point_mass(MassPartition({0.5, 0.5})), 1.0, 4096);
  CHECK(q->n0() == 4);
  CHECK(q->split_weight(4) == doctest::Approx(0.25));
  // The multinomial allocation can still put all four balls in one cell:
  // q((4)) = 3/4 + (1/4)(2/16).
  CHECK(q->trivial_mass(4) == doctest::Approx(25.0 / 32.0));
  auto [p31, se31] = q->pmf_estimate(4, IntPartition({3, 1}), 200000, 3);
  CHECK(std::abs(p31 - 0.125) < 4 * se31);
  auto [p22, se22] = q->pmf_estimate(4, IntPartition({2, 2}), 200000, 4);
  CHECK(std::abs(p22 - 3.0 / 32.0) < 4 * se22);
  CHECK_THROWS(q->pmf(4, IntPartition({2, 2})));
  for (int n : {4, 10, 100, 1000}) CHECK(q->trivial_mass(n) < 1.0);
  // Below n₀ the split is forced.
  Rng rng(6);
  for (int i = 0; i < 100; ++i) CHECK_FALSE(q->sample(3, rng).is_trivial());
}

TEST_CASE("circ transform: masses and probe bound") {
  auto base = tabulated_law({{1, {{IntPartition({1}), 1.0}}},
                             {2, {{IntPartition({1, 1}), 1.0}}},
                             {3, {{IntPartition({2, 1}), 0.5}, {IntPartition({1, 1, 1}), 0.5}}}},
                            ModelKind::kVertex);
  auto c = circ_transform(base);
  CHECK(c->pmf(3, IntPartition({1, 1, 1})) == 1.0);
  CHECK(c->pmf(4, IntPartition({2, 1, 1})) == 0.5);
  CHECK(c->pmf(1, IntPartition::empty()) == 1.0);
  for (int n = 1; n <= 4; ++n) {
    double s = 0;
    const auto dist = *c->distribution(n);
    for (const auto& [l, p] : dist) s += p;
    CHECK(s == doctest::Approx(1.0));
  }
  // g = (1 - s₁) f with f(s) = s₁: 1-Lipschitz, bounded by 1.
  MassFunction f = [](const MassPartition& s) { return s.largest(); };
  auto gw = gw_law(OffspringLaw::poisson(), 64);
  auto cg = circ_transform(gw);
  for (int n : {10, 20, 40}) {
    double an = gw->scaling().a(n);
    double lhs = probe_H(*cg, f, n + 1, ProbeMode::kExact).estimate * an / cg->scaling().a(n + 1);
    double rhs = probe_H(*gw, f, n, ProbeMode::kExact).estimate;
    CHECK(std::abs(lhs - rhs) <= 3.0 * an / (n + 1) + 1e-12);
  }
}

TEST_CASE("probe on a two-point law is exact arithmetic") {
  const int n = 10;
  const double c = 2.0;
  TabulatedLaw q({{n, {{IntPartition::trivial(n), 1.0 - c / n}, {IntPartition({7, 3}), c / n}}}}, ModelKind::kLeaf);
  q.set_scaling(Scaling{1.0, {}});
  MassFunction f = [](const MassPartition& s) { return 1.0 + s[1]; };
  auto r = probe_H(q, f, n);
  CHECK(r.mode == ProbeResult::Mode::kExact);
  CHECK(r.estimate == doctest::Approx(c * 0.3 * 1.3));
}

TEST_CASE("size-biased functional: reorder-then-average equals the direct sum") {
  auto q = gw_law(OffspringLaw::poisson(), 64);
  const int n = 12;
  auto g = [](const std::vector<double>& x) { return x.front() * x.front(); };
  // Direct: the first size-biased part is λ_i / n with probability λ_i / n.
  double direct = 0;
  const auto dist = *q->distribution(n);
  for (const auto& [l, p] : dist)
    for (int part : l.parts()) {
      double x = static_cast<double>(part) / n;
      direct += p * x * x * x;
    }
  auto [mc, se] = size_biased_functional(*q, g, n, 100000, 12);
  CHECK(std::abs(mc - direct) < 3 * se);
}
