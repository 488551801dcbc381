#include "branchlab/partitions.hpp"
#include "branchlab/stats.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <functional>
#include <map>
#include <set>

using namespace branchlab;

TEST_CASE("shape_count matches brute-force set partitions and sums to Bell") {
  auto bell = oracle::bell_numbers(9);
  for (int n = 1; n <= 8; ++n) {
    std::map<std::vector<int>, BigCount> brute;
    oracle::for_each_rgs(n, [&](const std::vector<int>& a) { brute[oracle::rgs_shape(a)] += 1; });
    BigCount total = 0;
    for (const auto& lambda : enumerate_partitions(n)) {
      BigCount c = shape_count(lambda);
      CHECK(c == brute[lambda.parts()]);
      total += c;
    }
    CHECK(total == bell[static_cast<std::size_t>(n)]);
    CHECK(brute.size() == enumerate_partitions(n).size());
  }
}

TEST_CASE("partition numbers agree with the coin-change recurrence") {
  auto p = oracle::partition_counts(120, 120);
  for (int n = 1; n <= 120; ++n) CHECK(partition_number(n) == p[static_cast<std::size_t>(n)]);
  CHECK(partition_number(100) == BigCount("190569292"));
}

TEST_CASE("enumerate_partitions is strictly decreasing in reverse lex and respects max_parts") {
  for (int n = 1; n <= 14; ++n) {
    auto all = enumerate_partitions(n);
    CHECK(all.front() == IntPartition::trivial(n));
    for (std::size_t i = 1; i < all.size(); ++i) CHECK(all[i - 1] < all[i]);
    for (int k = 1; k <= n; ++k) {
      auto bounded = enumerate_partitions(n, k);
      auto p = oracle::partition_counts(n, k);  // conjugation: largest part <= k
      CHECK(BigCount(bounded.size()) == p[static_cast<std::size_t>(n)]);
      for (const auto& l : bounded) CHECK(l.length() <= k);
    }
  }
  std::size_t streamed = 0;
  for_each_partition(20, [&](const IntPartition&) { ++streamed; });
  CHECK(BigCount(streamed) == partition_number(20));
  CHECK_THROWS_AS(enumerate_partitions(61), ResourceError);
}

TEST_CASE("IntPartition basics") {
  IntPartition l({1, 3, 1, 2});
  CHECK(l.parts() == std::vector<int>{3, 2, 1, 1});
  CHECK(l.total() == 7);
  CHECK(l.multiplicity(1) == 2);
  CHECK(l.with_part(2).parts() == std::vector<int>{3, 2, 2, 1, 1});
  CHECK(l.without_part(1).parts() == std::vector<int>{3, 2, 1});
  CHECK(IntPartition::empty().total() == 1);
  CHECK(IntPartition::empty() < IntPartition::trivial(1));
  CHECK_THROWS(IntPartition(std::vector<int>{2, 0}));
}

TEST_CASE("SetPartition canonicalization, restriction and shape") {
  SetPartition p({{5, 3}, {1, 4}, {2}});
  CHECK(p.blocks() == std::vector<std::vector<int>>{{1, 4}, {2}, {3, 5}});
  CHECK(p.shape().parts() == std::vector<int>{2, 2, 1});
  CHECK(p.restrict({1, 2, 3}) == SetPartition({{1}, {2}, {3}}));
  CHECK(p.restrict({1, 4, 5}) == SetPartition({{1, 4}, {5}}));
  CHECK(*p.block_of(5) == 2);
  CHECK_FALSE(p.block_of(9).has_value());
  CHECK_THROWS(SetPartition({{1, 2}, {2, 3}}));
  CHECK(SetPartition::singletons(SetPartition::range(4)).all_singletons());
}

TEST_CASE("refined_count equals brute force over labelled block assignments") {
  // Oracle: maps f from [n] onto part indices with |f⁻¹(i)| = λ_i. Parts hit
  // by the restriction are pinned, so each qualifying set partition appears
  // once per relabelling of equal unpinned parts.
  auto check = [](const IntPartition& lambda, const SetPartition& restriction, const std::vector<int>& assignment) {
    int n = lambda.total();
    int p = lambda.length();
    int k = static_cast<int>(restriction.size());
    std::vector<int> f(static_cast<std::size_t>(n), 0);
    BigCount hits = 0;
    std::function<void(int)> rec = [&](int i) {
      if (i == n) {
        std::vector<int> sizes(static_cast<std::size_t>(p), 0);
        for (int v : f) ++sizes[static_cast<std::size_t>(v)];
        for (int j = 0; j < p; ++j)
          if (sizes[static_cast<std::size_t>(j)] != lambda[static_cast<std::size_t>(j)]) return;
        // Trace on [k] must equal the restriction, block b going to part assignment[b].
        for (std::size_t b = 0; b < restriction.blocks().size(); ++b)
          for (int x : restriction.blocks()[b])
            if (f[static_cast<std::size_t>(x - 1)] != assignment[b] - 1) return;
        std::set<int> used;
        for (std::size_t b = 0; b < restriction.blocks().size(); ++b) used.insert(assignment[b] - 1);
        for (int x = 1; x <= k; ++x) CHECK(used.count(f[static_cast<std::size_t>(x - 1)]) == 1);
        hits += 1;
        return;
      }
      for (int v = 0; v < p; ++v) {
        f[static_cast<std::size_t>(i)] = v;
        rec(i + 1);
      }
    };
    rec(0);
    std::map<int, unsigned> free_mult;
    for (int i = 1; i <= p; ++i)
      if (std::find(assignment.begin(), assignment.end(), i) == assignment.end()) ++free_mult[lambda[static_cast<std::size_t>(i - 1)]];
    BigCount sym = 1;
    for (auto [part, m] : free_mult) sym *= factorial(m);
    CHECK(refined_count(lambda, restriction, assignment) * sym == hits);
  };
  check(IntPartition({3, 2, 1}), SetPartition({{1, 2}, {3}}), {1, 2});
  check(IntPartition({3, 2, 1}), SetPartition({{1, 2}, {3}}), {2, 3});
  check(IntPartition({3, 2, 1}), SetPartition({{1}, {2}, {3}}), {3, 1, 2});
  check(IntPartition({2, 2, 2}), SetPartition({{1}, {2}}), {1, 2});
  check(IntPartition({4, 2}), SetPartition({{1, 2, 3}}), {1});
  check(IntPartition({2, 2, 1, 1}), SetPartition({{1, 2}, {3}}), {2, 4});
}

TEST_CASE("refined counts over distinct size patterns sum to the shape count") {
  for (int n = 1; n <= 7; ++n)
    for (const auto& lambda : enumerate_partitions(n))
      for (int k = 1; k <= n; ++k) {
        BigCount total = 0;
        oracle::for_each_rgs(k, [&](const std::vector<int>& a) {
          std::vector<std::vector<int>> blocks;
          for (int x = 1; x <= k; ++x) {
            auto label = static_cast<std::size_t>(a[static_cast<std::size_t>(x - 1)]);
            if (label >= blocks.size()) blocks.resize(label + 1);
            blocks[label].push_back(x);
          }
          SetPartition restriction(blocks);
          const int b = static_cast<int>(restriction.block_count());
          // Injective assignments, one per sequence of assigned part sizes.
          std::set<std::vector<int>> patterns;
          std::vector<int> pick;
          std::function<void()> rec = [&] {
            if (static_cast<int>(pick.size()) == b) {
              std::vector<int> sizes;
              for (int i : pick) sizes.push_back(lambda[static_cast<std::size_t>(i - 1)]);
              bool fits = true;
              for (int j = 0; j < b; ++j)
                fits = fits && static_cast<int>(restriction.blocks()[static_cast<std::size_t>(j)].size()) <= sizes[static_cast<std::size_t>(j)];
              if (fits && patterns.insert(sizes).second) total += refined_count(lambda, restriction, pick);
              return;
            }
            for (int i = 1; i <= lambda.length(); ++i) {
              if (std::find(pick.begin(), pick.end(), i) != pick.end()) continue;
              pick.push_back(i);
              rec();
              pick.pop_back();
            }
          };
          rec();
        });
        CHECK(total == shape_count(lambda));
      }
}

TEST_CASE("block_containing_probability equals the subset count") {
  // π_(1) is a uniform block_size-subset containing 1, by exchangeability.
  for (int n = 2; n <= 9; ++n)
    for (int b = 1; b <= n; ++b)
      for (int k = 1; k <= n; ++k)
        for (int l = 1; l <= std::min(k, b); ++l) {
          BigCount hits = 0, total = 0;
          for (unsigned mask = 0; mask < (1u << n); ++mask) {
            if (!(mask & 1u) || __builtin_popcount(mask) != b) continue;
            total += 1;
            // Fixed l-subset of [k] containing 1: {1, ..., l}.
            unsigned low = mask & ((1u << k) - 1u);
            if (low == (1u << l) - 1u) hits += 1;
          }
          CHECK(block_containing_probability(n, k, b, l) == Rational(hits, total));
        }
}

TEST_CASE("uniform_shape_partition is uniform over partitions of a shape") {
  IntPartition lambda({3, 2, 1});
  auto labels = SetPartition::range(6);
  std::map<SetPartition, std::uint64_t> counts;
  Rng rng(11);
  const int draws = 60000;
  for (int i = 0; i < draws; ++i) {
    auto p = uniform_shape_partition(lambda, labels, rng);
    CHECK(p.shape() == lambda);
    ++counts[p];
  }
  CHECK(BigCount(counts.size()) == shape_count(lambda));
  std::vector<std::uint64_t> obs;
  std::vector<double> expected;
  for (auto& [p, c] : counts) {
    obs.push_back(c);
    expected.push_back(1.0 / 60.0);
  }
  CHECK(chi_square_gof(obs, expected).p_value > 0.001);
}

TEST_CASE("paintbox block-pair probabilities") {
  // Two labels share a block with probability Σ s_k².
  MassPartition s({0.5, 0.3, 0.2});
  Rng rng(5);
  const int draws = 40000;
  int together = 0;
  for (int i = 0; i < draws; ++i) {
    auto p = paintbox(s, 4, rng);
    CHECK(p.size() == 4);
    if (*p.block_of(1) == *p.block_of(2)) ++together;
  }
  double expect = 0.25 + 0.09 + 0.04;
  double se = std::sqrt(expect * (1 - expect) / draws);
  CHECK(std::abs(together / double(draws) - expect) < 4 * se);
  // Masses must sum to 1.
  CHECK_THROWS(paintbox(MassPartition(), 5, rng));
  CHECK_THROWS(paintbox(MassPartition({0.5, 0.3}), 5, rng));
}

TEST_CASE("MassPartition validation and complement") {
  auto b = MassPartition::binary(1 - 1e-17, 1e-17);
  CHECK(b.one_minus_largest() == doctest::Approx(1e-17).epsilon(1e-9));
  CHECK_THROWS(MassPartition({0.7, 0.6}));
  CHECK(MassPartition({0.2, 0.5}).largest() == 0.5);
}
