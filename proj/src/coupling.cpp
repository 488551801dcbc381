#include "branchlab/polya.hpp"

#include <algorithm>
#include <stdexcept>

namespace branchlab {

namespace {

BigCount power(const BigCount& x, unsigned k) {
  BigCount out = 1;
  for (unsigned i = 0; i < k; ++i) out *= x;
  return out;
}

class Coupler {
 public:
  Coupler(const CountTables& tables, Rng& rng) : tables_(tables), rng_(rng) {}

  Tree couple(const Tree& t) {
    if (t.is_leaf()) return t;
    const std::vector<Tree> kids = t.children();
    std::vector<Tree> out;
    out.reserve(kids.size());
    std::size_t i = 0;
    while (i < kids.size()) {
      const std::size_t start = i;
      const auto j = kids[i].size();
      while (i < kids.size() && kids[i].size() == j) ++i;
      std::vector<Tree> group(kids.begin() + static_cast<std::ptrdiff_t>(start), kids.begin() + static_cast<std::ptrdiff_t>(i));
      // Equal members sit next to each other in canonical order.
      bool distinct = true;
      for (std::size_t a = 1; a < group.size(); ++a)
        if (group[a] == group[a - 1]) distinct = false;
      if (!distinct) {
        j_star_ = std::max(j_star_, static_cast<int>(j));
        group = replace(static_cast<int>(j), static_cast<unsigned>(group.size()));
      }
      for (const auto& g : group) out.push_back(couple(g));
    }
    return Tree::join(std::move(out));
  }

  int j_star() const { return j_star_; }

 private:
  // K_j on a group with a repeat: B = 1 with probability
  // P(F̄ ∉ A) / P(F ∉ A) = (U^k - (U)_k) k! F / (U^k (k! F - (U)_k)).
  std::vector<Tree> replace(int j, unsigned k) {
    const BigCount& u = tables_.T(j);
    const BigCount uk = power(u, k);
    const BigCount fall = falling(u, k);
    const BigCount kf = factorial(k) * multiset_count(u, k);
    const BigCount num = (uk - fall) * kf;
    const BigCount den = uk * (kf - fall);
    const bool b = rng_.below(den) < num;
    return b ? iid_with_repeat(j, k) : distinct_trees(j, k);
  }

  // d distinct uniform trees of size j; each new draw is uniform on the
  // trees not yet taken.
  std::vector<Tree> distinct_trees(int j, unsigned d) {
    std::vector<Tree> out;
    out.reserve(d);
    while (out.size() < d) {
      Tree t = uniform_tree(tables_, j, rng_);
      if (std::find(out.begin(), out.end(), t) == out.end()) out.push_back(std::move(t));
    }
    return out;
  }

  // k i.i.d. uniform trees conditioned on a repeat. The number of k-tuples
  // with exactly d distinct values is S(k, d) (U)_d, so d is drawn with that
  // weight over d < k, then the block sizes of a uniform set partition of
  // [k] into d blocks, then d distinct trees, one per block.
  std::vector<Tree> iid_with_repeat(int j, unsigned k) {
    const BigCount& u = tables_.T(j);
    const unsigned dmax = static_cast<unsigned>(std::min<BigCount>(BigCount(k - 1), u).convert_to<long>());
    // s2[i][d] = S(i, d) for i <= k, d <= dmax.
    std::vector<std::vector<BigCount>> s2(k + 1, std::vector<BigCount>(dmax + 1, BigCount(0)));
    s2[0][0] = 1;
    for (unsigned i = 1; i <= k; ++i)
      for (unsigned d = 1; d <= std::min(i, dmax); ++d) s2[i][d] = s2[i - 1][d - 1] + BigCount(d) * s2[i - 1][d];
    std::vector<BigCount> w(dmax + 1, BigCount(0));
    BigCount total = 0;
    for (unsigned d = 1; d <= dmax; ++d) {
      w[d] = s2[k][d] * falling(u, d);
      total += w[d];
    }
    BigCount r = rng_.below(total);
    unsigned d = 1;
    for (; d < dmax && r >= w[d]; ++d) r -= w[d];
    // Blocks indexed by least element. Walking i = k..1, element i opens the
    // last block of {1..i} with probability S(i-1, d-1) / S(i, d), else it
    // joins one of the d blocks of {1..i-1}.
    std::vector<unsigned> sizes(d, 0);
    unsigned dd = d;
    for (unsigned i = k; i >= 1; --i) {
      const BigCount& all = s2[i][dd];
      if (rng_.below(all) < s2[i - 1][dd - 1]) {
        ++sizes[dd - 1];
        --dd;
      } else {
        ++sizes[rng_.below(dd)];
      }
    }
    const std::vector<Tree> values = distinct_trees(j, d);
    std::vector<Tree> out;
    out.reserve(k);
    for (unsigned b = 0; b < d; ++b)
      for (unsigned c = 0; c < sizes[b]; ++c) out.push_back(values[b]);
    return out;
  }

  const CountTables& tables_;
  Rng& rng_;
  int j_star_ = 0;
};

}  // namespace

CouplingOutcome natural_coupling(const CountTables& tables, const Tree& t, Rng& rng) {
  if (t.size() > static_cast<std::uint64_t>(tables.N())) throw std::out_of_range("natural_coupling: tree larger than the tables");
  tables.forest();
  Coupler c(tables, rng);
  CouplingOutcome out;
  out.original = t;
  out.coupled = c.couple(t);
  out.j_star = c.j_star();
  return out;
}

}  // namespace branchlab
