#pragma once

#include "branchlab/numeric.hpp"
#include "branchlab/partitions.hpp"
#include "branchlab/rng.hpp"
#include "branchlab/splitlaws.hpp"
#include "branchlab/trees.hpp"

#include <cstddef>
#include <memory>
#include <optional>
#include <vector>

namespace branchlab {

/// Degree bound value meaning "no bound" (m = ∞).
inline constexpr int kUnboundedDegree = 0;

/// Which λ get S^{(λ)} = 0. kBijection: p(λ) > m, so the root may have
/// exactly m children. kLiteral: p(λ) >= m. Only kBijection satisfies
/// T[n] = Σ_λ S_n^{(λ)}.
enum class DegreeRule { kBijection, kLiteral };

/// Forest counts over V (BigCount or LogValue): at(s, j, c) is the number of
/// multisets of trees of T^(m) with total size s, every tree of size <= j and
/// at most c trees (c ignored when m = ∞). Built for s < N, so trees up to N.
template <class V>
class ForestTable {
 public:
  ForestTable() = default;
  ForestTable(int m, int N);
  int m() const { return m_; }
  int N() const { return N_; }
  bool unbounded() const { return m_ == kUnboundedDegree; }
  /// #T^(m)_n for 1 <= n <= N.
  const V& tree_count(int n) const { return T_[static_cast<std::size_t>(n)]; }
  const V& at(int s, int j, int c) const;
  /// F_j(k) = C(T[j] + k - 1, k).
  const V& multiset(int j, int k) const { return F_[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)]; }
  /// Stored entries for (m, N); the constructors check this against caps.
  static double entries(int m, int N);

 private:
  std::size_t cdim(int s) const;
  int m_ = kUnboundedDegree;
  int N_ = 0;
  V zero_{}, one_{};
  std::vector<V> T_;
  std::vector<std::vector<V>> rows_;  ///< rows_[s][j * cdim(s) + c], 1 <= j <= s
  std::vector<std::vector<V>> F_;
};

extern template class ForestTable<BigCount>;
extern template class ForestTable<LogValue>;

/// Exact Otter tables for T^(m): T[n] and T̃[n] (root degree <= m - 2) for
/// n <= N, plus the exact forest table when it fits the memory cap. Without
/// the forest only m = 2 and m = ∞ can be counted (pair recurrence and
/// Euler transform); unranking then is unavailable.
class CountTables {
 public:
  enum class Forest { kAuto, kRequire, kNone };
  CountTables(int m, int N, Forest forest = Forest::kAuto);
  int m() const { return m_; }
  bool unbounded() const { return m_ == kUnboundedDegree; }
  int N() const { return N_; }
  const BigCount& T(int n) const;
  const BigCount& T_tilde(int n) const;
  bool has_forest() const { return forest_ != nullptr; }
  /// Throws ResourceError when the forest table was not built.
  const ForestTable<BigCount>& forest() const;

  /// Largest N with an exact forest table (about 1000 for m = ∞).
  static int forest_cap(int m);
  /// Largest N for exact counts without a forest (m = 2 or ∞).
  static constexpr int kCountCap = 4096;

 private:
  int m_;
  int N_;
  std::vector<BigCount> T_, Tt_;
  std::shared_ptr<const ForestTable<BigCount>> forest_;
};

CountTables otter_counts(int m, int N);

/// S_n^{(λ)} = Π_j F_j(m_j(λ)) for λ ∈ P_{n-1}; zero when the degree rule
/// excludes p(λ).
BigCount shape_count_poly(const CountTables& tables, int n, const IntPartition& lambda,
                          DegreeRule rule = DegreeRule::kBijection);

/// Vertex-model law q_n(λ) = S_{n+1}^{(λ)} / T_{n+1}, the root split of a
/// uniform tree of T^(m)_{n+1}. The pmf is an exact bigint ratio when exact
/// counts exist and a log-space ratio otherwise. Sampling walks sizes in
/// decreasing order with conditional forest counts held in log space (pair
/// scan for m = 2), so it never lists P_n.
class UniformLaw : public SplitLaw {
 public:
  /// Serves q_n for n + 1 <= N.
  UniformLaw(int m, int N);
  explicit UniformLaw(std::shared_ptr<const CountTables> tables);
  std::string family() const override { return "uniform"; }
  ModelKind model() const override { return ModelKind::kVertex; }
  int max_n() const override { return N_ - 1; }
  double pmf(int n, const IntPartition& lambda) const override;
  IntPartition sample(int n, Rng& rng) const override;
  /// Listed for n <= 40, or up to 500 for m = 3 and every n for m = 2.
  std::optional<PartitionPmf> distribution(int n) const override;
  std::optional<RationalPmf> exact_distribution(int n) const override;
  int m() const { return m_; }
  /// Exact tables, or null when N is beyond the exact caps.
  const std::shared_ptr<const CountTables>& tables() const { return exact_; }
  /// log #T^(m)_n.
  double log_tree_count(int n) const;

 private:
  void build_log_tables();
  int m_;
  int N_;
  std::shared_ptr<const CountTables> exact_;
  std::shared_ptr<const ForestTable<LogValue>> log_forest_;  ///< m != 2
  std::vector<LogValue> log_T_;
};

std::shared_ptr<const UniformLaw> uniform_law(int m, int N);

/// Tree of rank r in the canonical order of T^(m)_n. Ranks run through λ
/// in canonical order, then per size group (largest size first, most
/// significant) through the lexicographic rank of the non-decreasing
/// sequence of child ranks. Needs the exact forest.
Tree unrank_tree(const CountTables& tables, int n, const BigCount& r);
/// Inverse of unrank_tree.
BigCount rank_tree(const CountTables& tables, const Tree& t);
/// Uniform element of T^(m)_n: a uniform rank in [0, T[n]) unranked.
Tree uniform_tree(const CountTables& tables, int n, Rng& rng);

/// Lexicographic rank of a non-decreasing sequence over [0, u) among the
/// C(u + k - 1, k) such sequences of length k, and its inverse.
BigCount multiset_rank(const BigCount& u, const std::vector<BigCount>& seq);
std::vector<BigCount> multiset_unrank(const BigCount& u, unsigned k, BigCount r);

/// Subtree rooted at a uniformly chosen vertex.
Tree random_subtree(const Tree& t, Rng& rng);

/// Depth of a uniform vertex of a uniform tree of T^(m)_n. The chosen child
/// of a uniform tree, given its size, is again uniform, so the walk only
/// needs root splits.
std::uint64_t uniform_vertex_depth(const UniformLaw& law, int n, Rng& rng);

/// Asymptotic constants of #T^(m)_n ~ κ ρ^n n^{-3/2} read off exact tables.
struct PolyaConstants {
  int m = kUnboundedDegree;
  int N = 0;
  double rho_raw = 0.0;        ///< T[N] / T[N-1]
  double rho_corrected = 0.0;  ///< the ratio times (1 + 1/n)^{3/2}, n = N - 1
  double rho = 0.0;            ///< Aitken-accelerated corrected ratios
  double kappa = 0.0;          ///< T[N] N^{3/2} / ρ^N
  double psi_partial = 0.0;    ///< Σ_{n<=N} T̃[n] ρ^{-n}
  /// Bound on the omitted Σ_{n>N} T̃[n] ρ^{-n}: max over n ∈ [N/2, N] of
  /// T̃[n] ρ^{-n} n^{3/2}, times ∫_N^∞ x^{-3/2} dx.
  double psi_tail_bound = 0.0;
  double c_m = 0.0;  ///< √2 / (√π κ ψ̃)
};

PolyaConstants constants(const CountTables& tables);

/// Result of the natural coupling of a tree with its Markov branching image.
struct CouplingOutcome {
  Tree original;
  Tree coupled;
  /// Largest size of a sibling group holding two equal subtrees met during
  /// the recursion; 0 when every group was duplicate-free.
  int j_star = 0;
};

/// Applies the coupling kernel K recursively. At each vertex every group of
/// k >= 2 equal-size children is kept if its members are pairwise distinct;
/// otherwise with probability P(F̄ ∉ A)/P(F ∉ A) (exact rationals) it is
/// replaced by an i.i.d. multiset conditioned on a repeat, else by one
/// conditioned on distinct members. Every resulting child is coupled in turn.
CouplingOutcome natural_coupling(const CountTables& tables, const Tree& t, Rng& rng);

}  // namespace branchlab
