#pragma once

#include "branchlab/numeric.hpp"
#include "branchlab/rng.hpp"

#include <compare>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace branchlab {

/// Partition of a positive integer: non-increasing positive parts. The extra
/// element of P_1 (the empty partition, "no children") is a distinct value
/// obtained from IntPartition::empty(); it is not the same as a zero-part list
/// of some other total.
class IntPartition {
 public:
  /// The empty partition of P_1.
  IntPartition() = default;
  /// Sorts the parts into non-increasing order; all parts must be positive
  /// and the list nonempty.
  explicit IntPartition(std::vector<int> parts);

  static IntPartition empty() { return IntPartition(); }
  static IntPartition trivial(int n) { return IntPartition(std::vector<int>{n}); }

  bool is_empty() const { return parts_.empty(); }
  /// n(λ); the empty partition reports 1, its ambient P_1.
  int total() const { return is_empty() ? 1 : total_; }
  /// p(λ), the number of parts.
  int length() const { return static_cast<int>(parts_.size()); }
  int largest() const { return is_empty() ? 0 : parts_.front(); }
  const std::vector<int>& parts() const { return parts_; }
  int operator[](std::size_t i) const { return parts_[i]; }
  /// m_j(λ).
  int multiplicity(int j) const;
  /// (j, m_j(λ)) for every j with m_j(λ) > 0, in decreasing j.
  std::vector<std::pair<int, int>> multiplicities() const;
  bool is_trivial() const { return parts_.size() == 1; }
  /// λ with one more part of size j.
  IntPartition with_part(int j) const;
  /// λ with one part of size j removed; j must occur.
  IntPartition without_part(int j) const;
  std::string str() const;

  bool operator==(const IntPartition& o) const { return parts_ == o.parts_; }
  /// Canonical order: the empty partition first, then reverse lexicographic
  /// on parts, so (n) precedes every other partition of n.
  bool operator<(const IntPartition& o) const;

 private:
  std::vector<int> parts_;
  int total_ = 0;
};

/// Partition of a finite label set, blocks ordered by least element and each
/// block sorted increasingly. This is the only representation in use, so
/// structural equality is partition equality.
class SetPartition {
 public:
  SetPartition() = default;
  /// Canonicalizes; rejects empty blocks and overlapping blocks.
  explicit SetPartition(std::vector<std::vector<int>> blocks);

  /// The one-block partition O_B.
  static SetPartition one_block(std::vector<int> labels);
  /// The all-singletons partition I_B.
  static SetPartition singletons(std::vector<int> labels);
  /// [n] = {1, ..., n}.
  static std::vector<int> range(int n);

  const std::vector<std::vector<int>>& blocks() const { return blocks_; }
  std::size_t block_count() const { return blocks_.size(); }
  /// Sorted ground set.
  std::vector<int> ground() const;
  std::size_t size() const;
  IntPartition shape() const;
  /// Index of the block containing x, or nullopt.
  std::optional<std::size_t> block_of(int x) const;
  /// Trace on a subset B of the ground set.
  SetPartition restrict(const std::vector<int>& subset) const;
  bool all_singletons() const;
  std::string str() const;

  bool operator==(const SetPartition& o) const { return blocks_ == o.blocks_; }
  bool operator<(const SetPartition& o) const { return blocks_ < o.blocks_; }

 private:
  std::vector<std::vector<int>> blocks_;
};

/// Finite non-increasing nonnegative sequence with sum at most 1 (up to 1e-12).
class MassPartition {
 public:
  MassPartition() = default;
  /// Sorts into non-increasing order and validates.
  explicit MassPartition(std::vector<double> entries);
  /// Binary partition (x, 1-x) with the complement supplied exactly, x >= 1/2.
  static MassPartition binary(double x, double one_minus_x);

  const std::vector<double>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  double operator[](std::size_t i) const { return i < entries_.size() ? entries_[i] : 0.0; }
  double largest() const { return entries_.empty() ? 0.0 : entries_.front(); }
  double sum() const;
  /// 1 - s_1 computed as the sum of the other entries for conservative
  /// partitions, which avoids cancellation when s_1 is close to 1.
  double one_minus_largest() const;
  bool conservative(double tol = 1e-9) const;

 private:
  std::vector<double> entries_;
};

/// Partitions of n with at most max_parts parts, in reverse lexicographic
/// order. Throws ResourceError above `cap` (full enumeration grows like
/// exp(pi sqrt(2n/3))).
std::vector<IntPartition> enumerate_partitions(int n, std::optional<int> max_parts = std::nullopt, int cap = 60);

/// Streaming form of enumerate_partitions; no size cap.
void for_each_partition(int n, const std::function<void(const IntPartition&)>& visit,
                        std::optional<int> max_parts = std::nullopt);

/// Number of partitions p(n) from Euler's pentagonal recurrence.
BigCount partition_number(int n);

/// C_λ = n! / (prod λ_i! prod m_j(λ)!): set partitions of [n] of shape λ.
BigCount shape_count(const IntPartition& lambda);

/// Number of set partitions π of [n] with shape λ, π restricted to [k] equal
/// to `restriction` (a partition of [k]) and #π_j = λ_{assignment[j]} for the
/// b blocks of the restriction. Assignment indices are 1-based and distinct.
BigCount refined_count(const IntPartition& lambda, const SetPartition& restriction,
                       const std::vector<int>& assignment);

/// Exchangeable paintbox: labels 1..n get i.i.d. colours with P(k) = s_k and
/// blocks are colour classes. Colours beyond the point where the remaining
/// mass of s drops below 1e-15 are treated as dust (singletons).
SetPartition paintbox(const MassPartition& s, int n, Rng& rng);

/// Uniform set partition of `labels` with shape λ.
SetPartition uniform_shape_partition(const IntPartition& lambda, const std::vector<int>& labels, Rng& rng);

/// Probability that [k] ∩ π_(1) is a fixed l-subset of [k] containing 1, for
/// an exchangeable partition of [n] conditioned on #π_(1) = block_size.
Rational block_containing_probability(int n, int k, int block_size, int l);

}  // namespace branchlab
