#pragma once

#include "branchlab/fragmentation.hpp"
#include "branchlab/numeric.hpp"
#include "branchlab/partitions.hpp"
#include "branchlab/rng.hpp"

#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace branchlab {

/// Leaf model: n counts leaves, q_n((n)) < 1 is a hold, q₁ lives on {∅, (1)}.
/// Vertex model: n + 1 vertices split by q_n at the root; q₁((1)) = 1.
enum class ModelKind { kLeaf, kVertex };

/// a_n = n^γ ℓ(n); ℓ defaults to 1.
struct Scaling {
  double gamma = 1.0;
  std::function<double(double)> ell;
  double a(double n) const;
};

using PartitionPmf = std::vector<std::pair<IntPartition, double>>;
using RationalPmf = std::vector<std::pair<IntPartition, Rational>>;

/// Family of splitting laws (q_n, n >= 1). Immutable after construction.
class SplitLaw {
 public:
  virtual ~SplitLaw() = default;

  virtual std::string family() const = 0;
  virtual ModelKind model() const = 0;
  /// Largest n served; the law throws above it.
  virtual int max_n() const { return std::numeric_limits<int>::max(); }
  /// Whether pmf() is exact (false for Monte Carlo-only families).
  virtual bool has_exact_pmf() const { return true; }
  virtual double pmf(int n, const IntPartition& lambda) const = 0;
  virtual IntPartition sample(int n, Rng& rng) const = 0;
  /// Full support of q_n with masses, when cheap to list. The default
  /// enumerates P_n for n <= 40 when the pmf is exact.
  virtual std::optional<PartitionPmf> distribution(int n) const;
  /// Support of q_n with exact rational masses, when available.
  virtual std::optional<RationalPmf> exact_distribution(int n) const;
  /// q_n((n)).
  virtual double trivial_mass(int n) const;
  /// Hold length G (failures before a nontrivial split, success probability
  /// 1 - q_n((n))) and a draw from q_n(· | P_n \ {(n)}). Leaf model, n >= 2.
  virtual std::pair<std::uint64_t, IntPartition> sample_hold_and_split(int n, Rng& rng) const;
  /// q₁(∅) for leaf models.
  virtual double leaf_stop_probability() const { return 1.0; }

  const Scaling& scaling() const { return scaling_; }
  void set_scaling(Scaling s);

 protected:
  void check_n(int n) const;
  Scaling scaling_;
};

using SplitLawPtr = std::shared_ptr<const SplitLaw>;

/// Walker alias table over a finite pmf.
class AliasTable {
 public:
  AliasTable() = default;
  explicit AliasTable(const std::vector<double>& weights);
  std::size_t sample(Rng& rng) const;
  std::size_t size() const { return prob_.size(); }

 private:
  std::vector<double> prob_;
  std::vector<std::size_t> alias_;
};

/// Law given by explicit per-n tables. For the leaf model, n = 1 may list ∅
/// (IntPartition::empty()) and (1); unlisted n = 1 means q₁(∅) = 1.
class TabulatedLaw : public SplitLaw {
 public:
  TabulatedLaw(std::map<int, PartitionPmf> entries, ModelKind model, std::string name = "tabulated");
  std::string family() const override { return name_; }
  ModelKind model() const override { return model_; }
  int max_n() const override { return max_n_; }
  double pmf(int n, const IntPartition& lambda) const override;
  IntPartition sample(int n, Rng& rng) const override;
  std::optional<PartitionPmf> distribution(int n) const override;
  double leaf_stop_probability() const override { return leaf_stop_; }
  const std::map<int, PartitionPmf>& entries() const { return entries_; }

 private:
  const PartitionPmf& row(int n) const;
  std::map<int, PartitionPmf> entries_;
  std::map<int, AliasTable> alias_;
  ModelKind model_;
  std::string name_;
  int max_n_ = 0;
  double leaf_stop_ = 1.0;
};

/// Convenience constructor.
SplitLawPtr tabulated_law(std::map<int, PartitionPmf> entries, ModelKind model = ModelKind::kLeaf);

/// Critical offspring distribution ξ. The pmf is stored on 0..K (trailing
/// masses below the double range dropped); heavy-tailed laws keep their
/// exact mass beyond the stored range in `tail_mass`.
struct OffspringLaw {
  std::string name;
  std::vector<double> pmf;
  double mean = 1.0;
  std::optional<double> variance;
  std::optional<double> tail_alpha;
  /// Mass on k >= pmf.size(); such offspring never fit in the tables.
  double tail_mass = 0.0;
  /// Exact rational pmf, when the law has one (used by rational tables).
  std::vector<Rational> exact_pmf;

  static OffspringLaw binary();
  static OffspringLaw poisson();
  /// Arbitrary finite pmf; must be critical with ξ(0) > 0.
  static OffspringLaw from_pmf(std::vector<double> pmf, std::string name = "pmf");
  /// ξ(k) = c k^{-α-1} on 2 <= k <= k_cut, with ξ(0), ξ(1) set so the law
  /// has total mass 1 and mean 1 (c chosen so ξ(1) = 1/2). α in (1, 2).
  static OffspringLaw stable(double alpha, std::uint64_t k_cut = 1000000);
  double at(std::size_t k) const { return k < pmf.size() ? pmf[k] : 0.0; }
  std::size_t max_support() const;
};

/// Galton-Watson splitting law (vertex model). Tables up to N hold
/// GW_ξ(#t = k) = P(S_k = -1)/k and P(S_k = -p) for p = 1 and every p in the support,
/// from the exact walk convolution with steps ξ - 1.
class GwLaw : public SplitLaw {
 public:
  GwLaw(OffspringLaw xi, int N);
  std::string family() const override { return "gw"; }
  ModelKind model() const override { return ModelKind::kVertex; }
  int max_n() const override { return N_ - 1; }
  double pmf(int n, const IntPartition& lambda) const override;
  IntPartition sample(int n, Rng& rng) const override;
  std::optional<PartitionPmf> distribution(int n) const override;
  std::optional<RationalPmf> exact_distribution(int n) const override;

  const OffspringLaw& offspring() const { return xi_; }
  /// GW_ξ(#t = k), k <= N.
  double tree_size_probability(int k) const;
  /// P(S_k = -p) for the walk with steps ξ - 1, k <= N, p = 1 or in the support.
  double walk_probability(int k, int p) const;
  /// P(τ_p = k) = (p/k) P(S_k = -p); P(τ_0 = k) = 1{k = 0}.
  double hitting_probability(int p, int k) const;
  /// q_n(p(λ) = p).
  double root_degree_probability(int n, int p) const;
  /// Root degree p and the exchangeable composition (X_1..X_p | τ_p = n).
  std::vector<int> sample_composition(int n, Rng& rng) const;
  /// Exact rational GW_ξ(#t = k) for k <= kmax, from the walk in rationals.
  /// Requires an exact pmf.
  std::vector<Rational> exact_tree_size_table(int kmax) const;

 private:
  OffspringLaw xi_;
  int N_;
  std::vector<int> support_;                ///< p >= 1 with ξ(p) > 0 and p <= N
  std::vector<int> levels_;                 ///< support_ together with 1, sorted
  std::vector<std::vector<double>> walk_;   ///< walk_[k][i] = P(S_k = -levels_[i])
  std::vector<double> size_prob_;           ///< GW(#t = k)
};

SplitLawPtr gw_law(OffspringLaw xi, int N);

/// q_{α,θ}(n, k) of the (α, θ) growth model, by log-gamma.
double q_alpha_theta(double alpha, double theta, int n, int k);

/// Binary leaf-model law of the (α, θ) trees.
class AlphaThetaLaw : public SplitLaw {
 public:
  AlphaThetaLaw(double alpha, double theta);
  std::string family() const override { return "alpha_theta"; }
  ModelKind model() const override { return ModelKind::kLeaf; }
  double pmf(int n, const IntPartition& lambda) const override;
  IntPartition sample(int n, Rng& rng) const override;
  std::optional<PartitionPmf> distribution(int n) const override;
  double alpha() const { return alpha_; }
  double theta() const { return theta_; }

 private:
  double alpha_, theta_;
};

SplitLawPtr alpha_theta_law(double alpha, double theta);

/// Consistent law of a binary dislocation measure (leaf model, no holds):
/// q_n((j, n-j)) = C(n, j) ∫ (x^j (1-x)^{n-j} + x^{n-j} (1-x)^j) ν(dx) / Z_n
/// for j > n/2 (single term at j = n/2), Z_n = ∫ (1 - x^n - (1-x)^n) ν(dx).
/// Binary ν only; tables are built for n <= N.
class ConsistentLaw : public SplitLaw {
 public:
  ConsistentLaw(const DislocationMeasure& nu, int N, double tol = 1e-10);
  std::string family() const override { return "consistent"; }
  ModelKind model() const override { return ModelKind::kLeaf; }
  int max_n() const override { return N_; }
  double pmf(int n, const IntPartition& lambda) const override;
  IntPartition sample(int n, Rng& rng) const override;
  std::optional<PartitionPmf> distribution(int n) const override;
  /// Largest quadrature error estimate relative to Z_n over the tables.
  double max_quadrature_error() const { return max_error_; }

 private:
  int N_;
  double max_error_ = 0.0;
  std::vector<std::vector<double>> probs_;  ///< probs_[n][j - ceil(n/2)] for the split (j, n-j)
  std::vector<AliasTable> alias_;
};

SplitLawPtr consistent_law(const DislocationMeasure& nu, int N, double tol = 1e-10);

/// Discrete laws attached to (ν, γ): for n >= n₀, with probability
/// w_n = n^{-γ} ν(1 - s₁ >= n^{-γ/2}) draw s from ν restricted to that set
/// and return the block sizes of a multinomial allocation of n balls to the
/// parts of s; otherwise return (n). Below n₀ the split is forced: s is drawn
/// with the threshold of n₀ and the allocation is conditioned to be
/// nontrivial. q₁(∅) = 1. pmf is available only by Monte Carlo.
class PropexempleLaw : public SplitLaw {
 public:
  /// Sampling tables cover n <= max_n.
  PropexempleLaw(const DislocationMeasure& nu, double gamma, int max_n = 1 << 16);
  std::string family() const override { return "propexemple"; }
  ModelKind model() const override { return ModelKind::kLeaf; }
  int max_n() const override { return max_n_; }
  bool has_exact_pmf() const override { return false; }
  /// Throws: the pmf is Monte Carlo only (see pmf_estimate).
  double pmf(int n, const IntPartition& lambda) const override;
  IntPartition sample(int n, Rng& rng) const override;
  std::optional<PartitionPmf> distribution(int) const override { return std::nullopt; }
  double trivial_mass(int n) const override;
  std::pair<std::uint64_t, IntPartition> sample_hold_and_split(int n, Rng& rng) const override;

  int n0() const { return n0_; }
  double gamma() const { return gamma_; }
  /// w_n; for n < n₀ the split probability is 1.
  double split_weight(int n) const;
  double threshold(int n) const;
  /// Monte Carlo estimate of q_n(λ) with standard error.
  std::pair<double, double> pmf_estimate(int n, const IntPartition& lambda, std::size_t reps, std::uint64_t seed) const;
  const DislocationMeasure& measure() const { return nu_; }

 private:
  IntPartition allocate(int n, const MassPartition& s, Rng& rng) const;
  IntPartition forced_split(int n, Rng& rng) const;

  DislocationMeasure nu_;
  double gamma_;
  int max_n_;
  int n0_ = 1;
  std::shared_ptr<RestrictedSampler> sampler_;  ///< restricted at the smallest threshold in use
};

std::shared_ptr<const PropexempleLaw> propexemple_law(const DislocationMeasure& nu, double gamma, int max_n = 1 << 16);

/// Leaf-model law q° from a vertex-model law q: q°₁(∅) = 1 and
/// q°_{n+1}((λ, 1)) = q_n(λ).
class CircLaw : public SplitLaw {
 public:
  explicit CircLaw(SplitLawPtr base);
  std::string family() const override { return "circ(" + base_->family() + ")"; }
  ModelKind model() const override { return ModelKind::kLeaf; }
  int max_n() const override;
  bool has_exact_pmf() const override { return base_->has_exact_pmf(); }
  double pmf(int n, const IntPartition& lambda) const override;
  IntPartition sample(int n, Rng& rng) const override;
  std::optional<PartitionPmf> distribution(int n) const override;
  std::optional<RationalPmf> exact_distribution(int n) const override;
  const SplitLaw& base() const { return *base_; }

 private:
  SplitLawPtr base_;
};

SplitLawPtr circ_transform(SplitLawPtr q);

/// Result of the hypothesis-(H) probe a_n Σ_λ q_n(λ) (1 - λ₁/n) f(λ/n).
struct ProbeResult {
  int n = 0;
  double estimate = 0.0;
  double std_error = 0.0;
  enum class Mode { kExact, kMonteCarlo } mode = Mode::kExact;
};

enum class ProbeMode { kAuto, kExact, kMonteCarlo };

/// Exact mode sums over distribution(n); Monte Carlo averages the law's own
/// samples. Auto picks exact whenever distribution(n) is available.
ProbeResult probe_H(const SplitLaw& q, const MassFunction& f, int n, ProbeMode mode = ProbeMode::kAuto,
                    std::size_t reps = 100000, std::uint64_t seed = 1);

/// λ/n as a mass partition.
MassPartition normalized(const IntPartition& lambda);

/// Size-biased random reordering of a nonnegative sequence.
std::vector<double> size_biased_order(std::vector<double> x, Rng& rng);

/// Monte Carlo estimate of q̄*_n(g) = E[g((λ/n)*)] with standard error.
std::pair<double, double> size_biased_functional(const SplitLaw& q, const std::function<double(const std::vector<double>&)>& g,
                                                 int n, std::size_t reps, std::uint64_t seed);

std::string to_string(ProbeResult::Mode m);

}  // namespace branchlab
