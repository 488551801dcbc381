#pragma once

#include "branchlab/partitions.hpp"
#include "branchlab/rng.hpp"
#include "branchlab/trees.hpp"

#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace branchlab {

/// Density of s₁ for a binary measure, called as f(x, 1 - x) with the
/// complement supplied exactly so the x -> 1 singularity is resolved.
using BinaryDensityFn = std::function<double(double x, double xc)>;
/// Test function on mass partitions.
using MassFunction = std::function<double(const MassPartition&)>;

struct IntegralResult {
  double value = 0.0;
  double error = 0.0;
};

/// Conservative dislocation measure ν, one of: binary with a density for s₁
/// on [1/2, 1) (optionally cut off at s₁ <= 1 - c), a finite combination of
/// point masses, or the stable measure ν_α.
class DislocationMeasure {
 public:
  enum class Kind { kBinaryDensity, kStable, kPointMass, kMixture };

  static DislocationMeasure binary(std::string name, BinaryDensityFn density, double default_gamma);
  static DislocationMeasure point_mass(MassPartition s, double weight = 1.0);
  static DislocationMeasure mixture(std::vector<std::pair<MassPartition, double>> atoms);
  static DislocationMeasure stable(double alpha);

  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  /// Self-similarity index usually paired with this measure.
  double default_gamma() const { return gamma_; }
  bool is_binary() const { return kind_ == Kind::kBinaryDensity; }
  /// Binary density at s₁ = x; zero beyond the cutoff.
  double density(double x, double xc) const;
  /// Smallest admissible 1 - s₁ for a binary density (0 when uncut).
  double min_complement() const { return min_complement_; }
  /// Binary measure restricted to s₁ <= 1 - c.
  DislocationMeasure cut_off(double c) const;
  const std::vector<std::pair<MassPartition, double>>& atoms() const { return atoms_; }
  double alpha() const { return alpha_; }

 private:
  Kind kind_ = Kind::kPointMass;
  std::string name_;
  double gamma_ = 1.0;
  BinaryDensityFn density_;
  double min_complement_ = 0.0;
  std::vector<std::pair<MassPartition, double>> atoms_;
  double alpha_ = 0.0;
};

/// Brownian dislocation measure: s₁ density sqrt(2 / (π x³ (1-x)³)) on [1/2, 1).
DislocationMeasure nu2();
/// Binary measure with the (α, θ) density f_{α,θ}; α in (0,1), θ >= 0.
DislocationMeasure nu_alpha_theta(double alpha, double theta);
/// Stable measure ν_α, α in (1, 2); integration by Monte Carlo only.
DislocationMeasure nu_alpha(double alpha);
/// f_{α,θ}(x) in complement form.
double alpha_theta_density(double alpha, double theta, double x, double xc);

/// ∫ f dν for f with |f(s)| <= c(1 - s₁). Binary measures use tanh-sinh
/// quadrature in u = 1 - x over (0, 1/2]; atoms are summed exactly.
/// Throws for the stable measure (see nu_alpha_integral).
IntegralResult integrate(const DislocationMeasure& nu, const MassFunction& f, double tol = 1e-10);
/// κ_ν(A_k) = ∫ (1 - Σ s_i^k) ν(ds), the rate at which [k] is split.
IntegralResult kappa(const DislocationMeasure& nu, int k, double tol = 1e-10);
/// ∫ (1 - s₁) ν(ds).
IntegralResult integral_one_minus_s1(const DislocationMeasure& nu, double tol = 1e-10);
/// ν({1 - s₁ >= δ}).
double restricted_mass(const DislocationMeasure& nu, double delta);

/// Sampler for ν(· | 1 - s₁ >= δ). Binary measures use a 2^14-cell inverse-CDF
/// table on a geometric grid in 1 - x, refined per draw by Newton steps to
/// 1e-10; atoms are chosen by weight.
class RestrictedSampler {
 public:
  RestrictedSampler(const DislocationMeasure& nu, double delta);
  /// ν({1 - s₁ >= δ}).
  double mass() const { return mass_; }
  double delta() const { return delta_; }
  MassPartition sample(Rng& rng) const { return sample_from(delta_, rng); }
  /// ν({1 - s₁ >= d}) for d >= delta(), from the same table.
  double mass_from(double d) const;
  /// Draw from ν(· | 1 - s₁ >= d) for d >= delta(), from the same table.
  MassPartition sample_from(double d, Rng& rng) const;
  /// CDF of s₁ under the restricted law (binary only).
  double cdf_s1(double x) const;

 private:
  DislocationMeasure nu_;
  double delta_ = 0.0;
  double mass_ = 0.0;
  std::vector<double> grid_;  ///< complements u, increasing from the lower bound to 1/2
  std::vector<double> cum_;   ///< mass of [grid_[0], grid_[i]]
  double cumulative(double u) const;
  std::vector<std::pair<MassPartition, double>> atoms_;  ///< admissible atoms, cumulative weights
};

/// One draw from ν(· | 1 - s₁ >= δ) together with the restricted mass.
std::pair<MassPartition, double> sample_restricted(const DislocationMeasure& nu, double delta, Rng& rng);

/// Atoms of the Poisson measure with intensity x^{-1-1/α} dx / (αΓ(1-1/α))
/// down to a jump cutoff ε, largest first. Jumps below ε are replaced by
/// their mean total, small_jump_mean, which also bounds the truncation error.
struct StableJumps {
  std::vector<double> atoms;
  double small_jump_mean = 0.0;
  /// T = Σ atoms + small_jump_mean.
  double total = 0.0;
  /// (Δ_i / T) as a mass partition; the small-jump share is dust.
  MassPartition normalized() const;
};
StableJumps sample_stable_jumps(double alpha, double eps, Rng& rng);

struct MonteCarloResult {
  double estimate = 0.0;
  double std_error = 0.0;
  /// Deterministic bound on the truncation bias when one applies.
  double tail_bound = 0.0;
  std::size_t reps = 0;
};

/// ∫ f dν_α = (α²Γ(2-1/α)/Γ(2-α)) E[T f(Δ/T)], by Monte Carlo. Replicate i
/// uses stream i of `seed`, so different ε share random numbers.
MonteCarloResult nu_alpha_integral(double alpha, const MassFunction& f, double eps, std::size_t reps,
                                   std::uint64_t seed);
/// E[exp(-λT)] by Monte Carlo; the exact value is exp(-λ^{1/α}).
MonteCarloResult stable_laplace(double alpha, double lambda, double eps, std::size_t reps, std::uint64_t seed);

/// Tree from the discrete law built on (ν, γ) with n leaves, every edge of
/// length n^{-γ}. See PropexempleLaw.
EdgeTree approx_continuum_tree(const DislocationMeasure& nu, double gamma, int n, Rng& rng);

}  // namespace branchlab
