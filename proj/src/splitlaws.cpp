#include "branchlab/splitlaws.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace branchlab {

double Scaling::a(double n) const {
  double l = ell ? ell(n) : 1.0;
  if (!(l > 0.0)) throw std::domain_error("Scaling: slowly varying factor must be positive");
  return std::pow(n, gamma) * l;
}

void SplitLaw::set_scaling(Scaling s) {
  if (!(s.gamma > 0.0)) throw std::invalid_argument("SplitLaw: gamma must be positive");
  scaling_ = std::move(s);
}

void SplitLaw::check_n(int n) const {
  if (n < 1) throw std::invalid_argument(family() + ": n must be positive");
  if (n > max_n()) throw std::out_of_range(family() + ": n = " + std::to_string(n) + " exceeds the table size " + std::to_string(max_n()));
}

std::optional<PartitionPmf> SplitLaw::distribution(int n) const {
  check_n(n);
  if (!has_exact_pmf() || n > 40) return std::nullopt;
  PartitionPmf out;
  if (n == 1 && model() == ModelKind::kLeaf) {
    double stop = leaf_stop_probability();
    if (stop > 0.0) out.emplace_back(IntPartition::empty(), stop);
    if (stop < 1.0) out.emplace_back(IntPartition::trivial(1), 1.0 - stop);
    return out;
  }
  for_each_partition(n, [&](const IntPartition& l) {
    double p = pmf(n, l);
    if (p > 0.0) out.emplace_back(l, p);
  });
  return out;
}

std::optional<RationalPmf> SplitLaw::exact_distribution(int) const { return std::nullopt; }

double SplitLaw::trivial_mass(int n) const { return pmf(n, IntPartition::trivial(n)); }

std::pair<std::uint64_t, IntPartition> SplitLaw::sample_hold_and_split(int n, Rng& rng) const {
  if (n < 2) throw std::invalid_argument(family() + ": sample_hold_and_split needs n >= 2");
  const double hold = trivial_mass(n);
  if (!(hold < 1.0)) throw std::domain_error(family() + ": q_n((n)) = 1 at n = " + std::to_string(n));
  const std::uint64_t g = hold > 0.0 ? rng.geometric_failures(1.0 - hold) : 0;
  if (hold > 0.5) {
    if (auto d = distribution(n)) {
      double t = rng.uniform() * (1.0 - hold), acc = 0.0;
      const IntPartition* last = nullptr;
      for (const auto& [l, p] : *d) {
        if (l.is_trivial()) continue;
        last = &l;
        acc += p;
        if (t < acc) return {g, l};
      }
      if (last) return {g, *last};
    }
  }
  for (;;) {
    IntPartition l = sample(n, rng);
    if (!l.is_trivial()) return {g, l};
  }
}

AliasTable::AliasTable(const std::vector<double>& weights) {
  const std::size_t k = weights.size();
  if (k == 0) throw std::invalid_argument("AliasTable: empty weights");
  double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(total > 0.0)) throw std::invalid_argument("AliasTable: weights must have positive total");
  prob_.assign(k, 0.0);
  alias_.assign(k, 0);
  std::vector<double> scaled(k);
  std::vector<std::size_t> small, large;
  for (std::size_t i = 0; i < k; ++i) {
    if (weights[i] < 0.0) throw std::invalid_argument("AliasTable: negative weight");
    scaled[i] = weights[i] * static_cast<double>(k) / total;
    (scaled[i] < 1.0 ? small : large).push_back(i);
  }
  while (!small.empty() && !large.empty()) {
    std::size_t s = small.back(), l = large.back();
    small.pop_back();
    prob_[s] = scaled[s];
    alias_[s] = l;
    scaled[l] -= 1.0 - scaled[s];
    if (scaled[l] < 1.0) {
      large.pop_back();
      small.push_back(l);
    }
  }
  for (std::size_t i : large) prob_[i] = 1.0;
  for (std::size_t i : small) prob_[i] = 1.0;
}

std::size_t AliasTable::sample(Rng& rng) const {
  std::size_t i = rng.below(prob_.size());
  return rng.uniform() < prob_[i] ? i : alias_[i];
}

TabulatedLaw::TabulatedLaw(std::map<int, PartitionPmf> entries, ModelKind model, std::string name)
    : model_(model), name_(std::move(name)) {
  for (auto& [n, row] : entries) {
    if (n < 1) throw std::invalid_argument("tabulated law: n must be positive");
    std::map<IntPartition, double> merged;
    double total = 0.0;
    for (const auto& [l, p] : row) {
      if (!(p >= 0.0)) throw std::invalid_argument("tabulated law: negative probability at n = " + std::to_string(n));
      bool empty_ok = n == 1 && model == ModelKind::kLeaf && l.is_empty();
      if (!empty_ok && (l.is_empty() || l.total() != n))
        throw std::invalid_argument("tabulated law: partition " + l.str() + " is not in P_" + std::to_string(n));
      merged[l] += p;
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-12)
      throw std::invalid_argument("tabulated law: row n = " + std::to_string(n) + " is not normalized");
    PartitionPmf clean;
    for (const auto& [l, p] : merged)
      if (p > 0.0) clean.emplace_back(l, p);
    if (model == ModelKind::kLeaf && n >= 2) {
      auto it = merged.find(IntPartition::trivial(n));
      if (it != merged.end() && it->second >= 1.0)
        throw std::invalid_argument("tabulated law: q_n((n)) = 1 at n = " + std::to_string(n) + " under the leaf model");
    }
    if (model == ModelKind::kVertex && n == 1 && (clean.size() != 1 || !(clean.front().first == IntPartition::trivial(1))))
      throw std::invalid_argument("tabulated law: the vertex model needs q_1((1)) = 1");
    entries_[n] = std::move(clean);
  }
  if (!entries_.count(1)) {
    entries_[1] = model == ModelKind::kLeaf ? PartitionPmf{{IntPartition::empty(), 1.0}}
                                            : PartitionPmf{{IntPartition::trivial(1), 1.0}};
  }
  if (model == ModelKind::kLeaf) {
    leaf_stop_ = 0.0;
    for (const auto& [l, p] : entries_[1])
      if (l.is_empty()) leaf_stop_ += p;
    if (!(leaf_stop_ > 0.0)) throw std::invalid_argument("tabulated law: q_1(∅) must be positive");
  }
  max_n_ = entries_.rbegin()->first;
  for (const auto& [n, row] : entries_) {
    std::vector<double> w;
    for (const auto& e : row) w.push_back(e.second);
    alias_.emplace(n, AliasTable(w));
  }
}

const PartitionPmf& TabulatedLaw::row(int n) const {
  auto it = entries_.find(n);
  if (it == entries_.end()) throw std::out_of_range(name_ + ": no table row for n = " + std::to_string(n));
  return it->second;
}

double TabulatedLaw::pmf(int n, const IntPartition& lambda) const {
  for (const auto& [l, p] : row(n))
    if (l == lambda) return p;
  return 0.0;
}

IntPartition TabulatedLaw::sample(int n, Rng& rng) const {
  const auto& r = row(n);
  return r[alias_.at(n).sample(rng)].first;
}

std::optional<PartitionPmf> TabulatedLaw::distribution(int n) const { return row(n); }

SplitLawPtr tabulated_law(std::map<int, PartitionPmf> entries, ModelKind model) {
  return std::make_shared<TabulatedLaw>(std::move(entries), model);
}

double q_alpha_theta(double alpha, double theta, int n, int k) {
  if (k < 1 || k > n) throw std::invalid_argument("q_alpha_theta: k must lie in [1, n]");
  const double lbin = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
  const double common = lbin + std::lgamma(k - alpha) - std::lgamma(1.0 - alpha) - std::lgamma(n + theta);
  if (n == k) {
    // θ k Γ(θ) / n = Γ(1 + θ) k / n; the α term vanishes.
    return std::exp(common + std::lgamma(1.0 + theta));
  }
  const double w = (alpha * (n - k) + theta * k) / n;
  return w * std::exp(common + std::lgamma(n - k + theta));
}

AlphaThetaLaw::AlphaThetaLaw(double alpha, double theta) : alpha_(alpha), theta_(theta) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha_theta_law: alpha must lie in (0, 1)");
  if (!(theta >= 0.0)) throw std::invalid_argument("alpha_theta_law: theta must be nonnegative");
  scaling_.gamma = alpha;
}

double AlphaThetaLaw::pmf(int n, const IntPartition& lambda) const {
  check_n(n);
  if (n == 1) return lambda.is_empty() ? 1.0 : 0.0;
  if (lambda.total() != n || lambda.length() != 2) return 0.0;
  const int k = lambda[0], r = lambda[1];
  if (k == r) return q_alpha_theta(alpha_, theta_, n - 1, k);
  return q_alpha_theta(alpha_, theta_, n - 1, k) + q_alpha_theta(alpha_, theta_, n - 1, r);
}

std::optional<PartitionPmf> AlphaThetaLaw::distribution(int n) const {
  check_n(n);
  if (n == 1) return PartitionPmf{{IntPartition::empty(), 1.0}};
  PartitionPmf out;
  for (int k = n - 1; 2 * k >= n; --k) {
    IntPartition l({k, n - k});
    out.emplace_back(l, pmf(n, l));
  }
  return out;
}

IntPartition AlphaThetaLaw::sample(int n, Rng& rng) const {
  auto d = *distribution(n);
  double t = rng.uniform(), acc = 0.0;
  for (const auto& [l, p] : d) {
    acc += p;
    if (t < acc) return l;
  }
  return d.back().first;
}

SplitLawPtr alpha_theta_law(double alpha, double theta) { return std::make_shared<AlphaThetaLaw>(alpha, theta); }

ConsistentLaw::ConsistentLaw(const DislocationMeasure& nu, int N, double tol) : N_(N) {
  if (N < 1) throw std::invalid_argument("consistent_law: N must be positive");
  bool binary = nu.is_binary();
  if (!binary && (nu.kind() == DislocationMeasure::Kind::kPointMass || nu.kind() == DislocationMeasure::Kind::kMixture)) {
    binary = true;
    for (const auto& [s, w] : nu.atoms())
      if (s.size() != 2) binary = false;
  }
  if (!binary) throw std::invalid_argument("consistent_law: binary dislocation measures only");
  const IntegralResult first = integral_one_minus_s1(nu, tol);
  if (!std::isfinite(first.value)) throw std::invalid_argument("consistent_law: ∫(1-s1) ν is not finite");
  probs_.resize(static_cast<std::size_t>(N) + 1);
  alias_.resize(static_cast<std::size_t>(N) + 1);
  for (int n = 2; n <= N; ++n) {
    IntegralResult z = integrate(
        nu,
        [n](const MassPartition& s) { return -std::expm1(n * std::log1p(-s[1])) - std::pow(s[1], n); }, tol);
    if (!(z.value > 0.0)) throw std::runtime_error("consistent_law: Z_n vanished");
    auto& row = probs_[static_cast<std::size_t>(n)];
    double total = 0.0;
    for (int j = n - 1; 2 * j >= n; --j) {
      const double lbin = std::lgamma(n + 1.0) - std::lgamma(j + 1.0) - std::lgamma(n - j + 1.0);
      IntegralResult v = integrate(
          nu,
          [n, j, lbin](const MassPartition& s) {
            const double lx = std::log1p(-s[1]), lu = std::log(s[1]);
            double t = std::exp(lbin + j * lx + (n - j) * lu);
            if (2 * j != n) t += std::exp(lbin + (n - j) * lx + j * lu);
            return t;
          },
          tol);
      row.push_back(v.value / z.value);
      total += v.value / z.value;
      max_error_ = std::max(max_error_, v.error / z.value);
    }
    max_error_ = std::max({max_error_, z.error / z.value, std::abs(total - 1.0)});
    // Index 0 is j = n - 1; reverse so row[i] is j = ceil(n/2) + i.
    std::reverse(row.begin(), row.end());
    alias_[static_cast<std::size_t>(n)] = AliasTable(row);
  }
}

double ConsistentLaw::pmf(int n, const IntPartition& lambda) const {
  check_n(n);
  if (n == 1) return lambda.is_empty() ? 1.0 : 0.0;
  if (lambda.total() != n || lambda.length() != 2) return 0.0;
  const int lo = (n + 1) / 2;
  return probs_[static_cast<std::size_t>(n)][static_cast<std::size_t>(lambda[0] - lo)];
}

std::optional<PartitionPmf> ConsistentLaw::distribution(int n) const {
  check_n(n);
  if (n == 1) return PartitionPmf{{IntPartition::empty(), 1.0}};
  PartitionPmf out;
  const int lo = (n + 1) / 2;
  const auto& row = probs_[static_cast<std::size_t>(n)];
  for (std::size_t i = row.size(); i-- > 0;) {
    int j = lo + static_cast<int>(i);
    out.emplace_back(IntPartition({j, n - j}), row[i]);
  }
  return out;
}

IntPartition ConsistentLaw::sample(int n, Rng& rng) const {
  check_n(n);
  if (n == 1) return IntPartition::empty();
  const int j = (n + 1) / 2 + static_cast<int>(alias_[static_cast<std::size_t>(n)].sample(rng));
  return IntPartition({j, n - j});
}

SplitLawPtr consistent_law(const DislocationMeasure& nu, int N, double tol) {
  return std::make_shared<ConsistentLaw>(nu, N, tol);
}

PropexempleLaw::PropexempleLaw(const DislocationMeasure& nu, double gamma, int max_n)
    : nu_(nu), gamma_(gamma), max_n_(max_n) {
  if (!(gamma > 0.0)) throw std::invalid_argument("propexemple_law: gamma must be positive");
  if (nu.kind() == DislocationMeasure::Kind::kStable)
    throw std::invalid_argument("propexemple_law: restricted sampling is not available for the stable measure");
  if (max_n < 2) throw std::invalid_argument("propexemple_law: max_n must be at least 2");
  scaling_.gamma = gamma;
  const double first = integral_one_minus_s1(nu).value;
  if (!std::isfinite(first)) throw std::invalid_argument("propexemple_law: ∫(1-s1) ν is not finite");
  // Both conditions are monotone in n: positive restricted mass, and the
  // Markov bound w_n <= n^{-γ/2} ∫(1-s₁)ν <= 1.
  int n_mass = -1, n_bound = -1;
  for (int n = 1; n <= max_n && (n_mass < 0 || n_bound < 0); ++n) {
    if (n_mass < 0 && restricted_mass(nu, threshold(n)) > 0.0) n_mass = n;
    if (n_bound < 0 && threshold(n) * first <= 1.0) n_bound = n;
  }
  if (n_mass < 0 || n_bound < 0) throw std::invalid_argument("propexemple_law: restricted mass is zero for every n <= max_n");
  n0_ = std::max({2, n_mass, n_bound});
  sampler_ = std::make_shared<RestrictedSampler>(nu, std::min(0.5, threshold(max_n)));
}

double PropexempleLaw::threshold(int n) const { return std::pow(static_cast<double>(n), -gamma_ / 2.0); }

double PropexempleLaw::split_weight(int n) const {
  check_n(n);
  if (n < n0_) return 1.0;
  return std::min(1.0, std::pow(static_cast<double>(n), -gamma_) * sampler_->mass_from(threshold(n)));
}

IntPartition PropexempleLaw::allocate(int n, const MassPartition& s, Rng& rng) const {
  std::vector<int> parts;
  std::uint64_t left = static_cast<std::uint64_t>(n);
  double mass_left = 1.0;
  for (std::size_t i = 0; i < s.size() && left > 0; ++i) {
    double p = mass_left > 0.0 ? std::min(1.0, s[i] / mass_left) : 1.0;
    std::uint64_t b = i + 1 == s.size() && s.conservative() ? left : rng.binomial(left, p);
    if (b > 0) parts.push_back(static_cast<int>(b));
    left -= b;
    mass_left -= s[i];
  }
  // Dust: remaining balls are singletons.
  for (std::uint64_t i = 0; i < left; ++i) parts.push_back(1);
  return IntPartition(std::move(parts));
}

IntPartition PropexempleLaw::forced_split(int n, Rng& rng) const {
  const double d = threshold(n0_);
  for (;;) {
    IntPartition l = allocate(n, sampler_->sample_from(d, rng), rng);
    if (!l.is_trivial()) return l;
  }
}

double PropexempleLaw::pmf(int, const IntPartition&) const {
  throw std::logic_error("propexemple_law: the pmf is available by Monte Carlo only (pmf_estimate)");
}

IntPartition PropexempleLaw::sample(int n, Rng& rng) const {
  check_n(n);
  if (n == 1) return IntPartition::empty();
  if (n < n0_) return forced_split(n, rng);
  if (!rng.bernoulli(split_weight(n))) return IntPartition::trivial(n);
  return allocate(n, sampler_->sample_from(threshold(n), rng), rng);
}

double PropexempleLaw::trivial_mass(int n) const {
  check_n(n);
  if (n == 1) return 0.0;
  if (n < n0_) return 0.0;
  const double w = split_weight(n);
  const double d = threshold(n);
  // P(all n balls land in one part | s) = Σ s_i^n, averaged over the restricted law.
  double stay = 0.0;
  if (nu_.is_binary()) {
    boost::math::quadrature::tanh_sinh<double> ts;
    double lo = std::max(d, nu_.min_complement());
    double num = ts.integrate(
        [&](double u) {
          return (std::exp(n * std::log1p(-u)) + std::pow(u, n)) * nu_.density(1.0 - u, u);
        },
        lo, 0.5, 1e-12);
    stay = num / sampler_->mass_from(d);
  } else {
    double m = 0.0;
    for (const auto& [s, wt] : nu_.atoms()) {
      if (s.one_minus_largest() < d) continue;
      double p = 0.0;
      for (double x : s.entries()) p += std::pow(x, n);
      stay += wt * p;
      m += wt;
    }
    stay /= m;
  }
  return 1.0 - w + w * stay;
}

std::pair<std::uint64_t, IntPartition> PropexempleLaw::sample_hold_and_split(int n, Rng& rng) const {
  check_n(n);
  if (n < 2) throw std::invalid_argument("propexemple_law: sample_hold_and_split needs n >= 2");
  if (n < n0_) return {0, forced_split(n, rng)};
  const double w = split_weight(n);
  const double d = threshold(n);
  std::uint64_t g = 0;
  for (;;) {
    g += w < 1.0 ? rng.geometric_failures(w) : 0;
    IntPartition l = allocate(n, sampler_->sample_from(d, rng), rng);
    if (!l.is_trivial()) return {g, l};
    ++g;
  }
}

std::pair<double, double> PropexempleLaw::pmf_estimate(int n, const IntPartition& lambda, std::size_t reps,
                                                       std::uint64_t seed) const {
  if (reps == 0) throw std::invalid_argument("pmf_estimate: reps must be positive");
  Rng rng(seed);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < reps; ++i)
    if (sample(n, rng) == lambda) ++hits;
  double p = static_cast<double>(hits) / static_cast<double>(reps);
  return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(reps))};
}

std::shared_ptr<const PropexempleLaw> propexemple_law(const DislocationMeasure& nu, double gamma, int max_n) {
  return std::make_shared<PropexempleLaw>(nu, gamma, max_n);
}

CircLaw::CircLaw(SplitLawPtr base) : base_(std::move(base)) {
  if (!base_) throw std::invalid_argument("circ_transform: null law");
  if (base_->model() != ModelKind::kVertex) throw std::invalid_argument("circ_transform: base law must be a vertex model");
  scaling_ = base_->scaling();
}

int CircLaw::max_n() const {
  int m = base_->max_n();
  return m == std::numeric_limits<int>::max() ? m : m + 1;
}

double CircLaw::pmf(int n, const IntPartition& lambda) const {
  check_n(n);
  if (n == 1) return lambda.is_empty() ? 1.0 : 0.0;
  if (lambda.is_empty() || lambda.total() != n || lambda.multiplicity(1) == 0) return 0.0;
  return base_->pmf(n - 1, lambda.without_part(1));
}

IntPartition CircLaw::sample(int n, Rng& rng) const {
  check_n(n);
  if (n == 1) return IntPartition::empty();
  return base_->sample(n - 1, rng).with_part(1);
}

std::optional<PartitionPmf> CircLaw::distribution(int n) const {
  check_n(n);
  if (n == 1) return PartitionPmf{{IntPartition::empty(), 1.0}};
  auto d = base_->distribution(n - 1);
  if (!d) return std::nullopt;
  PartitionPmf out;
  for (auto& [l, p] : *d) out.emplace_back(l.with_part(1), p);
  return out;
}

std::optional<RationalPmf> CircLaw::exact_distribution(int n) const {
  check_n(n);
  if (n == 1) return RationalPmf{{IntPartition::empty(), Rational(1)}};
  auto d = base_->exact_distribution(n - 1);
  if (!d) return std::nullopt;
  RationalPmf out;
  for (auto& [l, p] : *d) out.emplace_back(l.with_part(1), p);
  return out;
}

SplitLawPtr circ_transform(SplitLawPtr q) { return std::make_shared<CircLaw>(std::move(q)); }

MassPartition normalized(const IntPartition& lambda) {
  std::vector<double> e;
  const double n = lambda.total();
  for (int p : lambda.parts()) e.push_back(p / n);
  return MassPartition(std::move(e));
}

ProbeResult probe_H(const SplitLaw& q, const MassFunction& f, int n, ProbeMode mode, std::size_t reps,
                    std::uint64_t seed) {
  ProbeResult r;
  r.n = n;
  const double an = q.scaling().a(n);
  auto term = [&](const IntPartition& l) {
    if (l.is_empty()) return 0.0;
    return (1.0 - static_cast<double>(l.largest()) / n) * f(normalized(l));
  };
  if (mode != ProbeMode::kMonteCarlo) {
    auto d = q.distribution(n);
    if (d) {
      double s = 0.0;
      for (const auto& [l, p] : *d) s += p * term(l);
      r.estimate = an * s;
      r.mode = ProbeResult::Mode::kExact;
      return r;
    }
    if (mode == ProbeMode::kExact)
      throw std::invalid_argument("probe_H: exact mode needs an enumerable support (n <= 40 or binary)");
  }
  if (reps < 2) throw std::invalid_argument("probe_H: Monte Carlo needs at least two replicates");
  Rng rng(seed);
  double mean = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < reps; ++i) {
    double x = an * term(q.sample(n, rng));
    double dlt = x - mean;
    mean += dlt / static_cast<double>(i + 1);
    m2 += dlt * (x - mean);
  }
  r.estimate = mean;
  r.std_error = std::sqrt(m2 / static_cast<double>(reps - 1) / static_cast<double>(reps));
  r.mode = ProbeResult::Mode::kMonteCarlo;
  return r;
}

std::vector<double> size_biased_order(std::vector<double> x, Rng& rng) {
  std::vector<double> out;
  out.reserve(x.size());
  double total = std::accumulate(x.begin(), x.end(), 0.0);
  while (!x.empty()) {
    if (!(total > 0.0)) {
      out.insert(out.end(), x.begin(), x.end());
      break;
    }
    double t = rng.uniform() * total, acc = 0.0;
    std::size_t pick = x.size() - 1;
    for (std::size_t i = 0; i < x.size(); ++i) {
      acc += x[i];
      if (t < acc) {
        pick = i;
        break;
      }
    }
    out.push_back(x[pick]);
    total -= x[pick];
    x.erase(x.begin() + static_cast<std::ptrdiff_t>(pick));
  }
  return out;
}

std::pair<double, double> size_biased_functional(const SplitLaw& q, const std::function<double(const std::vector<double>&)>& g,
                                                 int n, std::size_t reps, std::uint64_t seed) {
  if (reps < 2) throw std::invalid_argument("size_biased_functional: need at least two replicates");
  Rng rng(seed);
  double mean = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < reps; ++i) {
    IntPartition l = q.sample(n, rng);
    std::vector<double> x;
    for (int p : l.parts()) x.push_back(static_cast<double>(p) / n);
    double v = g(size_biased_order(std::move(x), rng));
    double d = v - mean;
    mean += d / static_cast<double>(i + 1);
    m2 += d * (v - mean);
  }
  return {mean, std::sqrt(m2 / static_cast<double>(reps - 1) / static_cast<double>(reps))};
}

std::string to_string(ProbeResult::Mode m) { return m == ProbeResult::Mode::kExact ? "exact" : "monte-carlo"; }

}  // namespace branchlab
