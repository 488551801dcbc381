#include "branchlab/splitlaws.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace branchlab {

namespace {

double log_multinomial_factor(const IntPartition& lambda) {
  double v = std::lgamma(lambda.length() + 1.0);
  for (auto [j, m] : lambda.multiplicities()) v -= std::lgamma(m + 1.0);
  return v;
}

void validate_critical(const OffspringLaw& xi) {
  if (xi.pmf.empty() || !(xi.pmf[0] > 0.0)) throw std::invalid_argument("offspring law: ξ(0) must be positive");
  double total = xi.tail_mass;
  for (double p : xi.pmf) {
    if (!(p >= 0.0)) throw std::invalid_argument("offspring law: negative mass");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("offspring law: masses do not sum to 1");
  if (std::abs(xi.mean - 1.0) > 1e-12) throw std::invalid_argument("offspring law: not critical (mean must be 1)");
}

}  // namespace

OffspringLaw OffspringLaw::binary() {
  OffspringLaw xi;
  xi.name = "binary";
  xi.pmf = {0.5, 0.0, 0.5};
  xi.mean = 1.0;
  xi.variance = 1.0;
  xi.exact_pmf = {Rational(1, 2), Rational(0), Rational(1, 2)};
  return xi;
}

OffspringLaw OffspringLaw::poisson() {
  OffspringLaw xi;
  xi.name = "poisson";
  double p = std::exp(-1.0);
  for (int k = 0; p > 0.0; ++k) {
    xi.pmf.push_back(p);
    p /= (k + 1);
  }
  double m = 0.0;
  for (std::size_t k = xi.pmf.size(); k-- > 0;) m += static_cast<double>(k) * xi.pmf[k];
  xi.mean = m;
  xi.variance = 1.0;
  return xi;
}

OffspringLaw OffspringLaw::from_pmf(std::vector<double> pmf, std::string name) {
  OffspringLaw xi;
  xi.name = std::move(name);
  while (!pmf.empty() && pmf.back() == 0.0) pmf.pop_back();
  xi.pmf = std::move(pmf);
  double m = 0.0, m2 = 0.0;
  Rational total(0), mean(0);
  for (std::size_t k = 0; k < xi.pmf.size(); ++k) {
    m += static_cast<double>(k) * xi.pmf[k];
    m2 += static_cast<double>(k) * static_cast<double>(k) * xi.pmf[k];
    Rational r(xi.pmf[k]);
    xi.exact_pmf.push_back(r);
    total += r;
    mean += r * static_cast<long>(k);
  }
  xi.mean = m;
  xi.variance = m2 - m * m;
  if (total != 1 || mean != 1) xi.exact_pmf.clear();
  validate_critical(xi);
  return xi;
}

OffspringLaw OffspringLaw::stable(double alpha, std::uint64_t k_cut) {
  if (!(alpha > 1.0 && alpha < 2.0)) throw std::invalid_argument("offspring law: stable alpha must lie in (1, 2)");
  if (k_cut < 2) throw std::invalid_argument("offspring law: cutoff must be at least 2");
  // Sums from the smallest terms up.
  double s_mean = 0.0, s_mass = 0.0, s_var = 0.0;
  for (std::uint64_t k = k_cut; k >= 2; --k) {
    double kd = static_cast<double>(k);
    s_mean += std::pow(kd, -alpha);
    s_mass += std::pow(kd, -alpha - 1.0);
    s_var += std::pow(kd, 1.0 - alpha);
  }
  const double c = 0.5 / s_mean;
  OffspringLaw xi;
  xi.name = "stable";
  xi.tail_alpha = alpha;
  xi.pmf.resize(static_cast<std::size_t>(k_cut) + 1);
  xi.pmf[1] = 0.5;
  xi.pmf[0] = 0.5 - c * s_mass;
  for (std::uint64_t k = 2; k <= k_cut; ++k) xi.pmf[k] = c * std::pow(static_cast<double>(k), -alpha - 1.0);
  xi.mean = 1.0;
  xi.variance = 0.5 + c * s_var - 1.0;
  validate_critical(xi);
  return xi;
}

std::size_t OffspringLaw::max_support() const {
  for (std::size_t k = pmf.size(); k-- > 0;)
    if (pmf[k] > 0.0) return k;
  return 0;
}

GwLaw::GwLaw(OffspringLaw xi, int N) : xi_(std::move(xi)), N_(N) {
  validate_critical(xi_);
  if (N < 2) throw std::invalid_argument("gw_law: N must be at least 2");
  scaling_.gamma = xi_.tail_alpha ? 1.0 - 1.0 / *xi_.tail_alpha : 0.5;
  for (std::size_t p = 1; p < xi_.pmf.size() && p <= static_cast<std::size_t>(N); ++p)
    if (xi_.pmf[p] > 0.0) support_.push_back(static_cast<int>(p));
  levels_ = support_;
  if (levels_.empty() || levels_.front() != 1) levels_.insert(levels_.begin(), 1);
  const std::size_t steps = std::min<std::size_t>(xi_.pmf.size(), static_cast<std::size_t>(N) + 1);
  std::vector<std::pair<int, double>> jumps;  // (ξ - 1, mass)
  for (std::size_t i = 0; i < steps; ++i)
    if (xi_.pmf[i] > 0.0) jumps.emplace_back(static_cast<int>(i) - 1, xi_.pmf[i]);

  walk_.assign(static_cast<std::size_t>(N) + 1, std::vector<double>(levels_.size(), 0.0));
  size_prob_.assign(static_cast<std::size_t>(N) + 1, 0.0);
  // Row k holds P(S_k = j) for j in [-k, N - k - 1], stored at offset j + k.
  // Larger j can never come back to -1 by step N since steps are >= -1.
  std::vector<double> cur{1.0}, next;
  for (int k = 0; k < N; ++k) {
    const int hi_next = N - k - 2;  // largest j kept in row k + 1
    next.assign(static_cast<std::size_t>(std::max(0, hi_next + (k + 1) + 1)), 0.0);
    for (std::size_t idx = 0; idx < cur.size(); ++idx) {
      const double v = cur[idx];
      if (v == 0.0) continue;
      const int j = static_cast<int>(idx) - k;
      for (const auto& [d, w] : jumps) {
        const int jn = j + d;
        if (jn > hi_next) break;
        next[static_cast<std::size_t>(jn + k + 1)] += v * w;
      }
    }
    cur.swap(next);
    const int kk = k + 1;
    for (std::size_t i = 0; i < levels_.size(); ++i) {
      const int p = levels_[i];
      if (p <= kk) walk_[static_cast<std::size_t>(kk)][i] = cur[static_cast<std::size_t>(kk - p)];
    }
    size_prob_[static_cast<std::size_t>(kk)] = cur[static_cast<std::size_t>(kk - 1)] / kk;
  }
}

double GwLaw::tree_size_probability(int k) const {
  if (k < 1 || k > N_) throw std::out_of_range("gw_law: tree size outside the tables");
  return size_prob_[static_cast<std::size_t>(k)];
}

double GwLaw::walk_probability(int k, int p) const {
  if (k < 1 || k > N_) throw std::out_of_range("gw_law: walk step outside the tables");
  auto it = std::lower_bound(levels_.begin(), levels_.end(), p);
  if (it == levels_.end() || *it != p)
    throw std::invalid_argument("gw_law: walk level -p is tabulated only for p = 1 and p in the offspring support");
  return walk_[static_cast<std::size_t>(k)][static_cast<std::size_t>(it - levels_.begin())];
}

double GwLaw::hitting_probability(int p, int k) const {
  if (p == 0) return k == 0 ? 1.0 : 0.0;
  if (k < p) return 0.0;
  return static_cast<double>(p) / k * walk_probability(k, p);
}

double GwLaw::root_degree_probability(int n, int p) const {
  check_n(n);
  if (p < 1 || p > n || xi_.at(static_cast<std::size_t>(p)) == 0.0) return 0.0;
  return xi_.pmf[static_cast<std::size_t>(p)] * hitting_probability(p, n) / tree_size_probability(n + 1);
}

double GwLaw::pmf(int n, const IntPartition& lambda) const {
  check_n(n);
  if (lambda.is_empty() || lambda.total() != n) return 0.0;
  const double xp = xi_.at(static_cast<std::size_t>(lambda.length()));
  const double denom = tree_size_probability(n + 1);
  if (xp == 0.0 || denom == 0.0) return 0.0;
  double lg = log_multinomial_factor(lambda) + std::log(xp) - std::log(denom);
  for (int part : lambda.parts()) {
    double g = tree_size_probability(part);
    if (g == 0.0) return 0.0;
    lg += std::log(g);
  }
  return std::exp(lg);
}

std::vector<int> GwLaw::sample_composition(int n, Rng& rng) const {
  check_n(n);
  if (tree_size_probability(n + 1) == 0.0)
    throw std::domain_error("gw_law: GW(#t = n + 1) = 0 at n = " + std::to_string(n));
  int p = 0;
  {
    double t = rng.uniform(), acc = 0.0;
    for (int s : support_) {
      if (s > n) break;
      const double w = root_degree_probability(n, s);
      if (w == 0.0) continue;
      acc += w;
      p = s;
      if (t < acc) break;
    }
  }
  std::vector<int> parts;
  parts.reserve(static_cast<std::size_t>(p));
  int r = n;
  for (int left = p; left > 1; --left) {
    // P(X = m | τ_left = r) = GW(m) P(τ_{left-1} = r - m) / P(τ_left = r),
    // scanned from both ends so the cost tracks the smaller part.
    const double denom = hitting_probability(left, r);
    const int lo = 1, hi = r - (left - 1);
    auto mass = [&](int m) { return tree_size_probability(m) * hitting_probability(left - 1, r - m) / denom; };
    const double t = rng.uniform();
    double acc = 0.0;
    int pick = -1, a = lo, b = hi;
    while (a <= b) {
      acc += mass(a);
      if (t < acc) {
        pick = a;
        break;
      }
      if (a == b) break;
      acc += mass(b);
      if (t < acc) {
        pick = b;
        break;
      }
      ++a;
      --b;
    }
    if (pick < 0) {
      // Rounding left the target just above the accumulated mass; take the
      // outcome with the largest probability among the middle scan point.
      pick = a <= hi ? a : hi;
      while (pick >= lo && mass(pick) == 0.0) --pick;
      if (pick < lo) pick = lo;
    }
    parts.push_back(pick);
    r -= pick;
  }
  if (p >= 1) parts.push_back(r);
  return parts;
}

IntPartition GwLaw::sample(int n, Rng& rng) const {
  auto parts = sample_composition(n, rng);
  return IntPartition(std::move(parts));
}

std::optional<PartitionPmf> GwLaw::distribution(int n) const {
  check_n(n);
  if (xi_.max_support() <= 2) {
    PartitionPmf out;
    if (xi_.at(1) > 0.0) {
      double p = pmf(n, IntPartition::trivial(n));
      if (p > 0.0) out.emplace_back(IntPartition::trivial(n), p);
    }
    if (xi_.at(2) > 0.0) {
      for (int k = n - 1; 2 * k >= n; --k) {
        IntPartition l({k, n - k});
        double p = pmf(n, l);
        if (p > 0.0) out.emplace_back(l, p);
      }
    }
    return out;
  }
  if (n > 40) return std::nullopt;
  PartitionPmf out;
  for_each_partition(n, [&](const IntPartition& l) {
    double p = pmf(n, l);
    if (p > 0.0) out.emplace_back(l, p);
  }, static_cast<int>(std::min<std::size_t>(xi_.max_support(), static_cast<std::size_t>(n))));
  return out;
}

std::vector<Rational> GwLaw::exact_tree_size_table(int kmax) const {
  if (xi_.exact_pmf.empty()) throw std::invalid_argument("gw_law: no exact pmf for rational tables");
  if (kmax < 1) throw std::invalid_argument("gw_law: kmax must be positive");
  if (kmax > 64) throw ResourceError("gw_law: rational tables are capped at size 64");
  std::vector<Rational> out(static_cast<std::size_t>(kmax) + 1, Rational(0));
  std::vector<Rational> cur{Rational(1)}, next;
  const auto& w = xi_.exact_pmf;
  for (int k = 0; k < kmax; ++k) {
    const int hi_next = kmax - k - 2;
    next.assign(static_cast<std::size_t>(std::max(0, hi_next + k + 2)), Rational(0));
    for (std::size_t idx = 0; idx < cur.size(); ++idx) {
      if (cur[idx] == 0) continue;
      const int j = static_cast<int>(idx) - k;
      for (std::size_t i = 0; i < w.size(); ++i) {
        if (w[i] == 0) continue;
        const int jn = j + static_cast<int>(i) - 1;
        if (jn > hi_next) break;
        next[static_cast<std::size_t>(jn + k + 1)] += cur[idx] * w[i];
      }
    }
    cur.swap(next);
    out[static_cast<std::size_t>(k + 1)] = cur[static_cast<std::size_t>(k)] / (k + 1);
  }
  return out;
}

std::optional<RationalPmf> GwLaw::exact_distribution(int n) const {
  check_n(n);
  if (xi_.exact_pmf.empty() || n > 40) return std::nullopt;
  const auto gw = exact_tree_size_table(n + 1);
  if (gw[static_cast<std::size_t>(n + 1)] == 0) return std::nullopt;
  RationalPmf out;
  for_each_partition(n, [&](const IntPartition& l) {
    const auto p = static_cast<std::size_t>(l.length());
    if (p >= xi_.exact_pmf.size() || xi_.exact_pmf[p] == 0) return;
    Rational v(factorial(static_cast<unsigned>(p)));
    for (auto [j, m] : l.multiplicities()) v /= Rational(factorial(static_cast<unsigned>(m)));
    v *= xi_.exact_pmf[p];
    for (int part : l.parts()) v *= gw[static_cast<std::size_t>(part)];
    v /= gw[static_cast<std::size_t>(n + 1)];
    if (v != 0) out.emplace_back(l, v);
  });
  return out;
}

SplitLawPtr gw_law(OffspringLaw xi, int N) { return std::make_shared<GwLaw>(std::move(xi), N); }

}  // namespace branchlab
