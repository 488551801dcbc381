#include "branchlab/polya.hpp"

#include "branchlab/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace branchlab {

namespace {

template <class V>
V unit();
template <>
BigCount unit<BigCount>() {
  return BigCount(1);
}
template <>
LogValue unit<LogValue>() {
  return LogValue::one();
}

void check_degree(int m) {
  if (m != kUnboundedDegree && m < 2) throw std::invalid_argument("degree bound m must be at least 2 (0 for unbounded)");
}

constexpr double kExactForestEntries = 5e5;
constexpr double kLogForestEntries = 2.5e7;

}  // namespace

template <class V>
double ForestTable<V>::entries(int m, int N) {
  double total = 0.0;
  for (int s = 1; s < N; ++s) total += static_cast<double>(s) * (m == kUnboundedDegree ? 1.0 : std::min(m, s) + 1.0);
  return total;
}

template <class V>
std::size_t ForestTable<V>::cdim(int s) const {
  return unbounded() ? 1 : static_cast<std::size_t>(std::min(m_, s)) + 1;
}

template <class V>
const V& ForestTable<V>::at(int s, int j, int c) const {
  if (s == 0) return one_;
  if (s < 0 || s >= N_) throw std::out_of_range("forest table: size " + std::to_string(s) + " outside the table");
  j = std::min(j, s);
  if (j <= 0) return zero_;
  std::size_t cc = 0;
  if (!unbounded()) {
    if (c <= 0) return zero_;
    cc = static_cast<std::size_t>(std::min({c, m_, s}));
  }
  return rows_[static_cast<std::size_t>(s)][static_cast<std::size_t>(j) * cdim(s) + cc];
}

template <class V>
ForestTable<V>::ForestTable(int m, int N) : m_(m), N_(N), one_(unit<V>()) {
  check_degree(m);
  if (N < 1) throw std::invalid_argument("forest table: N must be positive");
  const std::size_t n = static_cast<std::size_t>(N);
  T_.assign(n + 1, zero_);
  T_[1] = one_;
  rows_.resize(n);
  F_.resize(n);
  for (int s = 1; s < N; ++s) {
    // T[s] is final here, so the multiset counts of size-s trees are too.
    auto& fs = F_[static_cast<std::size_t>(s)];
    const int kmax = (N - 1) / s;
    fs.resize(static_cast<std::size_t>(kmax) + 1);
    for (int k = 0; k <= kmax; ++k) fs[static_cast<std::size_t>(k)] = multiset_count(T_[static_cast<std::size_t>(s)], static_cast<unsigned>(k));
    const std::size_t cd = cdim(s);
    auto& row = rows_[static_cast<std::size_t>(s)];
    row.assign((static_cast<std::size_t>(s) + 1) * cd, zero_);
    for (int j = 1; j <= s; ++j) {
      for (std::size_t c = 0; c < cd; ++c) {
        const int ci = static_cast<int>(c);
        int kcap = s / j;
        if (!unbounded()) kcap = std::min(kcap, ci);
        V sum = at(s, j - 1, ci);
        for (int k = 1; k <= kcap; ++k)
          sum = sum + F_[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] * at(s - k * j, j - 1, ci - k);
        row[static_cast<std::size_t>(j) * cd + c] = sum;
      }
    }
    T_[static_cast<std::size_t>(s) + 1] = at(s, s, unbounded() ? 0 : m_);
  }
}

template class ForestTable<BigCount>;
template class ForestTable<LogValue>;

int CountTables::forest_cap(int m) {
  check_degree(m);
  int lo = 1, hi = 1 << 16;
  while (lo < hi) {
    const int mid = lo + (hi - lo + 1) / 2;
    if (ForestTable<BigCount>::entries(m, mid) <= kExactForestEntries)
      lo = mid;
    else
      hi = mid - 1;
  }
  return lo;
}

CountTables::CountTables(int m, int N, Forest forest) : m_(m), N_(N) {
  check_degree(m);
  if (N < 1) throw std::invalid_argument("otter_counts: N must be positive");
  const std::size_t n = static_cast<std::size_t>(N);
  const bool fits = N <= forest_cap(m);
  if (forest == Forest::kRequire && !fits)
    throw ResourceError("otter_counts: N = " + std::to_string(N) + " exceeds the forest-table cap " +
                        std::to_string(forest_cap(m)) + " for this m");
  if (forest != Forest::kNone && fits) {
    forest_ = std::make_shared<const ForestTable<BigCount>>(m, N);
    T_.assign(n + 1, BigCount(0));
    Tt_.assign(n + 1, BigCount(0));
    for (int k = 1; k <= N; ++k) {
      T_[static_cast<std::size_t>(k)] = forest_->tree_count(k);
      Tt_[static_cast<std::size_t>(k)] = unbounded() ? T_[static_cast<std::size_t>(k)] : forest_->at(k - 1, k - 1, m - 2);
    }
    return;
  }
  if (N > kCountCap)
    throw ResourceError("otter_counts: N = " + std::to_string(N) + " exceeds the exact count cap " + std::to_string(kCountCap));
  T_.assign(n + 1, BigCount(0));
  Tt_.assign(n + 1, BigCount(0));
  T_[1] = 1;
  if (unbounded()) {
    // Euler transform: n T[n+1] = Σ_{k=1}^n c_k T[n-k+1], c_k = Σ_{d|k} d T[d].
    std::vector<BigCount> c(n + 1, BigCount(0));
    for (int k = 1; k < N; ++k) {
      for (int d = 1; d * d <= k; ++d) {
        if (k % d != 0) continue;
        c[static_cast<std::size_t>(k)] += BigCount(d) * T_[static_cast<std::size_t>(d)];
        const int e = k / d;
        if (e != d) c[static_cast<std::size_t>(k)] += BigCount(e) * T_[static_cast<std::size_t>(e)];
      }
      BigCount acc = 0;
      for (int i = 1; i <= k; ++i) acc += c[static_cast<std::size_t>(i)] * T_[static_cast<std::size_t>(k - i + 1)];
      T_[static_cast<std::size_t>(k) + 1] = acc / k;
    }
    Tt_ = T_;
  } else if (m == 2) {
    // Root with one child of size k, or two of sizes a >= b, a + b = k.
    for (int k = 1; k < N; ++k) {
      BigCount acc = T_[static_cast<std::size_t>(k)];
      for (int b = 1; 2 * b <= k; ++b) {
        const int a = k - b;
        acc += a > b ? BigCount(T_[static_cast<std::size_t>(a)] * T_[static_cast<std::size_t>(b)])
                     : multiset_count(T_[static_cast<std::size_t>(a)], 2);
      }
      T_[static_cast<std::size_t>(k) + 1] = acc;
    }
    Tt_[1] = 1;
  } else {
    throw ResourceError("otter_counts: N = " + std::to_string(N) + " exceeds the forest-table cap " +
                        std::to_string(forest_cap(m)) + " and only m = 2 or m = ∞ have a forest-free recurrence");
  }
}

const BigCount& CountTables::T(int n) const {
  if (n < 1 || n > N_) throw std::out_of_range("count tables: n = " + std::to_string(n) + " outside [1, " + std::to_string(N_) + "]");
  return T_[static_cast<std::size_t>(n)];
}

const BigCount& CountTables::T_tilde(int n) const {
  if (n < 1 || n > N_) throw std::out_of_range("count tables: n = " + std::to_string(n) + " outside [1, " + std::to_string(N_) + "]");
  return Tt_[static_cast<std::size_t>(n)];
}

const ForestTable<BigCount>& CountTables::forest() const {
  if (!forest_)
    throw ResourceError("count tables: N = " + std::to_string(N_) + " has no forest table (cap " + std::to_string(forest_cap(m_)) + ")");
  return *forest_;
}

CountTables otter_counts(int m, int N) { return CountTables(m, N); }

namespace {

bool degree_allowed(int m, int p, DegreeRule rule) {
  if (m == kUnboundedDegree) return true;
  return rule == DegreeRule::kBijection ? p <= m : p < m;
}

}  // namespace

BigCount shape_count_poly(const CountTables& tables, int n, const IntPartition& lambda, DegreeRule rule) {
  if (n < 2) throw std::invalid_argument("shape_count_poly: n must be at least 2");
  if (lambda.is_empty() || lambda.total() != n - 1)
    throw std::invalid_argument("shape_count_poly: λ = " + lambda.str() + " is not a partition of n - 1 = " + std::to_string(n - 1));
  if (n > tables.N()) throw std::out_of_range("shape_count_poly: n exceeds the table size");
  if (!degree_allowed(tables.m(), lambda.length(), rule)) return BigCount(0);
  BigCount out = 1;
  for (auto [j, k] : lambda.multiplicities()) out *= multiset_count(tables.T(j), static_cast<unsigned>(k));
  return out;
}

UniformLaw::UniformLaw(int m, int N) : m_(m), N_(N) {
  check_degree(m);
  if (N < 2) throw std::invalid_argument("uniform_law: N must be at least 2");
  if (N <= CountTables::forest_cap(m) || ((m == kUnboundedDegree || m == 2) && N <= CountTables::kCountCap))
    exact_ = std::make_shared<const CountTables>(m, N);
  build_log_tables();
}

UniformLaw::UniformLaw(std::shared_ptr<const CountTables> tables)
    : m_(tables->m()), N_(tables->N()), exact_(std::move(tables)) {
  if (N_ < 2) throw std::invalid_argument("uniform_law: N must be at least 2");
  build_log_tables();
}

void UniformLaw::build_log_tables() {
  scaling_.gamma = 0.5;
  const std::size_t n = static_cast<std::size_t>(N_);
  log_T_.assign(n + 1, LogValue::zero());
  if (m_ != 2) {
    if (ForestTable<LogValue>::entries(m_, N_) > kLogForestEntries)
      throw ResourceError("uniform_law: N = " + std::to_string(N_) + " exceeds the log-space forest cap for this m");
    log_forest_ = std::make_shared<const ForestTable<LogValue>>(m_, N_);
  }
  for (int k = 1; k <= N_; ++k) {
    auto& lt = log_T_[static_cast<std::size_t>(k)];
    if (exact_) {
      lt = LogValue::from(exact_->T(k));
    } else if (log_forest_) {
      lt = log_forest_->tree_count(k);
    } else if (k == 1) {
      lt = LogValue::one();
    } else {
      LogValue acc = log_T_[static_cast<std::size_t>(k) - 1];
      for (int b = 1; 2 * b <= k - 1; ++b) {
        const int a = k - 1 - b;
        acc += a > b ? log_T_[static_cast<std::size_t>(a)] * log_T_[static_cast<std::size_t>(b)]
                     : multiset_count(log_T_[static_cast<std::size_t>(a)], 2);
      }
      lt = acc;
    }
  }
}

double UniformLaw::log_tree_count(int n) const {
  if (n < 1 || n > N_) throw std::out_of_range("uniform_law: n outside the tables");
  return log_T_[static_cast<std::size_t>(n)].lg;
}

double UniformLaw::pmf(int n, const IntPartition& lambda) const {
  check_n(n);
  if (lambda.is_empty() || lambda.total() != n) return 0.0;
  if (!degree_allowed(m_, lambda.length(), DegreeRule::kBijection)) return 0.0;
  if (exact_) return ratio(shape_count_poly(*exact_, n + 1, lambda), exact_->T(n + 1));
  LogValue s = LogValue::one();
  for (auto [j, k] : lambda.multiplicities()) s *= multiset_count(log_T_[static_cast<std::size_t>(j)], static_cast<unsigned>(k));
  return s / log_T_[static_cast<std::size_t>(n) + 1];
}

IntPartition UniformLaw::sample(int n, Rng& rng) const {
  check_n(n);
  if (m_ == 2) {
    // λ = (n), or (a, b) with a + b = n and a >= b >= 1.
    const LogValue total = log_T_[static_cast<std::size_t>(n) + 1];
    const double u = rng.uniform();
    double acc = log_T_[static_cast<std::size_t>(n)] / total;
    if (u < acc || n == 1) return IntPartition::trivial(n);
    for (int b = 1; 2 * b <= n; ++b) {
      const int a = n - b;
      const LogValue w = a > b ? log_T_[static_cast<std::size_t>(a)] * log_T_[static_cast<std::size_t>(b)]
                               : multiset_count(log_T_[static_cast<std::size_t>(a)], 2);
      acc += w / total;
      if (u < acc) return IntPartition(std::vector<int>{a, b});
    }
    return IntPartition(std::vector<int>{n - n / 2, n / 2});
  }
  const auto& F = *log_forest_;
  std::vector<int> parts;
  int s = n, j = n;
  int c = F.unbounded() ? 0 : m_;
  while (s > 0) {
    j = std::min(j, s);
    const LogValue total = F.at(s, j, c);
    const double u = rng.uniform();
    double acc = F.at(s, j - 1, c) / total;
    if (u < acc) {
      --j;
      continue;
    }
    int kcap = s / j;
    if (!F.unbounded()) kcap = std::min(kcap, c);
    int chosen = 0;
    for (int k = 1; k <= kcap; ++k) {
      const LogValue w = F.multiset(j, k) * F.at(s - k * j, j - 1, c - k);
      if (w.is_zero()) continue;
      chosen = k;
      acc += w / total;
      if (u < acc) break;
    }
    parts.insert(parts.end(), static_cast<std::size_t>(chosen), j);
    s -= chosen * j;
    if (!F.unbounded()) c -= chosen;
    --j;
  }
  return IntPartition(std::move(parts));
}

std::optional<PartitionPmf> UniformLaw::distribution(int n) const {
  check_n(n);
  // Support sizes: about n/2 for m = 2, n²/12 for m = 3, p(n) otherwise.
  const int cap = m_ == 2 ? max_n() : m_ == 3 ? 500 : 40;
  if (n > cap) return std::nullopt;
  PartitionPmf out;
  std::optional<int> max_parts;
  if (m_ != kUnboundedDegree) max_parts = m_;
  for_each_partition(n, [&](const IntPartition& l) {
    const double p = pmf(n, l);
    if (p > 0.0) out.emplace_back(l, p);
  }, max_parts);
  return out;
}

std::optional<RationalPmf> UniformLaw::exact_distribution(int n) const {
  check_n(n);
  if (!exact_ || n > 40) return std::nullopt;
  RationalPmf out;
  std::optional<int> max_parts;
  if (m_ != kUnboundedDegree) max_parts = m_;
  const BigCount& total = exact_->T(n + 1);
  for_each_partition(n, [&](const IntPartition& l) {
    BigCount s = shape_count_poly(*exact_, n + 1, l);
    if (s > 0) out.emplace_back(l, Rational(s, total));
  }, max_parts);
  return out;
}

std::shared_ptr<const UniformLaw> uniform_law(int m, int N) { return std::make_shared<const UniformLaw>(m, N); }

BigCount multiset_rank(const BigCount& u, const std::vector<BigCount>& seq) {
  BigCount r = 0, base = 0, universe = u;
  const unsigned k = static_cast<unsigned>(seq.size());
  for (unsigned i = 0; i < k; ++i) {
    if (seq[i] < base || seq[i] >= u) throw std::invalid_argument("multiset_rank: sequence is not non-decreasing within [0, u)");
    const BigCount step = seq[i] - base;
    // Sequences whose i-th entry is below seq[i]: hockey-stick sum.
    r += multiset_count(universe, k - i) - multiset_count(BigCount(universe - step), k - i);
    base = seq[i];
    universe -= step;
  }
  return r;
}

std::vector<BigCount> multiset_unrank(const BigCount& u, unsigned k, BigCount r) {
  if (r < 0 || r >= multiset_count(u, k)) throw std::out_of_range("multiset_unrank: rank out of range");
  std::vector<BigCount> out;
  out.reserve(k);
  BigCount base = 0, universe = u;
  for (unsigned i = 0; i < k; ++i) {
    const unsigned kk = k - i;
    const BigCount total = multiset_count(universe, kk);
    // Largest step a with total - C(universe - a + kk - 1, kk) <= r.
    BigCount lo = 0, hi = universe - 1;
    while (lo < hi) {
      BigCount mid = (lo + hi + 1) / 2;
      if (total - multiset_count(BigCount(universe - mid), kk) <= r)
        lo = mid;
      else
        hi = mid - 1;
    }
    r -= total - multiset_count(BigCount(universe - lo), kk);
    base += lo;
    universe -= lo;
    out.push_back(base);
  }
  return out;
}

namespace {

struct Group {
  int j;
  int k;
};

Tree unrank_impl(const ForestTable<BigCount>& F, int n, BigCount r) {
  if (n == 1) return Tree();
  const bool unb = F.unbounded();
  int s = n - 1, j = s, c = unb ? 0 : F.m();
  // First locate λ: blocks of trees sharing a λ prefix have weight M times
  // the forest count of the remainder, M the product of chosen F_j(k).
  BigCount M = 1;
  std::vector<Group> groups;
  while (s > 0) {
    j = std::min(j, s);
    const BigCount above = M * (F.at(s, j, c) - F.at(s, j - 1, c));
    if (r >= above) {
      r -= above;
      --j;
      continue;
    }
    int kcap = s / j;
    if (!unb) kcap = std::min(kcap, c);
    bool found = false;
    for (int k = kcap; k >= 1; --k) {
      const BigCount block = M * F.multiset(j, k) * F.at(s - k * j, j - 1, c - k);
      if (r < block) {
        M *= F.multiset(j, k);
        groups.push_back({j, k});
        s -= k * j;
        if (!unb) c -= k;
        --j;
        found = true;
        break;
      }
      r -= block;
    }
    if (!found) throw std::logic_error("unrank_tree: inconsistent forest table");
  }
  // r now ranks within λ; the largest size group is the most significant digit.
  std::vector<BigCount> digits(groups.size());
  for (std::size_t i = groups.size(); i-- > 0;) {
    const BigCount& base = F.multiset(groups[i].j, groups[i].k);
    digits[i] = r % base;
    r /= base;
  }
  std::vector<Tree> kids;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    const auto [gj, gk] = groups[i];
    for (const auto& x : multiset_unrank(F.tree_count(gj), static_cast<unsigned>(gk), digits[i]))
      kids.push_back(unrank_impl(F, gj, x));
  }
  return Tree::join(std::move(kids));
}

BigCount rank_impl(const ForestTable<BigCount>& F, const Tree& t) {
  const auto n = static_cast<int>(t.size());
  if (n == 1) return BigCount(0);
  const bool unb = F.unbounded();
  const std::vector<Tree> kids = t.children();
  if (!unb && static_cast<int>(kids.size()) > F.m()) throw std::invalid_argument("rank_tree: root degree exceeds m");
  int s = n - 1, j = s, c = unb ? 0 : F.m();
  BigCount M = 1, offset = 0, within = 0;
  std::size_t i = 0;
  while (i < kids.size()) {
    const int gj = static_cast<int>(kids[i].size());
    std::vector<BigCount> ranks;
    while (i < kids.size() && static_cast<int>(kids[i].size()) == gj) ranks.push_back(rank_impl(F, kids[i++]));
    const int gk = static_cast<int>(ranks.size());
    j = std::min(j, s);
    for (; j > gj; --j) offset += M * (F.at(s, j, c) - F.at(s, j - 1, c));
    int kcap = s / j;
    if (!unb) kcap = std::min(kcap, c);
    for (int k = kcap; k > gk; --k) offset += M * F.multiset(j, k) * F.at(s - k * j, j - 1, c - k);
    const BigCount& base = F.multiset(gj, gk);
    M *= base;
    // Children of equal size come in increasing canonical order, hence rank.
    within = within * base + multiset_rank(F.tree_count(gj), ranks);
    s -= gk * gj;
    if (!unb) c -= gk;
    --j;
  }
  return offset + within;
}

}  // namespace

Tree unrank_tree(const CountTables& tables, int n, const BigCount& r) {
  if (n < 1 || n > tables.N()) throw std::out_of_range("unrank_tree: n outside the tables");
  if (r < 0 || r >= tables.T(n)) throw std::out_of_range("unrank_tree: rank out of range [0, T[n])");
  return unrank_impl(tables.forest(), n, r);
}

BigCount rank_tree(const CountTables& tables, const Tree& t) {
  if (t.size() > static_cast<std::uint64_t>(tables.N())) throw std::out_of_range("rank_tree: tree larger than the tables");
  return rank_impl(tables.forest(), t);
}

Tree uniform_tree(const CountTables& tables, int n, Rng& rng) {
  if (n < 1 || n > tables.N()) throw std::out_of_range("uniform_tree: n outside the tables");
  return unrank_impl(tables.forest(), n, rng.below(tables.T(n)));
}

Tree random_subtree(const Tree& t, Rng& rng) { return t.subtree_at(rng.below(t.size())); }

std::uint64_t uniform_vertex_depth(const UniformLaw& law, int n, Rng& rng) { return vertex_depth_Q(law, n, rng); }

PolyaConstants constants(const CountTables& tables) {
  const int N = tables.N();
  if (N < 100) throw std::invalid_argument("constants: N must be at least 100");
  PolyaConstants out;
  out.m = tables.m();
  out.N = N;
  auto corrected = [&](int n) {
    return ratio(tables.T(n + 1), tables.T(n)) * std::pow(1.0 + 1.0 / n, 1.5);
  };
  out.rho_raw = ratio(tables.T(N), tables.T(N - 1));
  const double x0 = corrected(N - 3), x1 = corrected(N - 2), x2 = corrected(N - 1);
  out.rho_corrected = x2;
  const double den = x2 - 2.0 * x1 + x0;
  out.rho = den != 0.0 ? x2 - (x2 - x1) * (x2 - x1) / den : x2;
  const double lr = std::log(out.rho);
  out.kappa = std::exp(log_big(tables.T(N)) + 1.5 * std::log(static_cast<double>(N)) - N * lr);
  double tail_max = 0.0;
  for (int n = 1; n <= N; ++n) {
    const BigCount& tt = tables.T_tilde(n);
    if (tt == 0) continue;
    const double term = std::exp(log_big(tt) - n * lr);
    out.psi_partial += term;
    if (2 * n >= N) tail_max = std::max(tail_max, term * std::pow(static_cast<double>(n), 1.5));
  }
  out.psi_tail_bound = tail_max * 2.0 / std::sqrt(static_cast<double>(N));
  out.c_m = std::sqrt(2.0) / (std::sqrt(std::numbers::pi) * out.kappa * out.psi_partial);
  return out;
}

}  // namespace branchlab
