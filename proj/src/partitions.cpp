#include "branchlab/partitions.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace branchlab {

IntPartition::IntPartition(std::vector<int> parts) : parts_(std::move(parts)) {
  if (parts_.empty()) throw std::invalid_argument("IntPartition: no parts (use IntPartition::empty())");
  for (int p : parts_)
    if (p < 1) throw std::invalid_argument("IntPartition: parts must be positive");
  std::sort(parts_.begin(), parts_.end(), std::greater<>());
  total_ = std::accumulate(parts_.begin(), parts_.end(), 0);
}

int IntPartition::multiplicity(int j) const {
  return static_cast<int>(std::count(parts_.begin(), parts_.end(), j));
}

std::vector<std::pair<int, int>> IntPartition::multiplicities() const {
  std::vector<std::pair<int, int>> out;
  for (int p : parts_) {
    if (!out.empty() && out.back().first == p)
      ++out.back().second;
    else
      out.emplace_back(p, 1);
  }
  return out;
}

IntPartition IntPartition::with_part(int j) const {
  std::vector<int> v = parts_;
  v.push_back(j);
  return IntPartition(std::move(v));
}

IntPartition IntPartition::without_part(int j) const {
  std::vector<int> v = parts_;
  auto it = std::find(v.begin(), v.end(), j);
  if (it == v.end()) throw std::invalid_argument("IntPartition::without_part: part not present");
  v.erase(it);
  if (v.empty()) return IntPartition();
  return IntPartition(std::move(v));
}

std::string IntPartition::str() const {
  if (is_empty()) return "()";
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < parts_.size(); ++i) os << (i ? "," : "") << parts_[i];
  os << ')';
  return os.str();
}

bool IntPartition::operator<(const IntPartition& o) const {
  if (is_empty() || o.is_empty()) return is_empty() && !o.is_empty();
  return std::lexicographical_compare(o.parts_.begin(), o.parts_.end(), parts_.begin(), parts_.end());
}

SetPartition::SetPartition(std::vector<std::vector<int>> blocks) : blocks_(std::move(blocks)) {
  std::vector<int> all;
  for (auto& b : blocks_) {
    if (b.empty()) throw std::invalid_argument("SetPartition: empty block");
    std::sort(b.begin(), b.end());
    all.insert(all.end(), b.begin(), b.end());
  }
  std::sort(all.begin(), all.end());
  if (std::adjacent_find(all.begin(), all.end()) != all.end())
    throw std::invalid_argument("SetPartition: blocks overlap");
  std::sort(blocks_.begin(), blocks_.end(), [](const auto& a, const auto& b) { return a.front() < b.front(); });
}

SetPartition SetPartition::one_block(std::vector<int> labels) {
  if (labels.empty()) return SetPartition();
  return SetPartition(std::vector<std::vector<int>>{std::move(labels)});
}

SetPartition SetPartition::singletons(std::vector<int> labels) {
  std::vector<std::vector<int>> b;
  for (int x : labels) b.push_back({x});
  return SetPartition(std::move(b));
}

std::vector<int> SetPartition::range(int n) {
  std::vector<int> v(static_cast<std::size_t>(std::max(n, 0)));
  std::iota(v.begin(), v.end(), 1);
  return v;
}

std::vector<int> SetPartition::ground() const {
  std::vector<int> all;
  for (const auto& b : blocks_) all.insert(all.end(), b.begin(), b.end());
  std::sort(all.begin(), all.end());
  return all;
}

std::size_t SetPartition::size() const {
  std::size_t s = 0;
  for (const auto& b : blocks_) s += b.size();
  return s;
}

IntPartition SetPartition::shape() const {
  if (blocks_.empty()) throw std::logic_error("SetPartition::shape: empty ground set");
  std::vector<int> parts;
  for (const auto& b : blocks_) parts.push_back(static_cast<int>(b.size()));
  return IntPartition(std::move(parts));
}

std::optional<std::size_t> SetPartition::block_of(int x) const {
  for (std::size_t i = 0; i < blocks_.size(); ++i)
    if (std::binary_search(blocks_[i].begin(), blocks_[i].end(), x)) return i;
  return std::nullopt;
}

SetPartition SetPartition::restrict(const std::vector<int>& subset) const {
  std::vector<int> s = subset;
  std::sort(s.begin(), s.end());
  std::vector<std::vector<int>> out;
  std::size_t covered = 0;
  for (const auto& b : blocks_) {
    std::vector<int> inter;
    std::set_intersection(b.begin(), b.end(), s.begin(), s.end(), std::back_inserter(inter));
    covered += inter.size();
    if (!inter.empty()) out.push_back(std::move(inter));
  }
  if (covered != s.size()) throw std::invalid_argument("SetPartition::restrict: subset not contained in ground set");
  return SetPartition(std::move(out));
}

bool SetPartition::all_singletons() const {
  return std::all_of(blocks_.begin(), blocks_.end(), [](const auto& b) { return b.size() == 1; });
}

std::string SetPartition::str() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    if (i) os << '|';
    for (int x : blocks_[i]) os << x << (x == blocks_[i].back() ? "" : ",");
  }
  return os.str();
}

MassPartition::MassPartition(std::vector<double> entries) : entries_(std::move(entries)) {
  for (double x : entries_)
    if (!(x >= 0.0) || !std::isfinite(x)) throw std::invalid_argument("MassPartition: entries must be finite and nonnegative");
  std::sort(entries_.begin(), entries_.end(), std::greater<>());
  if (sum() > 1.0 + 1e-12) throw std::invalid_argument("MassPartition: entries sum above 1");
}

MassPartition MassPartition::binary(double x, double one_minus_x) {
  MassPartition s;
  s.entries_ = {std::max(x, one_minus_x), std::min(x, one_minus_x)};
  return s;
}

double MassPartition::sum() const {
  double s = 0.0;
  for (auto it = entries_.rbegin(); it != entries_.rend(); ++it) s += *it;
  return s;
}

double MassPartition::one_minus_largest() const {
  if (entries_.empty()) return 1.0;
  if (!conservative()) return 1.0 - entries_.front();
  double s = 0.0;
  for (auto it = entries_.rbegin(); it + 1 != entries_.rend(); ++it) s += *it;
  return s;
}

bool MassPartition::conservative(double tol) const { return std::abs(sum() - 1.0) <= tol; }

namespace {

void partitions_rec(int remaining, int max_part, int parts_left, std::vector<int>& cur,
                    const std::function<void(const IntPartition&)>& visit) {
  if (remaining == 0) {
    visit(IntPartition(cur));
    return;
  }
  if (parts_left == 0) return;
  for (int p = std::min(remaining, max_part); p >= 1; --p) {
    // Remaining parts are at most p each; prune when they cannot fill the rest.
    if (static_cast<long long>(p) * parts_left < remaining) break;
    cur.push_back(p);
    partitions_rec(remaining - p, p, parts_left - 1, cur, visit);
    cur.pop_back();
  }
}

}  // namespace

void for_each_partition(int n, const std::function<void(const IntPartition&)>& visit, std::optional<int> max_parts) {
  if (n < 1) throw std::invalid_argument("for_each_partition: n must be positive");
  std::vector<int> cur;
  int limit = max_parts ? *max_parts : n;
  if (limit < 1) throw std::invalid_argument("for_each_partition: max_parts must be positive");
  partitions_rec(n, n, limit, cur, visit);
}

std::vector<IntPartition> enumerate_partitions(int n, std::optional<int> max_parts, int cap) {
  if (n > cap) throw ResourceError("enumerate_partitions: n=" + std::to_string(n) + " above cap " + std::to_string(cap));
  std::vector<IntPartition> out;
  for_each_partition(n, [&](const IntPartition& l) { out.push_back(l); }, max_parts);
  return out;
}

BigCount partition_number(int n) {
  if (n < 0) return 0;
  std::vector<BigCount> p(static_cast<std::size_t>(n) + 1);
  p[0] = 1;
  for (int m = 1; m <= n; ++m) {
    BigCount s = 0;
    for (int k = 1;; ++k) {
      int g1 = k * (3 * k - 1) / 2;
      if (g1 > m) break;
      int g2 = k * (3 * k + 1) / 2;
      BigCount term = p[static_cast<std::size_t>(m - g1)];
      if (g2 <= m) term += p[static_cast<std::size_t>(m - g2)];
      if (k % 2 == 1)
        s += term;
      else
        s -= term;
    }
    p[static_cast<std::size_t>(m)] = s;
  }
  return p[static_cast<std::size_t>(n)];
}

BigCount shape_count(const IntPartition& lambda) {
  if (lambda.is_empty()) throw std::invalid_argument("shape_count: empty partition");
  BigCount denom = 1;
  for (int p : lambda.parts()) denom *= factorial(static_cast<unsigned>(p));
  for (auto [j, m] : lambda.multiplicities()) denom *= factorial(static_cast<unsigned>(m));
  return factorial(static_cast<unsigned>(lambda.total())) / denom;
}

BigCount refined_count(const IntPartition& lambda, const SetPartition& restriction, const std::vector<int>& assignment) {
  if (lambda.is_empty()) throw std::invalid_argument("refined_count: empty partition");
  const int n = lambda.total();
  const auto ground = restriction.ground();
  const int k = static_cast<int>(ground.size());
  if (ground != SetPartition::range(k)) throw std::invalid_argument("refined_count: restriction must partition [k]");
  if (k > n) throw std::invalid_argument("refined_count: k exceeds n");
  if (assignment.size() != restriction.block_count())
    throw std::invalid_argument("refined_count: assignment length differs from block count");
  std::vector<int> seen = assignment;
  std::sort(seen.begin(), seen.end());
  if (std::adjacent_find(seen.begin(), seen.end()) != seen.end())
    throw std::invalid_argument("refined_count: assignment indices must be distinct");
  // Blocks meeting [k] are pinned; the rest of [n] \ [k] is an unordered
  // partition into the leftover sizes, so equal leftover parts are not
  // distinguished.
  std::vector<bool> used(static_cast<std::size_t>(lambda.length()), false);
  BigCount denom = 1;
  for (std::size_t j = 0; j < assignment.size(); ++j) {
    int idx = assignment[j];
    if (idx < 1 || idx > lambda.length()) throw std::invalid_argument("refined_count: assignment index out of range");
    int part = lambda[static_cast<std::size_t>(idx - 1)];
    auto bsize = static_cast<int>(restriction.blocks()[j].size());
    if (bsize > part) throw std::invalid_argument("refined_count: block larger than assigned part");
    used[static_cast<std::size_t>(idx - 1)] = true;
    denom *= factorial(static_cast<unsigned>(part - bsize));
  }
  std::map<int, unsigned> free_mult;
  for (int i = 0; i < lambda.length(); ++i) {
    if (used[static_cast<std::size_t>(i)]) continue;
    int part = lambda[static_cast<std::size_t>(i)];
    denom *= factorial(static_cast<unsigned>(part));
    ++free_mult[part];
  }
  for (auto [part, m] : free_mult) denom *= factorial(m);
  return factorial(static_cast<unsigned>(n - k)) / denom;
}

SetPartition paintbox(const MassPartition& s, int n, Rng& rng) {
  if (std::abs(s.sum() - 1.0) > 1e-12) throw std::invalid_argument("paintbox: mass partition must sum to 1");
  if (n < 1) throw std::invalid_argument("paintbox: n must be positive");
  const auto& e = s.entries();
  // Cumulative masses up to the point where the tail falls below 1e-15.
  std::vector<double> cum;
  double acc = 0.0;
  for (double x : e) {
    if (1.0 - acc < 1e-15) break;
    acc += x;
    cum.push_back(acc);
  }
  std::map<std::size_t, std::vector<int>> colour;
  std::vector<std::vector<int>> blocks;
  for (int i = 1; i <= n; ++i) {
    double u = rng.uniform() * std::max(acc, 1.0);
    auto it = std::upper_bound(cum.begin(), cum.end(), u);
    if (it == cum.end()) {
      blocks.push_back({i});
    } else {
      colour[static_cast<std::size_t>(it - cum.begin())].push_back(i);
    }
  }
  for (auto& [c, b] : colour) blocks.push_back(std::move(b));
  return SetPartition(std::move(blocks));
}

SetPartition uniform_shape_partition(const IntPartition& lambda, const std::vector<int>& labels, Rng& rng) {
  if (lambda.is_empty() || static_cast<std::size_t>(lambda.total()) != labels.size())
    throw std::invalid_argument("uniform_shape_partition: shape size differs from label count");
  std::vector<int> perm = labels;
  rng.shuffle(perm.begin(), perm.end());
  std::vector<std::vector<int>> blocks;
  std::size_t pos = 0;
  for (int p : lambda.parts()) {
    blocks.emplace_back(perm.begin() + static_cast<std::ptrdiff_t>(pos),
                        perm.begin() + static_cast<std::ptrdiff_t>(pos + static_cast<std::size_t>(p)));
    pos += static_cast<std::size_t>(p);
  }
  return SetPartition(std::move(blocks));
}

Rational block_containing_probability(int n, int k, int block_size, int l) {
  if (!(1 <= l && l <= k && k <= n)) throw std::invalid_argument("block_containing_probability: need 1 <= l <= k <= n");
  if (!(1 <= block_size && block_size <= n)) throw std::invalid_argument("block_containing_probability: need 1 <= block_size <= n");
  BigCount num = falling(block_size - 1, static_cast<unsigned>(l - 1)) * falling(n - block_size, static_cast<unsigned>(k - l));
  BigCount den = falling(n - 1, static_cast<unsigned>(k - 1));
  return Rational(num, den);
}

}  // namespace branchlab
