#include "branchlab/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace branchlab {

Tree sample_P(const SplitLaw& q, int n, Rng& rng) {
  if (q.model() != ModelKind::kLeaf) throw std::invalid_argument("sample_P: leaf-model law required");
  if (n < 1) throw std::invalid_argument("sample_P: n must be positive");
  if (n == 1) {
    const double stop = q.leaf_stop_probability();
    const std::uint64_t g = stop < 1.0 ? rng.geometric_failures(stop) : 0;
    return Tree().planted(g);
  }
  auto [g, lambda] = q.sample_hold_and_split(n, rng);
  std::vector<Tree> kids;
  kids.reserve(lambda.parts().size());
  for (int part : lambda.parts()) kids.push_back(sample_P(q, part, rng));
  return Tree::join(std::move(kids)).planted(g);
}

Tree sample_Q(const SplitLaw& q, int n, Rng& rng) {
  if (q.model() != ModelKind::kVertex) throw std::invalid_argument("sample_Q: vertex-model law required");
  if (n < 1) throw std::invalid_argument("sample_Q: n must be positive");
  if (n == 1) return Tree();
  // Chains of single children become stems without recursion.
  std::uint64_t stem = 0;
  IntPartition lambda = q.sample(n - 1, rng);
  while (lambda.length() == 1) {
    ++stem;
    n -= 1;
    if (n == 1) return Tree().planted(stem);
    lambda = q.sample(n - 1, rng);
  }
  std::vector<Tree> kids;
  kids.reserve(lambda.parts().size());
  for (int part : lambda.parts()) kids.push_back(sample_Q(q, part, rng));
  return Tree::join(std::move(kids)).planted(stem);
}

std::uint64_t vertex_depth_Q(const SplitLaw& q, int n, Rng& rng) {
  if (q.model() != ModelKind::kVertex) throw std::invalid_argument("vertex_depth_Q: vertex-model law required");
  if (n < 1) throw std::invalid_argument("vertex_depth_Q: n must be positive");
  std::uint64_t depth = 0;
  auto size = static_cast<std::uint64_t>(n);
  while (size > 1 && rng.below(size) != 0) {
    const IntPartition lambda = q.sample(static_cast<int>(size - 1), rng);
    std::uint64_t x = rng.below(size - 1);
    for (int part : lambda.parts()) {
      const auto p = static_cast<std::uint64_t>(part);
      if (x < p) {
        size = p;
        break;
      }
      x -= p;
    }
    ++depth;
  }
  return depth;
}

SetPartition chain_step(const SplitLaw& q, const SetPartition& pi, Rng& rng) {
  std::vector<std::vector<int>> blocks;
  for (const auto& b : pi.blocks()) {
    if (b.size() == 1) {
      blocks.push_back(b);
      continue;
    }
    IntPartition shape = q.sample(static_cast<int>(b.size()), rng);
    const SetPartition part = uniform_shape_partition(shape, b, rng);
    for (const auto& nb : part.blocks()) blocks.push_back(nb);
  }
  return SetPartition(std::move(blocks));
}

std::pair<LabeledTree, ChainPath> labeled_tree(const SplitLaw& q, std::vector<int> labels, Rng& rng) {
  if (labels.empty()) throw std::invalid_argument("labeled_tree: empty label set");
  if (q.model() != ModelKind::kLeaf) throw std::invalid_argument("labeled_tree: leaf-model law required");
  ChainPath path;
  path.states.push_back(SetPartition::one_block(std::move(labels)));
  while (!path.states.back().all_singletons()) path.states.push_back(chain_step(q, path.states.back(), rng));
  LabeledTree t = genealogy_tree(path);
  return {std::move(t), std::move(path)};
}

namespace {

// Distribution of the unordered multiset of m i.i.d. draws from `law`,
// combined with a running product over size groups.
template <class Num>
void expand_groups(const std::vector<std::pair<int, int>>& groups, std::size_t gi,
                   const std::vector<std::vector<std::pair<Tree, Num>>>& laws, std::vector<Tree>& acc_trees,
                   const Num& acc_p, std::map<Tree, Num, TreeLess>& out) {
  if (gi == groups.size()) {
    out[Tree::join(acc_trees)] += acc_p;
    return;
  }
  const auto [j, m] = groups[gi];
  const auto& law = laws[static_cast<std::size_t>(j)];
  // Non-decreasing index sequences over `law` of length m; track counts for
  // the multinomial coefficient m! / Π c!.
  std::vector<std::size_t> idx;
  std::function<void(std::size_t, Num, Num)> rec = [&](std::size_t from, Num p, Num coef) {
    if (idx.size() == static_cast<std::size_t>(m)) {
      for (std::size_t i : idx) acc_trees.push_back(law[i].first);
      expand_groups(groups, gi + 1, laws, acc_trees, Num(acc_p * p * coef), out);
      acc_trees.resize(acc_trees.size() - idx.size());
      return;
    }
    for (std::size_t i = from; i < law.size(); ++i) {
      // Multiplicity of i after this push.
      std::size_t run = 1;
      for (auto it = idx.rbegin(); it != idx.rend() && *it == i; ++it) ++run;
      idx.push_back(i);
      Num c = coef * Num(static_cast<long>(idx.size())) / Num(static_cast<long>(run));
      rec(i, Num(p * law[i].second), c);
      idx.pop_back();
    }
  };
  rec(0, Num(1), Num(1));
}

template <class Num, class DistFn>
std::map<Tree, Num, TreeLess> exact_Q_generic(int n, DistFn dist) {
  if (n < 1) throw std::invalid_argument("exact_Q_law: n must be positive");
  if (n > 12) throw ResourceError("exact_Q_law: n above the enumeration cap of 12");
  std::vector<std::vector<std::pair<Tree, Num>>> laws(static_cast<std::size_t>(n) + 1);
  laws[1] = {{Tree(), Num(1)}};
  // Only sizes reachable from n are built: some GW laws have no trees of
  // other sizes, and no q_k for them.
  std::vector<bool> done(static_cast<std::size_t>(n) + 1, false);
  done[1] = true;
  std::function<void(int)> build = [&](int k) {
    if (done[static_cast<std::size_t>(k)]) return;
    const auto d = dist(k - 1);
    for (const auto& [lambda, p] : d)
      if (p != 0)
        for (auto [j, m] : lambda.multiplicities()) build(j);
    std::map<Tree, Num, TreeLess> out;
    for (const auto& [lambda, p] : d) {
      if (p == 0) continue;
      std::vector<Tree> acc;
      expand_groups<Num>(lambda.multiplicities(), 0, laws, acc, Num(p), out);
    }
    for (auto& e : out) laws[static_cast<std::size_t>(k)].emplace_back(e.first, e.second);
    done[static_cast<std::size_t>(k)] = true;
  };
  build(n);
  std::map<Tree, Num, TreeLess> res;
  for (auto& e : laws[static_cast<std::size_t>(n)]) res.emplace(e.first, e.second);
  return res;
}

}  // namespace

TreeLaw exact_Q_law(const SplitLaw& q, int n) {
  if (q.model() != ModelKind::kVertex) throw std::invalid_argument("exact_Q_law: vertex-model law required");
  return exact_Q_generic<double>(n, [&](int k) {
    auto d = q.distribution(k);
    if (!d) throw std::invalid_argument("exact_Q_law: q_" + std::to_string(k) + " is not enumerable");
    return *d;
  });
}

RationalTreeLaw exact_Q_law_rational(const SplitLaw& q, int n) {
  if (q.model() != ModelKind::kVertex) throw std::invalid_argument("exact_Q_law: vertex-model law required");
  return exact_Q_generic<Rational>(n, [&](int k) {
    auto d = q.exact_distribution(k);
    if (!d) throw std::invalid_argument("exact_Q_law: no rational pmf for q_" + std::to_string(k));
    return *d;
  });
}

TreeLaw exact_P_law(const SplitLaw& q, int n, double hold_tail) {
  if (q.model() != ModelKind::kLeaf) throw std::invalid_argument("exact_P_law: leaf-model law required");
  if (n < 1) throw std::invalid_argument("exact_P_law: n must be positive");
  if (n > 9) throw ResourceError("exact_P_law: n above the enumeration cap of 9");
  // Hold lengths 0..H with (1 - h) h^g, truncated once h^{H+1} < hold_tail.
  auto holds = [&](double h) {
    std::vector<double> w;
    double p = 1.0 - h;
    do {
      w.push_back(p);
      p *= h;
    } while (h > 0.0 && p / (1.0 - h) >= hold_tail);
    return w;
  };
  std::vector<std::vector<std::pair<Tree, double>>> laws(static_cast<std::size_t>(n) + 1);
  {
    const double stop = q.leaf_stop_probability();
    auto w = holds(1.0 - stop);
    for (std::size_t g = 0; g < w.size(); ++g) laws[1].emplace_back(Tree().planted(g), w[g]);
  }
  for (int k = 2; k <= n; ++k) {
    auto d = q.distribution(k);
    if (!d) throw std::invalid_argument("exact_P_law: q_" + std::to_string(k) + " is not enumerable");
    double h = 0.0;
    for (const auto& [l, p] : *d)
      if (l.is_trivial()) h += p;
    if (!(h < 1.0)) throw std::domain_error("exact_P_law: q_k((k)) = 1");
    std::map<Tree, double, TreeLess> base;
    for (const auto& [lambda, p] : *d) {
      if (lambda.is_trivial() || p == 0.0) continue;
      std::vector<Tree> acc;
      expand_groups<double>(lambda.multiplicities(), 0, laws, acc, p / (1.0 - h), base);
    }
    auto w = holds(h);
    std::map<Tree, double, TreeLess> out;
    for (const auto& [t, p] : base)
      for (std::size_t g = 0; g < w.size(); ++g) out[t.planted(g)] += p * w[g];
    for (auto& e : out) laws[static_cast<std::size_t>(k)].emplace_back(e.first, e.second);
  }
  TreeLaw res;
  for (auto& e : laws[static_cast<std::size_t>(n)]) res.emplace(e.first, e.second);
  return res;
}

Tree alpha_theta_grow(double alpha, double theta, int n, Rng& rng) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha_theta_grow: alpha must lie in (0, 1)");
  if (!(theta >= 0.0)) throw std::invalid_argument("alpha_theta_grow: theta must be nonnegative");
  if (n < 1) throw std::invalid_argument("alpha_theta_grow: n must be positive");
  struct Node {
    int parent = -1;
    int kid[2] = {-1, -1};
    int leaves = 1;
    int min_label = 0;
  };
  std::vector<Node> nodes;
  nodes.reserve(2 * static_cast<std::size_t>(n));
  nodes.push_back(Node{-1, {-1, -1}, 1, 1});
  int root = 0;
  std::vector<int> path;
  for (int label = 2; label <= n; ++label) {
    int cur = root;
    path.clear();
    for (;;) {
      const Node& c = nodes[static_cast<std::size_t>(cur)];
      if (c.kid[0] < 0) break;  // a one-leaf part: attach on its edge
      int a = c.kid[0], b = c.kid[1];
      if (nodes[static_cast<std::size_t>(b)].min_label < nodes[static_cast<std::size_t>(a)].min_label) std::swap(a, b);
      const double m = c.leaves;
      const double k = nodes[static_cast<std::size_t>(a)].leaves;
      const double w_edge = alpha, w_first = k - alpha, w_second = m - k - 1.0 + theta;
      const double t = rng.uniform() * (w_edge + w_first + w_second);
      if (t < w_edge) break;
      path.push_back(cur);
      cur = t < w_edge + w_first ? a : b;
    }
    // New branch point w on the edge above cur, with the new leaf as sibling.
    const int leaf = static_cast<int>(nodes.size());
    nodes.push_back(Node{-1, {-1, -1}, 1, label});
    const int w = static_cast<int>(nodes.size());
    Node& cn = nodes[static_cast<std::size_t>(cur)];
    Node nw{cn.parent, {cur, leaf}, cn.leaves + 1, cn.min_label};
    nodes.push_back(nw);
    if (nw.parent >= 0) {
      Node& p = nodes[static_cast<std::size_t>(nw.parent)];
      (p.kid[0] == cur ? p.kid[0] : p.kid[1]) = w;
    } else {
      root = w;
    }
    nodes[static_cast<std::size_t>(cur)].parent = w;
    nodes[static_cast<std::size_t>(leaf)].parent = w;
    for (int v : path) nodes[static_cast<std::size_t>(v)].leaves += 1;
  }
  // Post-order conversion without recursion.
  std::vector<Tree> built(nodes.size());
  std::vector<std::pair<int, bool>> stack{{root, false}};
  while (!stack.empty()) {
    auto [v, done] = stack.back();
    stack.pop_back();
    const Node& nd = nodes[static_cast<std::size_t>(v)];
    if (nd.kid[0] < 0) {
      built[static_cast<std::size_t>(v)] = Tree();
    } else if (done) {
      built[static_cast<std::size_t>(v)] =
          Tree::join({built[static_cast<std::size_t>(nd.kid[0])], built[static_cast<std::size_t>(nd.kid[1])]});
    } else {
      stack.emplace_back(v, true);
      stack.emplace_back(nd.kid[0], false);
      stack.emplace_back(nd.kid[1], false);
    }
  }
  return built[static_cast<std::size_t>(root)];
}

}  // namespace branchlab
