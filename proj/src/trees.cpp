#include "branchlab/trees.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

namespace branchlab {

struct Tree::Core {
  std::vector<Tree> kids;  // empty (leaf) or at least two, canonical order
  std::uint64_t size = 1;
  std::uint64_t leaves = 1;
  std::uint64_t height = 0;
  std::size_t hash = 0x51ed27a3u;
};

namespace {

std::size_t mix(std::size_t h, std::size_t v) {
  return static_cast<std::size_t>(splitmix64(h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2))));
}

// Order of children under one vertex: bigger subtrees first, then canonical.
bool child_less(const Tree& a, const Tree& b) {
  if (a.size() != b.size()) return a.size() > b.size();
  return a.compare(b) < 0;
}

}  // namespace

const std::shared_ptr<const Tree::Core>& Tree::leaf_core() {
  static const std::shared_ptr<const Core> leaf = std::make_shared<const Core>();
  return leaf;
}

Tree::Tree() : core_(leaf_core()), stem_(0) {}

Tree Tree::join(std::vector<Tree> children) {
  if (children.empty()) return Tree();
  if (children.size() == 1) return children.front().planted(1);
  std::sort(children.begin(), children.end(), child_less);
  auto core = std::make_shared<Core>();
  core->size = 1;
  core->leaves = 0;
  core->height = 0;
  std::size_t h = mix(0x2545f491u, children.size());
  for (const auto& c : children) {
    core->size += c.size();
    core->leaves += c.leaves();
    core->height = std::max(core->height, c.height() + 1);
    h = mix(h, c.hash());
  }
  core->hash = h;
  core->kids = std::move(children);
  return Tree(std::move(core), 0);
}

Tree Tree::planted(std::uint64_t k) const { return Tree(core_, stem_ + k); }

Tree Tree::path(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("Tree::path: n must be positive");
  return Tree().planted(n - 1);
}

Tree Tree::star(std::size_t k) { return join(std::vector<Tree>(k)); }

std::uint64_t Tree::size() const { return core_->size + stem_; }
std::uint64_t Tree::leaves() const { return core_->leaves; }
std::uint64_t Tree::height() const { return core_->height + stem_; }

std::size_t Tree::root_degree() const { return stem_ > 0 ? 1 : core_->kids.size(); }

std::vector<Tree> Tree::children() const {
  if (stem_ > 0) return {Tree(core_, stem_ - 1)};
  return core_->kids;
}

std::optional<IntPartition> Tree::root_split() const {
  if (is_leaf()) return std::nullopt;
  std::vector<int> parts;
  for (const auto& c : children()) parts.push_back(static_cast<int>(c.size()));
  return IntPartition(std::move(parts));
}

std::optional<IntPartition> Tree::root_leaf_split() const {
  if (is_leaf()) return std::nullopt;
  std::vector<int> parts;
  for (const auto& c : children()) parts.push_back(static_cast<int>(c.leaves()));
  return IntPartition(std::move(parts));
}

int Tree::compare(const Tree& o) const {
  if (size() != o.size()) return size() < o.size() ? -1 : 1;
  if (core_ == o.core_ && stem_ == o.stem_) return 0;
  // A longer stem means λ = (n-1) at more levels, which comes first.
  if (stem_ != o.stem_) return stem_ > o.stem_ ? -1 : 1;
  const auto& a = core_->kids;
  const auto& b = o.core_->kids;
  std::size_t common = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < common; ++i)
    if (a[i].size() != b[i].size()) return a[i].size() > b[i].size() ? -1 : 1;
  if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;  // unreachable for equal totals
  for (std::size_t i = 0; i < common; ++i) {
    int r = a[i].compare(b[i]);
    if (r != 0) return r;
  }
  return 0;
}

bool Tree::operator==(const Tree& o) const {
  if (size() != o.size() || stem_ != o.stem_) return false;
  if (core_ == o.core_) return true;
  if (core_->hash != o.core_->hash || core_->kids.size() != o.core_->kids.size()) return false;
  for (std::size_t i = 0; i < core_->kids.size(); ++i)
    if (!(core_->kids[i] == o.core_->kids[i])) return false;
  return true;
}

std::size_t Tree::hash() const { return stem_ == 0 ? core_->hash : mix(core_->hash, stem_); }

Tree Tree::subtree_at(std::uint64_t i) const {
  if (i >= size()) throw std::out_of_range("Tree::subtree_at: index out of range");
  Tree h = *this;
  for (;;) {
    if (i < h.stem_) return Tree(h.core_, h.stem_ - i);
    i -= h.stem_;
    if (i == 0) return Tree(h.core_, 0);
    i -= 1;
    for (const auto& k : h.core_->kids) {
      if (i < k.size()) {
        h = k;
        break;
      }
      i -= k.size();
    }
  }
}

std::uint64_t Tree::depth_of_vertex(std::uint64_t i) const {
  if (i >= size()) throw std::out_of_range("Tree::depth_of_vertex: index out of range");
  std::uint64_t depth = 0;
  const Tree* h = this;
  for (;;) {
    if (i < h->stem_) return depth + i;
    i -= h->stem_;
    depth += h->stem_;
    if (i == 0) return depth;
    i -= 1;
    depth += 1;
    for (const auto& k : h->core_->kids) {
      if (i < k.size()) {
        h = &k;
        break;
      }
      i -= k.size();
    }
  }
}

std::uint64_t Tree::depth_of_leaf(std::uint64_t i) const {
  if (i >= leaves()) throw std::out_of_range("Tree::depth_of_leaf: index out of range");
  std::uint64_t depth = 0;
  const Tree* h = this;
  for (;;) {
    depth += h->stem_;
    if (h->core_->kids.empty()) return depth;
    depth += 1;
    for (const auto& k : h->core_->kids) {
      if (i < k.leaves()) {
        h = &k;
        break;
      }
      i -= k.leaves();
    }
  }
}

std::vector<std::int64_t> Tree::preorder_parents() const {
  std::vector<std::int64_t> parent;
  parent.reserve(size());
  // Explicit stack of (subtree, parent index); children pushed in reverse.
  std::vector<std::pair<const Tree*, std::int64_t>> stack{{this, -1}};
  while (!stack.empty()) {
    auto [h, par] = stack.back();
    stack.pop_back();
    std::int64_t p = par;
    for (std::uint64_t s = 0; s < h->stem_; ++s) {
      parent.push_back(p);
      p = static_cast<std::int64_t>(parent.size()) - 1;
    }
    parent.push_back(p);
    auto self = static_cast<std::int64_t>(parent.size()) - 1;
    const auto& kids = h->core_->kids;
    for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.emplace_back(&*it, self);
  }
  return parent;
}

std::string Tree::str() const {
  std::string out;
  auto rec = [&](auto&& self, const Tree& t) -> void {
    out.append(t.stem_, '[');
    out.push_back('[');
    for (std::size_t i = 0; i < t.core_->kids.size(); ++i) {
      if (i) out.push_back(',');
      self(self, t.core_->kids[i]);
    }
    out.push_back(']');
    out.append(t.stem_, ']');
  };
  rec(rec, *this);
  return out;
}

Tree canonicalize(const PlaneTree& t) {
  std::vector<Tree> kids;
  kids.reserve(t.children.size());
  for (const auto& c : t.children) kids.push_back(canonicalize(c));
  return Tree::join(std::move(kids));
}

PlaneTree to_plane(const Tree& t) {
  PlaneTree p;
  for (const auto& c : t.children()) p.children.push_back(to_plane(c));
  return p;
}

std::vector<Tree> enumerate_trees(int n, int m) {
  if (n < 1) throw std::invalid_argument("enumerate_trees: n must be positive");
  if (n > 16) throw ResourceError("enumerate_trees: n above the enumeration cap of 16");
  const std::size_t maxdeg = m <= 0 ? static_cast<std::size_t>(n) : static_cast<std::size_t>(m);
  // by_size[k]: all admissible trees with k vertices.
  std::vector<std::vector<Tree>> by_size(static_cast<std::size_t>(n) + 1);
  by_size[1] = {Tree()};
  for (int k = 2; k <= n; ++k) {
    // Flat pool of smaller trees; a child multiset is a non-increasing
    // sequence of pool indices with sizes summing to k - 1.
    std::vector<const Tree*> pool;
    for (int s = 1; s < k; ++s)
      for (const auto& t : by_size[static_cast<std::size_t>(s)]) pool.push_back(&t);
    std::set<Tree, TreeLess> found;
    std::vector<Tree> cur;
    auto rec = [&](auto&& self, std::size_t max_index, std::uint64_t remaining) -> void {
      if (remaining == 0) {
        found.insert(Tree::join(cur));
        return;
      }
      if (cur.size() == maxdeg) return;
      for (std::size_t i = 0; i <= max_index && i < pool.size(); ++i) {
        if (pool[i]->size() > remaining) continue;
        cur.push_back(*pool[i]);
        self(self, i, remaining - pool[i]->size());
        cur.pop_back();
      }
    };
    rec(rec, pool.size() - 1, static_cast<std::uint64_t>(k - 1));
    by_size[static_cast<std::size_t>(k)].assign(found.begin(), found.end());
  }
  return by_size[static_cast<std::size_t>(n)];
}

TreeStats tree_stats(const Tree& t) {
  TreeStats s;
  s.height = t.height();
  s.n_vertices = t.size();
  s.n_leaves = t.leaves();
  s.root_split = t.root_split();
  auto rec = [&](auto&& self, const Tree& h) -> void {
    if (h.stem() > 0) {
      s.degree_histogram[1] += h.stem();
      self(self, h.subtree_at(h.stem()));
      return;
    }
    auto kids = h.children();
    s.degree_histogram[kids.size()] += 1;
    for (const auto& k : kids) self(self, k);
  };
  rec(rec, t);
  return s;
}

std::uint64_t random_point_depth(const Tree& t, PointMeasure measure, Rng& rng) {
  if (measure == PointMeasure::kVertices) return t.depth_of_vertex(rng.below(t.size()));
  return t.depth_of_leaf(rng.below(t.leaves()));
}

Tree ghost_leaf_transform(const Tree& t) {
  if (t.is_leaf()) return t;
  std::uint64_t stem = t.stem();
  Tree core = t.subtree_at(stem);
  Tree out = core;
  if (!core.is_leaf()) {
    std::vector<Tree> kids;
    for (const auto& c : core.children()) kids.push_back(ghost_leaf_transform(c));
    kids.push_back(Tree());
    out = Tree::join(std::move(kids));
  }
  for (std::uint64_t s = 0; s < stem; ++s) out = Tree::join({out, Tree()});
  return out;
}

EdgeTree::EdgeTree(Tree t, std::vector<double> lengths, std::vector<int> leaf_labels)
    : tree_(std::move(t)), lengths_(std::move(lengths)), labels_(std::move(leaf_labels)) {
  if (lengths_.size() != tree_.size()) throw std::invalid_argument("EdgeTree: one length per vertex required");
  for (double l : lengths_)
    if (!(l >= 0.0)) throw std::invalid_argument("EdgeTree: lengths must be nonnegative");
  if (!labels_.empty() && labels_.size() != tree_.leaves())
    throw std::invalid_argument("EdgeTree: one label per leaf required");
}

EdgeTree EdgeTree::uniform(Tree t, double len, std::vector<int> leaf_labels) {
  if (!(len >= 0.0)) throw std::invalid_argument("EdgeTree::uniform: negative length");
  EdgeTree e;
  e.tree_ = std::move(t);
  e.uniform_ = len;
  e.labels_ = std::move(leaf_labels);
  if (!e.labels_.empty() && e.labels_.size() != e.tree_.leaves())
    throw std::invalid_argument("EdgeTree: one label per leaf required");
  return e;
}

EdgeTree EdgeTree::segment(double len, std::optional<int> label) {
  std::vector<int> labels;
  if (label) labels.push_back(*label);
  return EdgeTree(Tree(), {len}, std::move(labels));
}

EdgeTree EdgeTree::join(std::vector<EdgeTree> children, double root_length) {
  std::vector<std::vector<double>> lens;
  lens.reserve(children.size());
  for (const auto& c : children) lens.push_back(c.lengths());
  std::vector<std::size_t> order(children.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    const Tree& a = children[x].tree_;
    const Tree& b = children[y].tree_;
    if (a != b) return child_less(a, b);
    if (lens[x] != lens[y]) return lens[x] < lens[y];
    return children[x].labels_ < children[y].labels_;
  });
  std::vector<Tree> trees;
  std::vector<double> lengths{root_length};
  std::vector<int> labels;
  bool labelled = !children.empty() && !children.front().labels_.empty();
  for (std::size_t i : order) {
    trees.push_back(children[i].tree_);
    lengths.insert(lengths.end(), lens[i].begin(), lens[i].end());
    if (labelled) labels.insert(labels.end(), children[i].labels_.begin(), children[i].labels_.end());
  }
  return EdgeTree(Tree::join(std::move(trees)), std::move(lengths), std::move(labels));
}

std::vector<double> EdgeTree::lengths() const {
  if (uniform_ >= 0.0) return std::vector<double>(tree_.size(), uniform_);
  return lengths_;
}

double EdgeTree::length(std::uint64_t i) const {
  if (i >= tree_.size()) throw std::out_of_range("EdgeTree::length: index out of range");
  return uniform_ >= 0.0 ? uniform_ : lengths_[i];
}

double EdgeTree::height() const {
  if (uniform_ >= 0.0) return static_cast<double>(tree_.height() + 1) * uniform_;
  auto parent = tree_.preorder_parents();
  std::vector<double> dist(parent.size());
  double best = 0.0;
  for (std::size_t i = 0; i < parent.size(); ++i) {
    dist[i] = lengths_[i] + (parent[i] < 0 ? 0.0 : dist[static_cast<std::size_t>(parent[i])]);
    best = std::max(best, dist[i]);
  }
  return best;
}

std::vector<double> EdgeTree::leaf_root_distances() const {
  auto parent = tree_.preorder_parents();
  std::vector<double> dist(parent.size());
  std::vector<char> has_child(parent.size(), 0);
  for (std::size_t i = 0; i < parent.size(); ++i) {
    dist[i] = length(i) + (parent[i] < 0 ? 0.0 : dist[static_cast<std::size_t>(parent[i])]);
    if (parent[i] >= 0) has_child[static_cast<std::size_t>(parent[i])] = 1;
  }
  std::vector<double> out;
  for (std::size_t i = 0; i < parent.size(); ++i)
    if (!has_child[i]) out.push_back(dist[i]);
  return out;
}

LeafMetric LeafMetric::restrict(const std::vector<int>& subset) const {
  std::vector<int> s = subset;
  std::sort(s.begin(), s.end());
  std::vector<std::size_t> idx;
  for (int x : s) {
    auto it = std::lower_bound(labels.begin(), labels.end(), x);
    if (it == labels.end() || *it != x) throw std::invalid_argument("LeafMetric::restrict: unknown label");
    idx.push_back(static_cast<std::size_t>(it - labels.begin()));
  }
  LeafMetric r;
  r.labels = s;
  for (std::size_t a : idx) {
    r.root_distance.push_back(root_distance[a]);
    std::vector<double> row;
    for (std::size_t b : idx) row.push_back(distance[a][b]);
    r.distance.push_back(std::move(row));
  }
  return r;
}

bool LeafMetric::approx_equal(const LeafMetric& o, double tol) const {
  if (labels != o.labels) return false;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (std::abs(root_distance[i] - o.root_distance[i]) > tol) return false;
    for (std::size_t j = 0; j < labels.size(); ++j)
      if (std::abs(distance[i][j] - o.distance[i][j]) > tol) return false;
  }
  return true;
}

LeafMetric leaf_metric(const EdgeTree& t) {
  const auto& labels = t.leaf_labels();
  if (labels.size() != t.tree().leaves()) throw std::invalid_argument("leaf_metric: tree has no leaf labels");
  auto parent = t.tree().preorder_parents();
  const std::size_t nv = parent.size();
  std::vector<double> dist(nv);
  std::vector<std::size_t> depth(nv, 0);
  std::vector<char> has_child(nv, 0);
  for (std::size_t i = 0; i < nv; ++i) {
    if (parent[i] >= 0) {
      auto p = static_cast<std::size_t>(parent[i]);
      dist[i] = dist[p] + t.length(i);
      depth[i] = depth[p] + 1;
      has_child[p] = 1;
    } else {
      dist[i] = t.length(i);
    }
  }
  std::vector<std::size_t> leaf_vertex;
  for (std::size_t i = 0; i < nv; ++i)
    if (!has_child[i]) leaf_vertex.push_back(i);
  std::vector<std::size_t> order(labels.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return labels[a] < labels[b]; });
  auto lca = [&](std::size_t a, std::size_t b) {
    while (depth[a] > depth[b]) a = static_cast<std::size_t>(parent[a]);
    while (depth[b] > depth[a]) b = static_cast<std::size_t>(parent[b]);
    while (a != b) {
      a = static_cast<std::size_t>(parent[a]);
      b = static_cast<std::size_t>(parent[b]);
    }
    return a;
  };
  LeafMetric m;
  for (std::size_t a : order) {
    m.labels.push_back(labels[a]);
    m.root_distance.push_back(dist[leaf_vertex[a]]);
  }
  for (std::size_t a : order) {
    std::vector<double> row;
    for (std::size_t b : order) {
      std::size_t u = leaf_vertex[a], v = leaf_vertex[b];
      row.push_back(dist[u] + dist[v] - 2.0 * dist[lca(u, v)]);
    }
    m.distance.push_back(std::move(row));
  }
  return m;
}

void ChainPath::validate() const {
  if (states.empty()) throw std::invalid_argument("ChainPath: empty path");
  auto ground = states.front().ground();
  for (std::size_t t = 0; t < states.size(); ++t) {
    if (states[t].ground() != ground) throw std::invalid_argument("ChainPath: ground set changes along the path");
    if (t > 0) {
      for (const auto& b : states[t].blocks()) {
        auto i = states[t - 1].block_of(b.front());
        const auto& pb = states[t - 1].blocks()[*i];
        if (!std::includes(pb.begin(), pb.end(), b.begin(), b.end()))
          throw std::invalid_argument("ChainPath: states do not refine");
      }
    }
  }
  if (!states.back().all_singletons()) throw std::invalid_argument("ChainPath: final state is not all singletons");
}

namespace {

std::size_t trace_blocks(const SetPartition& p, const std::vector<int>& b) {
  std::set<std::size_t> seen;
  for (int x : b) seen.insert(*p.block_of(x));
  return seen.size();
}

EdgeTree theta(const ChainPath& path, const std::vector<int>& b, std::size_t t0) {
  const std::size_t T = path.states.size();
  if (b.size() == 1) {
    for (std::size_t t = t0; t < T; ++t) {
      const auto& blk = path.states[t].blocks()[*path.states[t].block_of(b.front())];
      if (blk.size() == 1) return EdgeTree::segment(static_cast<double>(t - t0 + 1), b.front());
    }
    throw std::invalid_argument("reduced_edge_tree: label never isolated");
  }
  for (std::size_t t = t0; t < T; ++t) {
    if (trace_blocks(path.states[t], b) >= 2) {
      SetPartition trace = path.states[t].restrict(b);
      std::vector<EdgeTree> kids;
      for (const auto& blk : trace.blocks()) kids.push_back(theta(path, blk, t));
      return EdgeTree::join(std::move(kids), static_cast<double>(t - t0));
    }
  }
  throw std::invalid_argument("reduced_edge_tree: block never splits");
}

}  // namespace

EdgeTree reduced_edge_tree(const ChainPath& path, const std::vector<int>& subset) {
  if (path.states.empty()) throw std::invalid_argument("reduced_edge_tree: empty path");
  if (subset.empty()) throw std::invalid_argument("reduced_edge_tree: empty label subset");
  std::vector<int> b = subset;
  std::sort(b.begin(), b.end());
  b.erase(std::unique(b.begin(), b.end()), b.end());
  for (int x : b)
    if (!path.states.front().block_of(x)) throw std::invalid_argument("reduced_edge_tree: label outside ground set");
  return theta(path, b, 0);
}

LabeledTree genealogy_tree(const ChainPath& path) {
  if (path.states.empty()) throw std::invalid_argument("genealogy_tree: empty path");
  const std::size_t T = path.states.size();
  auto node = [&](auto&& self, std::vector<int> b, std::size_t t) -> LabeledTree {
    std::uint64_t stem = 0;
    SetPartition trace;
    for (;;) {
      if (b.size() == 1) return LabeledTree{Tree().planted(stem), b};
      if (t + 1 >= T) throw std::invalid_argument("genealogy_tree: path ends before all blocks are singletons");
      trace = path.states[t + 1].restrict(b);
      ++t;
      if (trace.block_count() > 1) break;
      ++stem;
    }
    std::vector<LabeledTree> kids;
    for (const auto& blk : trace.blocks()) kids.push_back(self(self, blk, t));
    std::sort(kids.begin(), kids.end(), [](const LabeledTree& x, const LabeledTree& y) {
      if (x.tree != y.tree) return child_less(x.tree, y.tree);
      return x.leaf_labels < y.leaf_labels;
    });
    std::vector<Tree> trees;
    std::vector<int> labels;
    for (auto& k : kids) {
      trees.push_back(k.tree);
      labels.insert(labels.end(), k.leaf_labels.begin(), k.leaf_labels.end());
    }
    return LabeledTree{Tree::join(std::move(trees)).planted(stem), std::move(labels)};
  };
  return node(node, path.states.front().ground(), 0);
}

}  // namespace branchlab
