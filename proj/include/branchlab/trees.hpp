#pragma once

#include "branchlab/partitions.hpp"
#include "branchlab/rng.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace branchlab {

/// Rooted unordered tree in canonical form.
///
/// Children of every vertex are kept in canonical order: larger subtrees
/// first, equal sizes by the total order below. The total order compares
///   1. vertex count (smaller first);
///   2. the child-size profile λ(t), reverse lexicographic ((n-1) first);
///   3. children pairwise in canonical order, recursively.
/// Polya unranking enumerates trees in exactly this order.
///
/// A handle is a shared immutable core (a vertex with zero or at least two
/// children) plus a stem: the number of unary vertices stacked above the
/// core's root. Tree::join of a single child just lengthens the stem.
class Tree {
 public:
  /// The single vertex.
  Tree();
  static Tree leaf() { return Tree(); }
  /// New root whose children are `children`, in any order.
  static Tree join(std::vector<Tree> children);
  /// This tree with k extra unary vertices above its root.
  Tree planted(std::uint64_t k) const;
  /// Path with n vertices.
  static Tree path(std::uint64_t n);
  /// Root with k leaf children.
  static Tree star(std::size_t k);

  std::uint64_t size() const;
  std::uint64_t leaves() const;
  std::uint64_t height() const;
  std::uint64_t stem() const { return stem_; }
  bool is_leaf() const { return size() == 1; }
  std::size_t root_degree() const;
  /// Children of the root in canonical order.
  std::vector<Tree> children() const;
  /// λ(t): vertex counts of the root's subtrees; nullopt for the single vertex.
  std::optional<IntPartition> root_split() const;
  /// Leaf counts of the root's subtrees; nullopt for the single vertex.
  std::optional<IntPartition> root_leaf_split() const;

  /// Negative if this tree precedes `o` in the canonical total order.
  int compare(const Tree& o) const;
  bool operator==(const Tree& o) const;
  bool operator!=(const Tree& o) const { return !(*this == o); }
  bool operator<(const Tree& o) const { return compare(o) < 0; }
  std::size_t hash() const;

  /// Subtree rooted at the vertex with preorder index i.
  Tree subtree_at(std::uint64_t i) const;
  /// Depth of the vertex with preorder index i.
  std::uint64_t depth_of_vertex(std::uint64_t i) const;
  /// Depth of the i-th leaf in preorder.
  std::uint64_t depth_of_leaf(std::uint64_t i) const;
  /// Parent preorder index of every vertex in preorder; -1 for the root.
  std::vector<std::int64_t> preorder_parents() const;

  /// Nested-list text form: "[]" is the single vertex, "[[],[]]" the cherry.
  std::string str() const;

 private:
  struct Core;
  Tree(std::shared_ptr<const Core> core, std::uint64_t stem) : core_(std::move(core)), stem_(stem) {}
  static const std::shared_ptr<const Core>& leaf_core();

  std::shared_ptr<const Core> core_;
  std::uint64_t stem_ = 0;
};

struct TreeLess {
  bool operator()(const Tree& a, const Tree& b) const { return a.compare(b) < 0; }
};
struct TreeHash {
  std::size_t operator()(const Tree& t) const { return t.hash(); }
};

/// Ordered (plane) tree; canonicalize maps it to its unordered class.
struct PlaneTree {
  std::vector<PlaneTree> children;
};

Tree canonicalize(const PlaneTree& t);
/// One plane representative of t (children in canonical order).
PlaneTree to_plane(const Tree& t);

/// All trees with n vertices and at most m children per vertex (m = 0 means
/// unbounded), in canonical order. Brute-force generation; n <= 16.
std::vector<Tree> enumerate_trees(int n, int m = 0);

struct TreeStats {
  std::uint64_t height = 0;
  std::uint64_t n_vertices = 0;
  std::uint64_t n_leaves = 0;
  std::optional<IntPartition> root_split;
  std::map<std::size_t, std::uint64_t> degree_histogram;  ///< out-degree -> vertex count
};
TreeStats tree_stats(const Tree& t);

enum class PointMeasure { kVertices, kLeaves };
/// Depth of a uniformly chosen vertex or leaf.
std::uint64_t random_point_depth(const Tree& t, PointMeasure measure, Rng& rng);

/// Attaches one extra leaf to every non-leaf vertex.
Tree ghost_leaf_transform(const Tree& t);

/// Tree with a nonnegative length on the edge above every vertex, including
/// the planted edge above the root. Lengths are indexed by the preorder of
/// the canonical form. Leaf labels, when present, follow preorder of leaves.
class EdgeTree {
 public:
  EdgeTree() = default;
  EdgeTree(Tree t, std::vector<double> lengths, std::vector<int> leaf_labels = {});
  /// Every edge (planted one included) of length len.
  static EdgeTree uniform(Tree t, double len, std::vector<int> leaf_labels = {});
  /// A single vertex on a planted edge.
  static EdgeTree segment(double len, std::optional<int> label = std::nullopt);
  /// New root over `children`, planted on an edge of length root_length.
  /// Equal-shape children are ordered by lengths, then labels.
  static EdgeTree join(std::vector<EdgeTree> children, double root_length);

  const Tree& tree() const { return tree_; }
  std::vector<double> lengths() const;
  double length(std::uint64_t preorder_index) const;
  const std::vector<int>& leaf_labels() const { return labels_; }
  /// Largest distance from the planting point to a vertex.
  double height() const;
  /// Root (planting point) distance of every leaf, in leaf preorder.
  std::vector<double> leaf_root_distances() const;

 private:
  Tree tree_;
  std::vector<double> lengths_;
  double uniform_ = -1.0;
  std::vector<int> labels_;
};

/// Metric spanned by the planting point and the labelled leaves: root
/// distances and pairwise distances keyed by label. Two labelled trees with
/// edge lengths are isometric (as rooted, leaf-labelled metric trees) iff
/// their LeafMetric values agree.
struct LeafMetric {
  std::vector<int> labels;                   ///< sorted
  std::vector<double> root_distance;         ///< parallel to labels
  std::vector<std::vector<double>> distance;  ///< pairwise, parallel to labels
  LeafMetric restrict(const std::vector<int>& subset) const;
  bool approx_equal(const LeafMetric& o, double tol = 1e-12) const;
};
LeafMetric leaf_metric(const EdgeTree& t);

/// Refining sequence of partitions of a common ground set, ending in
/// singletons. Time t is the index into `states`.
struct ChainPath {
  std::vector<SetPartition> states;
  /// Checks monotone refinement and the all-singletons end state.
  void validate() const;
};

/// Reduced tree θ(π(·), B). A block of size at least two is planted on an
/// edge lasting until it first splits, then recurses on its traces. A single
/// label's edge runs from the current time through the step at which it is a
/// singleton block, both ends included, so it has length (isolation time
/// - start + 1) and matches the unit planted leaf edge of the genealogy tree.
EdgeTree reduced_edge_tree(const ChainPath& path, const std::vector<int>& subset);

/// Tree with leaves labelled by a finite label set.
struct LabeledTree {
  Tree tree;
  std::vector<int> leaf_labels;  ///< labels in preorder of leaves
  EdgeTree unit_edge_tree() const { return EdgeTree::uniform(tree, 1.0, leaf_labels); }
};

/// Genealogy t_{π(·)} of the blocks of a chain path: a block at time t is a
/// vertex at depth t whose children are its traces at time t + 1; singleton
/// blocks are leaves.
LabeledTree genealogy_tree(const ChainPath& path);

}  // namespace branchlab
