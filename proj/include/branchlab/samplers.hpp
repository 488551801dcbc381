#pragma once

#include "branchlab/numeric.hpp"
#include "branchlab/partitions.hpp"
#include "branchlab/rng.hpp"
#include "branchlab/splitlaws.hpp"
#include "branchlab/trees.hpp"

#include <map>
#include <utility>
#include <vector>

namespace branchlab {

using TreeLaw = std::map<Tree, double, TreeLess>;
using RationalTreeLaw = std::map<Tree, Rational, TreeLess>;

/// Draw from P^q_n (leaf model): n leaves. At size k >= 2 the root carries a
/// hold of G unary vertices, P(G = g) = (1 - q_k((k))) q_k((k))^g, g >= 0,
/// then splits by q_k(· | λ ≠ (k)); at size 1 the hold has success
/// probability q₁(∅) and ends in a leaf.
Tree sample_P(const SplitLaw& q, int n, Rng& rng);

/// Draw from Q^q_n (vertex model): n vertices, root split drawn from q_{n-1}.
Tree sample_Q(const SplitLaw& q, int n, Rng& rng);

/// Depth of a uniform vertex of a Q^q_n tree without building it: stop at
/// the root with probability 1/size, else descend into a child chosen with
/// probability proportional to its size.
std::uint64_t vertex_depth_Q(const SplitLaw& q, int n, Rng& rng);

/// One step of the labelled chain: every block B with #B >= 2 is replaced by
/// a uniform set partition of B whose shape is drawn from q_{#B}; singleton
/// blocks stay.
SetPartition chain_step(const SplitLaw& q, const SetPartition& pi, Rng& rng);

/// Runs the chain from the one-block partition of `labels` to singletons and
/// returns the genealogy tree with its leaf labels, plus the path.
std::pair<LabeledTree, ChainPath> labeled_tree(const SplitLaw& q, std::vector<int> labels, Rng& rng);

/// Exact law of Q^q_n over canonical trees. Vertex model; n <= 12.
TreeLaw exact_Q_law(const SplitLaw& q, int n);
/// Rational form, from the law's exact_distribution.
RationalTreeLaw exact_Q_law_rational(const SplitLaw& q, int n);

/// Exact law of P^q_n over canonical trees (leaf model; n <= 9). Holds
/// longer than needed to leave tail mass below `hold_tail` per vertex are
/// dropped; the returned masses then sum to 1 - O(n · hold_tail).
TreeLaw exact_P_law(const SplitLaw& q, int n, double hold_tail = 1e-13);

/// Unlabelled binary tree with n leaves from the (α, θ) growth rule: at a
/// subtree with m leaves whose first branch point splits it into the part
/// holding its smallest label (k leaves) and the rest, pick the subtree's root
/// edge, the first part or the second with weights α, k - α, m - k - 1 + θ,
/// recursing into the chosen part until an edge is picked (a one-leaf part
/// means its edge); the new leaf is attached on that edge. The root of the
/// output is the first branch point.
Tree alpha_theta_grow(double alpha, double theta, int n, Rng& rng);

/// approx_continuum_tree with a prebuilt law; n >= q.n0().
EdgeTree approx_continuum_tree(const PropexempleLaw& q, int n, Rng& rng);

}  // namespace branchlab
