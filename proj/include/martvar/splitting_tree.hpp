#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "martvar/certificate.hpp"
#include "martvar/common.hpp"
#include "martvar/distribution.hpp"

namespace martvar {

/// Finite-depth martingale of probabilities, stored as a splitting tree: each
/// node holds a distribution and splits into weighted children whose weighted
/// average reproduces the parent (Bayes consistency). All leaves sit at the
/// same depth k; a root-only tree has depth 0.
///
/// Nodes are immutable and shared, so a tree may physically be a DAG whose
/// unfolding is the mathematical tree (recombining random walks, repeated
/// subtrees). All operations are defined on that unfolding.
///
/// Besides plain explicit nodes there are two composite node kinds, produced
/// by concat when materializing the product tree would be too large:
///
///  - SeriesNode{base, right, cont}: runs `base` tensored with the fixed
///    distribution `right` (= cont's root distribution), then below every
///    base leaf with marginal m continues into `cont` tensored with m on the
///    left.
///  - LeftTensorNode{left, base}: `base` with every node distribution
///    tensored with the fixed `left` factor.
///
/// Evaluators (variation, validate, depth) never unfold composites: they use
/// the identity l1(m (x) a, m (x) b) = l1(a, b) for a probability vector m,
/// which prob_core tests independently. node_edges/node_dist unfold on demand
/// so sampling and serialization see the plain tree semantics.
class SplittingTree {
 public:
  struct Node;
  using NodePtr = std::shared_ptr<const Node>;

  struct Edge {
    double weight;
    NodePtr child;
  };

  struct ExplicitNode {
    Distribution dist;
    std::vector<Edge> children;
  };
  struct SeriesNode {
    NodePtr base;
    Distribution right;
    NodePtr cont;
  };
  struct LeftTensorNode {
    Distribution left;
    NodePtr base;
  };
  using NodeData = std::variant<ExplicitNode, SeriesNode, LeftTensorNode>;

  struct Node {
    NodeData data;
  };

  explicit SplittingTree(NodePtr root);

  static NodePtr leaf(Distribution dist);
  static NodePtr node(Distribution dist, std::vector<Edge> children);

  const NodePtr& root() const { return root_; }
  int depth() const { return depth_; }
  Distribution root_dist() const;

 private:
  NodePtr root_;
  int depth_;
};

/// Distribution at a node (materializes tensor products for composite nodes).
Distribution node_dist(const SplittingTree::NodePtr& n);

/// Children of a node in unfolded-tree semantics. For composite nodes the
/// returned children are freshly wrapped views; do not key caches on their
/// addresses.
std::vector<SplittingTree::Edge> node_edges(const SplittingTree::NodePtr& n);

bool node_is_leaf(const SplittingTree::NodePtr& n);

struct TreeViolation {
  std::string path;
  std::string message;
};

/// Structural checks: weights in (0,1] summing to 1 (1e-12), per-coordinate
/// Bayes consistency (1e-9), one label set per tree, all leaves at equal
/// depth. Returns every violation found; empty means valid.
std::vector<TreeViolation> validate(const SplittingTree& t);

/// Expected total L1 variation: sum over edges of
/// (path probability) * weight * l1(child, parent).
double variation(const SplittingTree& t);

struct MonteCarloResult {
  double mean;
  double std_error;
  long trials;
};

/// Seeded path sampling estimate of variation. Deterministic per seed.
MonteCarloResult variation_monte_carlo(const SplittingTree& t, long trials, std::uint64_t seed);

/// Sequential composition on the product support: run `first`, then from each
/// leaf run `second` scaled by the reached marginal. Depth adds; variation
/// adds. Chooses the explicit or composite representation by size.
SplittingTree concat(const SplittingTree& first, const SplittingTree& second);

/// Representation-forced variants of concat (the semantics are identical;
/// these exist so tests can compare the two evaluation paths).
SplittingTree concat_explicit(const SplittingTree& first, const SplittingTree& second);
SplittingTree concat_lazy(const SplittingTree& first, const SplittingTree& second);

/// Extends a fully explicit tree to depth k with trivial splittings at the
/// leaves.
SplittingTree pad_to_depth(const SplittingTree& t, int k);

/// Rebuilds any tree as plain explicit nodes. Throws SizeError past the node
/// budget.
SplittingTree to_explicit(const SplittingTree& t, std::size_t node_budget = 1u << 20);

// Closed-form upper bounds on the variation of any depth-k martingale with
// root distribution p on d labels.
double bound_entropy(int k, const Distribution& p);     // sqrt(2 k H(p))
double bound_logd(int k, std::size_t d);                // sqrt(2 k ln d)
double bound_classical(int k, std::size_t d);           // sqrt(k (d-1))
double bound_trivial(int k);                            // 2 k
double bound_per_coordinate(int k, const Distribution& p);

/// Evaluates variation(t) against all five bounds.
std::vector<BoundCertificate> certify(const SplittingTree& t);

/// Nested JSON {"dist": ..., "children": [{"w": ..., "node": ...}]}. Encodes
/// the unfolded tree; throws SizeError past the node budget.
nlohmann::json tree_to_json(const SplittingTree& t, std::size_t node_budget = 1u << 20);
SplittingTree tree_from_json(const nlohmann::json& j);

/// Random valid tree for property tests: at each node, probability 1/2 of a
/// trivial split, otherwise 2 or 3 children with Dirichlet weights and
/// posteriors solved to keep Bayes consistency exact (rejection-sampled so
/// every posterior stays in the simplex).
SplittingTree random_tree(Rng& rng, std::size_t support, int depth);

}  // namespace martvar
