#include "martvar/splitting_tree.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <functional>
#include <unordered_map>
#include <unordered_set>
#include <utility>

namespace martvar {

namespace {

using Node = SplittingTree::Node;
using NodePtr = SplittingTree::NodePtr;
using Edge = SplittingTree::Edge;
using ExplicitNode = SplittingTree::ExplicitNode;
using SeriesNode = SplittingTree::SeriesNode;
using LeftTensorNode = SplittingTree::LeftTensorNode;

// Evaluation state for composite trees: the node being walked plus the stack
// of pending continuation roots (innermost first). Two equal keys denote
// identical unfolded subtrees up to a fixed tensor factor, which neither
// variation nor depth depends on.
struct ChainKey {
  const Node* head;
  std::vector<const Node*> conts;
  bool operator==(const ChainKey& o) const { return head == o.head && conts == o.conts; }
};

struct ChainKeyHash {
  std::size_t operator()(const ChainKey& k) const {
    std::size_t h = std::hash<const void*>()(k.head);
    for (const Node* p : k.conts) h = h * 1000003u ^ std::hash<const void*>()(p);
    return h;
  }
};

double l1_probs(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return s;
}

// L1 distance between the unfolded distributions of two nodes, reduced
// structurally: shared tensor factors cancel, so factor-level distances equal
// unfolded distances.
double edge_l1(const Node* a, const Node* b);

double edge_l1_fallback(const Node* a, const Node* b);

double edge_l1(const Node* a, const Node* b) {
  const auto* ea = std::get_if<ExplicitNode>(&a->data);
  const auto* eb = std::get_if<ExplicitNode>(&b->data);
  if (ea && eb) return l1_probs(ea->dist.probs(), eb->dist.probs());
  const auto* sa = std::get_if<SeriesNode>(&a->data);
  const auto* sb = std::get_if<SeriesNode>(&b->data);
  if (sa && sb && sa->cont == sb->cont) return edge_l1(sa->base.get(), sb->base.get());
  return edge_l1_fallback(a, b);
}

class VariationEval {
 public:
  double run(const NodePtr& root) { return below(root.get(), {}); }

 private:
  double below(const Node* n, std::vector<const Node*> conts) {
    ChainKey key{n, std::move(conts)};
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;

    double result = 0.0;
    if (const auto* e = std::get_if<ExplicitNode>(&n->data)) {
      if (e->children.empty()) {
        if (!key.conts.empty()) {
          std::vector<const Node*> rest(key.conts.begin() + 1, key.conts.end());
          result = below(key.conts.front(), std::move(rest));
        }
      } else {
        for (const Edge& ed : e->children) {
          result +=
              ed.weight * (edge_l1(ed.child.get(), n) + below(ed.child.get(), key.conts));
        }
      }
    } else if (const auto* s = std::get_if<SeriesNode>(&n->data)) {
      std::vector<const Node*> chain;
      chain.reserve(key.conts.size() + 1);
      chain.push_back(s->cont.get());
      chain.insert(chain.end(), key.conts.begin(), key.conts.end());
      result = below(s->base.get(), std::move(chain));
    } else {
      const auto& lt = std::get<LeftTensorNode>(n->data);
      result = below(lt.base.get(), key.conts);
    }
    memo_.emplace(std::move(key), result);
    return result;
  }

  std::unordered_map<ChainKey, double, ChainKeyHash> memo_;
};

class DepthEval {
 public:
  int run(const NodePtr& root) { return below(root.get(), {}); }

 private:
  int below(const Node* n, std::vector<const Node*> conts) {
    ChainKey key{n, std::move(conts)};
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;

    int result = 0;
    if (const auto* e = std::get_if<ExplicitNode>(&n->data)) {
      if (e->children.empty()) {
        if (!key.conts.empty()) {
          std::vector<const Node*> rest(key.conts.begin() + 1, key.conts.end());
          result = below(key.conts.front(), std::move(rest));
        }
      } else {
        result = 1 + below(e->children.front().child.get(), key.conts);
      }
    } else if (const auto* s = std::get_if<SeriesNode>(&n->data)) {
      std::vector<const Node*> chain;
      chain.reserve(key.conts.size() + 1);
      chain.push_back(s->cont.get());
      chain.insert(chain.end(), key.conts.begin(), key.conts.end());
      result = below(s->base.get(), std::move(chain));
    } else {
      const auto& lt = std::get<LeftTensorNode>(n->data);
      result = below(lt.base.get(), key.conts);
    }
    memo_.emplace(std::move(key), result);
    return result;
  }

  std::unordered_map<ChainKey, int, ChainKeyHash> memo_;
};

class Validator {
 public:
  std::vector<TreeViolation> run(const NodePtr& root) {
    visit(root.get(), "root");
    return std::move(violations_);
  }

 private:
  void report(const std::string& path, std::string message) {
    violations_.push_back({path, std::move(message)});
  }

  // Depth of the unfolded subtree under a node, treating composite factors
  // structurally. Unequal child depths are reported once per node.
  int depth_of(const Node* n) {
    auto it = depth_.find(n);
    if (it != depth_.end()) return it->second;
    int d = 0;
    if (const auto* e = std::get_if<ExplicitNode>(&n->data)) {
      if (!e->children.empty()) d = 1 + depth_of(e->children.front().child.get());
    } else if (const auto* s = std::get_if<SeriesNode>(&n->data)) {
      d = depth_of(s->base.get()) + depth_of(s->cont.get());
    } else {
      d = depth_of(std::get<LeftTensorNode>(n->data).base.get());
    }
    depth_.emplace(n, d);
    return d;
  }

  void visit(const Node* n, const std::string& path) {
    if (!visited_.insert(n).second) return;

    if (const auto* e = std::get_if<ExplicitNode>(&n->data)) {
      if (e->children.empty()) return;
      double wsum = 0.0;
      for (std::size_t c = 0; c < e->children.size(); ++c) {
        double w = e->children[c].weight;
        if (!(w > 0.0) || w > 1.0 + kSumTolerance)
          report(path + "/" + std::to_string(c),
                 "branch weight " + format_double(w) + " outside (0,1]");
        wsum += w;
      }
      if (std::abs(wsum - 1.0) > kSumTolerance)
        report(path, "branch weights sum to " + format_double(wsum));

      // Bayes consistency and shared support, checked at this node's own
      // tensor level (composite wrappers preserve both properties).
      const std::size_t dim = e->dist.size();
      std::vector<double> mix(dim, 0.0);
      bool mixable = true;
      for (const Edge& ed : e->children) {
        const auto* ce = std::get_if<ExplicitNode>(&ed.child->data);
        if (ce == nullptr) {
          mixable = false;  // mixed-kind children: fall back to unfolded dists
          break;
        }
        if (!ce->dist.same_support(e->dist)) {
          report(path, "child label set differs from parent");
          mixable = false;
          break;
        }
        for (std::size_t i = 0; i < dim; ++i) mix[i] += ed.weight * ce->dist[i];
      }
      if (!mixable) {
        std::fill(mix.begin(), mix.end(), 0.0);
        Distribution pd = node_dist_of(n);
        for (const Edge& ed : e->children) {
          Distribution cd = node_dist_of(ed.child.get());
          if (!cd.same_support(pd)) {
            report(path, "child label set differs from parent");
            mix.clear();
            break;
          }
          for (std::size_t i = 0; i < dim; ++i) mix[i] += ed.weight * cd[i];
        }
      }
      if (mix.size() == dim) {
        double worst = 0.0;
        for (std::size_t i = 0; i < dim; ++i) worst = std::max(worst, std::abs(mix[i] - e->dist[i]));
        if (worst > kBayesTolerance)
          report(path, "Bayes consistency off by " + format_double(worst));
      }

      int d0 = depth_of(e->children.front().child.get());
      for (std::size_t c = 1; c < e->children.size(); ++c) {
        if (depth_of(e->children[c].child.get()) != d0) {
          report(path, "children reach leaves at different depths");
          break;
        }
      }
      for (std::size_t c = 0; c < e->children.size(); ++c)
        visit(e->children[c].child.get(), path + "/" + std::to_string(c));
    } else if (const auto* s = std::get_if<SeriesNode>(&n->data)) {
      Distribution contDist = node_dist_of(s->cont.get());
      if (contDist.size() != s->right.size() ||
          l1_probs(contDist.probs(), s->right.probs()) > 1e-12)
        report(path, "series seam: stored right factor differs from continuation root");
      visit(s->base.get(), path + "[series base]");
      visit(s->cont.get(), path + "[series cont]");
    } else {
      visit(std::get<LeftTensorNode>(n->data).base.get(), path + "[tensor base]");
    }
  }

  static Distribution node_dist_of(const Node* n);

  std::vector<TreeViolation> violations_;
  std::unordered_set<const Node*> visited_;
  std::unordered_map<const Node*, int> depth_;
};

NodePtr make_node(SplittingTree::NodeData data) {
  return std::make_shared<const Node>(Node{std::move(data)});
}

}  // namespace

// ---------------------------------------------------------------------------
// Node views

Distribution node_dist(const NodePtr& n) {
  if (const auto* e = std::get_if<ExplicitNode>(&n->data)) return e->dist;
  if (const auto* s = std::get_if<SeriesNode>(&n->data))
    return tensor(node_dist(s->base), s->right);
  const auto& lt = std::get<LeftTensorNode>(n->data);
  return tensor(lt.left, node_dist(lt.base));
}

namespace {
Distribution Validator::node_dist_of(const Node* n) {
  // Same reduction as the public node_dist, starting from a raw pointer.
  if (const auto* e = std::get_if<ExplicitNode>(&n->data)) return e->dist;
  if (const auto* s = std::get_if<SeriesNode>(&n->data))
    return tensor(node_dist_of(s->base.get()), s->right);
  const auto& lt = std::get<LeftTensorNode>(n->data);
  return tensor(lt.left, node_dist_of(lt.base.get()));
}

double edge_l1_fallback(const Node* a, const Node* b) {
  NodePtr pa(NodePtr{}, a);  // non-owning aliases for the public view helpers
  NodePtr pb(NodePtr{}, b);
  Distribution da = node_dist(pa);
  Distribution db = node_dist(pb);
  return l1_probs(da.probs(), db.probs());
}
}  // namespace

bool node_is_leaf(const NodePtr& n) {
  if (const auto* e = std::get_if<ExplicitNode>(&n->data)) return e->children.empty();
  if (const auto* s = std::get_if<SeriesNode>(&n->data))
    return node_is_leaf(s->base) && node_is_leaf(s->cont);
  return node_is_leaf(std::get<LeftTensorNode>(n->data).base);
}

std::vector<Edge> node_edges(const NodePtr& n) {
  if (const auto* e = std::get_if<ExplicitNode>(&n->data)) return e->children;
  if (const auto* s = std::get_if<SeriesNode>(&n->data)) {
    if (!node_is_leaf(s->base)) {
      std::vector<Edge> out;
      for (const Edge& ed : node_edges(s->base))
        out.push_back({ed.weight, make_node(SeriesNode{ed.child, s->right, s->cont})});
      return out;
    }
    // Seam: continue into cont, carrying the reached base marginal on the left.
    Distribution m = node_dist(s->base);
    std::vector<Edge> out;
    for (const Edge& ed : node_edges(s->cont))
      out.push_back({ed.weight, make_node(LeftTensorNode{m, ed.child})});
    return out;
  }
  const auto& lt = std::get<LeftTensorNode>(n->data);
  std::vector<Edge> out;
  for (const Edge& ed : node_edges(lt.base))
    out.push_back({ed.weight, make_node(LeftTensorNode{lt.left, ed.child})});
  return out;
}

// ---------------------------------------------------------------------------
// SplittingTree

SplittingTree::SplittingTree(NodePtr root) : root_(std::move(root)) {
  if (root_ == nullptr) throw std::invalid_argument("splitting tree: null root");
  depth_ = DepthEval().run(root_);
}

SplittingTree::NodePtr SplittingTree::leaf(Distribution dist) {
  return make_node(ExplicitNode{std::move(dist), {}});
}

SplittingTree::NodePtr SplittingTree::node(Distribution dist, std::vector<Edge> children) {
  return make_node(ExplicitNode{std::move(dist), std::move(children)});
}

Distribution SplittingTree::root_dist() const { return node_dist(root_); }

// ---------------------------------------------------------------------------
// Operations

std::vector<TreeViolation> validate(const SplittingTree& t) { return Validator().run(t.root()); }

double variation(const SplittingTree& t) { return VariationEval().run(t.root()); }

MonteCarloResult variation_monte_carlo(const SplittingTree& t, long trials, std::uint64_t seed) {
  if (trials < 1) throw ConfigError("variation_monte_carlo: trials must be >= 1");
  Rng rng(seed);
  double mean = 0.0, m2 = 0.0;
  for (long i = 0; i < trials; ++i) {
    NodePtr cur = t.root();
    Distribution curDist = node_dist(cur);
    double total = 0.0;
    while (!node_is_leaf(cur)) {
      std::vector<Edge> edges = node_edges(cur);
      double u = rng.uniform();
      double acc = 0.0;
      std::size_t pick = edges.size() - 1;
      for (std::size_t c = 0; c < edges.size(); ++c) {
        acc += edges[c].weight;
        if (u < acc) {
          pick = c;
          break;
        }
      }
      Distribution nextDist = node_dist(edges[pick].child);
      total += l1_distance(nextDist, curDist);
      cur = edges[pick].child;
      curDist = std::move(nextDist);
    }
    double delta = total - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta * (total - mean);
  }
  double stderr_ = 0.0;
  if (trials > 1) {
    double var = m2 / static_cast<double>(trials - 1);
    stderr_ = std::sqrt(std::max(0.0, var) / static_cast<double>(trials));
  }
  return {mean, stderr_, trials};
}

namespace {

// DAG statistics of a fully explicit tree; nullopt-like flag when any
// composite node is reachable.
struct DagStats {
  bool fully_explicit = true;
  std::size_t nodes = 0;
  std::size_t distinct_leaf_dists = 0;
  std::size_t dim = 0;
};

DagStats dag_stats(const NodePtr& root) {
  DagStats st;
  std::vector<const Node*> stack{root.get()};
  std::unordered_set<const Node*> seen{root.get()};
  std::unordered_set<std::string> leaf_keys;
  while (!stack.empty()) {
    const Node* n = stack.back();
    stack.pop_back();
    const auto* e = std::get_if<ExplicitNode>(&n->data);
    if (e == nullptr) {
      st.fully_explicit = false;
      return st;
    }
    st.nodes++;
    st.dim = e->dist.size();
    if (e->children.empty()) {
      const auto& probs = e->dist.probs();
      leaf_keys.emplace(reinterpret_cast<const char*>(probs.data()),
                        probs.size() * sizeof(double));
    }
    for (const Edge& ed : e->children)
      if (seen.insert(ed.child.get()).second) stack.push_back(ed.child.get());
  }
  st.distinct_leaf_dists = leaf_keys.size();
  return st;
}

constexpr std::size_t kExplicitConcatNodeBudget = 200000;
constexpr std::size_t kExplicitConcatDoubleBudget = 1u << 23;  // ~64 MB of probabilities

}  // namespace

SplittingTree concat_lazy(const SplittingTree& first, const SplittingTree& second) {
  return SplittingTree(
      make_node(SeriesNode{first.root(), second.root_dist(), second.root()}));
}

SplittingTree concat_explicit(const SplittingTree& first, const SplittingTree& second) {
  const Distribution q0 = second.root_dist();

  // One shared product label set; per-node label strings would dominate the
  // build otherwise.
  const LabelSetPtr productLabels = tensor(first.root_dist(), q0).labels_ptr();
  auto prod = [&](const Distribution& a, const Distribution& b) {
    std::vector<double> probs;
    probs.reserve(a.size() * b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t j = 0; j < b.size(); ++j) probs.push_back(a[i] * b[j]);
    return Distribution(productLabels, std::move(probs));
  };

  // One rebuilt copy of `second` per distinct first-leaf marginal, shared by
  // probability bytes so recombining trees stay compact.
  std::unordered_map<std::string, std::unordered_map<const Node*, NodePtr>> secondCopies;

  auto leaf_key = [](const Distribution& d) {
    const auto& probs = d.probs();
    return std::string(reinterpret_cast<const char*>(probs.data()),
                       probs.size() * sizeof(double));
  };

  std::function<NodePtr(const Distribution&, std::unordered_map<const Node*, NodePtr>&,
                        const NodePtr&)>
      buildSecond = [&](const Distribution& m, std::unordered_map<const Node*, NodePtr>& memo,
                        const NodePtr& bn) -> NodePtr {
    auto it = memo.find(bn.get());
    if (it != memo.end()) return it->second;
    Distribution d = prod(m, node_dist(bn));
    std::vector<Edge> children;
    for (const Edge& ed : node_edges(bn))
      children.push_back({ed.weight, buildSecond(m, memo, ed.child)});
    NodePtr built = SplittingTree::node(std::move(d), std::move(children));
    memo.emplace(bn.get(), built);
    return built;
  };

  std::unordered_map<const Node*, NodePtr> firstMemo;
  std::function<NodePtr(const NodePtr&)> buildFirst = [&](const NodePtr& an) -> NodePtr {
    auto it = firstMemo.find(an.get());
    if (it != firstMemo.end()) return it->second;
    Distribution m = node_dist(an);
    NodePtr built;
    if (node_is_leaf(an)) {
      auto& memo = secondCopies[leaf_key(m)];
      std::vector<Edge> children;
      for (const Edge& ed : node_edges(second.root()))
        children.push_back({ed.weight, buildSecond(m, memo, ed.child)});
      built = SplittingTree::node(prod(m, q0), std::move(children));
    } else {
      std::vector<Edge> children;
      for (const Edge& ed : node_edges(an)) children.push_back({ed.weight, buildFirst(ed.child)});
      built = SplittingTree::node(prod(m, q0), std::move(children));
    }
    firstMemo.emplace(an.get(), built);
    return built;
  };

  return SplittingTree(buildFirst(first.root()));
}

SplittingTree concat(const SplittingTree& first, const SplittingTree& second) {
  DagStats a = dag_stats(first.root());
  DagStats b = dag_stats(second.root());
  if (a.fully_explicit && b.fully_explicit) {
    std::size_t nodes = a.nodes + a.distinct_leaf_dists * b.nodes;
    std::size_t dim = a.dim * b.dim;
    if (nodes <= kExplicitConcatNodeBudget && nodes * dim <= kExplicitConcatDoubleBudget)
      return concat_explicit(first, second);
  }
  return concat_lazy(first, second);
}

SplittingTree pad_to_depth(const SplittingTree& t, int k) {
  if (k < t.depth()) throw std::invalid_argument("pad_to_depth: k below current depth");
  if (k == t.depth()) return t;
  DagStats st = dag_stats(t.root());
  if (!st.fully_explicit)
    throw std::logic_error("pad_to_depth: composite trees are padded factor-wise before concat");
  int extra = k - t.depth();
  std::unordered_map<const Node*, NodePtr> memo;
  std::function<NodePtr(const NodePtr&)> build = [&](const NodePtr& n) -> NodePtr {
    auto it = memo.find(n.get());
    if (it != memo.end()) return it->second;
    const auto& e = std::get<ExplicitNode>(n->data);
    NodePtr built;
    if (e.children.empty()) {
      built = SplittingTree::leaf(e.dist);
      for (int i = 0; i < extra; ++i)
        built = SplittingTree::node(e.dist, {{1.0, built}});
    } else {
      std::vector<Edge> children;
      for (const Edge& ed : e.children) children.push_back({ed.weight, build(ed.child)});
      built = SplittingTree::node(e.dist, std::move(children));
    }
    memo.emplace(n.get(), built);
    return built;
  };
  return SplittingTree(build(t.root()));
}

SplittingTree to_explicit(const SplittingTree& t, std::size_t node_budget) {
  std::size_t count = 0;
  std::unordered_map<const Node*, NodePtr> memo;
  std::function<NodePtr(const NodePtr&)> build = [&](const NodePtr& n) -> NodePtr {
    auto it = memo.find(n.get());
    if (it != memo.end()) return it->second;
    if (++count > node_budget) throw SizeError("to_explicit: node budget exceeded");
    std::vector<Edge> children;
    for (const Edge& ed : node_edges(n)) children.push_back({ed.weight, build(ed.child)});
    NodePtr built = SplittingTree::node(node_dist(n), std::move(children));
    memo.emplace(n.get(), built);
    return built;
  };
  return SplittingTree(build(t.root()));
}

// ---------------------------------------------------------------------------
// Bounds and certificates

double bound_entropy(int k, const Distribution& p) {
  if (k < 0) throw std::invalid_argument("bound_entropy: negative depth");
  return std::sqrt(2.0 * k * entropy(p));
}

double bound_logd(int k, std::size_t d) {
  if (k < 0 || d == 0) throw std::invalid_argument("bound_logd: bad arguments");
  return std::sqrt(2.0 * k * std::log(static_cast<double>(d)));
}

double bound_classical(int k, std::size_t d) {
  if (k < 0 || d == 0) throw std::invalid_argument("bound_classical: bad arguments");
  return std::sqrt(static_cast<double>(k) * (static_cast<double>(d) - 1.0));
}

double bound_trivial(int k) {
  if (k < 0) throw std::invalid_argument("bound_trivial: negative depth");
  return 2.0 * k;
}

double bound_per_coordinate(int k, const Distribution& p) {
  if (k < 0) throw std::invalid_argument("bound_per_coordinate: negative depth");
  double s = 0.0;
  for (double v : p.probs()) s += std::sqrt(static_cast<double>(k) * v * (1.0 - v));
  return s;
}

std::vector<BoundCertificate> certify(const SplittingTree& t) {
  const int k = t.depth();
  const Distribution p = t.root_dist();
  const double v = variation(t);
  return {
      BoundCertificate::make("entropy_bound", v, bound_entropy(k, p)),
      BoundCertificate::make("logd_bound", v, bound_logd(k, p.size())),
      BoundCertificate::make("classical_bound", v, bound_classical(k, p.size())),
      BoundCertificate::make("trivial_bound", v, bound_trivial(k)),
      BoundCertificate::make("per_coordinate_bound", v, bound_per_coordinate(k, p)),
  };
}

// ---------------------------------------------------------------------------
// Serialization

namespace {
nlohmann::json node_to_json(const NodePtr& n, std::size_t& budget) {
  if (budget == 0) throw SizeError("tree_to_json: node budget exceeded");
  --budget;
  nlohmann::json j;
  j["dist"] = node_dist(n).to_json();
  nlohmann::json children = nlohmann::json::array();
  for (const Edge& ed : node_edges(n))
    children.push_back({{"w", ed.weight}, {"node", node_to_json(ed.child, budget)}});
  j["children"] = std::move(children);
  return j;
}

NodePtr node_from_json(const nlohmann::json& j) {
  Distribution dist = Distribution::from_json(j.at("dist"));
  std::vector<Edge> children;
  for (const auto& c : j.at("children"))
    children.push_back({c.at("w").get<double>(), node_from_json(c.at("node"))});
  return SplittingTree::node(std::move(dist), std::move(children));
}
}  // namespace

nlohmann::json tree_to_json(const SplittingTree& t, std::size_t node_budget) {
  std::size_t budget = node_budget;
  return node_to_json(t.root(), budget);
}

SplittingTree tree_from_json(const nlohmann::json& j) {
  return SplittingTree(node_from_json(j));
}

// ---------------------------------------------------------------------------
// Random trees

namespace {

// Point on the segment from p toward a random simplex vertex mixture; always
// a valid distribution.
std::vector<double> segment_sample(Rng& rng, const std::vector<double>& p) {
  std::vector<double> u = rng.dirichlet(p.size());
  double tshift = rng.uniform();
  std::vector<double> q(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) q[i] = p[i] + tshift * (u[i] - p[i]);
  return q;
}

NodePtr random_subtree(Rng& rng, const LabelSetPtr& labels, const std::vector<double>& probs,
                       int remaining) {
  Distribution dist(labels, probs);
  if (remaining == 0) return SplittingTree::leaf(std::move(dist));

  auto trivial = [&]() {
    return SplittingTree::node(dist,
                               {{1.0, random_subtree(rng, labels, probs, remaining - 1)}});
  };
  if (rng.uniform() < 0.5) return trivial();

  const std::size_t m = 2 + rng.uniform_index(2);  // 2 or 3 children
  const std::size_t d = probs.size();
  for (int attempt = 0; attempt < 50; ++attempt) {
    std::vector<double> w = rng.dirichlet(m);
    bool wok = true;
    for (double& wi : w) {
      wi = std::max(wi, 0.02);
      if (!(wi > 0.0)) wok = false;
    }
    if (!wok) continue;
    double wsum = stable_sum(w);
    for (double& wi : w) wi /= wsum;

    // Sample the first m-1 posteriors freely, solve the last one from the
    // Bayes identity, reject if it leaves the simplex.
    std::vector<std::vector<double>> qs;
    for (std::size_t c = 0; c + 1 < m; ++c) qs.push_back(segment_sample(rng, probs));
    std::vector<double> last(d);
    bool ok = true;
    for (std::size_t i = 0; i < d; ++i) {
      double rest = probs[i];
      for (std::size_t c = 0; c + 1 < m; ++c) rest -= w[c] * qs[c][i];
      double v = rest / w[m - 1];
      if (v < -1e-15) {
        ok = false;
        break;
      }
      last[i] = std::max(v, 0.0);
    }
    if (!ok) continue;
    qs.push_back(std::move(last));

    std::vector<Edge> children;
    for (std::size_t c = 0; c < m; ++c)
      children.push_back({w[c], random_subtree(rng, labels, qs[c], remaining - 1)});
    return SplittingTree::node(std::move(dist), std::move(children));
  }
  return trivial();
}

}  // namespace

SplittingTree random_tree(Rng& rng, std::size_t support, int depth) {
  if (support == 0 || depth < 0) throw std::invalid_argument("random_tree: bad arguments");
  LabelSet labels(support);
  for (std::size_t i = 0; i < support; ++i) labels[i] = std::to_string(i);
  auto shared = std::make_shared<const LabelSet>(std::move(labels));
  std::vector<double> root = rng.dirichlet(support);
  return SplittingTree(random_subtree(rng, shared, root, depth));
}

}  // namespace martvar
