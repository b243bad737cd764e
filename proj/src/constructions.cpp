#include "martvar/constructions.hpp"

#include <bit>
#include <cmath>
#include <functional>
#include <map>
#include <utility>

namespace martvar {

namespace {
using NodePtr = SplittingTree::NodePtr;
using Edge = SplittingTree::Edge;
}  // namespace

SplittingTree doubling_martingale(int ell) {
  if (ell < 1 || ell > 24)
    throw SizeError("doubling_martingale: ell must be in [1,24] (support is 2^ell)");
  const std::size_t m = std::size_t{1} << ell;
  LabelSet labels(m);
  for (std::size_t i = 0; i < m; ++i) labels[i] = std::to_string(i);
  auto shared = std::make_shared<const LabelSet>(std::move(labels));

  // Node whose support is the half-open label interval [lo, lo+len); len is a
  // power of two so every probability 1/len is exact.
  std::function<NodePtr(std::size_t, std::size_t)> build = [&](std::size_t lo,
                                                               std::size_t len) -> NodePtr {
    std::vector<double> probs(m, 0.0);
    const double mass = 1.0 / static_cast<double>(len);
    for (std::size_t i = lo; i < lo + len; ++i) probs[i] = mass;
    Distribution dist(shared, std::move(probs));
    if (len == 1) return SplittingTree::leaf(std::move(dist));
    std::vector<Edge> children{{0.5, build(lo, len / 2)}, {0.5, build(lo + len / 2, len / 2)}};
    return SplittingTree::node(std::move(dist), std::move(children));
  };
  return SplittingTree(build(0, m));
}

namespace {

// Snap a walk state to the 1e-12 lattice. Equal real values reached along
// different floating-point paths collapse to one canonical double, which is
// what makes the walk DAG recombine; the Bayes residual this introduces is
// below 1e-12, well inside the 1e-9 validation tolerance.
double snap_state(double v) {
  double s = std::nearbyint(v * 1e12) / 1e12;
  if (s < 0.0) s = 0.0;
  if (s > 1.0) s = 1.0;
  return s;
}

constexpr std::size_t kWalkNodeBudget = 4000000;

}  // namespace

SplittingTree binary_walk(int k, double p0, double delta) {
  if (k < 1) throw std::invalid_argument("binary_walk: k must be >= 1");
  if (!(p0 > 0.0 && p0 < 1.0)) throw std::invalid_argument("binary_walk: p0 must be in (0,1)");
  if (!(delta > 0.0 && delta <= 1.0))
    throw std::invalid_argument("binary_walk: delta must be in (0,1]");

  auto labels = std::make_shared<const LabelSet>(LabelSet{"0", "1"});
  std::map<std::pair<int, long long>, NodePtr> memo;

  std::function<NodePtr(int, double)> build = [&](int t, double v) -> NodePtr {
    const std::pair<int, long long> key{t, std::llround(v * 1e12)};
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    if (memo.size() >= kWalkNodeBudget) throw SizeError("binary_walk: node budget exceeded");

    Distribution dist(labels, {v, 1.0 - v});
    NodePtr built;
    if (t == k) {
      built = SplittingTree::leaf(std::move(dist));
    } else {
      const double step = std::min({delta, v, 1.0 - v});
      if (step <= 0.0) {
        built = SplittingTree::node(std::move(dist), {{1.0, build(t + 1, v)}});
      } else {
        built = SplittingTree::node(std::move(dist), {{0.5, build(t + 1, snap_state(v - step))},
                                                      {0.5, build(t + 1, snap_state(v + step))}});
      }
    }
    memo.emplace(key, built);
    return built;
  };
  return SplittingTree(build(0, snap_state(p0)));
}

SplittingTree variation_witness(int k, std::size_t d) {
  if (k < 1) throw std::invalid_argument("variation_witness: k must be >= 1");
  if (d < 2) throw std::domain_error("variation_witness: d must be >= 2");
  if (k < 63 && d > (std::size_t{1} << k))
    throw std::domain_error("variation_witness: d exceeds 2^k");

  const int ell = std::bit_width(d) - 1;  // floor(log2 d) >= 1
  if (k < 2 * ell) return pad_to_depth(doubling_martingale(ell), k);

  const int m = k / ell;        // walk length per factor
  const int k1 = m * ell;       // largest multiple of ell <= k; k1 > k/2 here
  const double delta = 1.0 / std::sqrt(static_cast<double>(m));
  const SplittingTree walk = binary_walk(m, 0.5, delta);
  const SplittingTree last =
      (k > k1) ? pad_to_depth(walk, m + (k - k1)) : walk;

  if (ell == 1) return last;
  SplittingTree tree = walk;
  for (int b = 2; b <= ell; ++b) tree = concat(tree, b == ell ? last : walk);
  return tree;
}

}  // namespace martvar
