#include "martvar/maxvar.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <stdexcept>
#include <utility>
#include <vector>

namespace martvar {

namespace {

constexpr int kMaxStages = 2000;
constexpr std::size_t kWitnessNodeBudget = 2000000;

int grid_points_for(double h) {
  if (h == 1e-2) return 101;
  if (h == 1e-3) return 1001;
  if (h == 5e-4) return 2001;
  throw ConfigError("maxvar: unsupported grid step (use 1e-2, 1e-3 or 5e-4)");
}

std::vector<double> make_grid(int n, double h) {
  std::vector<double> g(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = i * h;
  g.front() = 0.0;
  g.back() = 1.0;
  return g;
}

// One DP stage evaluated at a single grid index.  Builds
//   f(iq) = 2 h |iq - ip| + prev[iq]
// over the whole grid, takes its upper hull (integer abscissae keep the
// orientation test well scaled) and reads the hull off at ip.  The
// supporting vertex pair is reported through sa/sb; sa == sb == ip when
// f itself is on the envelope there.
struct StageEnvelope {
  std::vector<double> f;
  std::vector<int> hull;

  double eval(const std::vector<double>& prev, double h, int ip, int* sa, int* sb) {
    const int n = static_cast<int>(prev.size());
    f.resize(prev.size());
    for (int iq = 0; iq < n; ++iq)
      f[static_cast<std::size_t>(iq)] =
          2.0 * h * std::abs(iq - ip) + prev[static_cast<std::size_t>(iq)];

    hull.clear();
    for (int i = 0; i < n; ++i) {
      while (hull.size() >= 2) {
        const int a = hull[hull.size() - 2];
        const int b = hull.back();
        const double cross = static_cast<double>(b - a) *
                                 (f[static_cast<std::size_t>(i)] - f[static_cast<std::size_t>(a)]) -
                             (f[static_cast<std::size_t>(b)] - f[static_cast<std::size_t>(a)]) *
                                 static_cast<double>(i - a);
        if (cross >= 0.0)
          hull.pop_back();
        else
          break;
      }
      hull.push_back(i);
    }

    auto it = std::upper_bound(hull.begin(), hull.end(), ip);
    const std::size_t j = static_cast<std::size_t>(it - hull.begin()) - 1;
    const int a = hull[j];
    if (a == ip || j + 1 == hull.size()) {
      if (sa) {
        *sa = a;
        *sb = a;
      }
      return f[static_cast<std::size_t>(a)];
    }
    const int b = hull[j + 1];
    const double t = static_cast<double>(ip - a) / static_cast<double>(b - a);
    if (sa) {
      *sa = a;
      *sb = b;
    }
    return f[static_cast<std::size_t>(a)] +
           t * (f[static_cast<std::size_t>(b)] - f[static_cast<std::size_t>(a)]);
  }
};

void check_stage_count(int k) {
  if (k < 0) throw ConfigError("maxvar: negative stage count");
  if (k > kMaxStages) throw SizeError("maxvar: stage count exceeds supported maximum");
}

}  // namespace

ValueTable maxvar_binary(int k, double h) {
  check_stage_count(k);
  const int n = grid_points_for(h);
  std::vector<double> grid = make_grid(n, h);
  std::vector<double> v(static_cast<std::size_t>(n), 0.0);
  std::vector<double> nv(static_cast<std::size_t>(n), 0.0);
  StageEnvelope env;
  for (int t = 1; t <= k; ++t) {
    for (int ip = 0; ip < n; ++ip)
      nv[static_cast<std::size_t>(ip)] = env.eval(v, h, ip, nullptr, nullptr);
    std::swap(v, nv);
  }
  return ValueTable(std::move(grid), std::move(v));
}

double maxvar_ratio(int k, double h) {
  if (k < 1) throw ConfigError("maxvar_ratio: need at least one stage");
  return maxvar_binary(k, h).at(0.5) / std::sqrt(static_cast<double>(k));
}

MaxvarWitness witness_tree(int k, double p, double h) {
  check_stage_count(k);
  if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("witness_tree: prior outside [0, 1]");
  const int n = grid_points_for(h);
  const std::vector<double> grid = make_grid(n, h);

  int ip0 = static_cast<int>(std::llround(p / h));
  ip0 = std::clamp(ip0, 0, n - 1);
  const bool snapped = std::abs(p - grid[static_cast<std::size_t>(ip0)]) > 1e-12;

  // all stage tables are needed to walk the optimal splits back down
  std::vector<std::vector<double>> tab(static_cast<std::size_t>(k) + 1);
  tab[0].assign(static_cast<std::size_t>(n), 0.0);
  StageEnvelope env;
  for (int t = 1; t <= k; ++t) {
    tab[static_cast<std::size_t>(t)].resize(static_cast<std::size_t>(n));
    for (int ip = 0; ip < n; ++ip)
      tab[static_cast<std::size_t>(t)][static_cast<std::size_t>(ip)] =
          env.eval(tab[static_cast<std::size_t>(t) - 1], h, ip, nullptr, nullptr);
  }

  auto labels = std::make_shared<const LabelSet>(LabelSet{"x1", "x2"});
  auto dist_at = [&](int iq) {
    const double q = grid[static_cast<std::size_t>(iq)];
    return Distribution(labels, {q, 1.0 - q});
  };

  std::map<std::pair<int, int>, SplittingTree::NodePtr> memo;
  std::size_t built = 0;
  std::function<SplittingTree::NodePtr(int, int)> build = [&](int t,
                                                              int iq) -> SplittingTree::NodePtr {
    const auto key = std::make_pair(t, iq);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    if (++built > kWitnessNodeBudget)
      throw SizeError("witness_tree: node budget exceeded");

    SplittingTree::NodePtr made;
    if (t == 0) {
      made = SplittingTree::leaf(dist_at(iq));
    } else {
      int a = 0;
      int b = 0;
      env.eval(tab[static_cast<std::size_t>(t) - 1], h, iq, &a, &b);
      std::vector<SplittingTree::Edge> edges;
      if (a == b) {
        edges.push_back({1.0, build(t - 1, a)});
      } else {
        const double wa = static_cast<double>(b - iq) / static_cast<double>(b - a);
        const double wb = static_cast<double>(iq - a) / static_cast<double>(b - a);
        edges.push_back({wa, build(t - 1, a)});
        edges.push_back({wb, build(t - 1, b)});
      }
      made = SplittingTree::node(dist_at(iq), std::move(edges));
    }
    memo.emplace(key, made);
    return made;
  };

  SplittingTree tree(build(k, ip0));
  return MaxvarWitness{std::move(tree), grid[static_cast<std::size_t>(ip0)], snapped,
                       tab[static_cast<std::size_t>(k)][static_cast<std::size_t>(ip0)]};
}

}  // namespace martvar
