#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "martvar/common.hpp"
#include "martvar/maxvar.hpp"
#include "martvar/splitting_tree.hpp"
#include "martvar/value_table.hpp"

using namespace martvar;

namespace {

// independent oracle: one DP stage evaluated by brute force over all grid
// posterior pairs a <= p <= b (the concave envelope of f at p is the best
// chord value, a = b = p giving f itself)
std::vector<double> brute_force_stage(const std::vector<double>& grid,
                                      const std::vector<double>& prev) {
  const std::size_t n = grid.size();
  std::vector<double> out(n, 0.0);
  auto f = [&](std::size_t iq, std::size_t ip) {
    return 2.0 * std::abs(grid[iq] - grid[ip]) + prev[iq];
  };
  for (std::size_t ip = 0; ip < n; ++ip) {
    double best = f(ip, ip);
    for (std::size_t a = 0; a <= ip; ++a)
      for (std::size_t b = ip; b < n; ++b) {
        if (a == b) continue;
        const double w = (grid[b] - grid[ip]) / (grid[b] - grid[a]);
        best = std::max(best, w * f(a, ip) + (1.0 - w) * f(b, ip));
      }
    out[ip] = best;
  }
  return out;
}

std::vector<double> make_grid(double h) {
  const int n = static_cast<int>(std::lround(1.0 / h));
  std::vector<double> g(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) g[static_cast<std::size_t>(i)] = static_cast<double>(i) * h;
  g.front() = 0.0;
  g.back() = 1.0;
  return g;
}

}  // namespace

TEST_CASE("value table lookup") {
  ValueTable t({0.0, 0.5, 1.0}, {0.0, 1.0, 0.0});
  CHECK(t.at(0.25) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(t.at(0.5) == 1.0);
  CHECK(t.at(-1.0) == 0.0);   // clamps
  CHECK(t.at(2.0) == 0.0);
  CHECK_THROWS_AS(ValueTable({0.5, 0.5}, {0.0, 0.0}), std::domain_error);
  CHECK_THROWS_AS(ValueTable({0.0}, {1.0, 2.0}), std::domain_error);
}

TEST_CASE("concave envelope properties") {
  const std::vector<double> xs = {0.0, 0.25, 0.5, 0.75, 1.0};

  SUBCASE("convex data snaps to the endpoint chord") {
    std::vector<double> ys;
    for (double x : xs) ys.push_back(x * x);
    ValueTable env = concave_envelope(xs, ys);
    for (std::size_t i = 0; i < xs.size(); ++i)
      CHECK(env.values[i] == doctest::Approx(xs[i]).epsilon(1e-14));  // chord of x^2 on [0,1]
  }

  SUBCASE("interior dip is bridged") {
    ValueTable env = concave_envelope({0.0, 1.0, 2.0}, {0.0, -1.0, 0.0});
    CHECK(env.values[1] == doctest::Approx(0.0).epsilon(1e-14));
  }

  SUBCASE("concave data is a fixed point") {
    std::vector<double> ys;
    for (double x : xs) ys.push_back(x * (1.0 - x));
    ValueTable env = concave_envelope(xs, ys);
    for (std::size_t i = 0; i < xs.size(); ++i)
      CHECK(env.values[i] == doctest::Approx(ys[i]).epsilon(1e-14));
  }

  SUBCASE("random data: dominates input, concave, idempotent") {
    Rng rng(5);
    for (int it = 0; it < 200; ++it) {
      const std::size_t n = 3 + rng.uniform_index(30);
      std::vector<double> gx(n), gy(n);
      for (std::size_t i = 0; i < n; ++i) {
        gx[i] = static_cast<double>(i);
        gy[i] = rng.uniform(-5.0, 5.0);
      }
      ValueTable env = concave_envelope(gx, gy);
      for (std::size_t i = 0; i < n; ++i) CHECK(env.values[i] >= gy[i] - 1e-12);
      for (std::size_t i = 1; i + 1 < n; ++i)
        CHECK(env.values[i - 1] + env.values[i + 1] - 2.0 * env.values[i] <= 1e-9);
      ValueTable again = concave_envelope(gx, env.values);
      for (std::size_t i = 0; i < n; ++i)
        CHECK(again.values[i] == doctest::Approx(env.values[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("one stage from zero continuation is the parabola 4p(1-p)") {
  ValueTable t = maxvar_binary(1, 1e-2);
  for (std::size_t i = 0; i < t.xs.size(); ++i) {
    const double p = t.xs[i];
    CHECK(t.values[i] == doctest::Approx(4.0 * p * (1.0 - p)).epsilon(1e-12));
  }
  CHECK(maxvar_ratio(1, 1e-2) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("two stages at the center") {
  // optimal split of 1/2 goes to 1/4 and 3/4 (both on the grid):
  // 2*(1/4) + 4*(1/4)*(3/4) = 1.25 exactly
  CHECK(maxvar_binary(2, 1e-2).at(0.5) == doctest::Approx(1.25).epsilon(1e-12));
  CHECK(maxvar_binary(2, 1e-3).at(0.5) == doctest::Approx(1.25).epsilon(1e-12));
}

TEST_CASE("dp table matches the brute force oracle") {
  const std::vector<double> grid = make_grid(1e-2);
  std::vector<double> prev(grid.size(), 0.0);
  for (int k = 1; k <= 3; ++k) {
    prev = brute_force_stage(grid, prev);
    ValueTable dp = maxvar_binary(k, 1e-2);
    REQUIRE(dp.xs.size() == grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      CAPTURE(k);
      CAPTURE(grid[i]);
      CHECK(dp.values[i] == doctest::Approx(prev[i]).epsilon(1e-11));
    }
  }
}

TEST_CASE("three point splits never beat the table") {
  ValueTable v1 = maxvar_binary(1, 1e-2);
  ValueTable v2 = maxvar_binary(2, 1e-2);
  Rng rng(23);
  for (int it = 0; it < 500; ++it) {
    const std::size_t n = v1.xs.size();
    const std::size_t ip = 1 + rng.uniform_index(n - 2);
    const double p = v1.xs[ip];
    const std::size_t ia = rng.uniform_index(ip + 1);
    const std::size_t ib = ip + rng.uniform_index(n - ip);
    const std::size_t im = ia + rng.uniform_index(ib - ia + 1);
    const double a = v1.xs[ia], b = v1.xs[ib], m = v1.xs[im];
    // weights solving wa*a + wm*m + wb*b = p with a middle weight 1/3
    double wm = (im == ia || im == ib) ? 0.0 : 1.0 / 3.0;
    if (std::abs(b - a) < 1e-15) continue;
    const double wb = (p - a - wm * (m - a)) / (b - a);
    const double wa = 1.0 - wm - wb;
    if (wa < 0.0 || wb < 0.0) continue;
    const double val = wa * (2.0 * std::abs(a - p) + v1.at(a)) +
                       wm * (2.0 * std::abs(m - p) + v1.at(m)) +
                       wb * (2.0 * std::abs(b - p) + v1.at(b));
    CAPTURE(p);
    CHECK(val <= v2.at(p) + 1e-9);
  }
}

TEST_CASE("table shape properties") {
  ValueTable v2 = maxvar_binary(2, 1e-2);
  ValueTable v3 = maxvar_binary(3, 1e-2);
  const std::size_t n = v2.xs.size();
  CHECK(v2.values.front() == 0.0);
  CHECK(v2.values.back() == 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    CHECK(v3.values[i] >= v2.values[i] - 1e-12);                       // monotone in k
    CHECK(v3.values[i] == doctest::Approx(v3.values[n - 1 - i]).epsilon(1e-11));  // symmetric
    CHECK(v2.values[i] <= bound_entropy(2, Distribution({"x1", "x2"}, {v2.xs[i], 1.0 - v2.xs[i]})) +
                              1e-9);
  }
  CHECK_THROWS_AS(maxvar_binary(2, 0.015), ConfigError);
  CHECK_THROWS_AS(maxvar_binary(-1, 1e-2), ConfigError);
}

TEST_CASE("long horizon scaled value near the gaussian limit") {
  const double ratio = maxvar_ratio(400, 1e-3);
  CHECK(std::abs(ratio - std::sqrt(2.0 / 3.14159265358979323846)) < 0.03);
  CHECK(ratio == doctest::Approx(0.79872094727715925).epsilon(1e-12));  // frozen regression
}

TEST_CASE("witness tree attains the table value") {
  for (double p : {0.5, 0.3, 0.07}) {
    for (int k : {1, 2, 4}) {
      MaxvarWitness w = witness_tree(k, p, 1e-2);
      CAPTURE(p);
      CAPTURE(k);
      CHECK_FALSE(w.prior_snapped);
      CHECK(w.grid_prior == doctest::Approx(p).epsilon(1e-12));
      CHECK(w.tree.depth() == k);
      CHECK(validate(w.tree).empty());
      CHECK(w.tree.root_dist()[0] == doctest::Approx(p).epsilon(1e-12));
      CHECK(variation(w.tree) == doctest::Approx(w.table_value).epsilon(1e-9));
      CHECK(w.table_value == doctest::Approx(maxvar_binary(k, 1e-2).at(p)).epsilon(1e-12));
    }
  }
  MaxvarWitness snapped = witness_tree(2, 0.303, 1e-2);
  CHECK(snapped.prior_snapped);
  CHECK(snapped.grid_prior == doctest::Approx(0.30).epsilon(1e-12));
}
