#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "martvar/constructions.hpp"
#include "martvar/splitting_tree.hpp"

using namespace martvar;

namespace {

SplittingTree full_reveal_uniform2() {
  // uniform prior split into the two point masses, weight 1/2 each
  const Distribution root = Distribution::uniform(2);
  const auto labels = root.labels_ptr();
  return SplittingTree(SplittingTree::node(
      root, {{0.5, SplittingTree::leaf(Distribution::point_mass(labels, 0))},
             {0.5, SplittingTree::leaf(Distribution::point_mass(labels, 1))}}));
}

}  // namespace

TEST_CASE("validate accepts constructions and random trees") {
  CHECK(validate(full_reveal_uniform2()).empty());
  CHECK(validate(doubling_martingale(4)).empty());
  CHECK(validate(binary_walk(6, 0.5, 0.125)).empty());
  Rng rng(101);
  for (int it = 0; it < 300; ++it) {
    SplittingTree t = random_tree(rng, 2 + rng.uniform_index(7),
                                  1 + static_cast<int>(rng.uniform_index(6)));
    CAPTURE(it);
    CHECK(validate(t).empty());
  }
}

TEST_CASE("validate reports bayes violations") {
  const Distribution root = Distribution::uniform(2);
  const auto labels = root.labels_ptr();
  // children average to (0.6, 0.4), not the root
  SplittingTree bad(SplittingTree::node(
      root, {{0.5, SplittingTree::leaf(Distribution({"0", "1"}, {0.9, 0.1}))},
             {0.5, SplittingTree::leaf(Distribution({"0", "1"}, {0.3, 0.7}))}}));
  CHECK_FALSE(validate(bad).empty());
}

TEST_CASE("variation oracles") {
  CHECK(variation(full_reveal_uniform2()) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(variation(doubling_martingale(3)) == doctest::Approx(3.0).epsilon(1e-12));
  // unabsorbed +-1/8 walk: 4 stages, each moving L1 mass 2*(1/8)
  CHECK(variation(binary_walk(4, 0.5, 0.125)) == doctest::Approx(1.0).epsilon(1e-12));
  // trivial depth-0 tree
  CHECK(variation(SplittingTree(SplittingTree::leaf(Distribution::uniform(3)))) == 0.0);
}

TEST_CASE("monte carlo estimate is deterministic and converges") {
  SplittingTree t = binary_walk(8, 0.5, 0.2);
  const double exact = variation(t);

  MonteCarloResult a = variation_monte_carlo(t, 2000, 42);
  MonteCarloResult b = variation_monte_carlo(t, 2000, 42);
  CHECK(a.mean == b.mean);
  CHECK(a.std_error == b.std_error);
  CHECK(a.trials == 2000);

  int misses = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    MonteCarloResult r = variation_monte_carlo(t, 2000, seed);
    if (std::abs(r.mean - exact) > 4.0 * r.std_error) ++misses;
  }
  CHECK(misses <= 2);  // 4-sigma misses should be rare
}

TEST_CASE("concat adds variation and composes depth") {
  Rng rng(202);
  for (int it = 0; it < 300; ++it) {
    SplittingTree a = random_tree(rng, 2 + rng.uniform_index(3),
                                  1 + static_cast<int>(rng.uniform_index(3)));
    SplittingTree b = random_tree(rng, 2 + rng.uniform_index(3),
                                  1 + static_cast<int>(rng.uniform_index(3)));
    SplittingTree joint = concat(a, b);
    CAPTURE(it);
    CHECK(joint.depth() == a.depth() + b.depth());
    CHECK(variation(joint) ==
          doctest::Approx(variation(a) + variation(b)).epsilon(1e-11));
    CHECK(joint.root_dist().size() == a.root_dist().size() * b.root_dist().size());
  }
}

TEST_CASE("lazy and explicit concat agree") {
  Rng rng(303);
  for (int it = 0; it < 50; ++it) {
    SplittingTree a = random_tree(rng, 2 + rng.uniform_index(2),
                                  1 + static_cast<int>(rng.uniform_index(2)));
    SplittingTree b = random_tree(rng, 2 + rng.uniform_index(2),
                                  1 + static_cast<int>(rng.uniform_index(2)));
    SplittingTree lazy = concat_lazy(a, b);
    SplittingTree expl = concat_explicit(a, b);
    CAPTURE(it);
    CHECK(lazy.depth() == expl.depth());
    CHECK(variation(lazy) == doctest::Approx(variation(expl)).epsilon(1e-11));
    CHECK(validate(lazy).empty());
    CHECK(validate(expl).empty());
    CHECK(tree_to_json(lazy) == tree_to_json(expl));  // same unfolded tree
  }
}

TEST_CASE("pad_to_depth keeps variation") {
  SplittingTree t = doubling_martingale(3);
  SplittingTree padded = pad_to_depth(t, 7);
  CHECK(padded.depth() == 7);
  CHECK(validate(padded).empty());
  CHECK(variation(padded) == doctest::Approx(variation(t)).epsilon(1e-12));
}

TEST_CASE("json round trip preserves the tree") {
  Rng rng(404);
  for (int it = 0; it < 50; ++it) {
    SplittingTree t = random_tree(rng, 2 + rng.uniform_index(4),
                                  1 + static_cast<int>(rng.uniform_index(4)));
    SplittingTree back = tree_from_json(tree_to_json(t));
    CAPTURE(it);
    CHECK(back.depth() == t.depth());
    CHECK(validate(back).empty());
    CHECK(variation(back) == doctest::Approx(variation(t)).epsilon(1e-12));
    CHECK(tree_to_json(back) == tree_to_json(t));
  }
}

TEST_CASE("json budget raises size error") {
  CHECK_THROWS_AS(tree_to_json(doubling_martingale(8), 10), SizeError);
}

TEST_CASE("five bounds hold on random trees") {
  Rng rng(505);
  for (int it = 0; it < 500; ++it) {
    SplittingTree t = random_tree(rng, 2 + rng.uniform_index(7),
                                  1 + static_cast<int>(rng.uniform_index(6)));
    CAPTURE(it);
    for (const auto& c : certify(t)) {
      CAPTURE(c.name);
      CHECK(c.holds);
    }
  }
}

TEST_CASE("bound formulas") {
  const Distribution u4 = Distribution::uniform(4);
  CHECK(bound_entropy(9, u4) == doctest::Approx(std::sqrt(18.0 * std::log(4.0))).epsilon(1e-14));
  CHECK(bound_logd(9, 4) == doctest::Approx(std::sqrt(18.0 * std::log(4.0))).epsilon(1e-14));
  CHECK(bound_classical(9, 4) == doctest::Approx(std::sqrt(27.0)).epsilon(1e-14));
  CHECK(bound_trivial(9) == 18.0);
  // entropy bound beats log d whenever the prior is not uniform
  const Distribution p({"a", "b", "c", "d"}, {0.7, 0.1, 0.1, 0.1});
  CHECK(bound_entropy(9, p) < bound_logd(9, 4));
  // per-coordinate bound at a point mass is zero
  const Distribution pm({"a", "b"}, {1.0, 0.0});
  CHECK(bound_per_coordinate(5, pm) == 0.0);
}
