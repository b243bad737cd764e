#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "martvar/common.hpp"
#include "martvar/distribution.hpp"

using namespace martvar;

// frozen oracles, computed by hand:
//   H(1/2,1/4,1/4) = (3/2) ln 2
//   H(uniform_4)   = ln 4
//   D((3/4,1/4) || (1/2,1/2)) = 3/4 ln(3/2) + 1/4 ln(1/2)
constexpr double kEntropyHalfQuarterQuarter = 1.0397207708399179;
constexpr double kLn4 = 1.3862943611198906;
constexpr double kKlThreeQuarters = 0.13081203594113698;

TEST_CASE("construction validates input") {
  CHECK_THROWS_AS(Distribution({"a", "b"}, {0.5}), std::invalid_argument);
  CHECK_THROWS_AS(Distribution({"a", "b"}, {0.6, 0.6}), std::invalid_argument);
  CHECK_THROWS_AS(Distribution({"a", "b"}, {-0.1, 1.1}), std::invalid_argument);
  CHECK_THROWS_AS(Distribution({"a", "a"}, {0.5, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(Distribution(LabelSet{}, std::vector<double>{}), std::invalid_argument);
  CHECK_NOTHROW(Distribution({"a", "b"}, {0.0, 1.0}));  // zero entries are fine
}

TEST_CASE("entropy oracles") {
  CHECK(entropy(Distribution({"a", "b", "c"}, {0.5, 0.25, 0.25})) ==
        doctest::Approx(kEntropyHalfQuarterQuarter).epsilon(1e-14));
  CHECK(entropy(Distribution::uniform(4)) == doctest::Approx(kLn4).epsilon(1e-14));
  CHECK(entropy(Distribution({"a", "b"}, {1.0, 0.0})) == 0.0);
}

TEST_CASE("kl oracles") {
  const Distribution half({"a", "b"}, {0.5, 0.5});
  KlResult r = kl_divergence(Distribution({"a", "b"}, {0.75, 0.25}), half);
  CHECK(r.finite);
  CHECK(r.nats == doctest::Approx(kKlThreeQuarters).epsilon(1e-14));

  r = kl_divergence(Distribution({"a", "b"}, {1.0, 0.0}), half);
  CHECK(r.finite);
  CHECK(r.nats == doctest::Approx(std::log(2.0)).epsilon(1e-14));

  r = kl_divergence(half, Distribution({"a", "b"}, {1.0, 0.0}));
  CHECK_FALSE(r.finite);
  CHECK(std::isinf(r.nats));

  r = kl_divergence(half, half);
  CHECK(r.finite);
  CHECK(r.nats == 0.0);
}

TEST_CASE("l1 distance") {
  const LabelSet ab = {"a", "b"};
  CHECK(l1_distance(Distribution(ab, {1.0, 0.0}), Distribution(ab, {0.0, 1.0})) == 2.0);
  CHECK(l1_distance(Distribution(ab, {0.3, 0.7}), Distribution(ab, {0.5, 0.5})) ==
        doctest::Approx(0.4).epsilon(1e-14));
  CHECK_THROWS_AS(l1_distance(Distribution(ab, {1.0, 0.0}), Distribution::uniform(2)),
                  std::domain_error);
}

TEST_CASE("tensor layout and l1 contraction") {
  const Distribution p({"a", "b"}, {0.25, 0.75});
  const Distribution q({"x", "y"}, {0.5, 0.5});
  const Distribution t = tensor(p, q);
  REQUIRE(t.size() == 4);
  // row-major: p outer, q inner; 0.25*0.5 and 0.75*0.5 are exact in binary
  CHECK(t[0] == 0.125);
  CHECK(t[1] == 0.125);
  CHECK(t[2] == 0.375);
  CHECK(t[3] == 0.375);

  // l1(m (x) a, m (x) b) = l1(a, b): the identity the lazy tree evaluators use
  Rng rng(7);
  for (int it = 0; it < 200; ++it) {
    const std::size_t dm = 2 + rng.uniform_index(4), da = 2 + rng.uniform_index(4);
    const Distribution m(Distribution::uniform(dm).labels(), rng.dirichlet(dm));
    const LabelSet labels = Distribution::uniform(da).labels();
    const Distribution a(labels, rng.dirichlet(da));
    const Distribution b(labels, rng.dirichlet(da));
    CHECK(l1_distance(tensor(m, a), tensor(m, b)) ==
          doctest::Approx(l1_distance(a, b)).epsilon(1e-12));
  }
}

TEST_CASE("json round trip is bitwise") {
  Rng rng(11);
  for (int it = 0; it < 100; ++it) {
    const std::size_t d = 2 + rng.uniform_index(6);
    const Distribution p(Distribution::uniform(d).labels(), rng.dirichlet(d));
    const Distribution back = Distribution::from_json(p.to_json());
    REQUIRE(back.size() == p.size());
    for (std::size_t i = 0; i < d; ++i) CHECK(back[i] == p[i]);
    CHECK(back.labels() == p.labels());
  }
}

TEST_CASE("pinsker inequality on random pairs") {
  Rng rng(13);
  for (int it = 0; it < 10000; ++it) {
    const std::size_t d = 2 + rng.uniform_index(7);
    const LabelSet labels = Distribution::uniform(d).labels();
    const Distribution p(labels, rng.dirichlet(d));
    const Distribution q(labels, rng.dirichlet(d));
    const KlResult kl = kl_divergence(p, q);
    REQUIRE(kl.finite);  // dirichlet samples are interior
    CHECK(l1_distance(p, q) <= std::sqrt(2.0 * kl.nats) + 1e-9);
  }
}

TEST_CASE("mean abs deviation bound on random variables") {
  Rng rng(17);
  for (int it = 0; it < 10000; ++it) {
    const std::size_t m = 2 + rng.uniform_index(15);
    const std::vector<double> w = rng.dirichlet(m);
    std::vector<double> z(m);
    for (auto& v : z) v = rng.uniform() < 0.15 ? 0.0 : 4.0 * rng.exponential();
    const auto [lhs, rhs] = mean_abs_deviation_entropy_bound(w, z);
    CHECK(lhs <= rhs + 1e-9);
  }

  // constant Z: both sides vanish
  const auto [lhs, rhs] = mean_abs_deviation_entropy_bound({0.25, 0.25, 0.5}, {2.0, 2.0, 2.0});
  CHECK(lhs == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(rhs == doctest::Approx(0.0).epsilon(1e-12));

  // hand check on a two-point variable: Z = 0 or 2 with weights 1/2
  //   EZ = 1, E|Z-EZ| = 1, E[Z ln Z] = ln 2, rhs = sqrt(2) sqrt(ln 2)
  const auto [lhs2, rhs2] = mean_abs_deviation_entropy_bound({0.5, 0.5}, {0.0, 2.0});
  CHECK(lhs2 == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(rhs2 == doctest::Approx(std::sqrt(2.0 * std::log(2.0))).epsilon(1e-14));
}

TEST_CASE("stable_sum and format_double") {
  std::vector<double> v(1000, 0.001);
  CHECK(stable_sum(v) == doctest::Approx(1.0).epsilon(1e-14));
  const double x = 0.1 + 0.2;
  CHECK(std::stod(format_double(x)) == x);
  CHECK(format_double(1.0) == "1");
}

TEST_CASE("renormalized") {
  const Distribution p = Distribution({"a", "b"}, {0.0, 1.0});
  CHECK_NOTHROW(p.renormalized());
  Rng rng(3);
  const std::vector<double> w = rng.dirichlet(3);
  const Distribution q(Distribution::uniform(3).labels(), w);
  const Distribution r = q.renormalized();
  for (std::size_t i = 0; i < 3; ++i) CHECK(r[i] == doctest::Approx(q[i]).epsilon(1e-15));
}
