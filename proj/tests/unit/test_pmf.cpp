#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "steinops/distributions.hpp"
#include "steinops/pmf.hpp"

using namespace steinops;

TEST_CASE("compensated sum recovers small terms lost by naive addition") {
  CompensatedSum s;
  s += 1.0;
  for (int i = 0; i < 1000; ++i) s += 1e-17;
  s += -1.0;
  CHECK(s.value() == doctest::Approx(1e-14).epsilon(1e-6));
}

TEST_CASE("pmf validation") {
  CHECK_NOTHROW(make_pmf({0.25, 0.5, 0.25}).validate());
  CHECK_THROWS_AS(make_pmf({0.5, 0.6}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(make_pmf({-0.1, 1.1}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(make_pmf({0.9}, 0.1).validate(), std::invalid_argument);
  Pmf p = make_pmf({0.5, 0.5, 0.0, 0.0});
  trim_trailing_zeros(p);
  CHECK(p.size() == 2);
  CHECK(p[7] == 0.0);
}

TEST_CASE("moments by direct summation") {
  CHECK(mean(point_mass(4)) == 4.0);
  const Pmf b = pmf_binomial(10, 0.15);
  CHECK(variance(b) == doctest::Approx(10 * 0.15 * 0.85).epsilon(1e-12));
  const Pmf bcp = pmf_bcp(3, 0.2, 0.7, 1e-16);
  // Cumulants add: third central = M p q (q - p) + alpha.
  CHECK(moment(bcp, 3, MomentKind::central) == doctest::Approx(3 * 0.2 * 0.8 * 0.6 + 0.7).epsilon(1e-10));
  CHECK_THROWS(moment(bcp, 5));
}

TEST_CASE("convolution identities") {
  std::mt19937_64 rng(11);
  const Pmf p = make_pmf(oracle::random_severity(rng, 6, false));
  CHECK(l1_distance(convolve(point_mass(0), p), p) < 1e-15);
  CHECK(l1_distance(convolve(pmf_binomial(1, 0.3), pmf_binomial(1, 0.3)), pmf_binomial(2, 0.3)) < 1e-15);
  CHECK(tv_norm(convolve(pmf_poisson(1.0), pmf_poisson(2.0)), pmf_poisson(3.0)) < 1e-11);

  for (int trial = 0; trial < 20; ++trial) {
    const Pmf a = make_pmf(oracle::random_severity(rng, 1 + trial % 7, false));
    const Pmf b = make_pmf(oracle::random_severity(rng, 2 + trial % 5, false));
    const Pmf c = make_pmf(oracle::random_severity(rng, 3, false));
    CHECK(l1_distance(convolve(a, b), convolve(b, a)) <= 1e-12);
    CHECK(l1_distance(convolve(convolve(a, b), c), convolve(a, convolve(b, c))) <= 1e-12);
    CHECK(oracle::l1(convolve(a, b).masses, oracle::naive_convolve(a.masses, b.masses)) <= 1e-14);
  }
  const Pmf t = convolve(make_pmf({1.0 - 1e-13}, 1e-13), make_pmf({1.0 - 2e-13}, 2e-13));
  CHECK(t.tail_mass == doctest::Approx(3e-13));
}

TEST_CASE("total variation norm") {
  CHECK(tv_norm(pmf_poisson(2.0), pmf_poisson(2.0)) <= 2e-12);
  CHECK(tv_norm(point_mass(0), point_mass(1)) == 2.0);

  const Pmf a = pmf_binomial(10, 0.1);
  Pmf b = pmf_poisson(1.0, 1e-6);
  const TvInterval iv = tv_interval(a, b);
  CHECK(iv.lower > 0.0);
  CHECK(iv.upper - iv.lower == doctest::Approx(b.tail_mass));
  const Pmf c = pmf_poisson(1.0, 1e-15);
  CHECK(tv_interval(a, c).lower == doctest::Approx(oracle::tv_by_subsets(a.masses, c.masses)).epsilon(1e-10));

  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const Pmf x = make_pmf(oracle::random_severity(rng, 5, false));
    const Pmf y = make_pmf(oracle::random_severity(rng, 4, false));
    const Pmf z = make_pmf(oracle::random_severity(rng, 6, false));
    CHECK(tv_norm(x, y) == tv_norm(y, x));
    CHECK(tv_norm(x, z) <= tv_norm(x, y) + tv_norm(y, z) + 1e-12);
    CHECK(tv_norm(x, y) <= 2.0);
  }
}

TEST_CASE("difference norms match finite differences") {
  // n = 1, p = 1/2: L(W) * (I_1 - I)^2 has masses 1/2, -1/2, -1/2, 1/2.
  CHECK(difference_norm(make_pmf({0.5, 0.5}), 2) == doctest::Approx(2.0));
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    const Pmf p = make_pmf(oracle::random_severity(rng, 3 + trial, false));
    for (int order : {1, 2}) {
      CHECK(difference_norm(p, order) == doctest::Approx(oracle::finite_difference_norm(p.masses, order)).epsilon(1e-13));
    }
  }
}

TEST_CASE("wasserstein-1 equals the minimal coupling") {
  CHECK(wasserstein1(point_mass(0), point_mass(3)) == 3.0);
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  for (int trial = 0; trial < 25; ++trial) {
    const double px = u(rng), py = u(rng);
    // Laws on {0, 1} and {1, 3}.
    const Pmf a = make_pmf({px, 1.0 - px});
    const Pmf b = make_pmf({0.0, py, 0.0, 1.0 - py});
    const double brute = oracle::min_coupling_two_point(0, 1, px, 1, 3, py);
    CHECK(wasserstein1(a, b) == doctest::Approx(brute).epsilon(1e-9));
  }
}

TEST_CASE("upper tail") {
  const Pmf p = make_pmf({0.2, 0.3, 0.5});
  CHECK(upper_tail(p, 0) == doctest::Approx(0.8));
  CHECK(upper_tail(p, 2) == 0.0);
  CHECK(upper_tail(make_pmf({0.5, 0.5 - 1e-13}, 1e-13), 5) == doctest::Approx(1e-13));
}
