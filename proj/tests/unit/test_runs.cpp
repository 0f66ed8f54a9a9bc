#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "steinops/indicators.hpp"
#include "steinops/runs.hpp"

using namespace steinops;

TEST_CASE("runs law matches enumeration") {
  for (std::size_t n : {2, 3, 5, 9, 14}) {
    for (double ps : {0.2, 0.5, 0.73}) {
      const RunsModel m(n, ps);
      CHECK(oracle::l1(exact_runs_law(m).masses, oracle::enumerate_runs(n, ps)) <= 1e-13);
      for (std::size_t skip = 2; skip <= n; ++skip) {
        CHECK(oracle::l1(exact_runs_law(m, skip).masses, oracle::enumerate_runs(n, ps, skip)) <= 1e-13);
      }
    }
  }
  CHECK_THROWS(exact_runs_law(RunsModel(5, 0.5), std::size_t{1}));
  CHECK_THROWS(exact_runs_law(RunsModel(5, 0.5), std::size_t{6}));
  CHECK_THROWS(RunsModel(1, 0.5));
  CHECK_THROWS(RunsModel(5, 1.0));
}

TEST_CASE("runs moments") {
  const auto two = runs_moments(RunsModel(2, 0.3));
  CHECK(two.mean == doctest::Approx(0.21));
  CHECK(two.variance == doctest::Approx(0.21 * 0.79));
  CHECK(runs_moments(RunsModel(10, 0.5)).mean == doctest::Approx(2.25));

  for (std::size_t n : {5, 20, 100}) {
    for (double ps : {0.15, 0.5, 0.8}) {
      const RunsModel m(n, ps);
      const auto law = exact_runs_law(m);
      const auto mo = runs_moments(m);
      const double mu = mean(law);
      double m3 = 0.0;
      for (std::size_t k = 0; k < law.size(); ++k) m3 += law.masses[k] * std::pow(static_cast<double>(k) - mu, 3);
      CHECK(std::abs(mu - mo.mean) <= 1e-10);
      CHECK(std::abs(variance(law) - mo.variance) <= 1e-10);
      CHECK(std::abs(m3 - mo.third_central) <= 1e-10);
    }
  }
}

TEST_CASE("runs bcp fit") {
  CHECK_THROWS(fit_runs_bcp(RunsModel(2, 0.5)));
  const auto ten = fit_runs_bcp(RunsModel(10, 0.3));
  CHECK(ten.M == 2);

  // p / a -> 10/3 as n grows.
  const RunsModel big(100000, 0.05);
  CHECK(fit_runs_bcp(big).p / big.a() == doctest::Approx(10.0 / 3.0).epsilon(1e-4));

  for (std::size_t n = 10; n <= 500; n += 35) {
    for (double ps = 0.1; ps < 0.9; ps += 0.1) {
      const RunsModel m(n, ps);
      BcpParams f;
      try {
        f = fit_runs_bcp(m);
      } catch (const std::domain_error&) {
        continue;  // p >= 1
      }
      CHECK(f.alpha >= 0.0);
      CHECK(f.delta >= 0.0);
      CHECK(f.delta < 1.0);
      const auto law = pmf_bcp(f, 1e-14);
      const auto mo = runs_moments(m);
      CHECK(mean(law) == doctest::Approx(mo.mean).epsilon(1e-9));
      // The BCP variance is Mpq + alpha, matched via M + delta.
      const double md = static_cast<double>(f.M) + f.delta;
      CHECK(md * f.p * (1 - f.p) + (mo.mean - md * f.p) == doctest::Approx(mo.variance).epsilon(1e-9));
    }
  }
}

TEST_CASE("runs constants and lemma") {
  const auto quarter = runs_constants(RunsModel(50, 0.5));
  CHECK(quarter.K1 == doctest::Approx(288.0 * 0.25 / 0.25));
  CHECK(quarter.K2 == doctest::Approx(16.0 * std::sqrt(2.0)));
  // a = 1/3 is not reachable (max a = 1/4); K1 scales with (1 - 3a) / a.
  const auto c = runs_constants(RunsModel(50, 0.2));
  CHECK(c.K1 == doctest::Approx(288.0 * (1 - 0.48) / 0.16));

  for (std::size_t n : {40, 120}) {
    const auto r = lemma47_check(RunsModel(n, 0.5));
    CHECK(r.hypothesis_met);
    CHECK(r.d_holds);
    CHECK(r.d1_holds);
    CHECK(r.d_exact == doctest::Approx(oracle::finite_difference_norm(exact_runs_law(RunsModel(n, 0.5)).masses, 2)));
  }
}

TEST_CASE("cor48 report") {
  const auto r = bound_cor48(RunsModel(100, 0.5));
  CHECK(r.theorem == "cor48");
  CHECK(r.flags.size() == 2);
  CHECK(r.flags[1].second);
  CHECK(std::isfinite(r.total));
  CHECK(r.exact_tv.has_value());
  // The fitted p exceeds 1/2 here, so no verdict is given.
  CHECK_FALSE(r.flags[0].second);
  CHECK_FALSE(r.dominant.has_value());
}

TEST_CASE("waiting time between patterns") {
  const auto w = waiting_time_moments(0.5);
  CHECK(w.mean == doctest::Approx(4.0));
  CHECK(w.variance == doctest::Approx(4.0));
  CHECK(w.variance_valid);

  for (double ps : {0.2, 0.35, 0.5, 0.9}) {
    const double a = ps * (1 - ps);
    const auto pgf = [a](double z) { return a * z * z / (1 - z + a * z * z); };
    const double g1 = oracle::derivative(pgf, 1.0, 1, 1e-5);
    const double g2 = oracle::derivative(pgf, 1.0, 2, 1e-4);
    const auto m = waiting_time_moments(ps);
    CHECK(m.mean == doctest::Approx(g1).epsilon(1e-6));
    CHECK(m.variance == doctest::Approx(g2 + g1 - g1 * g1).epsilon(1e-4));
  }
}
