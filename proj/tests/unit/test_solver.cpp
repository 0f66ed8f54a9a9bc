#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "steinops/distributions.hpp"
#include "steinops/operators.hpp"
#include "steinops/solver.hpp"

using namespace steinops;

namespace {

std::function<double(std::size_t)> indicator_le(std::size_t k) {
  return [k](std::size_t j) { return j <= k ? 1.0 : 0.0; };
}

std::function<double(std::size_t)> indicator_eq(std::size_t k) {
  return [k](std::size_t j) { return j == k ? 1.0 : 0.0; };
}

double sup_delta(const SteinSolution& s) {
  double m = 0.0;
  for (std::size_t j = 0; j + 1 < s.g.size(); ++j) m = std::max(m, std::abs(s.g[j + 1] - s.g[j]));
  return m;
}

}  // namespace

TEST_CASE("stationary laws of the standard birth-death operators") {
  CHECK(l1_distance(stationary_pmf(BirthDeathOperator::poisson(2.5)), pmf_poisson(2.5)) <= 1e-12);
  const Pmf pb = stationary_pmf(BirthDeathOperator::pseudo_binomial(4.5, 0.3));
  CHECK(oracle::l1(pb.masses, oracle::pseudo_binomial(4.5, 0.3)) <= 1e-14);
  const Pmf nb = stationary_pmf(BirthDeathOperator::negative_binomial(2.0, 0.6));
  CHECK(oracle::l1(nb.masses, oracle::negative_binomial(2.0, 0.6, nb.size())) <= 1e-12);
  CHECK(nb.tail_mass <= 1e-12);
}

TEST_CASE("the generic ratio operator inverts stationary_pmf") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    const Pmf y = make_pmf(oracle::random_severity(rng, 3 + trial, false));
    const auto op = op_generic_ratio(y);
    const std::vector<double> table(op.pointwise().begin(), op.pointwise().end());
    BirthDeathOperator bd{"ratio", [table](std::size_t j) { return table[j]; },
                          [](std::size_t j) { return static_cast<double>(j); }, y.size() - 1};
    CHECK(l1_distance(stationary_pmf(bd), y) <= 1e-12);
  }
}

TEST_CASE("solve_stein plug-back") {
  const auto zero = solve_stein(BirthDeathOperator::poisson(3.0), [](std::size_t) { return 0.7; });
  for (double g : zero.g) CHECK(std::abs(g) <= 1e-15);

  const auto p1 = solve_stein(BirthDeathOperator::poisson(1.0), indicator_eq(0));
  CHECK(p1.max_residual <= 1e-12);
  CHECK(p1.g[0] == 0.0);
  const auto nb = solve_stein(BirthDeathOperator::negative_binomial(2.0, 0.6), indicator_le(3));
  CHECK(nb.max_residual <= 1e-12);
  const auto bin = solve_stein(BirthDeathOperator::binomial(12, 0.35), indicator_le(4));
  CHECK(bin.max_residual <= 1e-12);

  // Independent check of the equation with the oracle law.
  const auto s = solve_stein(BirthDeathOperator::poisson(4.0), indicator_eq(2));
  const auto law = oracle::poisson(4.0, s.law.size());
  double ef = 0.0, tot = 0.0;
  for (std::size_t k = 0; k < law.size(); ++k) {
    ef += law[k] * (k == 2 ? 1.0 : 0.0);
    tot += law[k];
  }
  ef /= tot;
  for (std::size_t j = 0; j + 1 < s.law.size(); ++j) {
    CHECK(4.0 * s.g[j + 1] - static_cast<double>(j) * s.g[j] ==
          doctest::Approx((j == 2 ? 1.0 : 0.0) - ef).epsilon(1e-9).scale(1.0));
  }
}

TEST_CASE("smoothness bounds for the monotone families") {
  const auto rep = delta_bound_check(BirthDeathOperator::poisson(5.0), indicator_eq(2), FRange::bounded);
  CHECK(rep.hypothesis_met);
  CHECK(rep.holds);
  CHECK(rep.max_abs_delta <= delta_g_bound_poisson(5.0, 1.0));

  const auto nbr = delta_bound_check(BirthDeathOperator::negative_binomial(2.0, 0.5), indicator_le(2),
                                     FRange::bounded);
  CHECK(nbr.holds);
  CHECK(nbr.max_abs_delta <= delta_g_bound_negative_binomial(2.0, 0.5, 1.0));
  CHECK(delta_g_bound_negative_binomial(2.0, 0.5, 1.0) == doctest::Approx(2.0));

  const auto unit = delta_bound_check(BirthDeathOperator::binomial(20, 0.3), indicator_le(5), FRange::unit_interval);
  CHECK(unit.constant == 1.0);
  CHECK(unit.hypothesis_met);
  CHECK(unit.holds);

  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> fv(80);
    for (double& v : fv) v = u(rng);
    auto f = [fv](std::size_t j) { return j < fv.size() ? fv[j] : 0.0; };
    const double lam = 0.5 + trial;
    const auto r = delta_bound_check(BirthDeathOperator::poisson(lam), f, FRange::bounded);
    CHECK(r.holds);
    CHECK(r.max_abs_delta <= delta_g_bound_poisson(lam, r.f_norm) * (1 + 1e-12));
  }
}

TEST_CASE("pseudo-binomial smoothness is informational") {
  const auto bd = BirthDeathOperator::pseudo_binomial(4.5, 0.3);
  const auto rep = delta_bound_check(bd, indicator_le(1), FRange::bounded);
  CHECK_FALSE(rep.hypothesis_met);
  CHECK(rep.informational);
  const auto s = solve_stein(bd, indicator_le(1));
  CHECK(s.max_residual <= 1e-12);
  CHECK(delta_g_bound_pseudo_binomial(4.5, 0.3, 1.0) == doctest::Approx(2.0 / (4 * 0.3 * 0.7)));
}

TEST_CASE("perturbation constants") {
  PerturbationParams o3;
  o3.M = 10;
  o3.p = 0.05;
  o3.alpha = 1.0;
  const auto pc = perturbation_constants(PerturbationKind::O3, o3);
  CHECK(pc.gamma == doctest::Approx(1.5));
  CHECK(pc.omega1 == 2.0);
  CHECK(pc.omega2 == doctest::Approx(10 * 0.0025 / 0.81));
  CHECK(pc.valid);

  PerturbationParams o1;
  o1.lambdas = {1.3};
  const auto pure = perturbation_constants(PerturbationKind::O1, o1);
  CHECK(pure.omega2 == 0.0);
  CHECK(pure.valid);
  o1.lambdas = {1.0, 0.2, 0.1};
  const auto cp = perturbation_constants(PerturbationKind::O1, o1);
  CHECK(cp.gamma == doctest::Approx(1.0 + 0.4 + 0.3));
  CHECK(cp.omega2 == doctest::Approx(2 * 0.2 + 6 * 0.1));

  PerturbationParams wide = o3;
  wide.p = 0.4;
  const auto w = perturbation_constants(PerturbationKind::O3, wide);
  CHECK(w.omega2 == doctest::Approx(10 * 0.16 / 0.04));
  CHECK_FALSE(w.valid);

  PerturbationParams half = o3;
  half.p = 0.5;
  CHECK_THROWS_AS(perturbation_constants(PerturbationKind::O3, half), std::domain_error);

  PerturbationParams binb{10, 0.1, 0.0, 2.0, 0.6, {}};
  const auto o4 = perturbation_constants(PerturbationKind::O4, binb);
  CHECK(o4.gamma == doctest::Approx(std::floor(10 + 2 * 0.4 / (0.1 * 0.6)) * 0.1 * 0.9));
  CHECK(o4.omega2 == doctest::Approx(2 * 0.4 * (0.9 * 0.4 + 0.1) / 0.36));
  const auto o5 = perturbation_constants(PerturbationKind::O5, binb);
  CHECK(o5.gamma == doctest::Approx(10 * 0.1 * 0.6 + 2 * 0.4));
  CHECK(o5.omega2 == doctest::Approx(10 * 0.1 * 0.9 * (0.1 / 0.9 + 0.4) / 0.64));
  const auto o6 = perturbation_constants(PerturbationKind::O6, binb);
  CHECK(o6.gamma == doctest::Approx(1.0 + 0.8 / 0.6));
  CHECK(o6.omega2 == doctest::Approx(0.1 / 0.64 + 2 * 0.16 / 0.36));
  PerturbationParams bcp{10, 0.1, 0.5, 0.0, 0.0, {}};
  const auto o2 = perturbation_constants(PerturbationKind::O2, bcp);
  CHECK(o2.omega1 == doctest::Approx(2.0 / 0.09));
  CHECK(o2.gamma == 15.0);
  CHECK(o2.omega2 == doctest::Approx(0.05));

  CHECK(perturbation_kind_from_string("O5") == PerturbationKind::O5);
  CHECK_THROWS(perturbation_kind_from_string("O7"));
  CHECK(to_json(pc).at("kind") == "O3");
}

TEST_CASE("lemma 3.1 bound") {
  PerturbationParams o3{10, 0.05, 1.0, 0.0, 0.0, {}};
  const auto pc = perturbation_constants(PerturbationKind::O3, o3);
  CHECK(lemma31_bound(pc, 0.0, 0.0, 0.0) == 0.0);
  const double w2 = 10 * 0.0025 / 0.81;
  CHECK(lemma31_bound(pc, 0.01, 0.0, 0.0) == doctest::Approx(1.5 / (1.5 - 2 * w2) * 0.01 * 2 * (1 / 1.5)));

  PerturbationConstants unperturbed{PerturbationKind::O1, 2.0, 0.0, 0.5, true};
  CHECK(lemma31_bound(unperturbed, 0.3, 0.0, 0.0) == doctest::Approx(0.3 * 2.0));

  // Monotone in each argument and in omega2.
  double prev = 0.0;
  for (double x : {0.0, 0.01, 0.1, 1.0}) {
    const double v = lemma31_bound(pc, x, 0.01, 0.02);
    CHECK(v >= prev);
    prev = v;
  }
  CHECK(lemma31_bound(pc, 0.1, 0.02, 0.0) >= lemma31_bound(pc, 0.1, 0.01, 0.0));
  CHECK(lemma31_bound(pc, 0.1, 0.0, 0.02) >= lemma31_bound(pc, 0.1, 0.0, 0.01));
  PerturbationConstants more = pc;
  more.omega2 *= 1.5;
  CHECK(lemma31_bound(more, 0.1, 0.0, 0.0) >= lemma31_bound(pc, 0.1, 0.0, 0.0));

  PerturbationConstants bad = pc;
  bad.valid = false;
  CHECK_THROWS_AS(lemma31_bound(bad, 0.1, 0.0, 0.0), std::domain_error);
}
