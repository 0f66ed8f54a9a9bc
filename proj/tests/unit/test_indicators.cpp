#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "steinops/distributions.hpp"
#include "steinops/indicators.hpp"

using namespace steinops;

namespace {

double sum_pow(const std::vector<double>& v, int k) {
  double s = 0.0;
  for (double x : v) s += std::pow(x, k);
  return s;
}

std::vector<double> half_model(std::size_t n) {
  std::vector<double> p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = i < n / 2 ? 1.0 / 6.0 : 1.0 / 12.0;
  return p;
}

double item(const BoundReport& r, const std::string& name) {
  for (const auto& g : r.groups) {
    for (const auto& it : g.items) {
      if (it.name == name) return it.value;
    }
  }
  FAIL("no item " << name);
  return 0.0;
}

}  // namespace

TEST_CASE("bcp fit") {
  const auto eq = fit_bcp(std::vector<double>(9, 0.2));
  CHECK(eq.M == 9);
  CHECK(eq.delta == 0.0);
  CHECK(eq.p == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(eq.alpha == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));

  const auto h = fit_bcp(half_model(40));
  CHECK(h.p == doctest::Approx(0.15).epsilon(1e-14));
  // Mp and alpha both grow linearly with n.
  const auto h2 = fit_bcp(half_model(80));
  CHECK(h2.alpha / h.alpha == doctest::Approx(2.0).epsilon(0.25));
  CHECK((h2.M * h2.p) / (h.M * h.p) == doctest::Approx(2.0).epsilon(0.05));

  const std::vector<double> three{0.1, 0.2, 0.3};
  const auto f = fit_bcp(three);
  const double md = static_cast<double>(f.M);
  CHECK(f.alpha >= 0.0);
  CHECK(std::abs(md * f.p * f.p - (sum_pow(three, 2) - f.delta * f.p * f.p)) <= 1e-14);
  CHECK(std::abs(md * f.p * f.p * f.p - (sum_pow(three, 3) - f.delta * std::pow(f.p, 3))) <= 1e-14);
  CHECK(md + f.delta == doctest::Approx(std::pow(sum_pow(three, 2), 3) / std::pow(sum_pow(three, 3), 2)));
  CHECK(md * f.p + f.alpha == doctest::Approx(0.6).epsilon(1e-15));

  CHECK_THROWS(fit_bcp(std::vector<double>{0.0, 0.0}));
  CHECK_THROWS(fit_bcp(std::vector<double>{1.0, 1.0}));
  CHECK_THROWS(fit_bcp(std::vector<double>{}));
}

TEST_CASE("bcp fit invariants on random vectors") {
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<int> len(1, 50);
  for (int trial = 0; trial < 300; ++trial) {
    const auto probs = oracle::random_probs(rng, static_cast<std::size_t>(len(rng)), 0.001, 0.999);
    const auto f = fit_bcp(probs);
    const double md = static_cast<double>(f.M);
    CHECK(f.alpha >= 0.0);
    CHECK(f.delta >= 0.0);
    CHECK(f.delta < 1.0);
    CHECK(std::abs(md * f.p * f.p - sum_pow(probs, 2) + f.delta * f.p * f.p) <= 1e-12 * sum_pow(probs, 2) + 1e-15);
    CHECK(mean(pmf_bcp(f)) == doctest::Approx(sum_pow(probs, 1)).epsilon(1e-10));
  }
}

TEST_CASE("models: independent and joint") {
  CHECK_THROWS(IndicatorModel::independent({0.2, 1.0}));
  CHECK_THROWS(IndicatorModel::joint(2, {0.5, 0.5, 0.1}));
  CHECK_THROWS(IndicatorModel::joint(2, {0.5, 0.5, 0.1, 0.0}));

  std::mt19937_64 rng(31);
  const std::size_t n = 6;
  const auto joint = oracle::random_joint(n, rng, 0.4);
  const auto m = IndicatorModel::joint(n, joint);
  CHECK(oracle::l1(m.law_w().masses, oracle::joint_sum_law(n, joint)) <= 1e-14);
  CHECK(oracle::l1(m.law_without(2).masses, oracle::joint_sum_law(n, joint, 1u << 2)) <= 1e-14);
  CHECK(oracle::l1(m.law_without(1, 4).masses, oracle::joint_sum_law(n, joint, (1u << 1) | (1u << 4))) <= 1e-14);
  CHECK(oracle::l1(m.conditional_without(3).masses, oracle::joint_sum_law(n, joint, 1u << 3, 3)) <= 1e-14);
  CHECK(oracle::l1(m.conditional_without(3, 0).masses, oracle::joint_sum_law(n, joint, (1u << 3) | 1u, 3)) <= 1e-14);

  // A joint law that factorises gives the same answers as the independent model.
  const std::vector<double> probs{0.1, 0.25, 0.4};
  std::vector<double> prod(8);
  for (std::size_t s = 0; s < 8; ++s) {
    prod[s] = 1.0;
    for (std::size_t i = 0; i < 3; ++i) prod[s] *= (s >> i & 1U) ? probs[i] : 1 - probs[i];
  }
  const auto jm = IndicatorModel::joint(3, prod);
  const auto im = IndicatorModel::independent(probs);
  CHECK(l1_distance(jm.law_w(), im.law_w()) <= 1e-15);
  CHECK(std::abs(jm.covariance(0, 2)) <= 1e-16);
  CHECK(eta1(jm) <= 1e-15);
  CHECK(eta1(im) == 0.0);

  const auto parsed = IndicatorModel::from_json(
      nlohmann::json::parse(R"({"kind":"joint","n":2,"atoms":[[1,1,0.2],[1,0,0.2],[0,1,0.2],[0,0,0.4]]})"));
  CHECK(parsed.probs()[0] == doctest::Approx(0.4));
  CHECK(parsed.covariance(0, 1) == doctest::Approx(0.2 - 0.16));
  CHECK_THROWS(IndicatorModel::from_json(nlohmann::json::parse(R"({"kind":"joint","n":2,"atoms":[[1,2,1.0]]})")));
}

TEST_CASE("eta1 uses the minimal coupling") {
  // n = 2, P(I1 = I2 = 1) = 0.2, marginals 0.4.
  const auto m = IndicatorModel::joint(2, {0.4, 0.2, 0.2, 0.2});
  // W^(1) = I2 given I1 = 1 is Be(1/2), unconditionally Be(0.4).
  const double w1 = oracle::min_coupling_two_point(0, 1, 0.5, 0, 1, 0.6);
  CHECK(w1 == doctest::Approx(0.1));
  CHECK(eta1(m) == doctest::Approx(2 * 0.4 * (1 + 0.8 + 0.64) * w1).epsilon(1e-12));

  // Perfectly correlated pair with p = 0.3: E|1 - Be(0.3)| = 0.7.
  const auto c = IndicatorModel::joint(2, {0.7, 0.0, 0.0, 0.3});
  CHECK(wasserstein1(c.conditional_without(0), c.law_without(0)) == doctest::Approx(0.7));
}

TEST_CASE("smoothness quantities") {
  const auto one = smoothness_exact(IndicatorModel::independent({0.5}));
  CHECK(one.d == doctest::Approx(2.0));
  CHECK(one.d2 == 0.0);

  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    const auto probs = oracle::random_probs(rng, static_cast<std::size_t>(4 + trial % 13), 0.05, 0.6);
    const auto m = IndicatorModel::independent(probs);
    const auto st = smoothness_exact(m);
    CHECK(st.d == doctest::Approx(oracle::finite_difference_norm(oracle::enumerate_indicator_sum(probs), 2))
                      .epsilon(1e-9));
    for (double v : {st.d, st.d1, st.d2}) {
      CHECK(v >= 0.0);
      CHECK(v <= 4.0);
    }
    CHECK(st.d <= d_bound_independent(probs));
    CHECK(st.d1 <= d1_bound_independent(probs));
  }
}

TEST_CASE("psi tail bound") {
  CHECK(tail_bound_psi(std::exp(-1.0), 3.0) == doctest::Approx(std::exp(-3.0)));
  CHECK(tail_bound_psi(0.3, 0.0) == 1.0);
  CHECK(tail_bound_psi(0.999999, 5.0) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK_THROWS(tail_bound_psi(1.0, 1.0));

  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    const auto probs = oracle::random_probs(rng, 10 + trial, 0.01, 0.3);
    const auto bp = fit_bcp(probs);
    const auto t = static_cast<std::size_t>(std::floor(bp.M + bp.alpha / bp.p));
    const double bound = tail_bound_psi(bp.p, std::accumulate(probs.begin(), probs.end(), 0.0));
    CHECK(upper_tail(pmf_poisson_binomial(probs), t) <= bound);
    CHECK(upper_tail(pmf_bcp(bp), t) <= bound);
  }
}

TEST_CASE("thm41 and cor42 reports") {
  const auto eq = bound_thm41(IndicatorModel::independent(std::vector<double>(12, 0.1)));
  CHECK(item(eq, "eta1") == 0.0);
  CHECK(item(eq, "delta_term") == 0.0);
  CHECK(eq.hypotheses_met());

  std::vector<double> grid(20);
  for (std::size_t i = 0; i < grid.size(); ++i) grid[i] = 0.005 + 0.14 * static_cast<double>(i) / 19.0;
  const auto m = IndicatorModel::independent(grid);
  const auto t41 = bound_thm41(m);
  const auto c42 = bound_cor42(grid);
  CHECK(t41.hypotheses_met());
  CHECK(t41.dominant == std::optional<bool>{true});
  CHECK(c42.dominant == std::optional<bool>{true});
  CHECK(c42.total >= t41.total);

  // max p_i < (3 - sqrt 5) / 4 is enough for both hypotheses.
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 40; ++trial) {
    const auto probs = oracle::random_probs(rng, 5 + trial, 0.001, (3 - std::sqrt(5.0)) / 4 - 1e-9);
    const auto r = bound_cor42(probs);
    CHECK(r.flags[0].second);
    CHECK(r.flags[1].second);
  }

  const auto few = bound_cor42(std::vector<double>{0.5, 0.1});
  CHECK_FALSE(few.hypotheses_met());
  CHECK_FALSE(few.dominant.has_value());

  // total is the sum of prefactor times items.
  double recomposed = 0.0;
  for (const auto& g : c42.groups) {
    double s = 0.0;
    for (const auto& it : g.items) s += it.value;
    recomposed += g.prefactor * s;
  }
  CHECK(c42.total == doctest::Approx(recomposed).epsilon(1e-14));
}

TEST_CASE("thm44 and cor45 reports") {
  const auto eq = bound_cor45(std::vector<double>(25, 0.13));
  CHECK(eq.total <= 1e-12);
  CHECK(eq.exact_tv->upper <= 1e-12);
  const auto eq44 = bound_thm44(IndicatorModel::independent(std::vector<double>(25, 0.13)));
  CHECK(eq44.total <= 1e-12);

  const auto probs = oracle::random_probs(*std::make_unique<std::mt19937_64>(5), 30, 0.05, 0.15);
  const auto c45 = bound_cor45(probs);
  CHECK(c45.hypotheses_met());
  CHECK(c45.dominant == std::optional<bool>{true});
  const auto psi = bound_cor45(probs, {true});
  // Both tails are negligible here; the exact ones carry truncation slack.
  CHECK(psi.total == doctest::Approx(c45.total).epsilon(1e-9));

  // Independent model: covariance and coupling terms vanish.
  const auto m = IndicatorModel::independent(probs);
  const auto t44 = bound_thm44(m);
  CHECK(item(t44, "coupling_single") == 0.0);
  CHECK(item(t44, "pair_term") == 0.0);
  CHECK(t44.dominant == std::optional<bool>{true});

  // Substituting d2 -> 4 / (sigma^2 - 3 tau) recovers the corollary's d2 term;
  // the delta terms differ by the displayed pq T_hat factor.
  double sigma2 = 0.0, tau = 0.0;
  for (double p : probs) {
    sigma2 += p * (1 - p);
    tau = std::max(tau, p * (1 - p));
  }
  const auto sub = bound_thm44_with_d2(m, 4.0 / (sigma2 - 3 * tau));
  CHECK(sub.groups[0].prefactor * item(sub, "d2_term") ==
        doctest::Approx(c45.groups[0].prefactor * item(c45, "d2_term")).epsilon(1e-12));
  CHECK(sub.groups[1].prefactor * (item(sub, "tail_w") + item(sub, "tail_bcp")) ==
        doctest::Approx(c45.groups[0].prefactor * (item(c45, "tail_w") + item(c45, "tail_bcp"))).epsilon(1e-12));

  // Cauchy-Schwarz: sum p^4 - p sum p^3 >= 0.
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 100; ++trial) {
    const auto v = oracle::random_probs(rng, 2 + trial % 30, 0.001, 0.999);
    const auto f = fit_bcp(v);
    CHECK(sum_pow(v, 4) - f.p * sum_pow(v, 3) >= -1e-15);
  }
}

TEST_CASE("dependent model: thm44 dominance with a correlated pair") {
  // n = 3: I1 and I2 positively correlated, I3 independent.
  const double p3 = 0.1;
  const std::vector<double> pair{0.84, 0.04, 0.04, 0.08};  // states 00, 10, 01, 11
  std::vector<double> law(8);
  for (std::size_t s = 0; s < 8; ++s) law[s] = pair[s & 3U] * ((s >> 2 & 1U) ? p3 : 1 - p3);
  const auto m = IndicatorModel::joint(3, law);
  CHECK(m.covariance(0, 1) == doctest::Approx(0.08 - 0.12 * 0.12));
  const auto r = bound_thm44(m);
  CHECK(r.exact_tv->upper == doctest::Approx(oracle::tv_by_subsets(oracle::joint_sum_law(3, law),
                                                                   pmf_bcp(r.params).masses)).epsilon(1e-6));
  if (r.hypotheses_met()) CHECK(r.dominant == std::optional<bool>{true});
  const auto r41 = bound_thm41(m);
  CHECK(item(r41, "eta1") > 0.0);
  if (r41.hypotheses_met()) CHECK(r41.dominant == std::optional<bool>{true});
}

TEST_CASE("order of accuracy for the half model") {
  // The bound decays like 1/n; ratios over a single doubling fluctuate with delta.
  const double b64 = bound_cor42(half_model(64)).total;
  const double b512 = bound_cor42(half_model(512)).total;
  CHECK(b512 / b64 == doctest::Approx(1.0 / 8.0).epsilon(0.5));
}

TEST_CASE("report serialisation") {
  const auto r = bound_cor45(half_model(20));
  const auto j = to_json(r);
  CHECK(j.at("theorem") == "cor45");
  CHECK(j.at("flags").contains("theta2_lt_half"));
  CHECK(j.at("groups").size() == 1);
  const std::string row = report_csv_row(r);
  const std::string header = report_csv_header();
  CHECK(std::count(row.begin(), row.end(), ',') == std::count(header.begin(), header.end(), ','));
}
