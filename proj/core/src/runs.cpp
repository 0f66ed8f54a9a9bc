#include "steinops/runs.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "steinops/distributions.hpp"

namespace steinops {

RunsModel::RunsModel(std::size_t n_, double p_star_) : n(n_), p_star(p_star_) {
  if (n < 2) throw std::invalid_argument("runs model: n must be >= 2");
  if (!(p_star > 0.0 && p_star < 1.0)) throw std::invalid_argument("runs model: p* must lie in (0, 1)");
}

bool RunsModel::lemma_hypothesis() const noexcept {
  return static_cast<double>(n - 2) * a() >= 8.0;
}

Pmf exact_runs_law(const RunsModel& model, std::optional<std::size_t> skip) {
  if (skip && (*skip < 2 || *skip > model.n)) throw std::out_of_range("exact_runs_law: skip outside 2..n");
  const double p = model.p_star;
  const double q = 1.0 - p;
  // state[x][k] = P(X_j = x, count = k)
  std::array<std::vector<double>, 2> state{std::vector<double>(model.n, 0.0),
                                           std::vector<double>(model.n, 0.0)};
  state[0][0] = q;
  state[1][0] = p;
  for (std::size_t j = 2; j <= model.n; ++j) {
    const bool counted = !skip || *skip != j;
    std::array<std::vector<double>, 2> next{std::vector<double>(model.n, 0.0),
                                            std::vector<double>(model.n, 0.0)};
    for (std::size_t k = 0; k + 1 < model.n; ++k) {
      const double from0 = state[0][k];
      const double from1 = state[1][k];
      next[0][k] += (from0 + from1) * q;
      next[1][k] += from1 * p;
      next[1][counted ? k + 1 : k] += from0 * p;
    }
    state = std::move(next);
  }
  Pmf out;
  out.masses.resize(model.n);
  for (std::size_t k = 0; k < model.n; ++k) out.masses[k] = state[0][k] + state[1][k];
  trim_trailing_zeros(out);
  return out;
}

RunsMoments runs_moments(const RunsModel& model) {
  const double a = model.a();
  const double n = static_cast<double>(model.n);
  return {(n - 1.0) * a, (n - 1.0) * a + (5.0 - 3.0 * n) * a * a,
          (n - 1.0) * a + (15.0 - 9.0 * n) * a * a + 4.0 * (5.0 * n - 11.0) * a * a * a};
}

BcpParams fit_runs_bcp(const RunsModel& model) {
  if (model.n < 3) throw std::invalid_argument("fit_runs_bcp: n must be >= 3");
  const double n = static_cast<double>(model.n);
  const double a = model.a();
  const double u = 3.0 * n - 5.0;
  const double v = 10.0 * n - 22.0;
  BcpParams bp;
  bp.p = v / u * a;
  if (!(bp.p < 1.0)) throw std::domain_error("fit_runs_bcp: fitted p >= 1");
  const double ratio = u * u * u / (v * v);
  const double m = std::floor(ratio);
  bp.M = static_cast<std::size_t>(m);
  bp.delta = ratio - m;
  bp.alpha = (n - 1.0) * a - m * bp.p;
  return bp;
}

RunsConstants runs_constants(const RunsModel& model) {
  const double a = model.a();
  const double n1 = static_cast<double>(model.n) - 1.0;
  RunsConstants c;
  c.K1 = 288.0 * (1.0 - 3.0 * a) / a;
  c.K2 = 4.0 / (a * std::sqrt(std::min(1.0 - a, 0.5)));
  c.C1 = 2.0 * std::max(1.0, 2.0 * (1.0 - a)) * a * (1.0 + 2.0 * a + 4.0 * a * a) *
         (1.0 - a * (1.0 - a));
  c.gamma = c.K1 / n1 + c.K2 / std::sqrt(n1);
  return c;
}

Lemma47Report lemma47_check(const RunsModel& model) {
  if (model.n < 3) throw std::invalid_argument("lemma47_check: n must be >= 3");
  const RunsConstants c = runs_constants(model);
  const double n2 = static_cast<double>(model.n) - 2.0;
  Lemma47Report r;
  r.hypothesis_met = model.lemma_hypothesis();
  r.d_exact = difference_norm(exact_runs_law(model), 2);
  r.d_bound = c.gamma;
  for (std::size_t i = 2; i <= model.n; ++i) {
    r.d1_exact = std::max(r.d1_exact, difference_norm(exact_runs_law(model, i), 2));
  }
  r.d1_bound = c.K1 / n2 + c.K2 / std::sqrt(n2);
  r.d_holds = r.d_exact <= r.d_bound;
  r.d1_holds = r.d1_exact <= r.d1_bound;
  return r;
}

BoundReport bound_cor48(const RunsModel& model) {
  BoundReport r;
  r.theorem = "cor48";
  r.n = model.n;
  r.params = fit_runs_bcp(model);
  const BcpParams& bp = r.params;
  const RunsConstants c = runs_constants(model);
  const double a = model.a();
  const double n = static_cast<double>(model.n);
  const double lambda_hat = (n - 1.0) * a;
  const double one_m_2p = 1.0 - 2.0 * bp.p;
  const double theta1 = static_cast<double>(bp.M) * bp.p * bp.p / (one_m_2p * one_m_2p * lambda_hat);

  r.stats = {{"a", a},           {"lambda_hat", lambda_hat}, {"theta1", theta1}, {"K1", c.K1},
             {"K2", c.K2},       {"C1", c.C1},               {"gamma", c.gamma}};
  r.flags = {{"max_p_theta1_le_half", std::max(bp.p, theta1) <= 0.5},
             {"n2a_ge_8", model.lemma_hypothesis()}};

  const double p4 = std::pow(bp.p, 4);
  const double smooth = c.K1 / (n - 2.0) + c.K2 / std::sqrt(n - 2.0);
  BoundGroup g{"2/((1-2theta1)lambda_hat)", 2.0 / ((1.0 - 2.0 * theta1) * lambda_hat), {}};
  g.items.push_back(
      {"smooth_term", (n * std::pow(a, 4) + static_cast<double>(bp.M) * p4 / (one_m_2p * one_m_2p)) * smooth});
  g.items.push_back({"delta_term", (1.0 + 2.0 * bp.p) * bp.delta * bp.p * bp.p});
  g.items.push_back({"c1_term", (n - 1.0) * c.C1});
  r.groups.push_back(std::move(g));
  r.exact_tv = tv_interval(exact_runs_law(model), pmf_bcp(bp));
  r.finalize();
  return r;
}

WaitingTimeMoments waiting_time_moments(double p_star) {
  if (!(p_star > 0.0 && p_star < 1.0)) throw std::invalid_argument("waiting time: p* must lie in (0, 1)");
  const double a = p_star * (1.0 - p_star);
  return {1.0 / a, (1.0 - 3.0 * a) / (a * a), a <= 1.0 / 3.0};
}

nlohmann::json to_json(const RunsConstants& c) {
  return {{"K1", c.K1}, {"K2", c.K2}, {"C1", c.C1}, {"gamma", c.gamma}};
}

nlohmann::json to_json(const Lemma47Report& r) {
  return {{"hypothesis_met", r.hypothesis_met}, {"d_exact", r.d_exact},   {"d_bound", r.d_bound},
          {"d1_exact", r.d1_exact},             {"d1_bound", r.d1_bound}, {"d_holds", r.d_holds},
          {"d1_holds", r.d1_holds}};
}

}  // namespace steinops
