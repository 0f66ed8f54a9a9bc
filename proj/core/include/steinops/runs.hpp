#pragma once

#include <cstddef>
#include <optional>

#include <nlohmann/json.hpp>

#include "steinops/indicators.hpp"
#include "steinops/pmf.hpp"

namespace steinops {

/// W = sum_{j=2}^n X_j (1 - X_{j-1}) over iid Be(p_star) trials.
struct RunsModel {
  std::size_t n = 2;
  double p_star = 0.5;

  RunsModel(std::size_t n, double p_star);

  double a() const noexcept { return p_star * (1.0 - p_star); }
  /// (n - 2) a >= 8.
  bool lemma_hypothesis() const noexcept;
};

/// Exact law by a DP over (previous trial, count). With skip set, the
/// indicator at position *skip (2..n) is left out of the count while the
/// trial sequence is unchanged, giving the law of W^{(skip)}.
Pmf exact_runs_law(const RunsModel& model, std::optional<std::size_t> skip = std::nullopt);

struct RunsMoments {
  double mean = 0.0;
  double variance = 0.0;
  double third_central = 0.0;
};

RunsMoments runs_moments(const RunsModel& model);

/// Matches mean, variance and third central moment: p = (10n-22)/(3n-5) a,
/// M + delta = (3n-5)^3 / (10n-22)^2, alpha = (n-1) a - M p. Needs n >= 3 and p < 1.
BcpParams fit_runs_bcp(const RunsModel& model);

struct RunsConstants {
  double K1 = 0.0;
  double K2 = 0.0;
  double C1 = 0.0;
  double gamma = 0.0;  ///< K1/(n-1) + K2/sqrt(n-1)
};

RunsConstants runs_constants(const RunsModel& model);

struct Lemma47Report {
  bool hypothesis_met = false;
  double d_exact = 0.0;
  double d_bound = 0.0;
  double d1_exact = 0.0;
  double d1_bound = 0.0;
  bool d_holds = false;
  bool d1_holds = false;
};

Lemma47Report lemma47_check(const RunsModel& model);

BoundReport bound_cor48(const RunsModel& model);

struct WaitingTimeMoments {
  double mean = 0.0;
  double variance = 0.0;
  bool variance_valid = false;  ///< a <= 1/3
};

/// Moments of the gap between successive 01-patterns, PGF a z^2 / (1 - z + a z^2).
WaitingTimeMoments waiting_time_moments(double p_star);

nlohmann::json to_json(const RunsConstants& c);
nlohmann::json to_json(const Lemma47Report& r);

}  // namespace steinops
