#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "steinops/pmf.hpp"

namespace steinops {

/// Bi(M, p) * Poisson(alpha); M + delta matches the second and third moments.
struct BcpParams {
  std::size_t M = 0;
  double delta = 0.0;
  double p = 0.0;
  double alpha = 0.0;
};

/// Three-moment fit to W = sum of indicators with success probabilities probs.
/// Throws std::invalid_argument when every p_i is 0 or every p_i is 1.
BcpParams fit_bcp(std::span<const double> probs);

Pmf pmf_bcp(const BcpParams& params, double tol = kDefaultTol);

nlohmann::json to_json(const BcpParams& params);

/// Sum of n indicators, either independent or given by an exact joint law.
class IndicatorModel {
 public:
  static constexpr std::size_t kMaxJoint = 24;

  static IndicatorModel independent(std::vector<double> probs);
  /// joint[s] = P(I_{i+1} = bit i of s for all i), size 2^n.
  static IndicatorModel joint(std::size_t n, std::vector<double> joint);
  /// {"kind": "independent", "probs": [...]} or
  /// {"kind": "joint", "n": k, "atoms": [[b_1, ..., b_k, prob], ...]}.
  static IndicatorModel from_json(const nlohmann::json& j);

  bool is_independent() const noexcept { return joint_.empty(); }
  std::size_t n() const noexcept { return probs_.size(); }
  std::span<const double> probs() const noexcept { return probs_; }

  Pmf law_w() const;
  /// Law of W^{(i)} = W - I_i.
  Pmf law_without(std::size_t i) const;
  /// Law of W^{(ij)} = W - I_i - I_j, i != j.
  Pmf law_without(std::size_t i, std::size_t j) const;
  /// Law of W^{(i)} given I_i = 1.
  Pmf conditional_without(std::size_t i) const;
  /// Law of W^{(ij)} given I_i = 1.
  Pmf conditional_without(std::size_t i, std::size_t j) const;
  double covariance(std::size_t i, std::size_t j) const;

 private:
  std::vector<double> probs_;
  std::vector<double> joint_;

  // Law of sum over indices not in {skip_a, skip_b} given I_cond = 1 (if set).
  Pmf joint_law(std::optional<std::size_t> skip_a, std::optional<std::size_t> skip_b,
                std::optional<std::size_t> cond) const;
};

struct SmoothnessStats {
  double d = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

/// d = ||L(W) * (I_1 - I)^2||, d1 = max_i of the same for W^{(i)},
/// d2 = max_{i != j} ||L(W^{(ij)}) * (I_1 - I)||; d2 = 0 when n < 2.
SmoothnessStats smoothness_exact(const IndicatorModel& model);

/// Closed-form bounds for independent indicators; +inf where the
/// denominator is not positive.
double d_bound_independent(std::span<const double> probs);
double d1_bound_independent(std::span<const double> probs);

/// sum_i p_i (1 + 2 p_i + 4 p_i^2) E|W~^{(i)} - W^{(i)}| with the minimal coupling.
double eta1(const IndicatorModel& model);

/// exp(-lambda_hat psi(p)), psi(p) = (-ln p - 1) / p + 1.
double tail_bound_psi(double p, double lambda_hat);

struct BoundItem {
  std::string name;
  double value = 0.0;
};

struct BoundGroup {
  std::string prefactor_name;
  double prefactor = 0.0;
  std::vector<BoundItem> items;
};

struct BoundReport {
  std::string theorem;
  std::size_t n = 0;
  BcpParams params;
  /// Summary statistics (lambda_hat, sigma2, tau, theta, ...) in emission order.
  std::vector<std::pair<std::string, double>> stats;
  /// Hypotheses of the theorem in emission order.
  std::vector<std::pair<std::string, bool>> flags;
  std::vector<BoundGroup> groups;
  double total = 0.0;  ///< sum over groups of prefactor * sum(items)
  std::optional<TvInterval> exact_tv;
  /// total >= exact_tv.upper; set only when every hypothesis holds.
  std::optional<bool> dominant;

  bool hypotheses_met() const noexcept;
  /// Recomputes total from groups and sets the verdict.
  void finalize();
};

struct Cor45Options {
  bool psi_tails = false;  ///< replace the exact tails by exp(-lambda_hat psi(p)) each
};

BoundReport bound_thm41(const IndicatorModel& model);
BoundReport bound_cor42(std::span<const double> probs);
BoundReport bound_thm44(const IndicatorModel& model);
/// As bound_thm44 with d2 replaced by a supplied value.
BoundReport bound_thm44_with_d2(const IndicatorModel& model, double d2);
BoundReport bound_cor45(std::span<const double> probs, Cor45Options opts = {});

nlohmann::json to_json(const BoundReport& report);

/// Flat CSV: fixed columns, items packed as name=value;... .
std::string report_csv_header();
std::string report_csv_row(const BoundReport& report);

}  // namespace steinops
