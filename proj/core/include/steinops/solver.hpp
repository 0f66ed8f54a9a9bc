#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "steinops/pmf.hpp"

namespace steinops {

/// Operator (Ag)(j) = alpha_j g(j+1) - beta_j g(j), beta_0 = 0.
///
/// With a finite support_end the test functions vanish beyond it, so
/// alpha_{support_end} plays no role in the equation.
struct BirthDeathOperator {
  std::string name;
  std::function<double(std::size_t)> alpha;
  std::function<double(std::size_t)> beta;
  std::optional<std::size_t> support_end;

  static BirthDeathOperator poisson(double lambda);
  static BirthDeathOperator negative_binomial(double r, double p_bar);
  static BirthDeathOperator pseudo_binomial(double m_tilde, double p);
  static BirthDeathOperator binomial(std::size_t n, double p);

  /// alpha_k - alpha_{k-1} <= beta_k - beta_{k-1} for k = 1..last.
  bool monotone(std::size_t last) const;
};

/// Law whose ratio operator is bd: mu_{j+1} = mu_j alpha_j / beta_{j+1}.
Pmf stationary_pmf(const BirthDeathOperator& bd, double tol = kDefaultTol);

struct SteinSolution {
  /// g(0..N+1) on the truncated support {0..N}; g(0) = 0.
  std::vector<double> g;
  /// Truncated law renormalised to unit mass; the equation is solved for it.
  Pmf law;
  double mean_f = 0.0;
  /// max_j |alpha_j g(j+1) - beta_j g(j) - (f(j) - E f(Y))| over the support.
  double max_residual = 0.0;
};

/// Solves alpha_j g(j+1) - beta_j g(j) = f(j) - E f(Y) with
///   g(j+1) = sum_{k<=j} mu_k (f(k) - E f) / (alpha_j mu_j),
/// switching to the equivalent right-tail sum past the median.
SteinSolution solve_stein(const BirthDeathOperator& bd, const std::function<double(std::size_t)>& f,
                          double tol = kDefaultTol);

enum class FRange {
  bounded,     ///< general bounded f: constant 2 ||f||
  unit_interval  ///< f maps into [0, 1]: constant 1
};

struct DeltaBoundReport {
  bool hypothesis_met = false;  ///< monotonicity and no boundary truncation
  bool informational = false;   ///< true when the hypothesis is unmet
  double f_norm = 0.0;
  double constant = 0.0;        ///< 2 ||f|| or 1
  double max_abs_delta = 0.0;   ///< sup_j |Delta g(j)|
  double max_ratio = 0.0;       ///< sup_j |Delta g(j)| / bound_j
  std::size_t violations = 0;
  bool holds = false;           ///< no violations (up to 1e-12 relative slack)
};

/// Checks |Delta g(j)| <= C min(1/alpha_j, 1/beta_j) pointwise for the solution of f.
DeltaBoundReport delta_bound_check(const BirthDeathOperator& bd,
                                   const std::function<double(std::size_t)>& f, FRange range,
                                   double tol = kDefaultTol);

// Uniform smoothness bounds ||Delta g|| <= ... for the three standard families.
double delta_g_bound_poisson(double lambda, double f_norm);
double delta_g_bound_negative_binomial(double r, double p_bar, double f_norm);
double delta_g_bound_pseudo_binomial(double m_tilde, double p, double f_norm);

enum class PerturbationKind { O1, O2, O3, O4, O5, O6 };

std::string to_string(PerturbationKind kind);
PerturbationKind perturbation_kind_from_string(const std::string& s);

/// omega1, gamma control the unperturbed solution; omega2 the perturbation.
struct PerturbationConstants {
  PerturbationKind kind = PerturbationKind::O1;
  double omega1 = 0.0;
  double omega2 = 0.0;
  double gamma = 0.0;
  bool valid = false;  ///< omega1 * omega2 < gamma
};

struct PerturbationParams {
  std::size_t M = 0;
  double p = 0.0;
  double alpha = 0.0;
  double r = 0.0;
  double p_bar = 0.0;
  std::vector<double> lambdas;  ///< lambdas[i] = lambda_{i+1}, kind O1 only
};

/// O1 compound Poisson, O2 BCP as pseudo-binomial perturbation, O3 BCP as
/// Poisson perturbation, O4-O6 Bi * NB as binomial / NB / Poisson perturbation.
PerturbationConstants perturbation_constants(PerturbationKind kind, const PerturbationParams& params);

/// gamma / (gamma - omega1 omega2) * (eps omega1 min(1, 1/gamma) + 2 pz_tail + 2 pw_tail).
double lemma31_bound(const PerturbationConstants& pc, double eps, double pz_tail, double pw_tail);

nlohmann::json to_json(const PerturbationConstants& pc);

}  // namespace steinops
