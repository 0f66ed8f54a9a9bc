#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "steinops/distributions.hpp"
#include "steinops/pmf.hpp"

namespace steinops {

inline constexpr double kDefaultSeriesTol = 1e-14;

/// (u + v j) g(j + offset)
struct AffineTerm {
  std::size_t offset = 0;
  double constant = 0.0;
  double slope = 0.0;

  friend bool operator==(const AffineTerm&, const AffineTerm&) = default;
};

/// Stein operator in the normal form
///   (Ag)(j) = sum_l (u_l + v_l j) g(j + l).
///
/// Delta-sum presentations are telescoped on construction through
///   sum_{l=1}^{m-1} Delta g(j + l) = g(j + m) - g(j + 1).
/// An operator whose offset-1 coefficient is not affine in j (the generic
/// ratio operator) carries it in a per-index table instead.
class AffineOperator {
 public:
  AffineOperator() = default;
  explicit AffineOperator(std::string name) : name_(std::move(name)) {}

  /// Adds (u + v j) g(j + offset), merging with an existing term at that offset.
  void add_term(std::size_t offset, double constant, double slope = 0.0);

  /// Adds (u + v j) sum_{l=1}^{m-1} Delta g(j + l), m >= 2.
  void add_delta_sum(std::size_t m, double constant, double slope = 0.0);

  void set_pointwise(std::vector<double> offset1);
  void set_domain_end(std::size_t last) { domain_end_ = last; }
  void set_series_truncation(double series_tol, double dropped_tail) {
    series_tol_ = series_tol;
    dropped_tail_ = dropped_tail;
  }

  const std::string& name() const noexcept { return name_; }
  std::span<const AffineTerm> terms() const noexcept { return terms_; }
  std::span<const double> pointwise() const noexcept { return pointwise_; }
  std::optional<std::size_t> domain_end() const noexcept { return domain_end_; }
  double series_tol() const noexcept { return series_tol_; }
  /// Sum of |coefficient| of series terms dropped by truncation.
  double dropped_tail() const noexcept { return dropped_tail_; }

  std::size_t max_offset() const noexcept;

  /// Coefficient of g(j + offset) at index j.
  double coefficient(std::size_t offset, std::size_t j) const noexcept;

  /// (Ag)(j) with g taken as zero past g.size() and past domain_end.
  double apply(std::span<const double> g, std::size_t j) const noexcept;

  AffineOperator scaled(double factor) const;

 private:
  std::string name_;
  std::vector<AffineTerm> terms_;  // sorted by offset
  std::vector<double> pointwise_;
  std::optional<std::size_t> domain_end_;
  double series_tol_ = 0.0;
  double dropped_tail_ = 0.0;
};

/// Test function g on {0, ..., size-1}, zero beyond, with g(0) = 0.
struct TestFunction {
  std::vector<double> values;

  static TestFunction indicator(std::size_t k);
  static TestFunction identity(std::size_t length);
  void validate() const;
};

// Catalog. Each constructor returns the operator in the normal form with
// the same overall scaling the operator is usually written with.

/// ((j+1) mu_{j+1} / mu_j) g(j+1) - j g(j) from a strictly positive pmf.
AffineOperator op_generic_ratio(const Pmf& y);

AffineOperator op_poisson(double alpha);
AffineOperator op_pseudo_binomial(double m_tilde, double p);
AffineOperator op_negative_binomial(double r, double p_bar);

/// lambdas[i] holds lambda_{i+1}.
AffineOperator op_compound_poisson(std::span<const double> lambdas);
AffineOperator op_bi_cp(std::size_t m, double p, std::span<const double> lambdas);
AffineOperator op_nb_cp(double r, double p_bar, std::span<const double> lambdas);

/// Bi(M, p) * Poisson(alpha) written as a perturbed pseudo-binomial operator.
AffineOperator op_bcp_binomial_perturbation(std::size_t m, double p, double alpha);
/// Bi(M, p) * Poisson(alpha) written as a perturbed Poisson operator; needs p < q.
AffineOperator op_bcp_poisson_perturbation(std::size_t m, double p, double alpha,
                                           double series_tol = kDefaultSeriesTol);

/// Bi(M, p) * NB(r, p_bar). Variant 1 is the exact three-term operator,
/// variants 2, 3, 4 are the binomial, negative binomial and Poisson
/// perturbation series (p < q required for 2-4).
AffineOperator op_binb(int variant, std::size_t m, double p, double r, double p_bar,
                       double series_tol = kDefaultSeriesTol);

/// sum_{l>=1} (a l + b j) g(j+l) p_l - (1 - b p_0) j g(j).
AffineOperator op_compound_panjer(double a, double b, const SeverityLaw& severity);
AffineOperator op_compound_negative_binomial(double r, double p_bar,
                                             const SeverityLaw& severity);
/// Scaled by q relative to op_compound_panjer(np/q, -p/q).
AffineOperator op_compound_binomial(std::size_t n, double p, const SeverityLaw& severity);
/// q sum_m p_m g(j+m) - g(j); severity must have p_0 = 0.
AffineOperator op_compound_geometric(double q, const SeverityLaw& severity);

struct DefectResult {
  double defect = 0.0;
  /// Upper bound on what the truncated tail of y could add.
  double contamination = 0.0;
};

/// |E (Ag)(Y)| over the materialised support of y.
DefectResult characterization_defect(const AffineOperator& op, const Pmf& y,
                                     const TestFunction& g);

/// max over k in 1..k_max of the defect at g = I(. = k).
double max_indicator_defect(const AffineOperator& op, const Pmf& y, std::size_t k_max);

nlohmann::json to_json(const AffineOperator& op);

}  // namespace steinops
