#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "steinops/pmf.hpp"

namespace steinops {

// Standard families. Infinite-support laws are cut once the cumulative mass
// reaches 1 - tol; the remainder is recorded as tail_mass.

Pmf pmf_poisson(double alpha, double tol = kDefaultTol);
Pmf pmf_binomial(std::size_t n, double p);
Pmf pmf_negative_binomial(double r, double p_bar, double tol = kDefaultTol);

/// Binomial form with real exponent m_tilde > 1, renormalised over
/// {0, ..., floor(m_tilde)}.
Pmf pmf_pseudo_binomial(double m_tilde, double p);

/// Bi(m, p) * Poisson(alpha); alpha == 0 gives the pure binomial.
Pmf pmf_bcp(std::size_t m, double p, double alpha, double tol = kDefaultTol);

/// Exact law of a sum of independent Bernoulli(p_i).
Pmf pmf_poisson_binomial(std::span<const double> probs);

/// Law of a single summand X_1 of a compound sum; p_0 may be positive.
class SeverityLaw {
 public:
  explicit SeverityLaw(std::vector<double> masses, double tol = kDefaultTol);

  static SeverityLaw point(std::size_t at);

  std::span<const double> masses() const noexcept { return masses_; }
  double operator[](std::size_t k) const noexcept {
    return k < masses_.size() ? masses_[k] : 0.0;
  }
  std::size_t size() const noexcept { return masses_.size(); }
  double mean() const noexcept;
  Pmf as_pmf() const;

 private:
  std::vector<double> masses_;
  double tol_;
};

/// Counting law in Panjer's class: (k+1) mu_{k+1} / mu_k = a + b k.
///
/// b == 0 is Poisson(a); b < 0 is binomial with n = -a/b, p = -b/(1-b);
/// 0 < b < 1 is negative binomial with r = a/b, p_bar = 1 - b.
struct PanjerCounting {
  double a = 0.0;
  double b = 0.0;
  std::optional<std::size_t> K;  // last support point, empty if unbounded
  double mu0 = 1.0;

  static PanjerCounting poisson(double lambda);
  static PanjerCounting binomial(std::size_t n, double p);
  static PanjerCounting negative_binomial(double r, double p_bar);
  /// Recognises the family from (a, b); throws if the pair is not valid.
  static PanjerCounting from_ab(double a, double b);

  /// Probability generating function, closed form per family.
  double pgf(double z) const;

  /// mu_k generated by the recursion and truncated at tail <= tol.
  Pmf masses(double tol = kDefaultTol) const;

  std::string family() const;
};

/// Compound law of S_N via the Panjer-type recursion
///   pi_j = sum_{l=1}^{j} (b + (a - b) l / j) p_l pi_{j-l} / (1 - b p_0),
/// seeded with pi_0 = G_N(p_0).
Pmf pmf_compound_panjer(const PanjerCounting& counting, const SeverityLaw& severity,
                        double tol = kDefaultTol);

/// Compound law by explicit mixing pi_j = sum_k mu_k P(S_k = j).
Pmf pmf_compound_explicit(const Pmf& counting, const SeverityLaw& severity,
                          double tol = kDefaultTol);

}  // namespace steinops
