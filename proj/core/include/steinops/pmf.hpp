#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace steinops {

inline constexpr double kDefaultTol = 1e-12;

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) noexcept;
  CompensatedSum& operator+=(double x) noexcept {
    add(x);
    return *this;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Truncated probability mass function on {0, 1, 2, ...}.
///
/// masses[j] = P(Y = j) for j < size(); the mass that was not materialised
/// (the far right tail of an infinite-support law) is carried in tail_mass.
/// Invariants: masses >= 0, |sum(masses) + tail_mass - 1| <= tol,
/// tail_mass <= tol.
struct Pmf {
  std::vector<double> masses;
  double tail_mass = 0.0;
  double tol = kDefaultTol;

  std::size_t size() const noexcept { return masses.size(); }
  bool empty() const noexcept { return masses.empty(); }

  /// P(Y = j); zero past the materialised support.
  double operator[](std::size_t j) const noexcept {
    return j < masses.size() ? masses[j] : 0.0;
  }

  double total() const noexcept;

  /// Throws std::invalid_argument if an invariant does not hold.
  void validate() const;
};

/// Builds a Pmf from explicit masses (nothing is renormalised).
Pmf make_pmf(std::vector<double> masses, double tail_mass = 0.0,
             double tol = kDefaultTol);

Pmf point_mass(std::size_t at);

/// Drops trailing exact zeros (keeps at least one entry).
void trim_trailing_zeros(Pmf& p);

enum class MomentKind { raw, central };

/// k-th raw or central moment by direct summation, k in 1..4.
double moment(const Pmf& p, int k, MomentKind kind = MomentKind::raw);
double mean(const Pmf& p);
double variance(const Pmf& p);

/// Exact convolution with compensated accumulation; tails add.
Pmf convolve(const Pmf& a, const Pmf& b);

/// Total variation distance bracket under truncation: the materialised part
/// of sum_j |a_j - b_j| is exact, the unknown tails can add at most
/// tail(a) + tail(b).
struct TvInterval {
  double lower = 0.0;
  double upper = 0.0;
};

TvInterval tv_interval(const Pmf& a, const Pmf& b);

/// Total variation norm (twice the TV metric), upper end of tv_interval.
double tv_norm(const Pmf& a, const Pmf& b);

/// sum_j |a_j - b_j| over the materialised supports only.
double l1_distance(const Pmf& a, const Pmf& b);
double l1_distance(std::span<const double> a, std::span<const double> b);

/// Signed masses of L(Y) * (I_1 - I)^{*order}, indices 0..size()+order-1.
std::vector<double> difference_measure(const Pmf& p, int order);

/// ||L(Y) * (I_1 - I)^{*order}||_TV.
double difference_norm(const Pmf& p, int order);

/// Wasserstein-1 distance sum_k |F_a(k) - F_b(k)| (minimal coupling E|X-Y|).
double wasserstein1(const Pmf& a, const Pmf& b);

/// P(Y > t), counting tail_mass as lying above t.
double upper_tail(const Pmf& p, std::size_t t);

}  // namespace steinops
