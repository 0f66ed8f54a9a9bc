#include "steinops/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

namespace steinops {
namespace {

constexpr std::size_t kMaxSupport = std::size_t{1} << 24;

void require_probability(double p, const char* what) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument(std::string(what) + ": probability must lie in (0, 1)");
  }
}

// Masses from log mu_0 and log(mu_{j+1} / mu_j), stopping past the mode once
// the cumulative mass reaches 1 - tol.
Pmf from_log_ratios(double log_m0, const std::function<double(std::size_t)>& log_ratio,
                    double mode, double tol) {
  Pmf out;
  out.tol = tol;
  CompensatedSum cum;
  double log_m = log_m0;
  for (std::size_t j = 0;; ++j) {
    const double m = std::exp(log_m);
    out.masses.push_back(m);
    cum += m;
    if (static_cast<double>(j) >= mode && cum.value() >= 1.0 - tol) break;
    if (j + 1 >= kMaxSupport) throw std::domain_error("pmf: support exceeds limit");
    log_m += log_ratio(j);
  }
  out.tail_mass = std::max(0.0, 1.0 - cum.value());
  return out;
}

// Normalised masses of a finite law given log-ratios.
Pmf finite_from_log_ratios(std::size_t last, const std::function<double(std::size_t)>& log_ratio) {
  std::vector<double> logs(last + 1, 0.0);
  for (std::size_t j = 0; j < last; ++j) logs[j + 1] = logs[j] + log_ratio(j);
  const double top = *std::max_element(logs.begin(), logs.end());
  Pmf out;
  out.masses.resize(last + 1);
  CompensatedSum s;
  for (std::size_t j = 0; j <= last; ++j) {
    out.masses[j] = std::exp(logs[j] - top);
    s += out.masses[j];
  }
  const double z = s.value();
  for (double& m : out.masses) m /= z;
  return out;
}

}  // namespace

Pmf pmf_poisson(double alpha, double tol) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw std::invalid_argument("poisson: alpha must be positive");
  }
  if (!(tol > 0.0)) throw std::invalid_argument("poisson: tol must be positive");
  const double la = std::log(alpha);
  return from_log_ratios(
      -alpha, [la](std::size_t j) { return la - std::log(static_cast<double>(j + 1)); }, alpha,
      tol);
}

Pmf pmf_binomial(std::size_t n, double p) {
  require_probability(p, "binomial");
  if (n == 0) return point_mass(0);
  const double q = 1.0 - p;
  const double nd = static_cast<double>(n);
  Pmf out = finite_from_log_ratios(n, [=](std::size_t j) {
    const double jd = static_cast<double>(j);
    return std::log((nd - jd) * p) - std::log((jd + 1.0) * q);
  });
  return out;
}

Pmf pmf_pseudo_binomial(double m_tilde, double p) {
  if (!(m_tilde > 1.0) || !std::isfinite(m_tilde)) {
    throw std::invalid_argument("pseudo-binomial: m_tilde must exceed 1");
  }
  require_probability(p, "pseudo-binomial");
  const double q = 1.0 - p;
  const auto last = static_cast<std::size_t>(std::floor(m_tilde));
  return finite_from_log_ratios(last, [=](std::size_t j) {
    const double jd = static_cast<double>(j);
    return std::log((m_tilde - jd) * p) - std::log((jd + 1.0) * q);
  });
}

Pmf pmf_negative_binomial(double r, double p_bar, double tol) {
  if (!(r > 0.0) || !std::isfinite(r)) {
    throw std::invalid_argument("negative binomial: r must be positive");
  }
  require_probability(p_bar, "negative binomial");
  if (!(tol > 0.0)) throw std::invalid_argument("negative binomial: tol must be positive");
  const double q_bar = 1.0 - p_bar;
  const double lq = std::log(q_bar);
  const double mode = std::max(0.0, (r - 1.0) * q_bar / p_bar);
  return from_log_ratios(
      r * std::log(p_bar),
      [=](std::size_t j) {
        const double jd = static_cast<double>(j);
        return lq + std::log(r + jd) - std::log(jd + 1.0);
      },
      mode, tol);
}

Pmf pmf_bcp(std::size_t m, double p, double alpha, double tol) {
  require_probability(p, "bcp");
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
    throw std::invalid_argument("bcp: alpha must be nonnegative");
  }
  if (alpha == 0.0) return pmf_binomial(m, p);
  if (m == 0) return pmf_poisson(alpha, tol);
  return convolve(pmf_binomial(m, p), pmf_poisson(alpha, tol));
}

Pmf pmf_poisson_binomial(std::span<const double> probs) {
  if (probs.empty()) throw std::invalid_argument("poisson-binomial: no probabilities");
  std::vector<double> law{1.0};
  law.reserve(probs.size() + 1);
  for (double p : probs) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw std::invalid_argument("poisson-binomial: probability outside [0, 1]");
    }
    const double q = 1.0 - p;
    law.push_back(0.0);
    for (std::size_t k = law.size() - 1; k > 0; --k) law[k] = law[k] * q + law[k - 1] * p;
    law[0] *= q;
  }
  return Pmf{std::move(law), 0.0, kDefaultTol};
}

SeverityLaw::SeverityLaw(std::vector<double> masses, double tol)
    : masses_(std::move(masses)), tol_(tol) {
  if (masses_.empty()) throw std::invalid_argument("severity: no masses");
  CompensatedSum s;
  for (double m : masses_) {
    if (!(m >= 0.0) || !std::isfinite(m)) throw std::invalid_argument("severity: negative mass");
    s += m;
  }
  if (std::abs(s.value() - 1.0) > tol_) {
    throw std::invalid_argument("severity: masses sum to " + std::to_string(s.value()));
  }
  while (masses_.size() > 1 && masses_.back() == 0.0) masses_.pop_back();
}

SeverityLaw SeverityLaw::point(std::size_t at) {
  std::vector<double> m(at + 1, 0.0);
  m[at] = 1.0;
  return SeverityLaw(std::move(m));
}

double SeverityLaw::mean() const noexcept {
  CompensatedSum s;
  for (std::size_t k = 0; k < masses_.size(); ++k) s += static_cast<double>(k) * masses_[k];
  return s.value();
}

Pmf SeverityLaw::as_pmf() const { return Pmf{masses_, 0.0, tol_}; }

PanjerCounting PanjerCounting::poisson(double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("panjer: lambda must be positive");
  return {lambda, 0.0, std::nullopt, std::exp(-lambda)};
}

PanjerCounting PanjerCounting::binomial(std::size_t n, double p) {
  require_probability(p, "panjer binomial");
  if (n == 0) throw std::invalid_argument("panjer: binomial n must be positive");
  const double q = 1.0 - p;
  return {static_cast<double>(n) * p / q, -p / q, n, std::pow(q, static_cast<double>(n))};
}

PanjerCounting PanjerCounting::negative_binomial(double r, double p_bar) {
  require_probability(p_bar, "panjer negative binomial");
  if (!(r > 0.0)) throw std::invalid_argument("panjer: r must be positive");
  const double q_bar = 1.0 - p_bar;
  return {r * q_bar, q_bar, std::nullopt, std::pow(p_bar, r)};
}

PanjerCounting PanjerCounting::from_ab(double a, double b) {
  if (b == 0.0) return poisson(a);
  if (b < 0.0) {
    const double n = -a / b;
    const double rounded = std::round(n);
    if (!(rounded >= 1.0) || std::abs(n - rounded) > 1e-9 * std::max(1.0, rounded)) {
      throw std::invalid_argument("panjer: (a, b) with b < 0 needs -a/b a positive integer");
    }
    return binomial(static_cast<std::size_t>(rounded), -b / (1.0 - b));
  }
  if (b < 1.0) {
    if (!(a > 0.0)) throw std::invalid_argument("panjer: negative binomial needs a > 0");
    return negative_binomial(a / b, 1.0 - b);
  }
  throw std::invalid_argument("panjer: b must be < 1");
}

std::string PanjerCounting::family() const {
  if (b == 0.0) return "poisson";
  return b < 0.0 ? "binomial" : "negative-binomial";
}

double PanjerCounting::pgf(double z) const {
  if (b == 0.0) return std::exp(a * (z - 1.0));
  if (b < 0.0) {
    const double p = -b / (1.0 - b);
    return std::pow(1.0 - p + p * z, static_cast<double>(K.value_or(0)));
  }
  const double r = a / b;
  const double p_bar = 1.0 - b;
  return std::pow(p_bar / (1.0 - b * z), r);
}

Pmf PanjerCounting::masses(double tol) const {
  if (b == 0.0) return pmf_poisson(a, tol);
  if (b < 0.0) return pmf_binomial(K.value_or(0), -b / (1.0 - b));
  return pmf_negative_binomial(a / b, 1.0 - b, tol);
}

Pmf pmf_compound_panjer(const PanjerCounting& counting, const SeverityLaw& severity,
                        double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("compound: tol must be positive");
  const double p0 = severity[0];
  const double denom = 1.0 - counting.b * p0;
  if (!(denom > 0.0)) throw std::invalid_argument("compound: 1 - b p_0 must be positive");

  Pmf out;
  out.tol = tol;
  const double pi0 = counting.pgf(p0);
  if (!(pi0 > 0.0)) throw std::domain_error("compound: pi_0 underflows");
  out.masses.push_back(pi0);

  // Bounded support when both the count and the severity are bounded.
  std::optional<std::size_t> last;
  if (counting.K) last = *counting.K * (severity.size() - 1);

  CompensatedSum cum;
  cum += pi0;
  const std::size_t max_offset = severity.size() - 1;
  for (std::size_t j = 1;; ++j) {
    if (cum.value() >= 1.0 - tol && !last) break;
    if (last && j > *last) break;
    if (j >= kMaxSupport) throw std::domain_error("compound: support exceeds limit");
    const double jd = static_cast<double>(j);
    CompensatedSum s;
    for (std::size_t l = 1; l <= std::min(j, max_offset); ++l) {
      const double w = counting.b + (counting.a - counting.b) * static_cast<double>(l) / jd;
      s += w * severity[l] * out.masses[j - l];
    }
    double pj = s.value() / denom;
    if (pj < 0.0) {
      if (pj < -1e-9) {
        throw std::domain_error("compound: negative mass " + std::to_string(pj) +
                                " at index " + std::to_string(j) +
                                "; (a, b) is not a valid Panjer pair");
      }
      pj = 0.0;
    }
    out.masses.push_back(pj);
    cum += pj;
  }
  out.tail_mass = std::min(tol, std::max(0.0, 1.0 - cum.value()));
  if (last) out.tail_mass = 0.0;
  trim_trailing_zeros(out);
  return out;
}

Pmf pmf_compound_explicit(const Pmf& counting, const SeverityLaw& severity, double tol) {
  if (counting.empty()) throw std::invalid_argument("compound: empty counting law");
  const double total = counting.total() + counting.tail_mass;
  if (std::abs(total - 1.0) > std::max(tol, counting.tol)) {
    throw std::invalid_argument("compound: counting masses do not sum to 1");
  }
  const std::size_t k_max = counting.size() - 1;
  const std::size_t width = severity.size() - 1;
  const std::size_t len = k_max * width + 1;
  if (len > kMaxSupport) throw std::domain_error("compound: support exceeds limit");

  std::vector<CompensatedSum> acc(len);
  const Pmf step = severity.as_pmf();
  Pmf power = point_mass(0);  // S_0 is degenerate at zero
  for (std::size_t k = 0; k <= k_max; ++k) {
    const double mu = counting.masses[k];
    if (mu != 0.0) {
      for (std::size_t j = 0; j < power.size(); ++j) acc[j] += mu * power.masses[j];
    }
    if (k < k_max) {
      power = convolve(power, step);
      power.tail_mass = 0.0;
    }
  }

  Pmf out;
  out.tol = tol;
  out.masses.resize(len);
  for (std::size_t j = 0; j < len; ++j) out.masses[j] = acc[j].value();

  // Drop the right end while the discarded mass (plus the counting tail) stays within tol.
  double dropped = 0.0;
  while (out.masses.size() > 1 &&
         counting.tail_mass + dropped + out.masses.back() <= tol) {
    dropped += out.masses.back();
    out.masses.pop_back();
  }
  out.tail_mass = counting.tail_mass + dropped;
  return out;
}

}  // namespace steinops
