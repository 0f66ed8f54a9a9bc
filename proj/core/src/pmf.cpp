#include "steinops/pmf.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace steinops {

void CompensatedSum::add(double x) noexcept {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x)) {
    comp_ += (sum_ - t) + x;
  } else {
    comp_ += (x - t) + sum_;
  }
  sum_ = t;
}

double Pmf::total() const noexcept {
  CompensatedSum s;
  for (double m : masses) s += m;
  return s.value();
}

void Pmf::validate() const {
  if (!(tol > 0.0)) throw std::invalid_argument("pmf: tol must be positive");
  if (masses.empty()) throw std::invalid_argument("pmf: no masses");
  for (std::size_t j = 0; j < masses.size(); ++j) {
    if (!(masses[j] >= 0.0) || !std::isfinite(masses[j])) {
      throw std::invalid_argument("pmf: invalid mass at index " +
                                  std::to_string(j));
    }
  }
  if (!(tail_mass >= 0.0) || tail_mass > tol) {
    throw std::invalid_argument("pmf: tail mass outside [0, tol]");
  }
  const double s = total() + tail_mass;
  if (std::abs(s - 1.0) > tol) {
    throw std::invalid_argument("pmf: masses sum to " + std::to_string(s));
  }
}

Pmf make_pmf(std::vector<double> masses, double tail_mass, double tol) {
  Pmf p{std::move(masses), tail_mass, tol};
  p.validate();
  return p;
}

Pmf point_mass(std::size_t at) {
  Pmf p;
  p.masses.assign(at + 1, 0.0);
  p.masses[at] = 1.0;
  return p;
}

void trim_trailing_zeros(Pmf& p) {
  while (p.masses.size() > 1 && p.masses.back() == 0.0) p.masses.pop_back();
}

double moment(const Pmf& p, int k, MomentKind kind) {
  if (k < 1 || k > 4) throw std::invalid_argument("moment: order must be 1..4");
  double centre = 0.0;
  if (kind == MomentKind::central) {
    CompensatedSum m;
    for (std::size_t j = 0; j < p.size(); ++j) m += static_cast<double>(j) * p.masses[j];
    centre = m.value();
  }
  CompensatedSum s;
  for (std::size_t j = 0; j < p.size(); ++j) {
    const double x = static_cast<double>(j) - centre;
    s += std::pow(x, k) * p.masses[j];
  }
  return s.value();
}

double mean(const Pmf& p) { return moment(p, 1, MomentKind::raw); }
double variance(const Pmf& p) { return moment(p, 2, MomentKind::central); }

Pmf convolve(const Pmf& a, const Pmf& b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("convolve: empty pmf");
  Pmf out;
  const std::size_t n = a.size() + b.size() - 1;
  out.masses.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t lo = k >= b.size() ? k - b.size() + 1 : 0;
    const std::size_t hi = std::min(k, a.size() - 1);
    CompensatedSum s;
    for (std::size_t i = lo; i <= hi; ++i) s += a.masses[i] * b.masses[k - i];
    out.masses[k] = s.value();
  }
  out.tail_mass = a.tail_mass + b.tail_mass;
  out.tol = a.tol + b.tol;
  return out;
}

double l1_distance(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = std::max(a.size(), b.size());
  CompensatedSum s;
  for (std::size_t j = 0; j < n; ++j) {
    const double x = j < a.size() ? a[j] : 0.0;
    const double y = j < b.size() ? b[j] : 0.0;
    s += std::abs(x - y);
  }
  return s.value();
}

double l1_distance(const Pmf& a, const Pmf& b) {
  return l1_distance(std::span<const double>(a.masses), std::span<const double>(b.masses));
}

TvInterval tv_interval(const Pmf& a, const Pmf& b) {
  const double body = l1_distance(a, b);
  return {body, body + a.tail_mass + b.tail_mass};
}

double tv_norm(const Pmf& a, const Pmf& b) { return tv_interval(a, b).upper; }

std::vector<double> difference_measure(const Pmf& p, int order) {
  if (order < 0) throw std::invalid_argument("difference_measure: negative order");
  std::vector<double> cur = p.masses;
  for (int r = 0; r < order; ++r) {
    std::vector<double> next(cur.size() + 1, 0.0);
    // (mu * (I_1 - I))(k) = mu(k-1) - mu(k)
    for (std::size_t k = 0; k < next.size(); ++k) {
      const double left = k >= 1 ? cur[k - 1] : 0.0;
      const double here = k < cur.size() ? cur[k] : 0.0;
      next[k] = left - here;
    }
    cur = std::move(next);
  }
  return cur;
}

double difference_norm(const Pmf& p, int order) {
  CompensatedSum s;
  for (double v : difference_measure(p, order)) s += std::abs(v);
  return s.value();
}

double wasserstein1(const Pmf& a, const Pmf& b) {
  const std::size_t n = std::max(a.size(), b.size());
  CompensatedSum fa, fb, out;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    fa += a[k];
    fb += b[k];
    out += std::abs(fa.value() - fb.value());
  }
  return out.value();
}

double upper_tail(const Pmf& p, std::size_t t) {
  CompensatedSum s;
  for (std::size_t j = t + 1; j < p.size(); ++j) s += p.masses[j];
  return s.value() + p.tail_mass;
}

}  // namespace steinops
