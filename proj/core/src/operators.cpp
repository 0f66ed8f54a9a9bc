#include "steinops/operators.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

namespace steinops {
namespace {

constexpr std::size_t kMaxSeriesLength = 100000;

void require_probability(double p, const char* what) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument(std::string(what) + ": probability must lie in (0, 1)");
  }
}

/// |c(m)| <= scale * ratio^m
struct GeometricEnvelope {
  double scale;
  double ratio;
};

// Adds sum_{m>=2} c(m) sum_{l=1}^{m-1} Delta g(j+l), cut at the first m whose
// envelope falls below series_tol * |leading|.
void add_delta_series(AffineOperator& op, const std::function<double(std::size_t)>& c,
                      std::span<const GeometricEnvelope> envelopes, double leading,
                      double series_tol) {
  const double cutoff = series_tol * std::abs(leading);
  auto envelope = [&](std::size_t m) {
    double e = 0.0;
    for (const auto& g : envelopes) e += g.scale * std::pow(g.ratio, static_cast<double>(m));
    return e;
  };
  std::size_t m = 2;
  for (; envelope(m) >= cutoff; ++m) {
    if (m > kMaxSeriesLength) throw std::domain_error("series does not converge fast enough");
    op.add_delta_sum(m, c(m));
  }
  double dropped = 0.0;
  for (const auto& g : envelopes) {
    if (g.scale == 0.0) continue;
    if (!(g.ratio < 1.0)) throw std::domain_error("series ratio must be < 1");
    dropped += g.scale * std::pow(g.ratio, static_cast<double>(m)) / (1.0 - g.ratio);
  }
  op.set_series_truncation(series_tol, dropped);
}

double weighted_sum(std::span<const double> lambdas) {
  double s = 0.0;
  for (std::size_t i = 0; i < lambdas.size(); ++i) s += static_cast<double>(i + 1) * lambdas[i];
  return s;
}

double lambda_at(std::span<const double> lambdas, std::size_t m) {
  return m >= 1 && m <= lambdas.size() ? lambdas[m - 1] : 0.0;
}

}  // namespace

void AffineOperator::add_term(std::size_t offset, double constant, double slope) {
  auto it = std::lower_bound(terms_.begin(), terms_.end(), offset,
                             [](const AffineTerm& t, std::size_t o) { return t.offset < o; });
  if (it != terms_.end() && it->offset == offset) {
    it->constant += constant;
    it->slope += slope;
  } else {
    terms_.insert(it, AffineTerm{offset, constant, slope});
  }
}

void AffineOperator::add_delta_sum(std::size_t m, double constant, double slope) {
  if (m < 2) throw std::invalid_argument("add_delta_sum: m must be >= 2");
  add_term(m, constant, slope);
  add_term(1, -constant, -slope);
}

void AffineOperator::set_pointwise(std::vector<double> offset1) { pointwise_ = std::move(offset1); }

std::size_t AffineOperator::max_offset() const noexcept {
  std::size_t m = terms_.empty() ? 0 : terms_.back().offset;
  if (!pointwise_.empty()) m = std::max<std::size_t>(m, 1);
  return m;
}

double AffineOperator::coefficient(std::size_t offset, std::size_t j) const noexcept {
  double c = 0.0;
  for (const auto& t : terms_) {
    if (t.offset == offset) c += t.constant + t.slope * static_cast<double>(j);
  }
  if (offset == 1 && j < pointwise_.size()) c += pointwise_[j];
  return c;
}

double AffineOperator::apply(std::span<const double> g, std::size_t j) const noexcept {
  auto value = [&](std::size_t k) {
    if (k >= g.size()) return 0.0;
    if (domain_end_ && k > *domain_end_) return 0.0;
    return g[k];
  };
  CompensatedSum s;
  const double jd = static_cast<double>(j);
  for (const auto& t : terms_) s += (t.constant + t.slope * jd) * value(j + t.offset);
  if (j < pointwise_.size()) s += pointwise_[j] * value(j + 1);
  return s.value();
}

AffineOperator AffineOperator::scaled(double factor) const {
  AffineOperator out = *this;
  for (auto& t : out.terms_) {
    t.constant *= factor;
    t.slope *= factor;
  }
  for (double& c : out.pointwise_) c *= factor;
  out.dropped_tail_ *= std::abs(factor);
  return out;
}

TestFunction TestFunction::indicator(std::size_t k) {
  if (k == 0) throw std::invalid_argument("indicator test function needs k >= 1");
  TestFunction g;
  g.values.assign(k + 1, 0.0);
  g.values[k] = 1.0;
  return g;
}

TestFunction TestFunction::identity(std::size_t length) {
  TestFunction g;
  g.values.resize(length);
  for (std::size_t j = 0; j < length; ++j) g.values[j] = static_cast<double>(j);
  return g;
}

void TestFunction::validate() const {
  if (!values.empty() && values[0] != 0.0) throw std::invalid_argument("test function: g(0) != 0");
  for (double v : values) {
    if (!std::isfinite(v)) throw std::invalid_argument("test function: non-finite value");
  }
}

AffineOperator op_generic_ratio(const Pmf& y) {
  std::size_t last = y.size();
  while (last > 0 && y.masses[last - 1] == 0.0) --last;
  if (last < 2) throw std::invalid_argument("generic ratio: law has no interior support");
  for (std::size_t j = 0; j < last; ++j) {
    if (!(y.masses[j] > 0.0)) {
      throw std::invalid_argument("generic ratio: zero interior mass at " + std::to_string(j));
    }
  }
  std::vector<double> table(last, 0.0);
  for (std::size_t j = 0; j + 1 < last; ++j) {
    table[j] = static_cast<double>(j + 1) * y.masses[j + 1] / y.masses[j];
  }
  AffineOperator op("generic-ratio");
  op.add_term(0, 0.0, -1.0);
  op.set_pointwise(std::move(table));
  if (y.tail_mass == 0.0) op.set_domain_end(last - 1);
  return op;
}

AffineOperator op_poisson(double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("poisson operator: alpha must be positive");
  AffineOperator op("poisson");
  op.add_term(1, alpha, 0.0);
  op.add_term(0, 0.0, -1.0);
  return op;
}

AffineOperator op_pseudo_binomial(double m_tilde, double p) {
  if (!(m_tilde > 1.0)) throw std::invalid_argument("pseudo-binomial operator: m_tilde <= 1");
  require_probability(p, "pseudo-binomial operator");
  AffineOperator op("pseudo-binomial");
  op.add_term(1, m_tilde * p, -p);
  op.add_term(0, 0.0, -(1.0 - p));
  op.set_domain_end(static_cast<std::size_t>(std::floor(m_tilde)));
  return op;
}

AffineOperator op_negative_binomial(double r, double p_bar) {
  if (!(r > 0.0)) throw std::invalid_argument("negative binomial operator: r must be positive");
  require_probability(p_bar, "negative binomial operator");
  const double q_bar = 1.0 - p_bar;
  AffineOperator op("negative-binomial");
  op.add_term(1, r * q_bar, q_bar);
  op.add_term(0, 0.0, -1.0);
  return op;
}

AffineOperator op_compound_poisson(std::span<const double> lambdas) {
  if (lambdas.empty()) throw std::invalid_argument("compound poisson operator: no lambdas");
  AffineOperator op("compound-poisson");
  for (std::size_t l = 1; l <= lambdas.size(); ++l) {
    op.add_term(l, static_cast<double>(l) * lambdas[l - 1], 0.0);
  }
  op.add_term(0, 0.0, -1.0);
  return op;
}

AffineOperator op_bi_cp(std::size_t m, double p, std::span<const double> lambdas) {
  require_probability(p, "binomial + compound poisson operator");
  const double q = 1.0 - p;
  const double lambda = weighted_sum(lambdas);
  AffineOperator op("binomial+compound-poisson");
  // (M + lambda/p - j) p g(j+1) - j q g(j)
  op.add_term(1, static_cast<double>(m) * p + lambda, -p);
  op.add_term(0, 0.0, -q);
  for (std::size_t k = 2; k <= lambdas.size() + 1; ++k) {
    const double c = q * static_cast<double>(k) * lambda_at(lambdas, k) +
                     p * static_cast<double>(k - 1) * lambda_at(lambdas, k - 1);
    op.add_delta_sum(k, c);
  }
  return op;
}

AffineOperator op_nb_cp(double r, double p_bar, std::span<const double> lambdas) {
  if (!(r > 0.0)) throw std::invalid_argument("nb + compound poisson operator: r <= 0");
  require_probability(p_bar, "nb + compound poisson operator");
  const double q_bar = 1.0 - p_bar;
  const double lambda = weighted_sum(lambdas);
  AffineOperator op("negative-binomial+compound-poisson");
  // (lambda p_bar / q_bar + r + j) q_bar g(j+1) - j g(j)
  op.add_term(1, lambda * p_bar + r * q_bar, q_bar);
  op.add_term(0, 0.0, -1.0);
  for (std::size_t k = 2; k <= lambdas.size() + 1; ++k) {
    const double c = static_cast<double>(k) * lambda_at(lambdas, k) -
                     q_bar * static_cast<double>(k - 1) * lambda_at(lambdas, k - 1);
    op.add_delta_sum(k, c);
  }
  return op;
}

AffineOperator op_bcp_binomial_perturbation(std::size_t m, double p, double alpha) {
  require_probability(p, "bcp binomial perturbation");
  if (!(alpha >= 0.0)) throw std::invalid_argument("bcp binomial perturbation: alpha < 0");
  const double q = 1.0 - p;
  AffineOperator op("bcp-binomial-perturbation");
  // (Mp + alpha - j p) g(j+1) - j q g(j) + p alpha Delta g(j+1)
  op.add_term(1, static_cast<double>(m) * p + alpha, -p);
  op.add_term(0, 0.0, -q);
  op.add_term(2, p * alpha, 0.0);
  op.add_term(1, -p * alpha, 0.0);
  return op;
}

AffineOperator op_bcp_poisson_perturbation(std::size_t m, double p, double alpha,
                                           double series_tol) {
  require_probability(p, "bcp poisson perturbation");
  const double q = 1.0 - p;
  if (!(p < q)) throw std::domain_error("bcp poisson perturbation: needs p < q");
  const double md = static_cast<double>(m);
  const double rho = p / q;
  AffineOperator op("bcp-poisson-perturbation");
  const double leading = alpha + md * p;
  op.add_term(1, leading, 0.0);
  op.add_term(0, 0.0, -1.0);
  const GeometricEnvelope env[] = {{md, rho}};
  add_delta_series(
      op,
      [=](std::size_t l) {
        const double sign = (l % 2 == 0) ? -1.0 : 1.0;  // (-1)^{l+1}
        return md * sign * std::pow(rho, static_cast<double>(l));
      },
      env, leading, series_tol);
  return op;
}

AffineOperator op_binb(int variant, std::size_t m, double p, double r, double p_bar,
                       double series_tol) {
  require_probability(p, "binomial + nb operator");
  require_probability(p_bar, "binomial + nb operator");
  if (!(r > 0.0)) throw std::invalid_argument("binomial + nb operator: r <= 0");
  const double q = 1.0 - p;
  const double q_bar = 1.0 - p_bar;
  const double md = static_cast<double>(m);
  const double rho = p / q;
  if (variant < 1 || variant > 4) throw std::invalid_argument("binomial + nb operator: variant 1..4");
  if (variant >= 2 && !(p < q)) throw std::domain_error("binomial + nb operator: needs p < q");

  AffineOperator op("binomial+negative-binomial-" + std::to_string(variant));
  switch (variant) {
    case 1:
      op.add_term(1, md * p + r * q * q_bar, q * q_bar - p);
      op.add_term(2, r * q_bar * p - md * p * q_bar, p * q_bar);
      op.add_term(0, 0.0, -q);
      break;
    case 2: {
      const double leading = r * q_bar / p_bar + md * p;
      op.add_term(1, leading, -p);
      op.add_term(0, 0.0, -q);
      const double scale = r * (q * q_bar + p);
      const GeometricEnvelope env[] = {{scale / q_bar, q_bar}};
      add_delta_series(
          op, [=](std::size_t k) { return scale * std::pow(q_bar, static_cast<double>(k - 1)); },
          env, leading, series_tol);
      break;
    }
    case 3: {
      const double leading = md * p * p_bar + r * q_bar;
      op.add_term(1, leading, q_bar);
      op.add_term(0, 0.0, -1.0);
      const double scale = md * (rho + q_bar);
      const GeometricEnvelope env[] = {{scale / rho, rho}};
      add_delta_series(
          op,
          [=](std::size_t k) {
            const double sign = (k % 2 == 0) ? -1.0 : 1.0;
            return scale * sign * std::pow(rho, static_cast<double>(k - 1));
          },
          env, leading, series_tol);
      break;
    }
    case 4: {
      const double leading = md * p + r * q_bar / p_bar;
      op.add_term(1, leading, 0.0);
      op.add_term(0, 0.0, -1.0);
      const GeometricEnvelope env[] = {{md, rho}, {r, q_bar}};
      add_delta_series(
          op,
          [=](std::size_t k) {
            const double kd = static_cast<double>(k);
            const double sign = (k % 2 == 0) ? -1.0 : 1.0;
            return md * sign * std::pow(rho, kd) + r * std::pow(q_bar, kd);
          },
          env, leading, series_tol);
      break;
    }
  }
  return op;
}

AffineOperator op_compound_panjer(double a, double b, const SeverityLaw& severity) {
  AffineOperator op("compound-panjer");
  for (std::size_t l = 1; l < severity.size(); ++l) {
    if (severity[l] == 0.0) continue;
    op.add_term(l, a * static_cast<double>(l) * severity[l], b * severity[l]);
  }
  op.add_term(0, 0.0, -(1.0 - b * severity[0]));
  return op;
}

AffineOperator op_compound_negative_binomial(double r, double p_bar, const SeverityLaw& severity) {
  if (!(r > 0.0)) throw std::invalid_argument("compound nb operator: r <= 0");
  require_probability(p_bar, "compound nb operator");
  const double q_bar = 1.0 - p_bar;
  // q_bar sum_m (r m + j) g(j+m) p_m - (1 - q_bar p_0) j g(j)
  AffineOperator op("compound-negative-binomial");
  for (std::size_t l = 1; l < severity.size(); ++l) {
    if (severity[l] == 0.0) continue;
    op.add_term(l, q_bar * r * static_cast<double>(l) * severity[l], q_bar * severity[l]);
  }
  op.add_term(0, 0.0, -(1.0 - q_bar * severity[0]));
  return op;
}

AffineOperator op_compound_binomial(std::size_t n, double p, const SeverityLaw& severity) {
  require_probability(p, "compound binomial operator");
  const double q = 1.0 - p;
  const double nd = static_cast<double>(n);
  // p sum_m (n m - j) g(j+m) p_m - (q + p p_0) j g(j)
  AffineOperator op("compound-binomial");
  for (std::size_t l = 1; l < severity.size(); ++l) {
    if (severity[l] == 0.0) continue;
    op.add_term(l, p * nd * static_cast<double>(l) * severity[l], -p * severity[l]);
  }
  op.add_term(0, 0.0, -(q + p * severity[0]));
  return op;
}

AffineOperator op_compound_geometric(double q, const SeverityLaw& severity) {
  require_probability(q, "compound geometric operator");
  if (severity[0] != 0.0) throw std::invalid_argument("compound geometric operator: needs p_0 = 0");
  AffineOperator op("compound-geometric");
  for (std::size_t m = 1; m < severity.size(); ++m) {
    if (severity[m] == 0.0) continue;
    op.add_term(m, q * severity[m], 0.0);
  }
  op.add_term(0, -1.0, 0.0);
  return op;
}

DefectResult characterization_defect(const AffineOperator& op, const Pmf& y,
                                     const TestFunction& g) {
  g.validate();
  CompensatedSum s;
  for (std::size_t j = 0; j < y.size(); ++j) {
    if (y.masses[j] == 0.0) continue;
    s += y.masses[j] * op.apply(g.values, j);
  }
  DefectResult out{std::abs(s.value()), 0.0};
  if (y.tail_mass > 0.0) {
    double worst = 0.0;
    for (std::size_t j = y.size(); j < g.values.size(); ++j) {
      worst = std::max(worst, std::abs(op.apply(g.values, j)));
    }
    out.contamination = y.tail_mass * worst;
  }
  return out;
}

double max_indicator_defect(const AffineOperator& op, const Pmf& y, std::size_t k_max) {
  double worst = 0.0;
  for (std::size_t k = 1; k <= k_max; ++k) {
    if (op.domain_end() && k > *op.domain_end()) break;
    // E (A I_k)(Y) = sum_l y[k-l] * coefficient(l, k-l)
    CompensatedSum s;
    for (std::size_t l = 0; l <= std::min(k, op.max_offset()); ++l) {
      const std::size_t j = k - l;
      const double mass = y[j];
      if (mass != 0.0) s += mass * op.coefficient(l, j);
    }
    worst = std::max(worst, std::abs(s.value()));
  }
  return worst;
}

nlohmann::json to_json(const AffineOperator& op) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& t : op.terms()) {
    terms.push_back({{"offset", t.offset}, {"constant", t.constant}, {"slope", t.slope}});
  }
  nlohmann::json out{{"name", op.name()},
                     {"terms", terms},
                     {"series_tol", op.series_tol()},
                     {"dropped_tail", op.dropped_tail()}};
  out["domain_end"] = op.domain_end() ? nlohmann::json(*op.domain_end()) : nlohmann::json(nullptr);
  if (!op.pointwise().empty()) {
    out["pointwise_offset1"] = std::vector<double>(op.pointwise().begin(), op.pointwise().end());
  }
  return out;
}

}  // namespace steinops
