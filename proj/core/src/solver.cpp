#include "steinops/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace steinops {
namespace {

constexpr std::size_t kMaxSupport = std::size_t{1} << 24;

void require_probability(double p, const char* what) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument(std::string(what) + ": probability must lie in (0, 1)");
  }
}

double f_sup_norm(const std::function<double(std::size_t)>& f, std::size_t last) {
  double norm = 0.0;
  for (std::size_t j = 0; j <= last; ++j) norm = std::max(norm, std::abs(f(j)));
  return norm;
}

}  // namespace

BirthDeathOperator BirthDeathOperator::poisson(double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("birth-death poisson: lambda <= 0");
  return {"poisson", [lambda](std::size_t) { return lambda; },
          [](std::size_t j) { return static_cast<double>(j); }, std::nullopt};
}

BirthDeathOperator BirthDeathOperator::negative_binomial(double r, double p_bar) {
  if (!(r > 0.0)) throw std::invalid_argument("birth-death nb: r <= 0");
  require_probability(p_bar, "birth-death nb");
  const double q_bar = 1.0 - p_bar;
  return {"negative-binomial",
          [=](std::size_t j) { return q_bar * (r + static_cast<double>(j)); },
          [](std::size_t j) { return static_cast<double>(j); }, std::nullopt};
}

BirthDeathOperator BirthDeathOperator::pseudo_binomial(double m_tilde, double p) {
  if (!(m_tilde > 1.0)) throw std::invalid_argument("birth-death pseudo-binomial: m_tilde <= 1");
  require_probability(p, "birth-death pseudo-binomial");
  const double q = 1.0 - p;
  return {"pseudo-binomial",
          [=](std::size_t j) { return (m_tilde - static_cast<double>(j)) * p; },
          [=](std::size_t j) { return static_cast<double>(j) * q; },
          static_cast<std::size_t>(std::floor(m_tilde))};
}

BirthDeathOperator BirthDeathOperator::binomial(std::size_t n, double p) {
  auto bd = pseudo_binomial(static_cast<double>(n), p);
  bd.name = "binomial";
  return bd;
}

bool BirthDeathOperator::monotone(std::size_t last) const {
  for (std::size_t k = 1; k <= last; ++k) {
    const double da = alpha(k) - alpha(k - 1);
    const double db = beta(k) - beta(k - 1);
    if (da > db + 1e-12 * std::max(1.0, std::abs(db))) return false;
  }
  return true;
}

Pmf stationary_pmf(const BirthDeathOperator& bd, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("stationary_pmf: tol must be positive");
  if (bd.beta(0) != 0.0) throw std::invalid_argument("stationary_pmf: beta_0 must be 0");
  std::vector<double> logw{0.0};
  double est_tail_rel = 0.0;
  for (std::size_t j = 0;; ++j) {
    if (bd.support_end && j == *bd.support_end) break;
    if (j + 1 >= kMaxSupport) throw std::domain_error("stationary_pmf: support exceeds limit");
    const double a = bd.alpha(j);
    const double b = bd.beta(j + 1);
    if (!(a > 0.0) || !(b > 0.0)) {
      throw std::domain_error("stationary_pmf: nonpositive rate at " + std::to_string(j));
    }
    const double ratio = a / b;
    if (!bd.support_end && ratio < 1.0) {
      // Geometric estimate of the remaining mass relative to what is kept.
      const double top = *std::max_element(logw.begin(), logw.end());
      CompensatedSum kept;
      for (double lw : logw) kept += std::exp(lw - top);
      const double tail = std::exp(logw.back() - top) * ratio / (1.0 - ratio);
      if (tail <= 0.5 * tol * kept.value()) {
        est_tail_rel = tail / kept.value();
        break;
      }
    }
    logw.push_back(logw.back() + std::log(ratio));
  }
  const double top = *std::max_element(logw.begin(), logw.end());
  Pmf out;
  out.tol = tol;
  out.masses.resize(logw.size());
  CompensatedSum s;
  for (std::size_t j = 0; j < logw.size(); ++j) {
    out.masses[j] = std::exp(logw[j] - top);
    s += out.masses[j];
  }
  const double z = s.value() * (1.0 + est_tail_rel);
  for (double& m : out.masses) m /= z;
  out.tail_mass = est_tail_rel / (1.0 + est_tail_rel);
  return out;
}

SteinSolution solve_stein(const BirthDeathOperator& bd, const std::function<double(std::size_t)>& f,
                          double tol) {
  SteinSolution sol;
  sol.law = stationary_pmf(bd, tol);
  auto& mu = sol.law.masses;
  const double z = sol.law.total();
  for (double& m : mu) m /= z;
  const std::size_t last = mu.size() - 1;

  CompensatedSum ef;
  for (std::size_t k = 0; k <= last; ++k) ef += mu[k] * f(k);
  sol.mean_f = ef.value();

  std::vector<double> h(last + 1);
  for (std::size_t k = 0; k <= last; ++k) {
    if (!(mu[k] > 0.0)) throw std::domain_error("solve_stein: mass underflow at " + std::to_string(k));
    h[k] = mu[k] * (f(k) - sol.mean_f);
  }

  // Left partial sums below the median, right-tail sums above it.
  std::vector<double> partial(last + 1);
  CompensatedSum cdf, left;
  std::size_t split = last + 1;
  for (std::size_t j = 0; j <= last; ++j) {
    cdf += mu[j];
    left += h[j];
    partial[j] = left.value();
    if (cdf.value() > 0.5) {
      split = j + 1;
      break;
    }
  }
  CompensatedSum right;
  for (std::size_t j = last + 1; j-- > split;) {
    partial[j] = -right.value();
    right += h[j];
  }

  sol.g.assign(last + 2, 0.0);
  for (std::size_t j = 0; j < last; ++j) {
    const double a = bd.alpha(j);
    if (!(a > 0.0)) throw std::domain_error("solve_stein: alpha_j = 0 inside the support");
    sol.g[j + 1] = partial[j] / (a * mu[j]);
  }
  // g(last + 1) = 0: outside a bounded support, and the truncation point otherwise.

  double worst = 0.0;
  for (std::size_t j = 0; j <= last; ++j) {
    const double lhs = bd.alpha(j) * sol.g[j + 1] - bd.beta(j) * sol.g[j];
    worst = std::max(worst, std::abs(lhs - (f(j) - sol.mean_f)));
  }
  sol.max_residual = worst;
  return sol;
}

DeltaBoundReport delta_bound_check(const BirthDeathOperator& bd,
                                   const std::function<double(std::size_t)>& f, FRange range,
                                   double tol) {
  const SteinSolution sol = solve_stein(bd, f, tol);
  const std::size_t last = sol.law.size() - 1;

  DeltaBoundReport rep;
  rep.hypothesis_met = bd.monotone(last) && (!bd.support_end || bd.alpha(*bd.support_end) == 0.0);
  rep.informational = !rep.hypothesis_met;
  rep.f_norm = f_sup_norm(f, last);
  if (range == FRange::unit_interval) {
    for (std::size_t j = 0; j <= last; ++j) {
      if (f(j) < 0.0 || f(j) > 1.0) throw std::invalid_argument("delta_bound_check: f not in [0, 1]");
    }
    rep.constant = 1.0;
  } else {
    rep.constant = 2.0 * rep.f_norm;
  }

  const std::size_t j_end = bd.support_end ? last : last - 1;
  const double inf = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j <= j_end; ++j) {
    const double delta = std::abs(sol.g[j + 1] - sol.g[j]);
    const double a = (bd.support_end && j == *bd.support_end) ? 0.0 : bd.alpha(j);
    const double b = bd.beta(j);
    const double inv = std::min(a > 0.0 ? 1.0 / a : inf, b > 0.0 ? 1.0 / b : inf);
    const double bound = rep.constant * inv;
    rep.max_abs_delta = std::max(rep.max_abs_delta, delta);
    if (bound > 0.0 && std::isfinite(bound)) rep.max_ratio = std::max(rep.max_ratio, delta / bound);
    if (delta > bound * (1.0 + 1e-12) + 1e-15) ++rep.violations;
  }
  rep.holds = rep.violations == 0;
  return rep;
}

double delta_g_bound_poisson(double lambda, double f_norm) {
  return 2.0 * f_norm / std::max(1.0, lambda);
}

double delta_g_bound_negative_binomial(double r, double p_bar, double f_norm) {
  return 2.0 * f_norm / (r * (1.0 - p_bar));
}

double delta_g_bound_pseudo_binomial(double m_tilde, double p, double f_norm) {
  return 2.0 * f_norm / (std::floor(m_tilde) * p * (1.0 - p));
}

std::string to_string(PerturbationKind kind) {
  switch (kind) {
    case PerturbationKind::O1: return "O1";
    case PerturbationKind::O2: return "O2";
    case PerturbationKind::O3: return "O3";
    case PerturbationKind::O4: return "O4";
    case PerturbationKind::O5: return "O5";
    case PerturbationKind::O6: return "O6";
  }
  return "?";
}

PerturbationKind perturbation_kind_from_string(const std::string& s) {
  for (auto k : {PerturbationKind::O1, PerturbationKind::O2, PerturbationKind::O3,
                 PerturbationKind::O4, PerturbationKind::O5, PerturbationKind::O6}) {
    if (to_string(k) == s) return k;
  }
  throw std::invalid_argument("unknown perturbation kind '" + s + "'");
}

PerturbationConstants perturbation_constants(PerturbationKind kind, const PerturbationParams& in) {
  PerturbationConstants pc;
  pc.kind = kind;
  const double md = static_cast<double>(in.M);
  const double p = in.p;
  const double q = 1.0 - p;
  const double p_bar = in.p_bar;
  const double q_bar = 1.0 - p_bar;
  auto need_p = [&] { require_probability(p, "perturbation constants"); };
  auto need_pbar = [&] {
    require_probability(p_bar, "perturbation constants");
    if (!(in.r > 0.0)) throw std::invalid_argument("perturbation constants: r <= 0");
  };
  auto need_p_ne_q = [&] {
    if (p == q) throw std::domain_error("perturbation constants: p = q");
  };

  switch (kind) {
    case PerturbationKind::O1: {
      pc.omega1 = 2.0;
      for (std::size_t i = 0; i < in.lambdas.size(); ++i) {
        const double m = static_cast<double>(i + 1);
        pc.gamma += m * in.lambdas[i];
        pc.omega2 += m * (m - 1.0) * std::abs(in.lambdas[i]);
      }
      break;
    }
    case PerturbationKind::O2:
      need_p();
      pc.omega1 = 2.0 / (p * q);
      pc.gamma = std::floor(md + in.alpha / p);
      pc.omega2 = p * in.alpha;
      break;
    case PerturbationKind::O3:
      need_p();
      need_p_ne_q();
      pc.omega1 = 2.0;
      pc.gamma = md * p + in.alpha;
      pc.omega2 = md * p * p / ((q - p) * (q - p));
      break;
    case PerturbationKind::O4:
      need_p();
      need_pbar();
      pc.omega1 = 2.0;
      pc.gamma = std::floor(md + in.r * q_bar / (p * p_bar)) * p * q;
      pc.omega2 = in.r * q_bar * (q * q_bar + p) / (p_bar * p_bar);
      break;
    case PerturbationKind::O5:
      need_p();
      need_pbar();
      need_p_ne_q();
      pc.omega1 = 2.0;
      pc.gamma = md * p * p_bar + in.r * q_bar;
      pc.omega2 = md * p * q * (p / q + q_bar) / ((q - p) * (q - p));
      break;
    case PerturbationKind::O6:
      need_p();
      need_pbar();
      need_p_ne_q();
      pc.omega1 = 2.0;
      pc.gamma = md * p + in.r * q_bar / p_bar;
      pc.omega2 = md * p * p / ((q - p) * (q - p)) + in.r * q_bar * q_bar / (p_bar * p_bar);
      break;
  }
  pc.valid = pc.gamma > 0.0 && pc.omega1 * pc.omega2 < pc.gamma;
  return pc;
}

double lemma31_bound(const PerturbationConstants& pc, double eps, double pz_tail, double pw_tail) {
  if (!pc.valid) throw std::domain_error("lemma31_bound: omega1 * omega2 >= gamma");
  if (eps < 0.0 || pz_tail < 0.0 || pw_tail < 0.0) {
    throw std::invalid_argument("lemma31_bound: negative input");
  }
  const double factor = pc.gamma / (pc.gamma - pc.omega1 * pc.omega2);
  return factor * (eps * pc.omega1 * std::min(1.0, 1.0 / pc.gamma) + 2.0 * pz_tail + 2.0 * pw_tail);
}

nlohmann::json to_json(const PerturbationConstants& pc) {
  return {{"kind", to_string(pc.kind)},
          {"omega1", pc.omega1},
          {"omega2", pc.omega2},
          {"gamma", pc.gamma},
          {"valid", pc.valid}};
}

}  // namespace steinops
