#include "steinops/indicators.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "steinops/distributions.hpp"
#include "steinops/pmf_io.hpp"

namespace steinops {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct PowerSums {
  double s1 = 0.0, s2 = 0.0, s3 = 0.0, s4 = 0.0;
  double sigma2 = 0.0;
  double tau = 0.0;
};

PowerSums power_sums(std::span<const double> probs) {
  CompensatedSum s1, s2, s3, s4, var;
  PowerSums ps;
  for (double p : probs) {
    s1 += p;
    s2 += p * p;
    s3 += p * p * p;
    s4 += p * p * p * p;
    var += p * (1.0 - p);
    ps.tau = std::max(ps.tau, p * (1.0 - p));
  }
  ps.s1 = s1.value();
  ps.s2 = s2.value();
  ps.s3 = s3.value();
  ps.s4 = s4.value();
  ps.sigma2 = var.value();
  return ps;
}

std::vector<double> without(std::span<const double> probs, std::size_t i,
                            std::optional<std::size_t> j = std::nullopt) {
  std::vector<double> out;
  out.reserve(probs.size());
  for (std::size_t k = 0; k < probs.size(); ++k) {
    if (k != i && (!j || k != *j)) out.push_back(probs[k]);
  }
  return out;
}

Pmf poisson_binomial_or_zero(const std::vector<double>& probs) {
  return probs.empty() ? point_mass(0) : pmf_poisson_binomial(probs);
}

void check_probs(std::span<const double> probs) {
  if (probs.empty()) throw std::invalid_argument("indicator model: n must be >= 1");
  for (double p : probs) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("indicator model: p_i must lie in (0, 1)");
  }
}

double theta1_of(const BcpParams& bp, const PowerSums& ps) {
  const double denom = (1.0 - 2.0 * bp.p) * (1.0 - 2.0 * bp.p) * ps.s1;
  return (ps.s2 - bp.delta * bp.p * bp.p) / denom;
}

// Sigma p_i^4 - p Sigma p_i^3, nonnegative by Cauchy-Schwarz.
double cs_gap(const BcpParams& bp, const PowerSums& ps) {
  const double gap = ps.s4 - bp.p * ps.s3;
  if (gap < 0.0) {
    if (gap < -1e-12 * ps.s4) throw std::logic_error("sum p^4 - p sum p^3 < 0");
    return 0.0;
  }
  return gap;
}

void fill_common_stats(BoundReport& r, const PowerSums& ps) {
  r.stats.emplace_back("lambda_hat", ps.s1);
  r.stats.emplace_back("sigma2", ps.sigma2);
  r.stats.emplace_back("tau", ps.tau);
}

struct BinomialPerturbation {
  double t_hat = 0.0;
  double theta2 = kInf;
};

BinomialPerturbation binomial_perturbation(const BcpParams& bp) {
  BinomialPerturbation b;
  b.t_hat = std::floor(static_cast<double>(bp.M) + bp.alpha / bp.p);
  if (b.t_hat > 0.0) b.theta2 = bp.alpha / ((1.0 - bp.p) * b.t_hat);
  return b;
}

std::string pack(const std::vector<std::pair<std::string, double>>& kv) {
  std::string out;
  for (const auto& [k, v] : kv) {
    if (!out.empty()) out += ';';
    out += k + '=' + format_double(v);
  }
  return out;
}

}  // namespace

BcpParams fit_bcp(std::span<const double> probs) {
  if (probs.empty()) throw std::invalid_argument("fit_bcp: no probabilities");
  for (double p : probs) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("fit_bcp: p_i outside [0, 1]");
  }
  const PowerSums ps = power_sums(probs);
  if (!(ps.s2 > 0.0)) throw std::invalid_argument("fit_bcp: all p_i are 0");
  BcpParams bp;
  bp.p = ps.s3 / ps.s2;
  if (!(bp.p < 1.0)) throw std::invalid_argument("fit_bcp: all p_i are 1");
  double ratio = ps.s2 * ps.s2 * ps.s2 / (ps.s3 * ps.s3);
  const double nearest = std::round(ratio);
  if (std::abs(ratio - nearest) <= 1e-12 * ratio) ratio = nearest;
  const double m = std::floor(ratio);
  bp.M = static_cast<std::size_t>(m);
  bp.delta = ratio - m;
  bp.alpha = ps.s1 - m * bp.p;
  // alpha >= 0 holds exactly (Cauchy-Schwarz); only rounding can push it below.
  if (bp.alpha < 0.0) {
    if (bp.alpha < -1e-12 * ps.s1) throw std::logic_error("fit_bcp: alpha < 0");
    bp.alpha = 0.0;
  }
  return bp;
}

Pmf pmf_bcp(const BcpParams& params, double tol) {
  return pmf_bcp(params.M, params.p, params.alpha, tol);
}

nlohmann::json to_json(const BcpParams& params) {
  return {{"M", params.M}, {"delta", params.delta}, {"p", params.p}, {"alpha", params.alpha}};
}

IndicatorModel IndicatorModel::independent(std::vector<double> probs) {
  check_probs(probs);
  IndicatorModel m;
  m.probs_ = std::move(probs);
  return m;
}

IndicatorModel IndicatorModel::joint(std::size_t n, std::vector<double> joint) {
  if (n == 0) throw std::invalid_argument("joint model: n must be >= 1");
  if (n > kMaxJoint) throw std::invalid_argument("joint model: n exceeds 24");
  if (joint.size() != (std::size_t{1} << n)) throw std::invalid_argument("joint model: need 2^n atoms");
  CompensatedSum total;
  for (double w : joint) {
    if (!(w >= 0.0)) throw std::invalid_argument("joint model: negative probability");
    total += w;
  }
  if (std::abs(total.value() - 1.0) > 1e-12) throw std::invalid_argument("joint model: law does not sum to 1");
  IndicatorModel m;
  m.probs_.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    CompensatedSum pi;
    for (std::size_t s = 0; s < joint.size(); ++s) {
      if (s >> i & 1U) pi += joint[s];
    }
    m.probs_[i] = pi.value();
  }
  check_probs(m.probs_);
  m.joint_ = std::move(joint);
  return m;
}

IndicatorModel IndicatorModel::from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "independent") return independent(j.at("probs").get<std::vector<double>>());
  if (kind != "joint") throw std::invalid_argument("model kind must be independent or joint");
  const auto n = j.at("n").get<std::size_t>();
  if (n == 0 || n > kMaxJoint) throw std::invalid_argument("joint model: n must be in 1..24");
  std::vector<double> law(std::size_t{1} << n, 0.0);
  for (const auto& atom : j.at("atoms")) {
    if (!atom.is_array() || atom.size() != n + 1) {
      throw std::invalid_argument("joint model: each atom needs n bits and a probability");
    }
    std::size_t s = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const int b = atom[i].get<int>();
      if (b != 0 && b != 1) throw std::invalid_argument("joint model: bits must be 0 or 1");
      s |= static_cast<std::size_t>(b) << i;
    }
    law[s] += atom[n].get<double>();
  }
  return joint(n, std::move(law));
}

Pmf IndicatorModel::joint_law(std::optional<std::size_t> skip_a, std::optional<std::size_t> skip_b,
                              std::optional<std::size_t> cond) const {
  std::size_t mask = 0;
  if (skip_a) mask |= std::size_t{1} << *skip_a;
  if (skip_b) mask |= std::size_t{1} << *skip_b;
  std::vector<CompensatedSum> acc(n() + 1);
  CompensatedSum norm;
  for (std::size_t s = 0; s < joint_.size(); ++s) {
    if (cond && !(s >> *cond & 1U)) continue;
    acc[static_cast<std::size_t>(std::popcount(s & ~mask))] += joint_[s];
    norm += joint_[s];
  }
  Pmf out;
  out.masses.resize(acc.size());
  for (std::size_t k = 0; k < acc.size(); ++k) out.masses[k] = acc[k].value() / norm.value();
  trim_trailing_zeros(out);
  return out;
}

Pmf IndicatorModel::law_w() const {
  if (is_independent()) return pmf_poisson_binomial(probs_);
  return joint_law(std::nullopt, std::nullopt, std::nullopt);
}

Pmf IndicatorModel::law_without(std::size_t i) const {
  if (i >= n()) throw std::out_of_range("law_without: index");
  if (is_independent()) return poisson_binomial_or_zero(without(probs_, i));
  return joint_law(i, std::nullopt, std::nullopt);
}

Pmf IndicatorModel::law_without(std::size_t i, std::size_t j) const {
  if (i >= n() || j >= n() || i == j) throw std::out_of_range("law_without: indices");
  if (is_independent()) return poisson_binomial_or_zero(without(probs_, i, j));
  return joint_law(i, j, std::nullopt);
}

Pmf IndicatorModel::conditional_without(std::size_t i) const {
  if (is_independent()) return law_without(i);
  if (i >= n()) throw std::out_of_range("conditional_without: index");
  return joint_law(i, std::nullopt, i);
}

Pmf IndicatorModel::conditional_without(std::size_t i, std::size_t j) const {
  if (is_independent()) return law_without(i, j);
  if (i >= n() || j >= n() || i == j) throw std::out_of_range("conditional_without: indices");
  return joint_law(i, j, i);
}

double IndicatorModel::covariance(std::size_t i, std::size_t j) const {
  if (i >= n() || j >= n()) throw std::out_of_range("covariance: indices");
  if (i == j) return probs_[i] * (1.0 - probs_[i]);
  if (is_independent()) return 0.0;
  CompensatedSum both;
  for (std::size_t s = 0; s < joint_.size(); ++s) {
    if ((s >> i & 1U) && (s >> j & 1U)) both += joint_[s];
  }
  return both.value() - probs_[i] * probs_[j];
}

SmoothnessStats smoothness_exact(const IndicatorModel& model) {
  SmoothnessStats st;
  st.d = difference_norm(model.law_w(), 2);
  for (std::size_t i = 0; i < model.n(); ++i) {
    st.d1 = std::max(st.d1, difference_norm(model.law_without(i), 2));
    for (std::size_t j = i + 1; j < model.n(); ++j) {
      st.d2 = std::max(st.d2, difference_norm(model.law_without(i, j), 1));
    }
  }
  return st;
}

double d_bound_independent(std::span<const double> probs) {
  const PowerSums ps = power_sums(probs);
  if (!(ps.sigma2 > ps.tau)) return kInf;
  return 2.0 / (std::sqrt(ps.sigma2) * std::sqrt(ps.sigma2 - ps.tau));
}

double d1_bound_independent(std::span<const double> probs) {
  const PowerSums ps = power_sums(probs);
  if (!(ps.sigma2 > 3.0 * ps.tau)) return kInf;
  return 2.0 / std::sqrt((ps.sigma2 - ps.tau) * (ps.sigma2 - 3.0 * ps.tau));
}

double eta1(const IndicatorModel& model) {
  if (model.is_independent()) return 0.0;
  CompensatedSum acc;
  const auto probs = model.probs();
  for (std::size_t i = 0; i < model.n(); ++i) {
    const double p = probs[i];
    acc += p * (1.0 + 2.0 * p + 4.0 * p * p) *
           wasserstein1(model.conditional_without(i), model.law_without(i));
  }
  return acc.value();
}

double tail_bound_psi(double p, double lambda_hat) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("tail_bound_psi: p must lie in (0, 1)");
  if (lambda_hat < 0.0) throw std::invalid_argument("tail_bound_psi: lambda_hat < 0");
  const double psi = (-std::log(p) - 1.0) / p + 1.0;
  return std::exp(-lambda_hat * psi);
}

bool BoundReport::hypotheses_met() const noexcept {
  return std::all_of(flags.begin(), flags.end(), [](const auto& f) { return f.second; });
}

void BoundReport::finalize() {
  CompensatedSum t;
  for (const auto& g : groups) {
    CompensatedSum s;
    for (const auto& it : g.items) s += it.value;
    t += g.prefactor * s.value();
  }
  total = t.value();
  dominant.reset();
  if (hypotheses_met() && exact_tv && std::isfinite(total)) dominant = total >= exact_tv->upper;
}

BoundReport bound_thm41(const IndicatorModel& model) {
  const auto probs = model.probs();
  const PowerSums ps = power_sums(probs);
  BoundReport r;
  r.theorem = "thm41";
  r.n = model.n();
  r.params = fit_bcp(probs);
  const BcpParams& bp = r.params;
  const double theta1 = theta1_of(bp, ps);
  fill_common_stats(r, ps);
  r.stats.emplace_back("theta1", theta1);
  r.flags = {{"p_lt_half", bp.p < 0.5}, {"theta1_lt_half", theta1 < 0.5}};

  const SmoothnessStats sm = smoothness_exact(model);
  r.stats.emplace_back("d", sm.d);
  r.stats.emplace_back("d1", sm.d1);
  const double one_m_2p = 1.0 - 2.0 * bp.p;
  const double p4 = std::pow(bp.p, 4);
  BoundGroup g{"2/((1-2theta1)lambda_hat)", 2.0 / ((1.0 - 2.0 * theta1) * ps.s1), {}};
  g.items.push_back({"d1_sum_p4", sm.d1 * ps.s4});
  g.items.push_back({"d_Mp4", sm.d * static_cast<double>(bp.M) * p4 / (one_m_2p * one_m_2p)});
  g.items.push_back({"delta_term", (1.0 + 2.0 * bp.p) * bp.delta * bp.p * bp.p});
  g.items.push_back({"eta1", eta1(model)});
  r.groups.push_back(std::move(g));
  r.exact_tv = tv_interval(model.law_w(), pmf_bcp(bp));
  r.finalize();
  return r;
}

BoundReport bound_cor42(std::span<const double> probs) {
  check_probs(probs);
  const PowerSums ps = power_sums(probs);
  BoundReport r;
  r.theorem = "cor42";
  r.n = probs.size();
  r.params = fit_bcp(probs);
  const BcpParams& bp = r.params;
  const double theta1 = theta1_of(bp, ps);
  fill_common_stats(r, ps);
  r.stats.emplace_back("theta1", theta1);
  r.flags = {{"p_lt_half", bp.p < 0.5},
             {"theta1_lt_half", theta1 < 0.5},
             {"sigma2_gt_3tau", ps.sigma2 > 3.0 * ps.tau}};

  const double one_m_2p = 1.0 - 2.0 * bp.p;
  const double p4 = std::pow(bp.p, 4);
  const double d1b = d1_bound_independent(probs);
  const double db = d_bound_independent(probs);
  r.stats.emplace_back("d_bound", db);
  r.stats.emplace_back("d1_bound", d1b);
  BoundGroup g{"2/((1-2theta1)lambda_hat)", 2.0 / ((1.0 - 2.0 * theta1) * ps.s1), {}};
  g.items.push_back({"d1_sum_p4", d1b * ps.s4});
  g.items.push_back({"d_Mp4", db * static_cast<double>(bp.M) * p4 / (one_m_2p * one_m_2p)});
  g.items.push_back({"delta_term", (1.0 + 2.0 * bp.p) * bp.delta * bp.p * bp.p});
  r.groups.push_back(std::move(g));
  r.exact_tv = tv_interval(pmf_poisson_binomial(probs), pmf_bcp(bp));
  r.finalize();
  return r;
}

namespace {

BoundReport thm44_impl(const IndicatorModel& model, std::optional<double> d2_override) {
  const auto probs = model.probs();
  const std::size_t n = model.n();
  const PowerSums ps = power_sums(probs);
  BoundReport r;
  r.theorem = "thm44";
  r.n = n;
  r.params = fit_bcp(probs);
  const BcpParams& bp = r.params;
  const double q = 1.0 - bp.p;
  const BinomialPerturbation bpert = binomial_perturbation(bp);
  fill_common_stats(r, ps);
  r.stats.emplace_back("T_hat", bpert.t_hat);
  r.stats.emplace_back("theta2", bpert.theta2);
  r.flags = {{"theta2_lt_half", bpert.theta2 < 0.5}};

  double d2 = 0.0;
  if (d2_override) {
    d2 = *d2_override;
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        d2 = std::max(d2, difference_norm(model.law_without(i, j), 1));
      }
    }
  }
  r.stats.emplace_back("d2", d2);

  CompensatedSum single, pairs;
  if (!model.is_independent()) {
    for (std::size_t i = 0; i < n; ++i) {
      const double pi = probs[i];
      single += pi * (2.0 + 2.0 * std::abs(pi - bp.p)) *
                wasserstein1(model.conditional_without(i), model.law_without(i));
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double pi = probs[i], pj = probs[j];
      const double diff = std::abs(pi - pj);
      if (i == j || diff == 0.0) continue;
      double inner = d2 * diff * std::abs(model.covariance(i, j));
      if (!model.is_independent()) {
        inner += 4.0 * pi * pj *
                 wasserstein1(model.conditional_without(i, j), model.law_without(i, j));
      }
      pairs += pi * pj * diff * inner;
    }
  }

  const double one_m_2t = 1.0 - 2.0 * bpert.theta2;
  BoundGroup main{"2/(pqT_hat(1-2theta2))", 2.0 / (bp.p * q * bpert.t_hat * one_m_2t), {}};
  main.items.push_back({"d2_term", d2 * cs_gap(bp, ps)});
  main.items.push_back({"delta_term", bp.delta * bp.p * bp.p});
  main.items.push_back({"coupling_single", single.value()});
  main.items.push_back({"pair_term", pairs.value() / (2.0 * ps.s2)});
  r.groups.push_back(std::move(main));

  const Pmf law = model.law_w();
  const Pmf bcp = pmf_bcp(bp);
  const auto t = static_cast<std::size_t>(std::max(0.0, bpert.t_hat));
  BoundGroup tails{"2/(1-2theta2)", 2.0 / one_m_2t, {}};
  tails.items.push_back({"tail_bcp", upper_tail(bcp, t)});
  tails.items.push_back({"tail_w", upper_tail(law, t)});
  r.groups.push_back(std::move(tails));
  r.exact_tv = tv_interval(law, bcp);
  r.finalize();
  return r;
}

}  // namespace

BoundReport bound_thm44(const IndicatorModel& model) { return thm44_impl(model, std::nullopt); }

BoundReport bound_thm44_with_d2(const IndicatorModel& model, double d2) {
  return thm44_impl(model, d2);
}

BoundReport bound_cor45(std::span<const double> probs, Cor45Options opts) {
  check_probs(probs);
  const PowerSums ps = power_sums(probs);
  BoundReport r;
  r.theorem = "cor45";
  r.n = probs.size();
  r.params = fit_bcp(probs);
  const BcpParams& bp = r.params;
  const double q = 1.0 - bp.p;
  const BinomialPerturbation bpert = binomial_perturbation(bp);
  fill_common_stats(r, ps);
  r.stats.emplace_back("T_hat", bpert.t_hat);
  r.stats.emplace_back("theta2", bpert.theta2);
  r.flags = {{"theta2_lt_half", bpert.theta2 < 0.5}, {"sigma2_gt_3tau", ps.sigma2 > 3.0 * ps.tau}};

  const Pmf law = pmf_poisson_binomial(probs);
  const Pmf bcp = pmf_bcp(bp);
  const double gap = cs_gap(bp, ps);
  const double denom = bp.p * q * bpert.t_hat * (ps.sigma2 - 3.0 * ps.tau);
  BoundGroup g{"2/(1-2theta2)", 2.0 / (1.0 - 2.0 * bpert.theta2), {}};
  g.items.push_back({"d2_term", gap == 0.0 ? 0.0 : (denom > 0.0 ? 4.0 * gap / denom : kInf)});
  g.items.push_back({"delta_term", bp.delta * bp.p * bp.p});
  const auto t = static_cast<std::size_t>(std::max(0.0, bpert.t_hat));
  if (opts.psi_tails) {
    const double psi_tail = tail_bound_psi(bp.p, ps.s1);
    g.items.push_back({"tail_w_psi", psi_tail});
    g.items.push_back({"tail_bcp_psi", psi_tail});
  } else {
    g.items.push_back({"tail_w", upper_tail(law, t)});
    g.items.push_back({"tail_bcp", upper_tail(bcp, t)});
  }
  r.groups.push_back(std::move(g));
  r.exact_tv = tv_interval(law, bcp);
  r.finalize();
  return r;
}

nlohmann::json to_json(const BoundReport& report) {
  nlohmann::json stats = nlohmann::json::object();
  for (const auto& [k, v] : report.stats) stats[k] = v;
  nlohmann::json flags = nlohmann::json::object();
  for (const auto& [k, v] : report.flags) flags[k] = v;
  nlohmann::json groups = nlohmann::json::array();
  for (const auto& g : report.groups) {
    nlohmann::json items = nlohmann::json::array();
    for (const auto& it : g.items) items.push_back({{"name", it.name}, {"value", it.value}});
    groups.push_back({{"prefactor_name", g.prefactor_name}, {"prefactor", g.prefactor}, {"items", items}});
  }
  nlohmann::json out = {{"theorem", report.theorem},
                        {"n", report.n},
                        {"params", to_json(report.params)},
                        {"stats", stats},
                        {"flags", flags},
                        {"hypotheses_met", report.hypotheses_met()},
                        {"groups", groups},
                        {"total", report.total}};
  out["exact_tv"] = report.exact_tv
                        ? nlohmann::json{{"lower", report.exact_tv->lower}, {"upper", report.exact_tv->upper}}
                        : nlohmann::json(nullptr);
  out["dominant"] = report.dominant ? nlohmann::json(*report.dominant) : nlohmann::json(nullptr);
  return out;
}

std::string report_csv_header() {
  return "theorem,n,M,delta,p,alpha,hypotheses_met,total,tv_lower,tv_upper,dominant,flags,stats,items";
}

std::string report_csv_row(const BoundReport& r) {
  std::ostringstream os;
  os << r.theorem << ',' << r.n << ',' << r.params.M << ',' << format_double(r.params.delta) << ','
     << format_double(r.params.p) << ',' << format_double(r.params.alpha) << ','
     << (r.hypotheses_met() ? 1 : 0) << ',' << format_double(r.total) << ',';
  if (r.exact_tv) {
    os << format_double(r.exact_tv->lower) << ',' << format_double(r.exact_tv->upper);
  } else {
    os << ',';
  }
  os << ',' << (r.dominant ? (*r.dominant ? "1" : "0") : "") << ',';
  std::string flags;
  for (const auto& [k, v] : r.flags) {
    if (!flags.empty()) flags += ';';
    flags += k + '=' + (v ? "1" : "0");
  }
  std::vector<std::pair<std::string, double>> items;
  for (const auto& g : r.groups) {
    items.emplace_back("[" + g.prefactor_name + "]", g.prefactor);
    for (const auto& it : g.items) items.emplace_back(it.name, it.value);
  }
  os << flags << ',' << pack(r.stats) << ',' << pack(items);
  return os.str();
}

}  // namespace steinops
