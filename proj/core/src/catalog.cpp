#include "steinops/catalog.hpp"

#include <numeric>
#include <sstream>
#include <stdexcept>

#include "steinops/distributions.hpp"
#include "steinops/pmf_io.hpp"

namespace steinops {
namespace {

double parse_real(const std::string& s, const std::string& key) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw std::invalid_argument("parameter " + key + ": not a number '" + s + "'");
  return v;
}

// lambdas[i] = lambda * severity[i + 1] for a severity without mass at zero.
std::vector<double> lambdas_of(const CaseSpec& spec) {
  if (spec.params.count("lambdas")) return spec.list("lambdas");
  const double lambda = spec.real("lambda");
  const auto sev = spec.list("severity");
  std::vector<double> out;
  for (std::size_t m = 1; m < sev.size(); ++m) out.push_back(lambda * sev[m]);
  return out;
}

Pmf compound_poisson_law(const std::vector<double>& lambdas, double tol) {
  const double total = std::accumulate(lambdas.begin(), lambdas.end(), 0.0);
  if (!(total > 0.0)) throw std::invalid_argument("compound poisson: lambdas must have positive sum");
  std::vector<double> sev{0.0};
  for (double l : lambdas) {
    if (l < 0.0) throw std::invalid_argument("compound poisson: negative lambda");
    sev.push_back(l / total);
  }
  return pmf_compound_panjer(PanjerCounting::poisson(total), SeverityLaw(sev), tol);
}

}  // namespace

CaseSpec CaseSpec::parse(const std::string& text) {
  CaseSpec spec;
  const auto colon = text.find(':');
  spec.family = text.substr(0, colon);
  if (spec.family.empty()) throw std::invalid_argument("case spec: missing family in '" + text + "'");
  if (colon == std::string::npos) return spec;
  std::stringstream ss(text.substr(colon + 1));
  std::string kv;
  while (std::getline(ss, kv, ',')) {
    if (kv.empty()) continue;
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) throw std::invalid_argument("case spec: expected key=value, got '" + kv + "'");
    spec.params[kv.substr(0, eq)] = kv.substr(eq + 1);
  }
  return spec;
}

std::string CaseSpec::to_string() const {
  std::string out = family;
  char sep = ':';
  for (const auto& [k, v] : params) {
    out += sep + k + '=' + v;
    sep = ',';
  }
  return out;
}

double CaseSpec::real(const std::string& key) const {
  const auto it = params.find(key);
  if (it == params.end()) throw std::invalid_argument(family + ": missing parameter '" + key + "'");
  return parse_real(it->second, key);
}

std::size_t CaseSpec::count(const std::string& key) const {
  const double v = real(key);
  if (v < 0.0 || v != static_cast<double>(static_cast<std::size_t>(v))) {
    throw std::invalid_argument(family + ": parameter '" + key + "' must be a nonnegative integer");
  }
  return static_cast<std::size_t>(v);
}

std::vector<double> CaseSpec::list(const std::string& key) const {
  const auto it = params.find(key);
  if (it == params.end()) throw std::invalid_argument(family + ": missing parameter '" + key + "'");
  std::vector<double> out;
  std::stringstream ss(it->second);
  std::string item;
  while (std::getline(ss, item, '/')) out.push_back(parse_real(item, key));
  if (out.empty()) throw std::invalid_argument(family + ": empty list '" + key + "'");
  return out;
}

AffineOperator make_operator(const CaseSpec& s) {
  const std::string& f = s.family;
  if (f == "poisson") return op_poisson(s.real("alpha"));
  if (f == "pseudo-binomial") return op_pseudo_binomial(s.real("m_tilde"), s.real("p"));
  if (f == "binomial") return op_pseudo_binomial(static_cast<double>(s.count("n")), s.real("p"));
  if (f == "nb") return op_negative_binomial(s.real("r"), s.real("p_bar"));
  if (f == "compound-poisson") return op_compound_poisson(lambdas_of(s));
  if (f == "bi-cp") return op_bi_cp(s.count("m"), s.real("p"), lambdas_of(s));
  if (f == "nb-cp") return op_nb_cp(s.real("r"), s.real("p_bar"), lambdas_of(s));
  if (f == "bcp-binomial") return op_bcp_binomial_perturbation(s.count("m"), s.real("p"), s.real("alpha"));
  if (f == "bcp-poisson") return op_bcp_poisson_perturbation(s.count("m"), s.real("p"), s.real("alpha"));
  if (f.size() == 5 && f.compare(0, 4, "binb") == 0 && f[4] >= '1' && f[4] <= '4') {
    return op_binb(f[4] - '0', s.count("m"), s.real("p"), s.real("r"), s.real("p_bar"));
  }
  if (f == "compound-panjer") {
    return op_compound_panjer(s.real("a"), s.real("b"), SeverityLaw(s.list("severity")));
  }
  if (f == "compound-nb") {
    return op_compound_negative_binomial(s.real("r"), s.real("p_bar"), SeverityLaw(s.list("severity")));
  }
  if (f == "compound-binomial") {
    return op_compound_binomial(s.count("n"), s.real("p"), SeverityLaw(s.list("severity")));
  }
  if (f == "compound-geometric") return op_compound_geometric(s.real("q"), SeverityLaw(s.list("severity")));
  if (f == "generic-ratio") return op_generic_ratio(make_pmf(s.list("masses")));
  throw std::invalid_argument("unknown operator family '" + f + "'");
}

Pmf make_law(const CaseSpec& s, double tol) {
  const std::string& f = s.family;
  if (f == "poisson") return pmf_poisson(s.real("alpha"), tol);
  if (f == "pseudo-binomial") return pmf_pseudo_binomial(s.real("m_tilde"), s.real("p"));
  if (f == "binomial") return pmf_binomial(s.count("n"), s.real("p"));
  if (f == "nb") return pmf_negative_binomial(s.real("r"), s.real("p_bar"), tol);
  if (f == "compound-poisson") return compound_poisson_law(lambdas_of(s), tol);
  if (f == "bi-cp") {
    return convolve(pmf_binomial(s.count("m"), s.real("p")), compound_poisson_law(lambdas_of(s), tol));
  }
  if (f == "nb-cp") {
    return convolve(pmf_negative_binomial(s.real("r"), s.real("p_bar"), tol),
                    compound_poisson_law(lambdas_of(s), tol));
  }
  if (f == "bcp-binomial" || f == "bcp-poisson") return pmf_bcp(s.count("m"), s.real("p"), s.real("alpha"), tol);
  if (f.size() == 5 && f.compare(0, 4, "binb") == 0) {
    return convolve(pmf_binomial(s.count("m"), s.real("p")), pmf_negative_binomial(s.real("r"), s.real("p_bar"), tol));
  }
  if (f == "compound-panjer") {
    return pmf_compound_panjer(PanjerCounting::from_ab(s.real("a"), s.real("b")), SeverityLaw(s.list("severity")), tol);
  }
  if (f == "compound-nb") {
    return pmf_compound_panjer(PanjerCounting::negative_binomial(s.real("r"), s.real("p_bar")),
                               SeverityLaw(s.list("severity")), tol);
  }
  if (f == "compound-binomial") {
    return pmf_compound_panjer(PanjerCounting::binomial(s.count("n"), s.real("p")), SeverityLaw(s.list("severity")), tol);
  }
  if (f == "compound-geometric") {
    return pmf_compound_panjer(PanjerCounting::negative_binomial(1.0, 1.0 - s.real("q")),
                               SeverityLaw(s.list("severity")), tol);
  }
  if (f == "generic-ratio") return make_pmf(s.list("masses"));
  throw std::invalid_argument("unknown law family '" + f + "'");
}

OperatorCase make_case(const CaseSpec& op_spec, const CaseSpec& law_spec, double tol) {
  std::string label = op_spec.to_string();
  if (law_spec.to_string() != label) label += " vs " + law_spec.to_string();
  return {label, make_operator(op_spec), make_law(law_spec, tol)};
}

OperatorCase make_case(const CaseSpec& spec, double tol) { return make_case(spec, spec, tol); }

std::vector<CaseSpec> default_catalog_grid() {
  const std::vector<std::string> lambdas{"0.5", "1", "5"};
  const std::vector<std::pair<std::string, std::string>> mp{{"5", "0.1"}, {"10", "0.2"}};
  const std::vector<std::pair<std::string, std::string>> rpb{{"1", "0.5"}, {"2", "0.6"}};
  // Severities on at most four points; the first has no mass at zero.
  const std::vector<std::string> severities{"0/0.5/0.3/0.2", "0.2/0.3/0.5", "0.1/0.2/0.3/0.4"};
  const std::string sev0 = severities.front();

  std::vector<std::string> specs;
  for (const auto& l : lambdas) {
    specs.push_back("poisson:alpha=" + l);
    specs.push_back("compound-poisson:lambda=" + l + ",severity=" + sev0);
  }
  for (const auto& [m, p] : mp) {
    specs.push_back("binomial:n=" + m + ",p=" + p);
    specs.push_back("pseudo-binomial:m_tilde=" + m + ".5,p=" + p);
    for (const auto& l : lambdas) {
      specs.push_back("bi-cp:m=" + m + ",p=" + p + ",lambda=" + l + ",severity=" + sev0);
      specs.push_back("bcp-binomial:m=" + m + ",p=" + p + ",alpha=" + l);
      specs.push_back("bcp-poisson:m=" + m + ",p=" + p + ",alpha=" + l);
    }
    for (const auto& [r, pb] : rpb) {
      for (int v = 1; v <= 4; ++v) {
        specs.push_back("binb" + std::to_string(v) + ":m=" + m + ",p=" + p + ",r=" + r + ",p_bar=" + pb);
      }
    }
    for (const auto& sev : severities) {
      specs.push_back("compound-binomial:n=" + m + ",p=" + p + ",severity=" + sev);
    }
  }
  for (const auto& [r, pb] : rpb) {
    specs.push_back("nb:r=" + r + ",p_bar=" + pb);
    for (const auto& l : lambdas) {
      specs.push_back("nb-cp:r=" + r + ",p_bar=" + pb + ",lambda=" + l + ",severity=" + sev0);
    }
    for (const auto& sev : severities) specs.push_back("compound-nb:r=" + r + ",p_bar=" + pb + ",severity=" + sev);
  }
  for (const auto& l : lambdas) {
    for (const auto& sev : severities) specs.push_back("compound-panjer:a=" + l + ",b=0,severity=" + sev);
  }
  for (const auto& q : {"0.3", "0.6"}) specs.push_back(std::string("compound-geometric:q=") + q + ",severity=" + sev0);
  specs.push_back("generic-ratio:masses=0.1/0.2/0.3/0.25/0.15");

  std::vector<CaseSpec> out;
  out.reserve(specs.size());
  for (const auto& s : specs) out.push_back(CaseSpec::parse(s));
  return out;
}

double case_max_defect(const OperatorCase& c) {
  return max_indicator_defect(c.op, c.law, c.law.size() + c.op.max_offset());
}

}  // namespace steinops
