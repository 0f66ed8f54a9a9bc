#pragma once

#include <map>
#include <string>
#include <vector>

#include "steinops/operators.hpp"
#include "steinops/pmf.hpp"

namespace steinops {

/// Parameters of one catalog entry, parsed from "family:key=value,key=value".
/// List values (lambdas, severity, masses) separate entries with '/'.
struct CaseSpec {
  std::string family;
  std::map<std::string, std::string> params;

  static CaseSpec parse(const std::string& text);
  std::string to_string() const;

  double real(const std::string& key) const;
  std::size_t count(const std::string& key) const;
  std::vector<double> list(const std::string& key) const;
};

/// A Stein operator paired with the law it should characterise.
struct OperatorCase {
  std::string label;
  AffineOperator op;
  Pmf law;
};

/// Families: poisson, pseudo-binomial, binomial, nb, compound-poisson, bi-cp,
/// nb-cp, bcp-binomial, bcp-poisson, binb1..binb4, compound-panjer,
/// compound-nb, compound-binomial, compound-geometric, generic-ratio.
AffineOperator make_operator(const CaseSpec& spec);
Pmf make_law(const CaseSpec& spec, double tol = kDefaultTol);
OperatorCase make_case(const CaseSpec& op_spec, const CaseSpec& law_spec, double tol = kDefaultTol);
OperatorCase make_case(const CaseSpec& spec, double tol = kDefaultTol);

/// The standard parameter grid: lambda in {0.5, 1, 5}, (M, p) in
/// {(5, 0.1), (10, 0.2)}, (r, p_bar) in {(1, 0.5), (2, 0.6)}, severities
/// supported on at most four points.
std::vector<CaseSpec> default_catalog_grid();

/// Indicator defect of a case over k = 1 .. law.size() + max offset.
double case_max_defect(const OperatorCase& c);

}  // namespace steinops
