#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

#include "steinops/catalog.hpp"
#include "steinops/distributions.hpp"
#include "steinops/indicators.hpp"
#include "steinops/pmf_io.hpp"
#include "steinops/runs.hpp"

namespace steinops::cli {
namespace {

using nlohmann::json;

void emit(const CommonOptions& common, const std::string& text) {
  if (common.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(common.out, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot write " + common.out);
  out << text;
}

void check_format(const CommonOptions& common) {
  if (common.format != "json" && common.format != "csv") {
    throw std::invalid_argument("--format must be json or csv");
  }
}

template <class T>
T need(const std::optional<T>& v, const char* flag) {
  if (!v) throw std::invalid_argument(std::string("missing ") + flag);
  return *v;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    const double v = std::stod(item, &used);
    if (used != item.size()) throw std::invalid_argument("not a number: '" + item + "'");
    out.push_back(v);
  }
  return out;
}

// A file path (.csv / .json) or an inline comma-separated list.
std::vector<double> read_values(const std::string& text, const char* what) {
  if (text.empty()) throw std::invalid_argument(std::string("missing ") + what);
  const std::filesystem::path path(text);
  if (std::filesystem::exists(path)) {
    if (path.extension() == ".json") {
      std::ifstream in(path);
      const json j = json::parse(in);
      if (j.is_object() && j.contains("probs")) return j.at("probs").get<std::vector<double>>();
      std::istringstream again(j.dump());
      return read_masses_json(again);
    }
    return read_masses_file(path);
  }
  return parse_list(text);
}

IndicatorModel read_model(const BoundOptions& opts) {
  if (!opts.model.empty()) {
    std::ifstream in(opts.model);
    if (!in) throw std::invalid_argument("cannot open model " + opts.model);
    return IndicatorModel::from_json(json::parse(in));
  }
  return IndicatorModel::independent(read_values(opts.probs, "--probs or --model"));
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::string report_csv(const BoundReport& r) {
  return "# steinops-report-csv v1\n" + report_csv_header() + "\n" + report_csv_row(r) + "\n";
}

PanjerCounting parse_panjer(const std::string& text) {
  std::optional<double> a, b;
  for (const auto& [k, v] : CaseSpec::parse("panjer:" + text).params) {
    const double x = std::stod(v);
    if (k == "a") {
      a = x;
    } else if (k == "b") {
      b = x;
    } else {
      throw std::invalid_argument("--panjer accepts a=...,b=...");
    }
  }
  return PanjerCounting::from_ab(need(a, "--panjer a"), need(b, "--panjer b"));
}

// Probability vector of size n for a named sweep family.
std::vector<double> family_probs(const std::string& family, std::size_t n) {
  std::vector<double> probs(n);
  if (family == "half") {
    for (std::size_t i = 0; i < n; ++i) probs[i] = i < n / 2 ? 1.0 / 6.0 : 1.0 / 12.0;
    return probs;
  }
  const auto spec = parse_list(family.substr(family.find(':') + 1));
  if (family.rfind("equal:", 0) == 0 && spec.size() == 1) {
    std::fill(probs.begin(), probs.end(), spec[0]);
    return probs;
  }
  if (family.rfind("linspace:", 0) == 0 && spec.size() == 2) {
    for (std::size_t i = 0; i < n; ++i) {
      const double t = n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
      probs[i] = spec[0] + t * (spec[1] - spec[0]);
    }
    return probs;
  }
  throw std::invalid_argument("--family must be half, equal:C or linspace:LO,HI");
}

BoundReport indicator_report(const std::string& theorem, const std::vector<double>& probs, bool psi) {
  if (theorem == "cor42") return bound_cor42(probs);
  if (theorem == "cor45") return bound_cor45(probs, {psi});
  if (theorem == "thm41") return bound_thm41(IndicatorModel::independent(probs));
  if (theorem == "thm44") return bound_thm44(IndicatorModel::independent(probs));
  throw std::invalid_argument("unknown theorem '" + theorem + "'");
}

}  // namespace

int run_pmf(const CommonOptions& common, const PmfOptions& o) {
  check_format(common);
  const std::string& f = o.family;
  const double tol = common.tol;
  Pmf law;
  json extra = json::object();
  if (f == "poisson") {
    law = pmf_poisson(need(o.alpha, "--alpha"), tol);
  } else if (f == "binomial") {
    law = pmf_binomial(need(o.n, "--n"), need(o.p, "--p"));
  } else if (f == "pseudo-binomial") {
    law = pmf_pseudo_binomial(need(o.m_tilde, "--m-tilde"), need(o.p, "--p"));
  } else if (f == "nb") {
    law = pmf_negative_binomial(need(o.r, "--r"), need(o.p_bar, "--p-bar"), tol);
  } else if (f == "bcp") {
    law = pmf_bcp(need(o.m, "--m"), need(o.p, "--p"), need(o.alpha, "--alpha"), tol);
  } else if (f == "poisson-binomial") {
    law = pmf_poisson_binomial(read_values(o.probs, "--probs"));
  } else if (f == "runs") {
    law = exact_runs_law(RunsModel(need(o.n, "--n"), need(o.pstar, "--pstar")));
  } else if (f == "compound") {
    if (o.panjer.empty()) throw std::invalid_argument("missing --panjer a=...,b=...");
    const PanjerCounting counting = parse_panjer(o.panjer);
    const SeverityLaw severity(read_values(o.severity, "--severity"));
    law = pmf_compound_panjer(counting, severity, tol);
    extra["counting"] = counting.family();
    if (o.cross_check) {
      const Pmf explicit_law = pmf_compound_explicit(counting.masses(tol), severity, tol);
      const double l1 = l1_distance(law, explicit_law);
      extra["cross_check"] = {{"l1", l1}, {"ok", l1 <= 1e-10}};
    }
  } else {
    throw std::invalid_argument("unknown --family '" + f + "'");
  }
  law.validate();

  if (common.format == "csv") {
    std::ostringstream os;
    os << "# family=" << f << '\n';
    if (extra.contains("cross_check")) {
      os << "# cross_check_l1=" << format_double(extra["cross_check"]["l1"].get<double>()) << '\n';
    }
    write_pmf_csv(os, law);
    emit(common, os.str());
  } else {
    json j = pmf_to_json(law);
    j["family"] = f;
    for (const auto& [k, v] : extra.items()) j[k] = v;
    emit(common, dump(j));
  }
  return kOk;
}

int run_check_operator(const CommonOptions& common, const CheckOptions& o) {
  check_format(common);
  if (o.grid != "default" && o.grid != "none") throw std::invalid_argument("--grid must be default or none");
  if (!o.law.empty() && o.cases.size() != 1) throw std::invalid_argument("--law needs exactly one --case");

  std::vector<OperatorCase> cases;
  if (o.cases.empty() && o.grid == "default") {
    for (const auto& spec : default_catalog_grid()) cases.push_back(make_case(spec, common.tol));
  }
  for (const auto& text : o.cases) {
    const CaseSpec op_spec = CaseSpec::parse(text);
    const CaseSpec law_spec = o.law.empty() ? op_spec : CaseSpec::parse(o.law);
    cases.push_back(make_case(op_spec, law_spec, common.tol));
  }
  if (cases.empty()) throw std::invalid_argument("empty operator grid: give --case or --grid default");

  bool all_ok = true;
  std::vector<double> defects;
  for (const auto& c : cases) {
    defects.push_back(case_max_defect(c));
    all_ok = all_ok && defects.back() <= o.threshold;
  }

  if (common.format == "csv") {
    std::ostringstream os;
    os << "# steinops-check-csv v1 threshold=" << format_double(o.threshold) << '\n';
    os << "case,max_defect,ok\n";
    for (std::size_t i = 0; i < cases.size(); ++i) {
      os << '"' << cases[i].label << "\"," << format_double(defects[i]) << ','
         << (defects[i] <= o.threshold ? 1 : 0) << '\n';
    }
    emit(common, os.str());
  } else {
    json rows = json::array();
    for (std::size_t i = 0; i < cases.size(); ++i) {
      rows.push_back({{"case", cases[i].label},
                      {"operator", to_json(cases[i].op)},
                      {"max_defect", defects[i]},
                      {"ok", defects[i] <= o.threshold}});
    }
    emit(common, dump({{"threshold", o.threshold}, {"all_ok", all_ok}, {"cases", rows}}));
  }
  if (!all_ok) std::cerr << "steinops: defect above threshold\n";
  return all_ok ? kOk : kInputError;
}

int run_bound(const CommonOptions& common, const BoundOptions& o) {
  check_format(common);
  const std::string& t = o.theorem;
  if (t == "lemma47") {
    const RunsModel model(need(o.n, "--n"), need(o.pstar, "--pstar"));
    const Lemma47Report rep = lemma47_check(model);
    json j = to_json(rep);
    j["theorem"] = "lemma47";
    j["n"] = model.n;
    j["pstar"] = model.p_star;
    j["constants"] = to_json(runs_constants(model));
    if (common.format == "csv") {
      std::ostringstream os;
      os << "# steinops-lemma47-csv v1\nn,pstar,hypothesis_met,d_exact,d_bound,d1_exact,d1_bound\n"
         << model.n << ',' << format_double(model.p_star) << ',' << (rep.hypothesis_met ? 1 : 0) << ','
         << format_double(rep.d_exact) << ',' << format_double(rep.d_bound) << ','
         << format_double(rep.d1_exact) << ',' << format_double(rep.d1_bound) << '\n';
      emit(common, os.str());
    } else {
      emit(common, dump(j));
    }
    const bool violated = rep.hypothesis_met && !(rep.d_holds && rep.d1_holds);
    return o.strict && violated ? kViolation : kOk;
  }

  BoundReport report;
  if (t == "cor48") {
    report = bound_cor48(RunsModel(need(o.n, "--n"), need(o.pstar, "--pstar")));
  } else if (t == "thm41" || t == "thm44") {
    const IndicatorModel model = read_model(o);
    report = t == "thm41" ? bound_thm41(model) : bound_thm44(model);
  } else if (t == "cor42" || t == "cor45") {
    report = indicator_report(t, read_values(o.probs, "--probs"), o.psi_tails);
  } else {
    throw std::invalid_argument("--theorem must be thm41, cor42, thm44, cor45, cor48 or lemma47");
  }
  emit(common, common.format == "csv" ? report_csv(report) : dump(to_json(report)));
  return o.strict && report.dominant == false ? kViolation : kOk;
}

int run_sweep(const CommonOptions& common, const SweepOptions& o) {
  check_format(common);
  const bool runs = o.theorem == "cor48";
  if (!runs && o.theorem != "cor42" && o.theorem != "cor45" && o.theorem != "thm41" && o.theorem != "thm44") {
    throw std::invalid_argument("sweep --theorem must be cor42, cor45, thm41, thm44 or cor48");
  }
  struct Point {
    std::string grid;
    std::size_t n;
    double pstar;
  };
  std::vector<Point> points;
  const auto ns = parse_list(o.ns);
  const std::vector<double> pstars = runs ? parse_list(o.pstars) : std::vector<double>{0.0};
  for (double ps : pstars) {
    for (double nv : ns) {
      if (nv < 1.0 || nv != std::floor(nv)) throw std::invalid_argument("--ns entries must be positive integers");
      points.push_back({runs ? "pstar=" + format_double(ps) : o.family, static_cast<std::size_t>(nv), ps});
    }
  }
  if (!runs && !points.empty()) family_probs(o.family, 1);  // validate before spawning workers

  std::vector<std::optional<BoundReport>> results(points.size());
  std::vector<std::string> errors(points.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++) {
      try {
        const Point& pt = points[i];
        results[i] = runs ? bound_cor48(RunsModel(pt.n, pt.pstar))
                          : indicator_report(o.theorem, family_probs(o.family, pt.n), false);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  const unsigned jobs = std::max(1U, o.jobs ? o.jobs : std::thread::hardware_concurrency());
  {
    std::vector<std::jthread> pool;
    for (unsigned k = 0; k < std::min<std::size_t>(jobs, points.size()); ++k) pool.emplace_back(worker);
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!errors[i].empty()) throw std::invalid_argument("grid point n=" + std::to_string(points[i].n) + ": " + errors[i]);
  }

  std::vector<std::optional<double>> ratios(points.size());
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (points[i].grid == points[i - 1].grid && results[i - 1]->total != 0.0) {
      ratios[i] = results[i]->total / results[i - 1]->total;
    }
  }

  bool violated = false;
  if (common.format == "csv") {
    std::ostringstream os;
    os << "# steinops-sweep-csv v1 theorem=" << o.theorem << '\n';
    os << report_csv_header() << ",grid,ratio\n";
    for (std::size_t i = 0; i < points.size(); ++i) {
      os << report_csv_row(*results[i]) << ',' << points[i].grid << ','
         << (ratios[i] ? format_double(*ratios[i]) : "") << '\n';
      violated = violated || results[i]->dominant == false;
    }
    emit(common, os.str());
  } else {
    json rows = json::array();
    for (std::size_t i = 0; i < points.size(); ++i) {
      json row = to_json(*results[i]);
      row["grid"] = points[i].grid;
      row["ratio"] = ratios[i] ? json(*ratios[i]) : json(nullptr);
      rows.push_back(std::move(row));
      violated = violated || results[i]->dominant == false;
    }
    emit(common, dump({{"schema", "steinops-sweep v1"}, {"theorem", o.theorem}, {"rows", rows}}));
  }
  return o.strict && violated ? kViolation : kOk;
}

}  // namespace steinops::cli
