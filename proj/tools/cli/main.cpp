#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "commands.hpp"

namespace {

using namespace steinops::cli;

void add_common(CLI::App* sub, CommonOptions& common, std::string& config) {
  sub->add_option("--format", common.format, "Output format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  sub->add_option("--out", common.out, "Write output to this file instead of stdout");
  sub->add_option("--tol", common.tol, "Truncation tolerance for infinite-support laws")
      ->envname("STEINOPS_TOL")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub->add_option("--config", config, "JSON file of option values; explicit flags take precedence");
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  try {
    args = merge_config(std::move(args));
  } catch (const std::exception& e) {
    std::cerr << "steinops: " << e.what() << '\n';
    return kInputError;
  }

  CLI::App app{"Stein operators, compound laws and BCP approximation bounds", "steinops"};
  app.require_subcommand(1);
  CommonOptions common;
  std::string config;

  PmfOptions pmf;
  auto* pmf_cmd = app.add_subcommand("pmf", "Emit a probability mass function");
  add_common(pmf_cmd, common, config);
  pmf_cmd
      ->add_option("--family", pmf.family,
                   "poisson|binomial|pseudo-binomial|nb|bcp|compound|poisson-binomial|runs")
      ->required();
  pmf_cmd->add_option("--alpha", pmf.alpha, "Poisson mean");
  pmf_cmd->add_option("--n", pmf.n, "Binomial size or runs length");
  pmf_cmd->add_option("--m", pmf.m, "Binomial part of a BCP");
  pmf_cmd->add_option("--p", pmf.p, "Success probability");
  pmf_cmd->add_option("--m-tilde", pmf.m_tilde, "Pseudo-binomial exponent");
  pmf_cmd->add_option("--r", pmf.r, "Negative binomial shape");
  pmf_cmd->add_option("--p-bar", pmf.p_bar, "Negative binomial success probability");
  pmf_cmd->add_option("--pstar", pmf.pstar, "Trial success probability for runs");
  pmf_cmd->add_option("--probs", pmf.probs, "Indicator probabilities: file or comma list");
  pmf_cmd->add_option("--panjer", pmf.panjer, "Counting law as a=...,b=...");
  pmf_cmd->add_option("--severity", pmf.severity, "Severity masses: file or comma list");
  pmf_cmd->add_flag("--cross-check", pmf.cross_check, "Compare the recursion with the explicit sum");

  CheckOptions check;
  auto* check_cmd = app.add_subcommand("check-operator", "Characterisation defects of catalog operators");
  add_common(check_cmd, common, config);
  check_cmd->add_option("--case", check.cases, "Operator spec family:key=value,...; repeatable");
  check_cmd->add_option("--law", check.law, "Law spec to test the single --case against");
  check_cmd->add_option("--grid", check.grid, "default|none")->capture_default_str();
  check_cmd->add_option("--threshold", check.threshold, "Largest acceptable defect")->capture_default_str();

  BoundOptions bound;
  auto* bound_cmd = app.add_subcommand("bound", "Evaluate a BCP approximation bound");
  add_common(bound_cmd, common, config);
  bound_cmd->add_option("--theorem", bound.theorem, "thm41|cor42|thm44|cor45|cor48|lemma47")->required();
  bound_cmd->add_option("--probs", bound.probs, "Independent indicator probabilities: file or comma list");
  bound_cmd->add_option("--model", bound.model, "Indicator model JSON (independent or joint)");
  bound_cmd->add_option("--n", bound.n, "Runs length");
  bound_cmd->add_option("--pstar", bound.pstar, "Runs trial success probability");
  bound_cmd->add_flag("--psi-tails", bound.psi_tails, "cor45: analytic tail bounds instead of exact tails");
  bound_cmd->add_flag("--strict", bound.strict, "Exit 2 when a bound fails to dominate the exact distance");

  SweepOptions sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "Tabulate bounds over a grid of sizes");
  add_common(sweep_cmd, common, config);
  sweep_cmd->add_option("--theorem", sweep.theorem, "cor42|cor45|thm41|thm44|cor48")->capture_default_str();
  sweep_cmd->add_option("--ns", sweep.ns, "Comma list of sizes; empty gives a header-only table")->required();
  sweep_cmd->add_option("--family", sweep.family, "half|equal:C|linspace:LO,HI")->capture_default_str();
  sweep_cmd->add_option("--pstars", sweep.pstars, "Comma list of p* values for cor48")->capture_default_str();
  sweep_cmd->add_option("--jobs", sweep.jobs, "Worker threads (0: hardware concurrency)");
  sweep_cmd->add_flag("--strict", sweep.strict, "Exit 2 when any bound fails to dominate");

  std::vector<const char*> cargv;
  for (const auto& a : args) cargv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(cargv.size()), cargv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInputError;
  }

  try {
    if (pmf_cmd->parsed()) return run_pmf(common, pmf);
    if (check_cmd->parsed()) return run_check_operator(common, check);
    if (bound_cmd->parsed()) return run_bound(common, bound);
    if (sweep_cmd->parsed()) return run_sweep(common, sweep);
  } catch (const std::exception& e) {
    std::cerr << "steinops: " << e.what() << '\n';
    return kInputError;
  }
  return kInputError;
}
