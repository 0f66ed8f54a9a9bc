#pragma once

#include <optional>
#include <string>
#include <vector>

namespace steinops::cli {

enum ExitCode : int { kOk = 0, kInputError = 1, kViolation = 2 };

struct CommonOptions {
  std::string format = "json";
  std::string out;
  double tol = 1e-12;
};

struct PmfOptions {
  std::string family;
  std::optional<double> alpha, p, m_tilde, r, p_bar, pstar;
  std::optional<std::size_t> n, m;
  std::string probs;
  std::string panjer;
  std::string severity;
  bool cross_check = false;
};

struct CheckOptions {
  std::vector<std::string> cases;
  std::string law;
  std::string grid = "default";
  double threshold = 1e-9;
};

struct BoundOptions {
  std::string theorem;
  std::string probs;
  std::string model;
  std::optional<std::size_t> n;
  std::optional<double> pstar;
  bool psi_tails = false;
  bool strict = false;
};

struct SweepOptions {
  std::string theorem = "cor42";
  std::string ns;
  std::string family = "half";
  std::string pstars = "0.5";
  unsigned jobs = 0;
  bool strict = false;
};

int run_pmf(const CommonOptions& common, const PmfOptions& opts);
int run_check_operator(const CommonOptions& common, const CheckOptions& opts);
int run_bound(const CommonOptions& common, const BoundOptions& opts);
int run_sweep(const CommonOptions& common, const SweepOptions& opts);

/// Appends options from a JSON config for every key not already given on the
/// command line, so explicit flags win.
std::vector<std::string> merge_config(std::vector<std::string> args);

}  // namespace steinops::cli
