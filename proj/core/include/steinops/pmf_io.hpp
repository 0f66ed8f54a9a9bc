#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "steinops/pmf.hpp"

namespace steinops {

// Mass sequences on disk come in two shapes:
//   CSV  - "index,mass" rows; '#' comment lines and an optional header row
//          are skipped; missing indices are zero.
//   JSON - a bare array of reals, or an object with a "masses" array.

std::vector<double> read_masses_csv(std::istream& in);
std::vector<double> read_masses_json(std::istream& in);

/// Dispatches on the file extension (.csv or .json).
std::vector<double> read_masses_file(const std::filesystem::path& path);

void write_pmf_csv(std::ostream& out, const Pmf& p);
nlohmann::json pmf_to_json(const Pmf& p);

/// "%.17g" rendering used by every CSV writer, so output is byte-stable.
std::string format_double(double x);

}  // namespace steinops
