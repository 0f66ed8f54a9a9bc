#include "steinops/pmf_io.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace steinops {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<double> read_masses_csv(std::istream& in) {
  std::map<long long, double> rows;
  std::string line;
  std::size_t lineno = 0;
  bool seen_data_line = false;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    const bool first = !seen_data_line;
    seen_data_line = true;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw std::invalid_argument("csv line " + std::to_string(lineno) + ": expected index,mass");
    }
    const std::string idx = trim(line.substr(0, comma));
    const std::string val = trim(line.substr(comma + 1));
    long long k = 0;
    double m = 0.0;
    try {
      std::size_t used = 0;
      k = std::stoll(idx, &used);
      if (used != idx.size()) throw std::invalid_argument(idx);
      m = std::stod(val, &used);
      if (used != val.size()) throw std::invalid_argument(val);
    } catch (const std::exception&) {
      if (first) continue;  // header row
      throw std::invalid_argument("csv line " + std::to_string(lineno) + ": not numeric");
    }
    if (k < 0) throw std::invalid_argument("csv: negative index");
    if (!rows.emplace(k, m).second) {
      throw std::invalid_argument("csv: duplicate index " + std::to_string(k));
    }
  }
  if (rows.empty()) throw std::invalid_argument("csv: no rows");
  std::vector<double> out(static_cast<std::size_t>(rows.rbegin()->first) + 1, 0.0);
  for (const auto& [k, m] : rows) out[static_cast<std::size_t>(k)] = m;
  return out;
}

std::vector<double> read_masses_json(std::istream& in) {
  const nlohmann::json j = nlohmann::json::parse(in);
  const nlohmann::json& arr = j.is_object() ? j.at("masses") : j;
  if (!arr.is_array() || arr.empty()) throw std::invalid_argument("json: expected array of reals");
  std::vector<double> out;
  out.reserve(arr.size());
  for (const auto& v : arr) {
    if (!v.is_number()) throw std::invalid_argument("json: non-numeric mass");
    out.push_back(v.get<double>());
  }
  return out;
}

std::vector<double> read_masses_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path.string());
  const auto ext = path.extension().string();
  if (ext == ".csv") return read_masses_csv(in);
  if (ext == ".json") return read_masses_json(in);
  throw std::invalid_argument("unsupported extension '" + ext + "' (use .csv or .json)");
}

void write_pmf_csv(std::ostream& out, const Pmf& p) {
  out << "# tail_mass=" << format_double(p.tail_mass) << " tol=" << format_double(p.tol) << '\n';
  out << "index,mass\n";
  for (std::size_t j = 0; j < p.size(); ++j) out << j << ',' << format_double(p.masses[j]) << '\n';
}

nlohmann::json pmf_to_json(const Pmf& p) {
  return {{"masses", p.masses}, {"tail_mass", p.tail_mass}, {"tol", p.tol}};
}

}  // namespace steinops
