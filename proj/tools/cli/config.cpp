#include <algorithm>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "commands.hpp"

namespace steinops::cli {
namespace {

bool given(const std::vector<std::string>& args, const std::string& opt) {
  return std::any_of(args.begin(), args.end(), [&](const std::string& a) {
    return a == opt || a.rfind(opt + "=", 0) == 0;
  });
}

std::string scalar(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number() || v.is_boolean()) return v.dump();
  throw std::invalid_argument("config: unsupported value " + v.dump());
}

}  // namespace

std::vector<std::string> merge_config(std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    }
  }
  if (path.empty()) return args;

  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config " + path);
  const nlohmann::json cfg = nlohmann::json::parse(in);
  if (!cfg.is_object()) throw std::invalid_argument("config: expected a JSON object");

  std::vector<std::string> extra;
  for (const auto& [key, value] : cfg.items()) {
    const std::string opt = "--" + key;
    if (key == "config" || given(args, opt)) continue;
    if (value.is_boolean()) {
      if (value.get<bool>()) extra.push_back(opt);
    } else if (value.is_array()) {
      for (const auto& v : value) {
        extra.push_back(opt);
        extra.push_back(scalar(v));
      }
    } else {
      extra.push_back(opt);
      extra.push_back(scalar(value));
    }
  }
  args.insert(args.end(), extra.begin(), extra.end());
  return args;
}

}  // namespace steinops::cli
