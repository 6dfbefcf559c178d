#include "spinmech/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "spinmech/errors.hpp"

namespace spinmech {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw ConfigError("parameter '" + key + "': '" + text + "' is not a number");
  }
  return v;
}

IniSections from_ptree(const boost::property_tree::ptree& tree) {
  IniSections out;
  for (const auto& [section, body] : tree) {
    if (body.empty()) {
      throw ConfigError("config key '" + section + "' appears outside any [section]");
    }
    for (const auto& [key, value] : body) {
      std::string v = value.data();
      if (const auto c = v.find_first_of(";#"); c != std::string::npos) v.erase(c);
      out[section][key] = trim(v);
    }
  }
  return out;
}

}  // namespace

const std::string& ParamSet::get_string(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing parameter '" + key + "'");
  return it->second;
}

double ParamSet::get_double(const std::string& key) const { return to_double(key, get_string(key)); }

int ParamSet::get_int(const std::string& key) const {
  const double v = get_double(key);
  if (v != std::floor(v) || std::abs(v) > 1e9) {
    throw ConfigError("parameter '" + key + "' must be an integer");
  }
  return static_cast<int>(v);
}

std::uint64_t ParamSet::get_u64(const std::string& key) const {
  const std::string t = trim(get_string(key));
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw ConfigError("parameter '" + key + "' must be a non-negative integer");
  }
  return v;
}

bool ParamSet::get_bool(const std::string& key) const {
  std::string t = trim(get_string(key));
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
  if (t == "1" || t == "true" || t == "yes" || t == "on") return true;
  if (t == "0" || t == "false" || t == "no" || t == "off") return false;
  throw ConfigError("parameter '" + key + "' must be a boolean");
}

std::vector<double> ParamSet::get_list(const std::string& key) const {
  try {
    return parse_number_list(get_string(key));
  } catch (const ConfigError& e) {
    throw ConfigError("parameter '" + key + "': " + e.what());
  }
}

std::vector<double> parse_number_list(const std::string& text) {
  std::string s = text;
  std::replace(s.begin(), s.end(), ',', ' ');
  std::istringstream in(s);
  std::vector<double> out;
  std::string tok;
  while (in >> tok) out.push_back(to_double("list", tok));
  return out;
}

IniSections parse_config_text(const std::string& text) {
  std::istringstream in(text);
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  return from_ptree(tree);
}

IniSections read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::pair<std::string, std::string> parse_assignment(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos) throw ConfigError("expected key=value, got '" + text + "'");
  std::string key = trim(text.substr(0, eq));
  if (key.empty()) throw ConfigError("empty key in '" + text + "'");
  return {key, trim(text.substr(eq + 1))};
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

}  // namespace spinmech
