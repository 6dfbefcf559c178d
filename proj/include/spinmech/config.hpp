#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace spinmech {

/// A declared, overridable scenario parameter.
struct ParamSpec {
  std::string key;
  std::string section;  ///< model | device | integrator | disorder | output
  std::string default_value;
  std::string help;
};

/// Resolved key -> value strings with typed accessors. Accessors throw ConfigError.
class ParamSet {
 public:
  ParamSet() = default;
  explicit ParamSet(std::map<std::string, std::string> values) : values_(std::move(values)) {}

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  const std::string& get_string(const std::string& key) const;
  double get_double(const std::string& key) const;
  int get_int(const std::string& key) const;
  std::uint64_t get_u64(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  /// Comma- or whitespace-separated list of numbers; empty string gives an empty list.
  std::vector<double> get_list(const std::string& key) const;

  void set(const std::string& key, std::string value) { values_[key] = std::move(value); }
  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

using IniSections = std::map<std::string, std::map<std::string, std::string>>;

/// Reads an INI-style file ([section] / key = value / ; comments).
IniSections read_config_file(const std::filesystem::path& path);
IniSections parse_config_text(const std::string& text);

/// Splits "key=value"; the key may be qualified as "section.key".
std::pair<std::string, std::string> parse_assignment(const std::string& text);

/// Parses a list such as "0, 0.5,1" into numbers. Throws ConfigError on junk.
std::vector<double> parse_number_list(const std::string& text);

/// Formats a double with 9 significant digits.
std::string format_number(double v);

}  // namespace spinmech
