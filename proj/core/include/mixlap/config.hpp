#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace mixlap {

// Values a configuration key can hold. Integers are stored as doubles and
// checked for integrality when read as integers.
using ConfigValue = std::variant<bool, double, std::string, std::vector<double>>;

enum class ConfigType { kBool, kNumber, kInteger, kString, kNumberArray };

const char* to_string(ConfigType t);

// Flat key = value configuration in TOML syntax: bare keys, strings,
// numbers, booleans and single-line arrays of numbers; '#' comments.
// Tables are rejected since every key lives at the top level.
class ExperimentConfig {
 public:
  struct Entry {
    ConfigValue value;
    int line = 0;  // 0 for values set outside a file
  };

  static ExperimentConfig parse(const std::string& text);
  static ExperimentConfig load(const std::filesystem::path& path);

  // Override from the command line. The text is read as a TOML value; if it
  // is not one it is taken as a bare string.
  void set(const std::string& key, const std::string& text);
  void set(const std::string& key, ConfigValue value);
  // without this a literal would also convert to bool
  void set(const std::string& key, const char* text) { set(key, std::string(text)); }

  bool has(const std::string& key) const { return entries_.count(key) != 0; }
  const std::map<std::string, Entry>& entries() const noexcept { return entries_; }

  // Checks keys and types against the schema of the configured kind and
  // fills in defaults. Throws ConfigError naming the key and line.
  ExperimentConfig resolved() const;

  // Typed access (after resolved()).
  std::string kind() const;
  double number(const std::string& key) const;
  long long integer(const std::string& key) const;
  bool boolean(const std::string& key) const;
  const std::string& string(const std::string& key) const;
  const std::vector<double>& numbers(const std::string& key) const;
  std::optional<double> optional_number(const std::string& key) const;

  int line_of(const std::string& key) const;

 private:
  const Entry& entry(const std::string& key) const;
  std::map<std::string, Entry> entries_;
};

// Known experiment kinds.
const std::vector<std::string>& experiment_kinds();

// Keys accepted for a kind, with their types (for help and diagnostics).
std::vector<std::pair<std::string, ConfigType>> config_keys(const std::string& kind);

}  // namespace mixlap
