#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rapido/types.hpp"

namespace rapido {

struct ConfigKey {
  std::string_view name;
  std::string_view default_value;
  std::string_view description;
};

/// Every key the tools understand, with defaults. Unknown keys are rejected
/// so a typo cannot silently fall back to a default.
std::span<const ConfigKey> config_keys();

/// Flat `key = value` settings. Lines starting with '#' are comments;
/// list values are comma separated.
class Config {
 public:
  Config() = default;

  /// Throws BadConfig on syntax errors or unknown keys.
  static Config parse(std::istream& in);
  /// Throws IoFailure when the file cannot be read.
  static Config load(const std::string& path);

  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const { return values_.count(key) > 0; }

  /// Value or the registered default. Throws BadConfig for unknown keys and
  /// malformed values.
  std::string get_string(const std::string& key) const;
  std::int64_t get_int(const std::string& key) const;
  double get_double(const std::string& key) const;
  Ratio get_ratio(const std::string& key) const;
  std::vector<std::int64_t> get_int_list(const std::string& key) const;

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace rapido
