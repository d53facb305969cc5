#pragma once

// Flat key/value engine configuration. Every key has a default; unknown keys
// and malformed values are rejected with ConfigError.

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace xapagy {

using ConfigValue = std::variant<double, std::string>;

struct ConfigKey {
  std::string name;
  ConfigValue default_value;
  std::string help;
};

class Config {
 public:
  Config();

  /// All known keys in declaration order.
  static const std::vector<ConfigKey>& keys();

  /// Parse `value` according to the key's type.
  void set(std::string_view key, std::string_view value);
  void set(std::string_view key, double value);
  /// `key=value`
  void set_assignment(std::string_view assignment);
  /// `key = value` lines, `#` comments.
  void load(const std::filesystem::path& path);
  void parse(std::string_view text);

  double number(std::string_view key) const;
  const std::string& text(std::string_view key) const;
  bool is_explicit(std::string_view key) const { return explicit_.count(std::string(key)) != 0; }

  const std::map<std::string, ConfigValue, std::less<>>& values() const { return values_; }

 private:
  std::map<std::string, ConfigValue, std::less<>> values_;
  std::set<std::string> explicit_;
};

}  // namespace xapagy
