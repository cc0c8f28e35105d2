#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fracnoether/error.hpp"

// Scenario files: flat INI-style text.
//
//   # comment
//   [section]
//   key = value
//
// Keys are case-sensitive; a key may appear once per section. Values keep their
// source position so later validation errors can point at them.

namespace fracnoether {

/// Parse or validation failure tied to a location and, when known, a key.
class ConfigError : public InputError {
 public:
  ConfigError(const std::string& message, std::string key, int line, int column);

  const std::string& key() const { return key_; }
  int line() const { return line_; }      ///< 1-based; 0 when unknown
  int column() const { return column_; }  ///< 1-based; 0 when unknown

 private:
  std::string key_;
  int line_;
  int column_;
};

struct ConfigValue {
  std::string text;
  int line = 0;
  int column = 0;
};

class ConfigSection {
 public:
  ConfigSection() = default;
  ConfigSection(std::string name, int line) : name_(std::move(name)), line_(line) {}

  const std::string& name() const { return name_; }
  bool has(const std::string& key) const { return values_.count(key) != 0; }
  const std::map<std::string, ConfigValue>& values() const { return values_; }
  void set(const std::string& key, ConfigValue value) { values_[key] = std::move(value); }

  /// Throws ConfigError naming the key when it is missing.
  const ConfigValue& require(const std::string& key) const;

  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  std::size_t get_size(const std::string& key) const;
  std::size_t get_size(const std::string& key, std::size_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  /// Comma- or whitespace-separated numbers.
  std::vector<double> get_list(const std::string& key) const;
  std::vector<double> get_list(const std::string& key, std::vector<double> fallback) const;
  std::vector<std::size_t> get_size_list(const std::string& key) const;

  /// Error positioned at the value of key (or the section header when absent).
  [[noreturn]] void fail(const std::string& key, const std::string& message) const;

 private:
  std::string name_;
  int line_ = 0;
  std::map<std::string, ConfigValue> values_;
};

class Config {
 public:
  static Config parse(const std::string& text);
  static Config load(const std::filesystem::path& path);

  bool has(const std::string& section) const { return sections_.count(section) != 0; }
  /// Throws ConfigError naming the section when it is missing.
  const ConfigSection& section(const std::string& name) const;
  const std::map<std::string, ConfigSection>& sections() const { return sections_; }
  ConfigSection& mutable_section(const std::string& name);

 private:
  std::map<std::string, ConfigSection> sections_;
};

}  // namespace fracnoether
