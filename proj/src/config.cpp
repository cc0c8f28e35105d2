#include "fracnoether/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace fracnoether {

namespace {

std::string locate(const std::string& message, int line, int column) {
  if (line <= 0) return message;
  std::ostringstream out;
  out << "line " << line << ", column " << column << ": " << message;
  return out.str();
}

bool is_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
}

std::size_t skip_space(const std::string& s, std::size_t i) {
  while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
  return i;
}

std::size_t trim_end(const std::string& s, std::size_t begin, std::size_t end) {
  while (end > begin && (s[end - 1] == ' ' || s[end - 1] == '\t')) --end;
  return end;
}

// Position of an inline comment: '#' or ';' at the start or after whitespace.
std::size_t comment_start(const std::string& s, std::size_t from) {
  for (std::size_t i = from; i < s.size(); ++i) {
    if ((s[i] == '#' || s[i] == ';') && (i == from || s[i - 1] == ' ' || s[i - 1] == '\t')) return i;
  }
  return s.size();
}

bool parse_number(const std::string& text, double& out) {
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

// Splits on commas and whitespace, remembering each token's offset.
std::vector<std::pair<std::string, std::size_t>> tokens(const std::string& text) {
  std::vector<std::pair<std::string, std::size_t>> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && (text[i] == ',' || text[i] == ' ' || text[i] == '\t')) ++i;
    const std::size_t start = i;
    while (i < text.size() && text[i] != ',' && text[i] != ' ' && text[i] != '\t') ++i;
    if (i > start) out.emplace_back(text.substr(start, i - start), start);
  }
  return out;
}

}  // namespace

ConfigError::ConfigError(const std::string& message, std::string key, int line, int column)
    : InputError(locate(message, line, column)), key_(std::move(key)), line_(line), column_(column) {}

const ConfigValue& ConfigSection::require(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) {
    throw ConfigError("missing required key '" + key + "' in section [" + name_ + "]", key, line_, 1);
  }
  return it->second;
}

void ConfigSection::fail(const std::string& key, const std::string& message) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError(message, key, line_, 1);
  throw ConfigError(message, key, it->second.line, it->second.column);
}

std::string ConfigSection::get_string(const std::string& key) const { return require(key).text; }

std::string ConfigSection::get_string(const std::string& key, const std::string& fallback) const {
  return has(key) ? get_string(key) : fallback;
}

double ConfigSection::get_double(const std::string& key) const {
  const ConfigValue& v = require(key);
  double x = 0.0;
  if (!parse_number(v.text, x) || !std::isfinite(x)) {
    fail(key, "key '" + key + "' expects a finite number, got '" + v.text + "'");
  }
  return x;
}

double ConfigSection::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

std::size_t ConfigSection::get_size(const std::string& key) const {
  const ConfigValue& v = require(key);
  std::size_t x = 0;
  auto [ptr, ec] = std::from_chars(v.text.data(), v.text.data() + v.text.size(), x);
  if (ec != std::errc() || ptr != v.text.data() + v.text.size()) {
    fail(key, "key '" + key + "' expects a non-negative integer, got '" + v.text + "'");
  }
  return x;
}

std::size_t ConfigSection::get_size(const std::string& key, std::size_t fallback) const {
  return has(key) ? get_size(key) : fallback;
}

bool ConfigSection::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string& t = require(key).text;
  if (t == "true" || t == "yes" || t == "1") return true;
  if (t == "false" || t == "no" || t == "0") return false;
  fail(key, "key '" + key + "' expects true or false, got '" + t + "'");
}

std::vector<double> ConfigSection::get_list(const std::string& key) const {
  const ConfigValue& v = require(key);
  std::vector<double> out;
  for (const auto& [tok, offset] : tokens(v.text)) {
    double x = 0.0;
    if (!parse_number(tok, x) || !std::isfinite(x)) {
      throw ConfigError("key '" + key + "' expects a list of numbers, got '" + tok + "'", key,
                        v.line, v.column + static_cast<int>(offset));
    }
    out.push_back(x);
  }
  if (out.empty()) fail(key, "key '" + key + "' expects at least one number");
  return out;
}

std::vector<double> ConfigSection::get_list(const std::string& key,
                                            std::vector<double> fallback) const {
  return has(key) ? get_list(key) : fallback;
}

std::vector<std::size_t> ConfigSection::get_size_list(const std::string& key) const {
  const ConfigValue& v = require(key);
  std::vector<std::size_t> out;
  for (const auto& [tok, offset] : tokens(v.text)) {
    std::size_t x = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), x);
    if (ec != std::errc() || ptr != tok.data() + tok.size()) {
      throw ConfigError("key '" + key + "' expects a list of integers, got '" + tok + "'", key,
                        v.line, v.column + static_cast<int>(offset));
    }
    out.push_back(x);
  }
  if (out.empty()) fail(key, "key '" + key + "' expects at least one integer");
  return out;
}

Config Config::parse(const std::string& text) {
  Config cfg;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  ConfigSection* current = nullptr;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::size_t start = skip_space(line, 0);
    if (start == line.size() || line[start] == '#' || line[start] == ';') continue;
    const int col = static_cast<int>(start) + 1;

    if (line[start] == '[') {
      const std::size_t close = line.find(']', start);
      if (close == std::string::npos) {
        throw ConfigError("unterminated section header", "", line_no, static_cast<int>(line.size()) + 1);
      }
      const std::size_t name_begin = skip_space(line, start + 1);
      const std::size_t name_end = trim_end(line, name_begin, close);
      const std::string name = line.substr(name_begin, name_end - name_begin);
      if (name.empty()) throw ConfigError("empty section name", "", line_no, col);
      for (std::size_t i = name_begin; i < name_end; ++i) {
        if (!is_name_char(line[i])) {
          throw ConfigError("invalid character in section name", "", line_no, static_cast<int>(i) + 1);
        }
      }
      const std::size_t rest = skip_space(line, close + 1);
      if (rest < line.size() && line[rest] != '#' && line[rest] != ';') {
        throw ConfigError("unexpected text after section header", "", line_no, static_cast<int>(rest) + 1);
      }
      if (cfg.sections_.count(name)) {
        throw ConfigError("duplicate section [" + name + "]", "", line_no, col);
      }
      current = &cfg.sections_.emplace(name, ConfigSection(name, line_no)).first->second;
      continue;
    }

    const std::size_t eq = line.find('=', start);
    if (eq == std::string::npos) throw ConfigError("expected 'key = value'", "", line_no, col);
    const std::size_t key_end = trim_end(line, start, eq);
    const std::string key = line.substr(start, key_end - start);
    if (key.empty()) throw ConfigError("missing key before '='", "", line_no, col);
    for (std::size_t i = start; i < key_end; ++i) {
      if (!is_name_char(line[i])) {
        throw ConfigError("invalid character in key", key, line_no, static_cast<int>(i) + 1);
      }
    }
    if (current == nullptr) throw ConfigError("key '" + key + "' outside of any section", key, line_no, col);
    const std::size_t value_begin = skip_space(line, eq + 1);
    const std::size_t value_end = trim_end(line, value_begin, comment_start(line, value_begin));
    if (value_end <= value_begin) {
      throw ConfigError("empty value for key '" + key + "'", key, line_no, static_cast<int>(eq) + 2);
    }
    if (current->has(key)) {
      throw ConfigError("duplicate key '" + key + "' in section [" + current->name() + "]", key,
                        line_no, col);
    }
    current->set(key, ConfigValue{line.substr(value_begin, value_end - value_begin), line_no,
                                  static_cast<int>(value_begin) + 1});
  }
  return cfg;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read scenario file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

const ConfigSection& Config::section(const std::string& name) const {
  auto it = sections_.find(name);
  if (it == sections_.end()) throw ConfigError("missing required section [" + name + "]", name, 0, 0);
  return it->second;
}

ConfigSection& Config::mutable_section(const std::string& name) {
  auto it = sections_.find(name);
  if (it == sections_.end()) it = sections_.emplace(name, ConfigSection(name, 0)).first;
  return it->second;
}

}  // namespace fracnoether
