#pragma once

#include <map>
#include <optional>
#include <string>

// Plain key = value configuration files: one pair per line, '#' starts a
// comment, blank lines ignored, later keys win. Values are taken verbatim
// after trimming. Recognized keys are listed in docs/schema.md; unknown keys
// are kept (callers may reject them).

namespace citeval {

class Config {
 public:
  Config() = default;
  static Config from_file(const std::string& path);
  static Config from_string(const std::string& text);  // for tests

  bool has(const std::string& key) const;
  std::optional<std::string> get(const std::string& key) const;
  std::string get_or(const std::string& key, std::string fallback) const;
  // Throw Error(Config) naming the key when the value does not parse.
  long get_int_or(const std::string& key, long fallback) const;
  double get_double_or(const std::string& key, double fallback) const;
  // true/false, yes/no, on/off, 1/0 (case-insensitive).
  bool get_bool_or(const std::string& key, bool fallback) const;

  const std::map<std::string, std::string>& entries() const {
    return entries_;
  }

 private:
  std::map<std::string, std::string> entries_;
};

}  // namespace citeval
