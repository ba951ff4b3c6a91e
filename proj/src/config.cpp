#include "citeval/config.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "citeval/error.hpp"
#include "citeval/text.hpp"

namespace citeval {
namespace {

std::string trim(const std::string& s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::map<std::string, std::string> parse(std::istream& in,
                                         const std::string& origin) {
  std::map<std::string, std::string> entries;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::string stripped = trim(line);
    if (stripped.empty()) continue;
    size_t eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorKind::Config, origin + " line " +
                                         std::to_string(line_no) +
                                         ": expected key = value");
    }
    std::string key = trim(stripped.substr(0, eq));
    std::string value = trim(stripped.substr(eq + 1));
    if (key.empty()) {
      throw Error(ErrorKind::Config, origin + " line " +
                                         std::to_string(line_no) +
                                         ": empty key");
    }
    entries[key] = value;  // later lines win
  }
  return entries;
}

}  // namespace

Config Config::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open config: " + path);
  Config config;
  config.entries_ = parse(in, path);
  return config;
}

Config Config::from_string(const std::string& text) {
  std::istringstream in(text);
  Config config;
  config.entries_ = parse(in, "<string>");
  return config;
}

bool Config::has(const std::string& key) const {
  return entries_.count(key) != 0;
}

std::optional<std::string> Config::get(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

std::string Config::get_or(const std::string& key,
                           std::string fallback) const {
  auto v = get(key);
  return v ? *v : std::move(fallback);
}

long Config::get_int_or(const std::string& key, long fallback) const {
  auto v = get(key);
  if (!v) return fallback;
  try {
    size_t used = 0;
    long parsed = std::stol(*v, &used);
    if (used != v->size()) throw std::invalid_argument("trailing characters");
    return parsed;
  } catch (const std::exception&) {
    throw Error(ErrorKind::Config,
                "key '" + key + "': '" + *v + "' is not an integer");
  }
}

double Config::get_double_or(const std::string& key, double fallback) const {
  auto v = get(key);
  if (!v) return fallback;
  try {
    size_t used = 0;
    double parsed = std::stod(*v, &used);
    if (used != v->size()) throw std::invalid_argument("trailing characters");
    return parsed;
  } catch (const std::exception&) {
    throw Error(ErrorKind::Config,
                "key '" + key + "': '" + *v + "' is not a number");
  }
}

bool Config::get_bool_or(const std::string& key, bool fallback) const {
  auto v = get(key);
  if (!v) return fallback;
  std::string low = to_lower_ascii(*v);
  if (low == "true" || low == "yes" || low == "on" || low == "1") return true;
  if (low == "false" || low == "no" || low == "off" || low == "0") {
    return false;
  }
  throw Error(ErrorKind::Config,
              "key '" + key + "': '" + *v + "' is not a boolean");
}

}  // namespace citeval
