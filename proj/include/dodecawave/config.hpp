#pragma once

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "errors.hpp"

namespace dodecawave {

// Plain key=value text, one pair per line, '#' starts a comment. Keys listed as repeatable may
// occur several times; any other key at most once.
class KeyValueConfig {
 public:
  KeyValueConfig(std::set<std::string> allowed, std::set<std::string> repeatable = {})
      : allowed_(std::move(allowed)), repeatable_(std::move(repeatable)) {
    allowed_.insert(repeatable_.begin(), repeatable_.end());
  }

  void parse(std::istream& is) {
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
      ++lineno;
      if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      line = trim(line);
      if (line.empty()) continue;
      auto eq = line.find('=');
      if (eq == std::string::npos) throw ParseError("expected key = value", lineno);
      set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)), lineno);
    }
  }

  void parse_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open " + path);
    parse(is);
  }

  // Also used for command-line overrides; a later value replaces an earlier single-valued one.
  void set(const std::string& key, const std::string& value, int lineno = 0) {
    if (key.empty()) throw ParseError("empty key", lineno);
    if (!allowed_.count(key)) throw UsageError("unknown key '" + key + "'");
    if (value.empty()) throw ParseError("key '" + key + "' has no value", lineno);
    auto& slot = values_[key];
    if (repeatable_.count(key)) {
      slot.push_back(value);
    } else {
      if (!slot.empty() && lineno > 0) throw ParseError("duplicate key '" + key + "'", lineno);
      slot = {value};
    }
  }

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  const std::string& get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw UsageError("missing key '" + key + "'");
    return it->second.front();
  }
  std::string get(const std::string& key, const std::string& fallback) const {
    return has(key) ? get(key) : fallback;
  }
  const std::vector<std::string>& all(const std::string& key) const {
    static const std::vector<std::string> none;
    auto it = values_.find(key);
    return it == values_.end() ? none : it->second;
  }

  double number(const std::string& key) const { return to_double(key, get(key)); }
  double number(const std::string& key, double fallback) const { return has(key) ? number(key) : fallback; }
  long integer(const std::string& key) const { return to_long(key, get(key)); }
  long integer(const std::string& key, long fallback) const { return has(key) ? integer(key) : fallback; }

  // Whitespace-separated numbers, e.g. "x y z R A".
  std::vector<double> numbers(const std::string& key, const std::string& text, std::size_t count) const {
    std::istringstream in(text);
    std::vector<double> out;
    std::string tok;
    while (in >> tok) out.push_back(to_double(key, tok));
    if (out.size() != count)
      throw UsageError("key '" + key + "' needs " + std::to_string(count) + " numbers, got '" + text + "'");
    return out;
  }

  static double to_double(const std::string& key, const std::string& text) {
    double v = 0;
    const char* end = text.data() + text.size();
    auto r = std::from_chars(text.data(), end, v);
    if (r.ec != std::errc() || r.ptr != end) throw UsageError("key '" + key + "': not a number: '" + text + "'");
    return v;
  }
  static long to_long(const std::string& key, const std::string& text) {
    long v = 0;
    const char* end = text.data() + text.size();
    auto r = std::from_chars(text.data(), end, v);
    if (r.ec != std::errc() || r.ptr != end) throw UsageError("key '" + key + "': not an integer: '" + text + "'");
    return v;
  }

 private:
  static std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  }

  std::set<std::string> allowed_, repeatable_;
  std::map<std::string, std::vector<std::string>> values_;
};

}  // namespace dodecawave
