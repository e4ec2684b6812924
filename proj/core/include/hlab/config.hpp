#pragma once

// Flat key-value experiment configuration.  Sections group keys; lookup is
// by "section.key".  Lines are `key = value`, `[section]`, blank, or
// comments starting with '#' or ';'.  Values are untyped until queried.

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace hlab::cfg {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class Config {
 public:
  static Config parse_file(const std::string& path);
  static Config parse_string(const std::string& text);

  [[nodiscard]] bool has(const std::string& key) const;

  // required lookups: ConfigError when missing or malformed
  [[nodiscard]] std::string get_string(const std::string& key) const;
  [[nodiscard]] double get_double(const std::string& key) const;
  [[nodiscard]] int get_int(const std::string& key) const;
  [[nodiscard]] bool get_bool(const std::string& key) const;
  // comma-separated numbers
  [[nodiscard]] std::vector<double> get_list(const std::string& key) const;

  // defaulted lookups
  [[nodiscard]] std::string get_string(const std::string& key,
                                       const std::string& fallback) const;
  [[nodiscard]] double get_double(const std::string& key,
                                  double fallback) const;
  [[nodiscard]] int get_int(const std::string& key, int fallback) const;
  [[nodiscard]] bool get_bool(const std::string& key, bool fallback) const;
  [[nodiscard]] std::vector<double> get_list(
      const std::string& key, const std::vector<double>& fallback) const;

  // overrides from the command line (key=value, same dotted form)
  void set(const std::string& key, const std::string& value);

  [[nodiscard]] const std::map<std::string, std::string>& entries() const {
    return kv_;
  }

 private:
  std::map<std::string, std::string> kv_;
};

}  // namespace hlab::cfg
