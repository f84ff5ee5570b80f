#pragma once

// Plain-text key=value configuration: one entry per line, `#` starts a
// comment. Numeric lists are comma separated ("0.5,1,2") or inclusive
// ranges "start:stop:step".

#include "thermolab/errors.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace thermolab {

class KeyValueConfig {
 public:
  struct Entry {
    std::string key;
    std::string value;
    int line = 0;  // 0 for programmatic overrides
  };

  static KeyValueConfig parse(std::istream& in);
  static KeyValueConfig parse_string(const std::string& text);
  static KeyValueConfig from_file(const std::filesystem::path& path);

  bool has(const std::string& key) const { return index_.count(key) != 0; }
  int line_of(const std::string& key) const;

  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  long get_int(const std::string& key) const;
  long get_int(const std::string& key, long fallback) const;
  std::vector<double> get_doubles(const std::string& key) const;
  std::vector<double> get_doubles(const std::string& key, std::vector<double> fallback) const;
  std::vector<long> get_ints(const std::string& key) const;
  std::vector<long> get_ints(const std::string& key, std::vector<long> fallback) const;

  /// Adds or replaces an entry (command-line overrides).
  void set(const std::string& key, const std::string& value);

  /// Rejects keys outside `allowed`, naming the first offender.
  void require_known(const std::set<std::string>& allowed) const;

  /// Entries in file order.
  const std::vector<Entry>& entries() const noexcept { return entries_; }

 private:
  const Entry& entry(const std::string& key) const;
  std::vector<Entry> entries_;
  std::map<std::string, std::size_t> index_;
};

}  // namespace thermolab
