#include "thermolab/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace thermolab {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string::npos ? std::string::npos : pos - start)));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(std::istream& in) {
  KeyValueConfig cfg;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string text = raw;
    if (const auto hash = text.find('#'); hash != std::string::npos) text.erase(hash);
    text = trim(text);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ConfigError("", line, "expected key=value, got '" + text + "'");
    const std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    if (key.empty()) throw ConfigError("", line, "empty key");
    if (cfg.index_.count(key)) throw ConfigError(key, line, "duplicate key (first set on line " +
                                                               std::to_string(cfg.line_of(key)) + ")");
    cfg.index_[key] = cfg.entries_.size();
    cfg.entries_.push_back({key, value, line});
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::parse_string(const std::string& text) {
  std::istringstream in(text);
  return parse(in);
}

KeyValueConfig KeyValueConfig::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", 0, "cannot open config file '" + path.string() + "'");
  return parse(in);
}

int KeyValueConfig::line_of(const std::string& key) const {
  const auto it = index_.find(key);
  return it == index_.end() ? 0 : entries_[it->second].line;
}

const KeyValueConfig::Entry& KeyValueConfig::entry(const std::string& key) const {
  const auto it = index_.find(key);
  if (it == index_.end()) throw ConfigError(key, 0, "required key is missing");
  return entries_[it->second];
}

std::string KeyValueConfig::get_string(const std::string& key) const { return entry(key).value; }

std::string KeyValueConfig::get_string(const std::string& key, const std::string& fallback) const {
  return has(key) ? get_string(key) : fallback;
}

double KeyValueConfig::get_double(const std::string& key) const {
  const Entry& e = entry(key);
  try {
    std::size_t used = 0;
    const double v = std::stod(e.value, &used);
    if (used == e.value.size() && std::isfinite(v)) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError(key, e.line, "expected a finite number, got '" + e.value + "'");
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

long KeyValueConfig::get_int(const std::string& key) const {
  const Entry& e = entry(key);
  try {
    std::size_t used = 0;
    const long v = std::stol(e.value, &used);
    if (used == e.value.size()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError(key, e.line, "expected an integer, got '" + e.value + "'");
}

long KeyValueConfig::get_int(const std::string& key, long fallback) const {
  return has(key) ? get_int(key) : fallback;
}

std::vector<double> KeyValueConfig::get_doubles(const std::string& key) const {
  const Entry& e = entry(key);
  auto number = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used == s.size() && std::isfinite(v)) return v;
    } catch (const std::exception&) {
    }
    throw ConfigError(key, e.line, "cannot parse number '" + s + "'");
  };
  std::vector<double> out;
  if (e.value.find(':') != std::string::npos) {
    const auto parts = split(e.value, ':');
    if (parts.size() != 3) throw ConfigError(key, e.line, "range must be start:stop:step");
    const double start = number(parts[0]), stop = number(parts[1]), step = number(parts[2]);
    if (!(step > 0.0) || stop < start) throw ConfigError(key, e.line, "range needs step > 0 and stop >= start");
    const auto count = static_cast<long>(std::floor((stop - start) / step + 1e-9)) + 1;
    if (count > 10'000'000) throw ConfigError(key, e.line, "range has too many points");
    for (long i = 0; i < count; ++i) out.push_back(start + static_cast<double>(i) * step);
  } else {
    for (const auto& s : split(e.value, ',')) out.push_back(number(s));
  }
  if (out.empty()) throw ConfigError(key, e.line, "empty list");
  return out;
}

std::vector<double> KeyValueConfig::get_doubles(const std::string& key, std::vector<double> fallback) const {
  return has(key) ? get_doubles(key) : fallback;
}

std::vector<long> KeyValueConfig::get_ints(const std::string& key) const {
  const Entry& e = entry(key);
  std::vector<long> out;
  if (e.value.find(':') != std::string::npos) {
    for (double v : get_doubles(key)) {
      if (v != std::floor(v)) throw ConfigError(key, e.line, "integer range expected");
      out.push_back(static_cast<long>(v));
    }
    return out;
  }
  for (const auto& s : split(e.value, ',')) {
    try {
      std::size_t used = 0;
      const long v = std::stol(s, &used);
      if (used == s.size()) {
        out.push_back(v);
        continue;
      }
    } catch (const std::exception&) {
    }
    throw ConfigError(key, e.line, "cannot parse integer '" + s + "'");
  }
  return out;
}

std::vector<long> KeyValueConfig::get_ints(const std::string& key, std::vector<long> fallback) const {
  return has(key) ? get_ints(key) : fallback;
}

void KeyValueConfig::set(const std::string& key, const std::string& value) {
  if (const auto it = index_.find(key); it != index_.end()) {
    entries_[it->second].value = value;
    return;
  }
  index_[key] = entries_.size();
  entries_.push_back({key, value, 0});
}

void KeyValueConfig::require_known(const std::set<std::string>& allowed) const {
  for (const auto& e : entries_)
    if (!allowed.count(e.key)) throw ConfigError(e.key, e.line, "unknown key");
}

}  // namespace thermolab
