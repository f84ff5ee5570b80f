#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace thermolab {

enum class ErrorKind {
  Usage,        // caller violated a precondition
  Data,         // malformed or non-finite input data
  Domain,       // argument outside the sampled domain
  Resource,     // dimension cap exceeded
  Infeasible,   // constraint cannot be attained
  NumericRange, // spectral shift cannot prevent overflow
  Quadrature,   // step-halving disagreement
  Config,       // experiment configuration problem
};

inline const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Usage: return "usage";
    case ErrorKind::Data: return "data";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Resource: return "resource";
    case ErrorKind::Infeasible: return "infeasible";
    case ErrorKind::NumericRange: return "numeric-range";
    case ErrorKind::Quadrature: return "quadrature";
    case ErrorKind::Config: return "config";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

#define THERMOLAB_DEFINE_ERROR(Name, Kind)                                  \
  class Name : public Error {                                               \
   public:                                                                  \
    explicit Name(const std::string& what) : Error(ErrorKind::Kind, what) {} \
  };

THERMOLAB_DEFINE_ERROR(UsageError, Usage)
THERMOLAB_DEFINE_ERROR(DataError, Data)
THERMOLAB_DEFINE_ERROR(DomainError, Domain)
THERMOLAB_DEFINE_ERROR(ResourceError, Resource)
THERMOLAB_DEFINE_ERROR(NumericRangeError, NumericRange)
THERMOLAB_DEFINE_ERROR(QuadratureError, Quadrature)

#undef THERMOLAB_DEFINE_ERROR

/// Raised when no ergodic-family member attains a constraint. Carries the
/// reachable range of every constrained component for the error report.
class InfeasibleError : public Error {
 public:
  struct Range {
    std::size_t component;
    double lo;
    double hi;
  };

  InfeasibleError(const std::string& what, std::vector<Range> reachable)
      : Error(ErrorKind::Infeasible, what), reachable_(std::move(reachable)) {}
  const std::vector<Range>& reachable() const noexcept { return reachable_; }

 private:
  std::vector<Range> reachable_;
};

/// Config errors name the offending key and, when known, the 1-based line.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& key, int line, const std::string& what)
      : Error(ErrorKind::Config, format(key, line, what)), key_(key), line_(line) {}
  const std::string& key() const noexcept { return key_; }
  int line() const noexcept { return line_; }

 private:
  static std::string format(const std::string& key, int line, const std::string& what) {
    std::string s = "config";
    if (line > 0) s += " line " + std::to_string(line);
    if (!key.empty()) s += " key '" + key + "'";
    return s + ": " + what;
  }
  std::string key_;
  int line_;
};

}  // namespace thermolab
