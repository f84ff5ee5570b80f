#pragma once

// Config-driven experiment runs behind the command-line tool. Each run writes
// CSV/JSON artifacts plus manifest.json into the output directory.

#include "thermolab/config.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace thermolab {

/// pressure, entropy-curve, legendre, completeness, kms-verify, diff-test
const std::vector<std::string>& subcommands();

struct ExperimentConfig {
  std::string subcommand;
  KeyValueConfig values;
  std::filesystem::path out_dir = ".";
  std::uint64_t seed = 0;
  std::size_t threads = 1;

  /// Reads `seed` and `threads` keys from the config when present; the
  /// caller may override them afterwards.
  static ExperimentConfig make(std::string subcommand, KeyValueConfig values);
};

struct Artifact {
  std::string path;  // relative to the output directory
  std::string kind;  // csv or json
  std::size_t rows = 0;
};

struct Manifest {
  std::string subcommand;
  std::vector<KeyValueConfig::Entry> config;
  std::uint64_t seed = 0;
  std::string version;
  std::vector<Artifact> artifacts;
  double wall_ms = 0.0;
  /// Subcommand-specific results as a JSON object.
  std::string summary_json = "{}";
  /// Verification subcommands set this when a residual exceeds its tolerance.
  bool checks_passed = true;

  std::string to_json() const;
};

const char* library_version() noexcept;

/// Runs one experiment and writes manifest.json. Config errors name the key
/// and line; module errors propagate.
Manifest run(const ExperimentConfig& config);

}  // namespace thermolab
