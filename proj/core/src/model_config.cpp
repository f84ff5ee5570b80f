#include "thermolab/config.hpp"
#include "thermolab/lattice.hpp"

namespace thermolab {

ModelConfig model_config_from(const KeyValueConfig& config) {
  ModelConfig out;
  const std::string kind = config.get_string("model");
  try {
    out.spec.kind = parse_model_kind(kind);
  } catch (const UsageError&) {
    throw ConfigError("model", config.line_of("model"),
                      "unknown model '" + kind + "' (free_spins, ising_chain, curie_weiss, transverse_ising)");
  }
  out.spec.J = config.get_double("J", out.spec.kind == ModelKind::FreeSpins ? 0.0 : 1.0);
  out.spec.h = config.get_double("h", 0.0);
  out.spec.g = config.get_double("g", 0.0);

  const long n = config.get_int("N", 4);
  if (n < 1) throw ConfigError("N", config.line_of("N"), "site count must be at least 1");

  const std::string boundary = config.get_string("boundary", "periodic");
  Boundary b;
  if (boundary == "periodic")
    b = Boundary::Periodic;
  else if (boundary == "open")
    b = Boundary::Open;
  else
    throw ConfigError("boundary", config.line_of("boundary"), "expected periodic or open, got '" + boundary + "'");

  out.region = out.spec.default_region(static_cast<std::size_t>(n), b);
  return out;
}

}  // namespace thermolab
