#pragma once

#include "thermolab/errors.hpp"

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace thermolab {

/// Control variables θ = (θ_0, …, θ_n), dual to the densities q.
///
/// θ_0 is the inverse temperature 1/T and θ_j = y_j / T for j ≥ 1, where
/// y_j couples the j-th conserved observable to an external source, so that
/// θ·Q̂ = θ_0 (H + Σ_j y_j Q̂_j) is θ_0 times the effective energy. The set of
/// θ with finite reduced pressure is the control space; at finite volume every
/// finite θ is admissible.
class ControlVector {
 public:
  ControlVector() = default;
  ControlVector(std::initializer_list<double> components) : ControlVector(std::vector<double>(components)) {}
  explicit ControlVector(std::vector<double> components) : components_(std::move(components)) {
    for (double c : components_)
      if (!std::isfinite(c)) throw DataError("control vector components must be finite");
  }

  static ControlVector zero(std::size_t size) { return ControlVector(std::vector<double>(size, 0.0)); }

  std::size_t size() const noexcept { return components_.size(); }
  double operator[](std::size_t k) const { return components_.at(k); }
  std::span<const double> components() const noexcept { return components_; }

  double inverse_temperature() const { return components_.at(0); }
  bool is_zero() const noexcept {
    for (double c : components_)
      if (c != 0.0) return false;
    return true;
  }

  friend bool operator==(const ControlVector&, const ControlVector&) = default;

 private:
  std::vector<double> components_;
};

/// Densities q = (q_0, …, q_n) of the extensive observables; q_0 is energy per site.
struct ThermoPoint {
  std::vector<double> components;

  std::size_t size() const noexcept { return components.size(); }
  double operator[](std::size_t k) const { return components.at(k); }
};

/// A thermodynamic point with only some components fixed, as used for
/// constrained entropy maximization (energy-only vs energy + magnetization).
struct PartialThermoPoint {
  std::vector<std::optional<double>> components;

  static PartialThermoPoint energy(double e) { return {{e}}; }
  static PartialThermoPoint energy_magnetization(double e, double m) { return {{e, m}}; }

  std::size_t specified_count() const noexcept {
    std::size_t n = 0;
    for (const auto& c : components) n += c.has_value();
    return n;
  }
  std::vector<std::size_t> specified_indices() const {
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < components.size(); ++k)
      if (components[k]) out.push_back(k);
    return out;
  }
  std::string to_string() const;
};

}  // namespace thermolab
