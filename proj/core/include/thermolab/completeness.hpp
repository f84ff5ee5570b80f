#pragma once

// Constrained entropy maximization over product states and the
// completeness verdict built on maximizer multiplicity.

#include "thermolab/convex.hpp"
#include "thermolab/lattice.hpp"
#include "thermolab/thermo_types.hpp"

#include <array>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace thermolab {

/// Translation-invariant product states ⊗ diag((1+m)/2, (1−m)/2), m ∈ [−1, 1],
/// with per-site densities e(m), m and entropy η(m).
class ErgodicFamily {
 public:
  /// UsageError for models whose energy density is not a function of m alone.
  static ErgodicFamily product_states(const ModelSpec& spec);

  const ModelSpec& spec() const noexcept { return spec_; }
  static constexpr const char* kind() noexcept { return "product_states"; }
  /// Number of density components: (e) for free spins, (e, m) otherwise.
  std::size_t component_count() const noexcept { return components_; }

  /// e(m) = c0 + c1 m + c2 m².
  double energy(double m) const noexcept { return c_[0] + c_[1] * m + c_[2] * m * m; }
  const std::array<double, 3>& energy_coefficients() const noexcept { return c_; }
  /// Component k of the density vector at parameter m.
  double density(std::size_t k, double m) const;
  /// Binary entropy of (1+m)/2, in nats; 0 at m = ±1.
  static double entropy(double m);
  /// [min, max] of component k over m ∈ [−1, 1].
  std::pair<double, double> reachable(std::size_t k) const;

 private:
  ErgodicFamily(ModelSpec spec, std::array<double, 3> c, std::size_t components)
      : spec_(spec), c_(c), components_(components) {}
  ModelSpec spec_;
  std::array<double, 3> c_;
  std::size_t components_;
};

inline constexpr std::size_t kInfiniteMultiplicity = std::numeric_limits<std::size_t>::max();

struct MaximizerSet {
  PartialThermoPoint constraint;
  /// s(q), the maximal entropy density.
  double entropy = 0.0;
  std::vector<double> maximizers;
  /// Distinct maximizers after merging; kInfiniteMultiplicity for flat optima.
  std::size_t multiplicity = 0;
  /// Endpoints of flat optima, when multiplicity is infinite.
  std::vector<std::pair<double, double>> flat_intervals;

  bool unique() const noexcept { return multiplicity == 1; }
};

struct MaximizeOptions {
  /// Constraint and optimality tolerance.
  double tol = 1e-9;
  double scan_step = 1e-5;
  double refine_tol = 1e-10;
  double merge_radius = 1e-6;
};

/// sup η(m) subject to the specified density components. InfeasibleError,
/// listing the reachable range of each specified component, when no m fits.
MaximizerSet constrained_entropy_max(const ErgodicFamily& family, const PartialThermoPoint& constraint,
                                     const MaximizeOptions& options = {});

struct CompletenessVerdict {
  std::vector<MaximizerSet> records;
  bool complete = true;
  /// Index of the record with the largest multiplicity.
  std::size_t witness = 0;
};

CompletenessVerdict completeness_verdict(const ErgodicFamily& family, const std::vector<PartialThermoPoint>& constraints,
                                         const MaximizeOptions& options = {}, std::size_t threads = 1);

/// Pretty JSON: {"family", "model", "complete", "witness", "records": [{constraint, s, maximizers, multiplicity,
/// verdict}]}. Infinite multiplicity serializes as the string "inf".
std::string to_json(const CompletenessVerdict& verdict, const ErgodicFamily& family);

struct SkippedPoint {
  std::size_t index = 0;
  ThermoPoint point;
  std::string reason;
};

struct EntropyCurve {
  CurveSamples samples;
  std::vector<SkippedPoint> skipped;
};

/// s(q) at each fully specified grid point; infeasible points are skipped
/// and recorded. One-component grids come back as a sorted axis,
/// two-component grids as scattered samples.
EntropyCurve entropy_curve(const ErgodicFamily& family, const std::vector<ThermoPoint>& grid,
                           const MaximizeOptions& options = {}, std::size_t threads = 1);

/// The feasible (e, m) locus sampled at the given polarizations, with
/// s(e(m), m) = η(m). Scattered for two-component families.
CurveSamples joint_entropy_curve(const ErgodicFamily& family, const std::vector<double>& m_grid);

/// Supporting slopes of s along the polarization at an interior m, from a
/// two-node stencil per side of the joint curve. The stencil spacing is
/// min(spacing, (1 − |m|)/32), so the one-sided derivatives stay second order
/// where η′ blows up at the edges. Two-component families only.
SlopeInterval entropy_slopes(const ErgodicFamily& family, double m, double spacing);

}  // namespace thermolab
