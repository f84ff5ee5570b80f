#pragma once

// Generalised canonical states, von Neumann and relative entropies,
// finite-volume reduced pressure, its thermodynamic-limit extrapolation and
// the Gibbs variational gap.
//
// Every matrix function goes through a hermitian eigendecomposition; θ·Q̂ is
// shifted by its extreme eigenvalue before exponentiation.

#include "thermolab/lattice.hpp"
#include "thermolab/spectral.hpp"
#include "thermolab/thermo_types.hpp"

#include <memory>
#include <optional>
#include <random>
#include <vector>

namespace thermolab {

/// Eigenvalues below this floor contribute nothing to −Σ p ln p.
inline constexpr double kEntropyFloor = 1e-15;
/// Eigenvalues of σ below this threshold define its kernel in S(ρ|σ).
inline constexpr double kSupportThreshold = 1e-12;

/// Positive, unit-trace hermitian matrix with a cached spectrum.
///
/// Eigenvalues are computed (and the invariants checked) on construction;
/// eigenvectors are computed on first use and shared between copies.
class DensityState {
 public:
  /// Validates hermiticity, unit trace and positivity to 1e−12.
  static DensityState from_matrix(ComplexMatrix rho);
  static DensityState maximally_mixed(Eigen::Index dim);
  static DensityState pure(const Eigen::VectorXcd& psi);
  static DensityState diagonal(const RealVector& probabilities);
  /// exp(−K) / Tr exp(−K) for a hermitian K given by its spectrum. The state
  /// keeps the exact log-weights, so ln ρ is available for full-rank Gibbs
  /// states whose smallest weights underflow the support threshold.
  static DensityState gibbs(const HermitianSpectrum& generator);

  Eigen::Index dimension() const noexcept { return matrix_.rows(); }
  const ComplexMatrix& matrix() const noexcept { return matrix_; }
  /// Eigenvalues, in the order of spectrum().values.
  const RealVector& eigenvalues() const noexcept { return eigenvalues_; }
  /// Full decomposition (computed lazily).
  const HermitianSpectrum& spectrum() const;
  /// ln of the eigenvalues of spectrum(), when known exactly.
  const std::optional<RealVector>& log_eigenvalues() const noexcept { return log_eigenvalues_; }

  struct Cache;

 private:
  DensityState() = default;
  ComplexMatrix matrix_;
  RealVector eigenvalues_;
  std::optional<RealVector> log_eigenvalues_;
  std::shared_ptr<Cache> cache_;
};

/// ψ_θ = exp(−θ·Q̂) / Tr exp(−θ·Q̂).
DensityState canonical_state(const ObservableFamily& family, const ControlVector& theta);

/// S(ρ) = −Tr ρ ln ρ, with 0 ln 0 = 0 below kEntropyFloor.
double von_neumann_entropy(const DensityState& rho);

struct RelativeEntropy {
  double value = 0.0;
  /// Set when ρ has weight on the kernel of σ; value is then +∞.
  bool divergent = false;
};

/// S(ρ|σ) = Tr(ρ ln ρ − ρ ln σ).
RelativeEntropy relative_entropy(const DensityState& rho, const DensityState& sigma);

/// Tr(ρ Q̂_k) for every observable of the family.
std::vector<double> expectations(const ObservableFamily& family, const DensityState& rho);

/// φ_N(θ) = N⁻¹ ln Tr exp(−θ·Q̂).
double finite_pressure(const ObservableFamily& family, const ControlVector& theta);

enum class ExtrapolationMode {
  /// Least-squares φ_N = a + b / N; suits open boundaries (surface terms).
  Affine,
  /// Prony fit of Z_N as a sum of exponentials λ_j^N; suits periodic
  /// transfer-matrix convergence. Sizes must form an arithmetic progression.
  Exponential,
};

const char* to_string(ExtrapolationMode m) noexcept;
ExtrapolationMode parse_extrapolation_mode(const std::string& s);

struct PressureEstimate {
  double value = 0.0;
  std::vector<std::pair<std::size_t, double>> per_size;
  /// Affine: max(max |fit residual|, |φ_{N_max} − value|).
  /// Exponential: max |reconstructed φ_N − φ_N|.
  double extrapolation_error = 0.0;
  ExtrapolationMode mode = ExtrapolationMode::Affine;
};

struct PressureLimitOptions {
  ExtrapolationMode mode = ExtrapolationMode::Affine;
  Boundary boundary = Boundary::Periodic;
  /// Number of exponentials in the Prony model; 0 selects two.
  std::size_t prony_order = 0;
  std::size_t threads = 1;
  BuildOptions build{};
};

/// Extrapolates φ_N(θ) to N → ∞ over `sizes` (strictly increasing, ≥ 3).
PressureEstimate pressure_limit(const ModelSpec& spec, const ControlVector& theta, const std::vector<std::size_t>& sizes,
                                const PressureLimitOptions& options = {});

/// Fits already computed (N, φ_N) pairs; used by pressure_limit.
PressureEstimate extrapolate_pressure(std::vector<std::pair<std::size_t, double>> per_size, ExtrapolationMode mode,
                                      std::size_t prony_order = 1);

/// N φ_N(θ) − (S(ρ) − θ·Tr(ρ Q̂)); equals S(ρ | ψ_θ) and vanishes only at ψ_θ.
double variational_gap(const DensityState& rho, const ObservableFamily& family, const ControlVector& theta);

}  // namespace thermolab
