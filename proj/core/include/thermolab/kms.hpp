#pragma once

// Finite-volume Heisenberg dynamics α_t(A) = e^{iKt} A e^{−iKt}, K = θ·Q̂,
// and numerical checks of the KMS identity ω(α_t(A)B) = ω(B α_{t+i}(A)) for
// the canonical state ω = ψ_θ.

#include "thermolab/gibbs.hpp"
#include "thermolab/lattice.hpp"
#include "thermolab/spectral.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace thermolab {

struct TestOperator {
  std::string label;
  ComplexMatrix matrix;

  /// DataError on non-square or non-finite input.
  static TestOperator make(std::string label, ComplexMatrix matrix);
};

/// Gaussian f(z) = exp(−z² / 2σ²), entire, so f(t − i) is closed-form.
class TestFunction {
 public:
  static TestFunction gaussian(double width);

  double width() const noexcept { return width_; }
  Complex operator()(Complex z) const;
  /// Half-width beyond which |f| on the strip −1 ≤ Im z ≤ 0 drops below `cutoff`.
  double support_radius(double cutoff = 1e-14) const;

 private:
  explicit TestFunction(double width) : width_(width) {}
  double width_;
};

/// Trapezoidal rule on [−range, range].
struct Quadrature {
  double range = 0.0;
  double step = 0.0;

  /// Covers |f| > 1e−14 and resolves phases up to `max_frequency`.
  static Quadrature automatic(const TestFunction& f, double max_frequency);
};

/// The dynamics generated by θ·Q̂ on one family, with its canonical state.
/// Caches the spectral decomposition; safe to share across threads.
class KmsContext {
 public:
  /// ResourceError above the dense cap; NumericRangeError when the spectral
  /// spread of θ·Q̂ exceeds kMaxSpread.
  KmsContext(const ObservableFamily& family, const ControlVector& theta);

  static constexpr double kMaxSpread = 700.0;
  static constexpr std::size_t kMaxDimension = std::size_t{1} << 11;

  Eigen::Index dimension() const noexcept { return spectrum_.values.size(); }
  const HermitianSpectrum& generator() const noexcept { return spectrum_; }
  const DensityState& state() const noexcept { return state_; }
  /// max λ − min λ of θ·Q̂.
  double spread() const noexcept { return spread_; }

  ComplexMatrix evolve(const ComplexMatrix& a, double t) const;
  /// ω(α_t(A) B), in the product basis.
  Complex forward_correlation(const ComplexMatrix& a, const ComplexMatrix& b, double t) const;
  /// ω(B α_{t+i}(A)) with e^{(it−1)K} A e^{−(it−1)K} formed in the eigenbasis.
  Complex shifted_correlation(const ComplexMatrix& a, const ComplexMatrix& b, double t) const;

  double residual(const ComplexMatrix& a, const ComplexMatrix& b, double t) const;
  double smeared_residual(const ComplexMatrix& a, const ComplexMatrix& b, const TestFunction& f,
                          const Quadrature& quadrature) const;

 private:
  void check(const ComplexMatrix& a) const;
  HermitianSpectrum spectrum_;
  DensityState state_;
  double spread_ = 0.0;
};

TestOperator evolve(const TestOperator& a, const ObservableFamily& family, const ControlVector& theta, double t);

/// |ω(α_t(A)B) − ω(B α_{t+i}(A))|.
double kms_residual(const ObservableFamily& family, const ControlVector& theta, const TestOperator& a,
                    const TestOperator& b, double t);

/// |∫ f(t) ω(α_t(A)B) dt − ∫ f(t−i) ω(B α_t(A)) dt|. QuadratureError when
/// halving the step moves either integral by more than 1e−6.
double kms_smeared_residual(const ObservableFamily& family, const ControlVector& theta, const TestOperator& a,
                            const TestOperator& b, const TestFunction& f, const Quadrature& quadrature);

struct KmsProbe {
  TestOperator a;
  TestOperator b;
  double t = 0.0;
};

struct DiscriminationReport {
  /// max over probes of ‖α^{θ₁}_t(A) − α^{θ₂}_t(A)‖_max.
  double score = 0.0;
  std::vector<double> per_probe;
  bool distinguishes = false;
};

/// Compares the dynamics of two controls on a probe set. B is not used by the
/// score; probes share the KmsProbe shape with the residual sweeps.
DiscriminationReport kms_theta_discrimination(const ObservableFamily& family, const ControlVector& theta1,
                                              const ControlVector& theta2, const std::vector<KmsProbe>& probes);

/// σx, σy, σz at site 0 (two-level sites only) and one seeded random
/// hermitian operator of unit norm, labelled "H(seed)".
std::vector<TestOperator> default_probe_operators(const ObservableFamily& family, std::uint64_t seed);

}  // namespace thermolab
