#include "thermolab/kms.hpp"

#include "thermolab/random.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace thermolab {

namespace {

constexpr double kHalvingTolerance = 1e-6;

HermitianSpectrum checked_spectrum(const ObservableFamily& family, const ControlVector& theta) {
  if (family.dimension() > KmsContext::kMaxDimension)
    throw ResourceError("dynamics on dimension " + std::to_string(family.dimension()) + " exceeds the dense cap " +
                        std::to_string(KmsContext::kMaxDimension));
  family.check_control(theta);
  return family.generator_spectrum(theta);
}

// Phase matrix M_jk = exp(z (λ_j − λ_k)).
ComplexMatrix phases(const RealVector& lambda, Complex z) {
  const Eigen::Index d = lambda.size();
  ComplexMatrix m(d, d);
  for (Eigen::Index k = 0; k < d; ++k)
    for (Eigen::Index j = 0; j < d; ++j) m(j, k) = std::exp(z * (lambda(j) - lambda(k)));
  return m;
}

}  // namespace

TestOperator TestOperator::make(std::string label, ComplexMatrix matrix) {
  if (matrix.rows() != matrix.cols() || matrix.rows() == 0)
    throw DataError("test operator '" + label + "' must be square and non-empty");
  if (!matrix.allFinite()) throw DataError("test operator '" + label + "' has non-finite entries");
  return {std::move(label), std::move(matrix)};
}

TestFunction TestFunction::gaussian(double width) {
  if (!(width > 0.0) || !std::isfinite(width)) throw UsageError("gaussian width must be positive and finite");
  return TestFunction(width);
}

Complex TestFunction::operator()(Complex z) const { return std::exp(-z * z / (2.0 * width_ * width_)); }

double TestFunction::support_radius(double cutoff) const {
  // |f(t − iy)| = exp((y² − t²)/2σ²) ≤ exp((1 − t²)/2σ²) on the strip.
  return std::sqrt(1.0 + 2.0 * width_ * width_ * std::log(1.0 / cutoff));
}

Quadrature Quadrature::automatic(const TestFunction& f, double max_frequency) {
  const double s = f.width();
  // f(t − i) carries the extra phase e^{it/σ²}; the 12/σ margin pushes the
  // aliasing error of the trapezoidal rule below e^{−70}.
  const double band = std::abs(max_frequency) + 1.0 / (s * s) + 12.0 / s;
  return {f.support_radius(), 2.0 * std::numbers::pi / band};
}

KmsContext::KmsContext(const ObservableFamily& family, const ControlVector& theta)
    : spectrum_(checked_spectrum(family, theta)), state_(DensityState::gibbs(spectrum_)) {
  spread_ = spectrum_.values.maxCoeff() - spectrum_.values.minCoeff();
  if (spread_ > kMaxSpread)
    throw NumericRangeError("spectral spread " + std::to_string(spread_) + " of θ·Q exceeds " +
                            std::to_string(kMaxSpread) + "; complex-time factors would overflow");
}

void KmsContext::check(const ComplexMatrix& a) const {
  if (a.rows() != dimension() || a.cols() != dimension())
    throw UsageError("operator dimension " + std::to_string(a.rows()) + " does not match the family (" +
                     std::to_string(dimension()) + ")");
}

ComplexMatrix KmsContext::evolve(const ComplexMatrix& a, double t) const {
  check(a);
  if (!std::isfinite(t)) throw DataError("evolution time must be finite");
  const ComplexMatrix p = phases(spectrum_.values, Complex(0.0, t));
  return spectrum_.from_eigenbasis(spectrum_.to_eigenbasis(a).cwiseProduct(p));
}

Complex KmsContext::forward_correlation(const ComplexMatrix& a, const ComplexMatrix& b, double t) const {
  check(b);
  return (state_.matrix() * evolve(a, t) * b).trace();
}

Complex KmsContext::shifted_correlation(const ComplexMatrix& a, const ComplexMatrix& b, double t) const {
  check(a);
  check(b);
  const ComplexMatrix at = spectrum_.to_eigenbasis(a).cwiseProduct(phases(spectrum_.values, Complex(-1.0, t)));
  const ComplexMatrix bt = spectrum_.to_eigenbasis(b);
  // ψ is diagonal in the eigenbasis.
  const RealVector& p = state_.eigenvalues();
  Complex sum = 0.0;
  for (Eigen::Index k = 0; k < p.size(); ++k) sum += p(k) * bt.row(k).transpose().cwiseProduct(at.col(k)).sum();
  return sum;
}

double KmsContext::residual(const ComplexMatrix& a, const ComplexMatrix& b, double t) const {
  return std::abs(forward_correlation(a, b, t) - shifted_correlation(a, b, t));
}

double KmsContext::smeared_residual(const ComplexMatrix& a, const ComplexMatrix& b, const TestFunction& f,
                                    const Quadrature& quadrature) const {
  check(a);
  check(b);
  if (!(quadrature.range >= 0.0) || !(quadrature.step > 0.0))
    throw UsageError("quadrature needs range ≥ 0 and step > 0");
  if (quadrature.range == 0.0) return 0.0;

  // F(t) = Σ p_j A_jk B_kj e^{iω_jk t}, G(t) = Σ p_k B_kj A_jk e^{iω_jk t}.
  const ComplexMatrix at = spectrum_.to_eigenbasis(a);
  const ComplexMatrix bt = spectrum_.to_eigenbasis(b);
  const RealVector& lambda = spectrum_.values;
  const RealVector& p = state_.eigenvalues();
  const Eigen::Index d = lambda.size();
  std::vector<double> omega;
  std::vector<Complex> cf, cg;
  omega.reserve(static_cast<std::size_t>(d * d));
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index k = 0; k < d; ++k) {
      const Complex ab = at(j, k) * bt(k, j);
      if (ab == Complex(0.0)) continue;
      omega.push_back(lambda(j) - lambda(k));
      cf.push_back(p(j) * ab);
      cg.push_back(p(k) * ab);
    }

  const auto integrate = [&](double step) {
    const auto n = static_cast<long>(std::ceil(quadrature.range / step));
    const double h = quadrature.range / static_cast<double>(n);
    Complex lhs = 0.0, rhs = 0.0;
    for (long i = -n; i <= n; ++i) {
      const double t = h * static_cast<double>(i);
      const double w = (i == -n || i == n) ? 0.5 * h : h;
      Complex ft = 0.0, gt = 0.0;
      for (std::size_t m = 0; m < omega.size(); ++m) {
        const Complex e = std::polar(1.0, omega[m] * t);
        ft += cf[m] * e;
        gt += cg[m] * e;
      }
      lhs += w * f(Complex(t, 0.0)) * ft;
      rhs += w * f(Complex(t, -1.0)) * gt;
    }
    return std::pair{lhs, rhs};
  };

  const auto [lhs, rhs] = integrate(quadrature.step);
  const auto [lhs2, rhs2] = integrate(0.5 * quadrature.step);
  const double drift = std::max(std::abs(lhs - lhs2), std::abs(rhs - rhs2));
  if (drift > kHalvingTolerance)
    throw QuadratureError("quadrature under-resolved: step halving moved the integrals by " + std::to_string(drift));
  return std::abs(lhs2 - rhs2);
}

TestOperator evolve(const TestOperator& a, const ObservableFamily& family, const ControlVector& theta, double t) {
  const KmsContext ctx(family, theta);
  return {a.label, ctx.evolve(a.matrix, t)};
}

double kms_residual(const ObservableFamily& family, const ControlVector& theta, const TestOperator& a,
                    const TestOperator& b, double t) {
  return KmsContext(family, theta).residual(a.matrix, b.matrix, t);
}

double kms_smeared_residual(const ObservableFamily& family, const ControlVector& theta, const TestOperator& a,
                            const TestOperator& b, const TestFunction& f, const Quadrature& quadrature) {
  return KmsContext(family, theta).smeared_residual(a.matrix, b.matrix, f, quadrature);
}

DiscriminationReport kms_theta_discrimination(const ObservableFamily& family, const ControlVector& theta1,
                                              const ControlVector& theta2, const std::vector<KmsProbe>& probes) {
  if (probes.empty()) throw UsageError("discrimination needs at least one probe");
  const KmsContext first(family, theta1), second(family, theta2);
  DiscriminationReport report;
  for (const auto& probe : probes) {
    const double d = max_norm(first.evolve(probe.a.matrix, probe.t) - second.evolve(probe.a.matrix, probe.t));
    report.per_probe.push_back(d);
    report.score = std::max(report.score, d);
  }
  report.distinguishes = report.score > 1e-10;
  return report;
}

std::vector<TestOperator> default_probe_operators(const ObservableFamily& family, std::uint64_t seed) {
  std::vector<TestOperator> out;
  const std::size_t sites = family.region().volume();
  if (family.local_dimension() == 2) {
    out.push_back({"X0", pauli::embed(pauli::x(), 0, sites)});
    out.push_back({"Y0", pauli::embed(pauli::y(), 0, sites)});
    out.push_back({"Z0", pauli::embed(pauli::z(), 0, sites)});
  }
  std::mt19937_64 rng(seed);
  out.push_back(
      {"H(" + std::to_string(seed) + ")", random_hermitian(static_cast<Eigen::Index>(family.dimension()), rng)});
  return out;
}

}  // namespace thermolab
