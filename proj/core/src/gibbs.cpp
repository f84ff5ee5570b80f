#include "thermolab/gibbs.hpp"

#include "thermolab/parallel.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>

namespace thermolab {

struct DensityState::Cache {
  std::once_flag once;
  HermitianSpectrum spectrum;
};

namespace {

constexpr double kStateTol = 1e-12;

std::shared_ptr<DensityState::Cache> filled_cache(HermitianSpectrum s);

}  // namespace

DensityState DensityState::from_matrix(ComplexMatrix rho) {
  if (rho.rows() != rho.cols() || rho.rows() == 0) throw UsageError("density matrix must be square and non-empty");
  if (!rho.allFinite()) throw DataError("density matrix has non-finite entries");
  const double herm = hermiticity_defect(rho);
  if (herm > kStateTol) throw DataError("density matrix is not hermitian (defect " + std::to_string(herm) + ")");
  const double trace = rho.trace().real();
  if (std::abs(trace - 1.0) > kStateTol)
    throw DataError("density matrix trace is " + std::to_string(trace) + ", expected 1");

  DensityState s;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(rho, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw DataError("density matrix eigensolver did not converge");
  if (solver.eigenvalues().minCoeff() < -kStateTol)
    throw DataError("density matrix has a negative eigenvalue " + std::to_string(solver.eigenvalues().minCoeff()));
  s.matrix_ = std::move(rho);
  s.eigenvalues_ = solver.eigenvalues();
  s.cache_ = std::make_shared<Cache>();
  return s;
}

DensityState DensityState::maximally_mixed(Eigen::Index dim) {
  if (dim <= 0) throw UsageError("dimension must be positive");
  return diagonal(RealVector::Constant(dim, 1.0 / static_cast<double>(dim)));
}

DensityState DensityState::pure(const Eigen::VectorXcd& psi) {
  const double norm = psi.norm();
  if (!(norm > 0.0) || !psi.allFinite()) throw DataError("pure state vector must be finite and non-zero");
  const Eigen::VectorXcd v = psi / norm;
  return from_matrix(v * v.adjoint());
}

DensityState DensityState::diagonal(const RealVector& probabilities) {
  if (probabilities.size() == 0) throw UsageError("dimension must be positive");
  if (!probabilities.allFinite() || probabilities.minCoeff() < -kStateTol)
    throw DataError("diagonal state needs finite non-negative weights");
  if (std::abs(probabilities.sum() - 1.0) > kStateTol) throw DataError("diagonal state weights must sum to 1");
  DensityState s;
  s.matrix_ = dense_from_diagonal(probabilities);
  s.eigenvalues_ = probabilities;
  s.cache_ = filled_cache(HermitianSpectrum::of_diagonal(probabilities));
  return s;
}

DensityState DensityState::gibbs(const HermitianSpectrum& generator) {
  const RealVector& lambda = generator.values;
  const double shift = lambda.minCoeff();
  const RealVector shifted = -(lambda.array() - shift).matrix();
  const double log_z = log_sum_exp(shifted);
  RealVector log_p = (shifted.array() - log_z).matrix();
  RealVector p = log_p.array().exp();

  HermitianSpectrum spec;
  spec.values = p;
  spec.vectors = generator.vectors;
  spec.diagonal = generator.diagonal;

  DensityState s;
  s.matrix_ = generator.diagonal ? dense_from_diagonal(p)
                                 : ComplexMatrix(generator.vectors * p.cast<Complex>().asDiagonal() *
                                                 generator.vectors.adjoint());
  s.eigenvalues_ = std::move(p);
  s.log_eigenvalues_ = std::move(log_p);
  s.cache_ = filled_cache(std::move(spec));
  return s;
}

const HermitianSpectrum& DensityState::spectrum() const {
  std::call_once(cache_->once, [this] { cache_->spectrum = HermitianSpectrum::of_matrix(matrix_); });
  return cache_->spectrum;
}

namespace {

std::shared_ptr<DensityState::Cache> filled_cache(HermitianSpectrum s) {
  auto cache = std::make_shared<DensityState::Cache>();
  std::call_once(cache->once, [&] { cache->spectrum = std::move(s); });
  return cache;
}

}  // namespace

// ---------------------------------------------------------------------------

DensityState canonical_state(const ObservableFamily& family, const ControlVector& theta) {
  family.check_control(theta);
  if (family.dimension() > (std::size_t{1} << 12))
    throw ResourceError("canonical_state stores a dense " + std::to_string(family.dimension()) +
                        "-dimensional matrix; above the dense cap 4096");
  return DensityState::gibbs(family.generator_spectrum(theta));
}

double von_neumann_entropy(const DensityState& rho) {
  const RealVector& p = rho.eigenvalues();
  const auto& logp = rho.log_eigenvalues();
  double s = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p(i) <= kEntropyFloor) continue;
    s -= p(i) * (logp ? (*logp)(i) : std::log(p(i)));
  }
  return s;
}

RelativeEntropy relative_entropy(const DensityState& rho, const DensityState& sigma) {
  if (rho.dimension() != sigma.dimension()) throw UsageError("relative_entropy: dimension mismatch");
  const HermitianSpectrum& sig = sigma.spectrum();
  const auto& log_mu = sigma.log_eigenvalues();

  // Weights of ρ along σ's eigenvectors.
  RealVector w;
  if (sig.diagonal)
    w = rho.matrix().diagonal().real();
  else
    w = (sig.vectors.adjoint() * rho.matrix() * sig.vectors).diagonal().real();

  double cross = 0.0;  // Tr ρ ln σ
  for (Eigen::Index j = 0; j < w.size(); ++j) {
    double log_value;
    if (log_mu) {
      log_value = (*log_mu)(j);
    } else if (sig.values(j) > kSupportThreshold) {
      log_value = std::log(sig.values(j));
    } else {
      if (w(j) > kSupportThreshold) return {std::numeric_limits<double>::infinity(), true};
      continue;
    }
    cross += w(j) * log_value;
  }
  return {-von_neumann_entropy(rho) - cross, false};
}

std::vector<double> expectations(const ObservableFamily& family, const DensityState& rho) {
  if (static_cast<std::size_t>(rho.dimension()) != family.dimension())
    throw UsageError("state dimension does not match the family");
  std::vector<double> out(family.size());
  for (std::size_t k = 0; k < family.size(); ++k) out[k] = family.expectation(k, rho.matrix());
  return out;
}

double finite_pressure(const ObservableFamily& family, const ControlVector& theta) {
  const HermitianSpectrum k = family.generator_spectrum(theta);
  return log_sum_exp(-k.values) / static_cast<double>(family.region().volume());
}

double variational_gap(const DensityState& rho, const ObservableFamily& family, const ControlVector& theta) {
  family.check_control(theta);
  const double log_z = finite_pressure(family, theta) * static_cast<double>(family.region().volume());
  const std::vector<double> q = expectations(family, rho);
  double theta_q = 0.0;
  for (std::size_t k = 0; k < q.size(); ++k) theta_q += theta[k] * q[k];
  return log_z - (von_neumann_entropy(rho) - theta_q);
}

// ---------------------------------------------------------------------------

const char* to_string(ExtrapolationMode m) noexcept {
  return m == ExtrapolationMode::Affine ? "affine" : "exponential";
}

ExtrapolationMode parse_extrapolation_mode(const std::string& s) {
  if (s == "affine") return ExtrapolationMode::Affine;
  if (s == "exponential") return ExtrapolationMode::Exponential;
  throw UsageError("unknown extrapolation mode '" + s + "' (affine, exponential)");
}

namespace {

PressureEstimate affine_fit(const std::vector<std::pair<std::size_t, double>>& data) {
  const auto n = static_cast<Eigen::Index>(data.size());
  Eigen::MatrixXd a(n, 2);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    a(i, 0) = 1.0;
    a(i, 1) = 1.0 / static_cast<double>(data[i].first);
    b(i) = data[i].second;
  }
  const Eigen::Vector2d coef = a.colPivHouseholderQr().solve(b);
  PressureEstimate est;
  est.mode = ExtrapolationMode::Affine;
  est.value = coef(0);
  const double residual = (a * coef - b).cwiseAbs().maxCoeff();
  est.extrapolation_error = std::max(residual, std::abs(data.back().second - est.value));
  return est;
}

// Z_N e^{-N ref} = Σ_j c_j μ_j^k with N = N_0 + k s. Linear prediction gives the
// μ_j as roots of the characteristic polynomial; the dominant root is the
// leading transfer-matrix eigenvalue (to the power s).
std::optional<PressureEstimate> prony_fit(const std::vector<std::pair<std::size_t, double>>& data, std::size_t order) {
  const std::size_t count = data.size();
  const double step = static_cast<double>(data[1].first - data[0].first);
  const double ref = data.back().second;
  Eigen::VectorXd w(static_cast<Eigen::Index>(count));
  for (std::size_t k = 0; k < count; ++k)
    w(static_cast<Eigen::Index>(k)) = std::exp(static_cast<double>(data[k].first) * (data[k].second - ref));

  const auto p = static_cast<Eigen::Index>(order);
  const Eigen::Index rows = static_cast<Eigen::Index>(count) - p;
  if (rows < p) return std::nullopt;
  Eigen::MatrixXd a(rows, p);
  Eigen::VectorXd b(rows);
  for (Eigen::Index k = 0; k < rows; ++k) {
    for (Eigen::Index i = 0; i < p; ++i) a(k, i) = w(k + p - 1 - i);
    b(k) = w(k + p);
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (sv(p - 1) <= 1e-12 * sv(0)) return std::nullopt;
  const Eigen::VectorXd coef = svd.solve(b);

  // Companion matrix of μ^p − a_1 μ^{p−1} − … − a_p.
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(p, p);
  companion.row(0) = coef.transpose();
  for (Eigen::Index i = 1; i < p; ++i) companion(i, i - 1) = 1.0;
  Eigen::EigenSolver<Eigen::MatrixXd> roots(companion);
  const Eigen::VectorXcd mu = roots.eigenvalues();

  Eigen::Index lead = 0;
  for (Eigen::Index j = 1; j < p; ++j)
    if (std::abs(mu(j)) > std::abs(mu(lead))) lead = j;
  const Complex dominant = mu(lead);
  if (!(dominant.real() > 0.0) || std::abs(dominant.imag()) > 1e-12 * std::abs(dominant)) return std::nullopt;

  PressureEstimate est;
  est.mode = ExtrapolationMode::Exponential;
  est.value = ref + std::log(dominant.real()) / step;

  // Amplitudes and the reconstructed φ_N for the error estimate.
  Eigen::MatrixXcd vander(static_cast<Eigen::Index>(count), p);
  for (Eigen::Index k = 0; k < static_cast<Eigen::Index>(count); ++k)
    for (Eigen::Index j = 0; j < p; ++j) vander(k, j) = std::pow(mu(j), static_cast<double>(k));
  const Eigen::VectorXcd amp = vander.colPivHouseholderQr().solve(w.cast<Complex>());
  const Eigen::VectorXcd fit = vander * amp;
  double err = 0.0;
  for (std::size_t k = 0; k < count; ++k) {
    const double z = fit(static_cast<Eigen::Index>(k)).real();
    if (!(z > 0.0)) return std::nullopt;
    const double phi = ref + std::log(z) / static_cast<double>(data[k].first);
    err = std::max(err, std::abs(phi - data[k].second));
  }
  est.extrapolation_error = err;
  return est;
}

}  // namespace

PressureEstimate extrapolate_pressure(std::vector<std::pair<std::size_t, double>> per_size, ExtrapolationMode mode,
                                      std::size_t prony_order) {
  if (per_size.size() < 3) throw UsageError("pressure extrapolation needs at least 3 sizes");
  for (std::size_t i = 1; i < per_size.size(); ++i)
    if (per_size[i].first <= per_size[i - 1].first) throw UsageError("sizes must be strictly increasing");
  for (const auto& [n, phi] : per_size)
    if (!std::isfinite(phi)) throw DataError("non-finite φ_N at N = " + std::to_string(n));

  PressureEstimate est;
  if (mode == ExtrapolationMode::Affine) {
    est = affine_fit(per_size);
  } else {
    const std::size_t step = per_size[1].first - per_size[0].first;
    for (std::size_t i = 2; i < per_size.size(); ++i)
      if (per_size[i].first - per_size[i - 1].first != step)
        throw UsageError("exponential extrapolation needs equally spaced sizes");
    std::optional<PressureEstimate> fit;
    for (std::size_t p = std::max<std::size_t>(prony_order, 1); p >= 1 && !fit; --p) fit = prony_fit(per_size, p);
    if (!fit) throw DataError("exponential extrapolation failed: no real dominant root");
    est = *fit;
  }
  est.per_size = std::move(per_size);
  return est;
}

PressureEstimate pressure_limit(const ModelSpec& spec, const ControlVector& theta, const std::vector<std::size_t>& sizes,
                                const PressureLimitOptions& options) {
  if (sizes.size() < 3) throw UsageError("pressure_limit needs at least 3 sizes");
  for (std::size_t i = 1; i < sizes.size(); ++i)
    if (sizes[i] <= sizes[i - 1]) throw UsageError("sizes must be strictly increasing");
  if (sizes.front() == 0) throw UsageError("sizes must be positive");
  // Fail fast on the largest size before any work.
  checked_dimension(2, sizes.back(), options.build.max_dimension);

  std::vector<std::pair<std::size_t, double>> per_size(sizes.size());
  parallel_for(sizes.size(), options.threads, [&](std::size_t i) {
    const ObservableFamily family = build_model(spec, spec.default_region(sizes[i], options.boundary), options.build);
    per_size[i] = {sizes[i], finite_pressure(family, theta)};
  });
  const std::size_t order = options.prony_order ? options.prony_order : 2;
  return extrapolate_pressure(std::move(per_size), options.mode, order);
}

}  // namespace thermolab
