#include "thermolab/lattice.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <sstream>

namespace thermolab {

namespace {

// Local state 0 is spin up.
inline double spin(std::size_t digit) { return digit == 0 ? 1.0 : -1.0; }

std::vector<std::size_t> digits(std::size_t index, std::size_t sites, std::size_t d) {
  std::vector<std::size_t> x(sites);
  for (std::size_t i = sites; i-- > 0;) {
    x[i] = index % d;
    index /= d;
  }
  return x;
}

// Bonds (i, j) of a chain; periodic chains close with (N-1, 0), including
// the degenerate N = 1 and N = 2 cases so that Z = Tr T^N holds for every N.
std::vector<std::pair<std::size_t, std::size_t>> chain_bonds(const Region& r) {
  std::vector<std::pair<std::size_t, std::size_t>> bonds;
  const std::size_t n = r.sites;
  const std::size_t count = r.boundary == Boundary::Periodic ? n : n - 1;
  for (std::size_t i = 0; i < count; ++i) bonds.emplace_back(i, (i + 1) % n);
  return bonds;
}

RealVector magnetization_diagonal(std::size_t sites) {
  const std::size_t dim = std::size_t{1} << sites;
  RealVector m(dim);
  for (std::size_t a = 0; a < dim; ++a) {
    double s = 0.0;
    for (std::size_t i = 0; i < sites; ++i) s += spin((a >> (sites - 1 - i)) & 1U);
    m(static_cast<Eigen::Index>(a)) = s;
  }
  return m;
}

RealVector bond_diagonal(const Region& r) {
  const std::size_t n = r.sites;
  const std::size_t dim = std::size_t{1} << n;
  const auto bonds = chain_bonds(r);
  RealVector zz(dim);
  for (std::size_t a = 0; a < dim; ++a) {
    double s = 0.0;
    for (const auto& [i, j] : bonds) s += spin((a >> (n - 1 - i)) & 1U) * spin((a >> (n - 1 - j)) & 1U);
    zz(static_cast<Eigen::Index>(a)) = s;
  }
  return zz;
}

void require_geometry(const ModelSpec& spec, const Region& region, std::initializer_list<Geometry> allowed) {
  if (std::find(allowed.begin(), allowed.end(), region.geometry) == allowed.end())
    throw UsageError(std::string("model ") + to_string(spec.kind) + " cannot be built on region " +
                     region.describe());
}

}  // namespace

const char* to_string(Geometry g) noexcept {
  switch (g) {
    case Geometry::Chain: return "chain";
    case Geometry::CompleteGraph: return "complete_graph";
    case Geometry::SingleSites: return "single_sites";
  }
  return "?";
}

const char* to_string(Boundary b) noexcept { return b == Boundary::Periodic ? "periodic" : "open"; }

std::string Region::describe() const {
  std::string s = std::string(to_string(geometry)) + "(" + std::to_string(sites);
  if (geometry == Geometry::Chain) s += std::string(", ") + to_string(boundary);
  return s + ")";
}

const char* to_string(ModelKind k) noexcept {
  switch (k) {
    case ModelKind::FreeSpins: return "free_spins";
    case ModelKind::IsingChain: return "ising_chain";
    case ModelKind::CurieWeiss: return "curie_weiss";
    case ModelKind::TransverseIsing: return "transverse_ising";
  }
  return "?";
}

ModelKind parse_model_kind(const std::string& s) {
  if (s == "free_spins") return ModelKind::FreeSpins;
  if (s == "ising_chain") return ModelKind::IsingChain;
  if (s == "curie_weiss") return ModelKind::CurieWeiss;
  if (s == "transverse_ising") return ModelKind::TransverseIsing;
  throw UsageError("unknown model kind '" + s + "'");
}

std::size_t ModelSpec::observable_count() const noexcept {
  return kind == ModelKind::IsingChain || kind == ModelKind::CurieWeiss ? 2 : 1;
}

Region ModelSpec::default_region(std::size_t sites, Boundary boundary) const {
  switch (kind) {
    case ModelKind::FreeSpins: return Region::single_sites(sites);
    case ModelKind::CurieWeiss: return Region::complete_graph(sites);
    default: return Region::chain(sites, boundary);
  }
}

std::string ModelSpec::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << to_string(kind);
  switch (kind) {
    case ModelKind::FreeSpins: break;
    case ModelKind::IsingChain:
    case ModelKind::CurieWeiss: os << "(J=" << J << ",h=" << h << ")"; break;
    case ModelKind::TransverseIsing: os << "(J=" << J << ",g=" << g << ")"; break;
  }
  return os.str();
}

// ---------------------------------------------------------------------------

Observable Observable::diagonal(std::string label, RealVector diag) {
  Observable o;
  o.label_ = std::move(label);
  o.diag_ = std::move(diag);
  o.is_diagonal_ = true;
  return o;
}

Observable Observable::dense(std::string label, ComplexMatrix matrix) {
  if (matrix.rows() != matrix.cols()) throw UsageError("observable '" + label + "' must be square");
  Observable o;
  o.label_ = std::move(label);
  o.dense_ = std::move(matrix);
  o.is_diagonal_ = false;
  return o;
}

const RealVector& Observable::diagonal_values() const {
  if (!is_diagonal_) throw UsageError("observable '" + label_ + "' is not stored as a diagonal");
  return diag_;
}

ComplexMatrix Observable::to_dense() const { return is_diagonal_ ? dense_from_diagonal(diag_) : dense_; }

// ---------------------------------------------------------------------------

ObservableFamily::ObservableFamily(Region region, std::size_t local_dimension, std::vector<Observable> observables,
                                   std::optional<ModelSpec> spec)
    : region_(region), local_dimension_(local_dimension), observables_(std::move(observables)), spec_(spec) {
  if (region_.sites == 0) throw UsageError("region needs at least one site");
  if (local_dimension_ < 2) throw UsageError("local dimension must be at least 2");
  if (observables_.empty()) throw UsageError("observable family needs at least one observable");
  dimension_ = checked_dimension(local_dimension_, region_.sites, std::numeric_limits<std::size_t>::max() / 2);
  for (const auto& o : observables_) {
    if (static_cast<std::size_t>(o.dimension()) != dimension_)
      throw UsageError("observable '" + o.label() + "' has dimension " + std::to_string(o.dimension()) +
                       ", expected " + std::to_string(dimension_));
    const bool finite = o.is_diagonal() ? o.diagonal_values().allFinite() : o.to_dense().allFinite();
    if (!finite) throw DataError("observable '" + o.label() + "' has non-finite entries");
  }
}

bool ObservableFamily::all_diagonal() const noexcept {
  return std::all_of(observables_.begin(), observables_.end(), [](const Observable& o) { return o.is_diagonal(); });
}

void ObservableFamily::check_control(const ControlVector& theta) const {
  if (theta.size() != observables_.size())
    throw UsageError("control vector has " + std::to_string(theta.size()) + " components, family has " +
                     std::to_string(observables_.size()) + " observables");
}

HermitianSpectrum ObservableFamily::generator_spectrum(const ControlVector& theta) const {
  check_control(theta);
  if (all_diagonal()) {
    RealVector k = RealVector::Zero(static_cast<Eigen::Index>(dimension_));
    for (std::size_t j = 0; j < observables_.size(); ++j) k += theta[j] * observables_[j].diagonal_values();
    return HermitianSpectrum::of_diagonal(std::move(k));
  }
  return HermitianSpectrum::of_matrix(generator(theta));
}

ComplexMatrix ObservableFamily::generator(const ControlVector& theta) const {
  check_control(theta);
  const auto n = static_cast<Eigen::Index>(dimension_);
  ComplexMatrix k = ComplexMatrix::Zero(n, n);
  for (std::size_t j = 0; j < observables_.size(); ++j) {
    if (observables_[j].is_diagonal())
      k.diagonal() += (theta[j] * observables_[j].diagonal_values()).cast<Complex>();
    else
      k += theta[j] * observables_[j].to_dense();
  }
  return k;
}

double ObservableFamily::expectation(std::size_t k, const ComplexMatrix& rho) const {
  const Observable& o = observables_.at(k);
  if (o.is_diagonal()) return (rho.diagonal().real().array() * o.diagonal_values().array()).sum();
  return (rho * o.to_dense()).trace().real();
}

// ---------------------------------------------------------------------------

std::size_t checked_dimension(std::size_t local_dimension, std::size_t sites, std::size_t cap) {
  std::size_t dim = 1;
  for (std::size_t i = 0; i < sites; ++i) {
    if (dim > cap / local_dimension)
      throw ResourceError("Hilbert space " + std::to_string(local_dimension) + "^" + std::to_string(sites) +
                          " exceeds the dimension cap " + std::to_string(cap));
    dim *= local_dimension;
  }
  return dim;
}

ObservableFamily build_model(const ModelSpec& spec, const Region& region, const BuildOptions& options) {
  if (region.sites == 0) throw UsageError("region needs at least one site");
  if (!std::isfinite(spec.J) || !std::isfinite(spec.h) || !std::isfinite(spec.g))
    throw DataError("model parameters must be finite");
  const std::size_t n = region.sites;

  switch (spec.kind) {
    case ModelKind::FreeSpins: {
      const std::size_t dim = checked_dimension(2, n, options.max_dimension);
      // n_i = diag(0, 1): the occupation is the local digit.
      RealVector h(static_cast<Eigen::Index>(dim));
      for (std::size_t a = 0; a < dim; ++a) h(static_cast<Eigen::Index>(a)) = std::popcount(a);
      return ObservableFamily(region, 2, {Observable::diagonal("energy", std::move(h))}, spec);
    }
    case ModelKind::IsingChain: {
      require_geometry(spec, region, {Geometry::Chain});
      checked_dimension(2, n, options.max_dimension);
      RealVector m = magnetization_diagonal(n);
      RealVector h = -spec.J * bond_diagonal(region) - spec.h * m;
      return ObservableFamily(
          region, 2, {Observable::diagonal("energy", std::move(h)), Observable::diagonal("magnetization", std::move(m))},
          spec);
    }
    case ModelKind::CurieWeiss: {
      require_geometry(spec, region, {Geometry::CompleteGraph});
      checked_dimension(2, n, options.max_dimension);
      RealVector m = magnetization_diagonal(n);
      RealVector h = -(spec.J / (2.0 * static_cast<double>(n))) * m.array().square().matrix() - spec.h * m;
      return ObservableFamily(
          region, 2, {Observable::diagonal("energy", std::move(h)), Observable::diagonal("magnetization", std::move(m))},
          spec);
    }
    case ModelKind::TransverseIsing: {
      require_geometry(spec, region, {Geometry::Chain});
      const std::size_t dim = checked_dimension(2, n, std::min(options.max_dimension, options.max_dense_dimension));
      const auto d = static_cast<Eigen::Index>(dim);
      ComplexMatrix h = ComplexMatrix::Zero(d, d);
      h.diagonal() = (-spec.J * bond_diagonal(region)).cast<Complex>();
      for (std::size_t a = 0; a < dim; ++a)
        for (std::size_t i = 0; i < n; ++i) {
          const std::size_t b = a ^ (std::size_t{1} << (n - 1 - i));
          h(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a)) += -spec.g;
        }
      return ObservableFamily(region, 2, {Observable::dense("energy", std::move(h))}, spec);
    }
  }
  throw UsageError("unknown model kind");
}

// ---------------------------------------------------------------------------

Translation::Translation(std::size_t sites, std::size_t local_dimension, long shift) : shift_(shift) {
  const std::size_t dim = checked_dimension(local_dimension, sites, std::numeric_limits<std::size_t>::max() / 2);
  const long n = static_cast<long>(sites);
  const std::size_t s = static_cast<std::size_t>(((shift % n) + n) % n);
  permutation_.resize(dim);
  std::vector<std::size_t> y(sites);
  for (std::size_t a = 0; a < dim; ++a) {
    const auto x = digits(a, sites, local_dimension);
    for (std::size_t i = 0; i < sites; ++i) y[(i + s) % sites] = x[i];
    std::size_t b = 0;
    for (std::size_t i = 0; i < sites; ++i) b = b * local_dimension + y[i];
    permutation_[a] = b;
  }
}

ComplexMatrix Translation::conjugate(const ComplexMatrix& a) const {
  const auto n = static_cast<Eigen::Index>(permutation_.size());
  if (a.rows() != n || a.cols() != n) throw UsageError("translation: dimension mismatch");
  ComplexMatrix out(n, n);
  for (Eigen::Index c = 0; c < n; ++c)
    for (Eigen::Index r = 0; r < n; ++r)
      out(static_cast<Eigen::Index>(permutation_[r]), static_cast<Eigen::Index>(permutation_[c])) = a(r, c);
  return out;
}

RealVector Translation::conjugate_diagonal(const RealVector& d) const {
  RealVector out(d.size());
  for (Eigen::Index r = 0; r < d.size(); ++r) out(static_cast<Eigen::Index>(permutation_[r])) = d(r);
  return out;
}

ComplexMatrix Translation::unitary() const {
  const auto n = static_cast<Eigen::Index>(permutation_.size());
  ComplexMatrix u = ComplexMatrix::Zero(n, n);
  for (Eigen::Index a = 0; a < n; ++a) u(static_cast<Eigen::Index>(permutation_[a]), a) = 1.0;
  return u;
}

// ---------------------------------------------------------------------------

namespace {

Region sub_region(const Region& r, std::size_t sites) {
  switch (r.geometry) {
    case Geometry::Chain: return Region::chain(sites, Boundary::Open);
    case Geometry::CompleteGraph: return Region::complete_graph(sites);
    case Geometry::SingleSites: return Region::single_sites(sites);
  }
  return r;
}

double extensivity_defect(const Observable& whole, const Observable& a, const Observable& b) {
  const Eigen::Index da = a.dimension(), db = b.dimension();
  if (whole.is_diagonal() && a.is_diagonal() && b.is_diagonal()) {
    const RealVector& w = whole.diagonal_values();
    double worst = 0.0;
    for (Eigen::Index i = 0; i < da; ++i)
      for (Eigen::Index j = 0; j < db; ++j)
        worst = std::max(worst, std::abs(w(i * db + j) - a.diagonal_values()(i) - b.diagonal_values()(j)));
    return worst;
  }
  const ComplexMatrix sum = Eigen::kroneckerProduct(a.to_dense(), ComplexMatrix::Identity(db, db)).eval() +
                            Eigen::kroneckerProduct(ComplexMatrix::Identity(da, da), b.to_dense()).eval();
  return max_norm(whole.to_dense() - sum);
}

}  // namespace

StructureReport verify_family(const ObservableFamily& family, std::optional<std::size_t> split) {
  StructureReport report;
  const auto& obs = family.observables();
  const std::size_t count = obs.size();
  const bool diagonal = family.all_diagonal();

  std::vector<ComplexMatrix> dense;
  if (!diagonal) {
    dense.reserve(count);
    for (const auto& o : obs) dense.push_back(o.to_dense());
  }

  // Commutators and hermiticity. Real diagonals are hermitian and commute.
  if (!diagonal) {
    for (std::size_t j = 0; j < count; ++j) {
      report.max_hermiticity_defect = std::max(report.max_hermiticity_defect, hermiticity_defect(dense[j]));
      for (std::size_t k = j + 1; k < count; ++k)
        report.max_commutator =
            std::max(report.max_commutator, max_norm(dense[j] * dense[k] - dense[k] * dense[j]));
    }
  }

  // Gram matrix under ⟨A, B⟩ = Tr(A† B) / dim.
  const double dim = static_cast<double>(family.dimension());
  Eigen::MatrixXd gram(count, count);
  for (std::size_t j = 0; j < count; ++j)
    for (std::size_t k = j; k < count; ++k) {
      double g;
      if (diagonal)
        g = obs[j].diagonal_values().dot(obs[k].diagonal_values()) / dim;
      else
        g = (dense[j].adjoint() * dense[k]).trace().real() / dim;
      gram(j, k) = gram(k, j) = g;
    }
  report.gram_min_eigenvalue = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(gram).eigenvalues().minCoeff();

  const Region& region = family.region();
  if (region.translation_invariant() && region.sites > 1) {
    const Translation shift(region.sites, family.local_dimension(), 1);
    double worst = 0.0;
    for (std::size_t j = 0; j < count; ++j) {
      if (obs[j].is_diagonal())
        worst = std::max(worst, (shift.conjugate_diagonal(obs[j].diagonal_values()) - obs[j].diagonal_values())
                                    .cwiseAbs()
                                    .maxCoeff());
      else
        worst = std::max(worst, max_norm(shift.conjugate(dense[j]) - dense[j]));
    }
    report.translation_defect = worst;
  }

  if (family.spec() && region.sites >= 2) {
    const std::size_t na = split.value_or(region.sites / 2);
    if (na == 0 || na >= region.sites) throw UsageError("extensivity split must leave both blocks non-empty");
    report.split = na;
    const ObservableFamily a = build_model(*family.spec(), sub_region(region, na));
    const ObservableFamily b = build_model(*family.spec(), sub_region(region, region.sites - na));
    for (std::size_t j = 0; j < count; ++j) report.extensivity_defect.push_back(extensivity_defect(obs[j], a[j], b[j]));
  }
  return report;
}

// ---------------------------------------------------------------------------

namespace pauli {

ComplexMatrix identity() { return ComplexMatrix::Identity(2, 2); }

ComplexMatrix x() {
  ComplexMatrix m(2, 2);
  m << 0.0, 1.0, 1.0, 0.0;
  return m;
}

ComplexMatrix y() {
  ComplexMatrix m(2, 2);
  m << 0.0, Complex(0.0, -1.0), Complex(0.0, 1.0), 0.0;
  return m;
}

ComplexMatrix z() {
  ComplexMatrix m(2, 2);
  m << 1.0, 0.0, 0.0, -1.0;
  return m;
}

ComplexMatrix embed(const ComplexMatrix& local, std::size_t site, std::size_t sites) {
  if (site >= sites) throw UsageError("embed: site index out of range");
  const Eigen::Index d = local.rows();
  ComplexMatrix out = ComplexMatrix::Identity(1, 1);
  for (std::size_t i = 0; i < sites; ++i) {
    const ComplexMatrix factor = i == site ? local : ComplexMatrix::Identity(d, d);
    out = Eigen::kroneckerProduct(out, factor).eval();
  }
  return out;
}

}  // namespace pauli

}  // namespace thermolab
