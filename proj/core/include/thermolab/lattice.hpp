#pragma once

// Finite-region observable families: the finite-volume stand-ins for the
// extensive conserved observables Q̂(Λ) = (H(Λ), Q̂_1(Λ), …, Q̂_n(Λ)).
//
// Sites are ordered so that site 0 is the most significant tensor factor:
// basis index = Σ_i x_i d^{N-1-i}, local state 0 is spin up (σ_z = +1,
// occupation 0). Built-in families are diagonal in this basis, which makes
// every pair of observables commute by construction.

#include "thermolab/spectral.hpp"
#include "thermolab/thermo_types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace thermolab {

class KeyValueConfig;

enum class Geometry { Chain, CompleteGraph, SingleSites };
enum class Boundary { Periodic, Open };

const char* to_string(Geometry g) noexcept;
const char* to_string(Boundary b) noexcept;

/// A finite region Λ; its volume |Λ| is the number of sites.
struct Region {
  Geometry geometry = Geometry::Chain;
  std::size_t sites = 1;
  Boundary boundary = Boundary::Periodic;

  static Region chain(std::size_t n, Boundary b = Boundary::Periodic) { return {Geometry::Chain, n, b}; }
  static Region complete_graph(std::size_t n) { return {Geometry::CompleteGraph, n, Boundary::Periodic}; }
  static Region single_sites(std::size_t n) { return {Geometry::SingleSites, n, Boundary::Open}; }

  std::size_t volume() const noexcept { return sites; }
  /// Chains with periodic boundary, complete graphs and decoupled sites are
  /// invariant under cyclic site shifts.
  bool translation_invariant() const noexcept {
    return geometry != Geometry::Chain || boundary == Boundary::Periodic;
  }
  std::string describe() const;

  friend bool operator==(const Region&, const Region&) = default;
};

enum class ModelKind { FreeSpins, IsingChain, CurieWeiss, TransverseIsing };

const char* to_string(ModelKind k) noexcept;
ModelKind parse_model_kind(const std::string& s);

/// Concrete lattice models. Energies are in units absorbed into θ.
///  - free_spins:       H = Σ_i n_i,                                  family (H)
///  - ising_chain:      H = −J Σ σ^z_i σ^z_{i+1} − h Σ σ^z_i,         family (H, M)
///  - curie_weiss:      H = −(J / 2N) (Σ σ^z_i)² − h Σ σ^z_i,         family (H, M)
///  - transverse_ising: H = −J Σ σ^z_i σ^z_{i+1} − g Σ σ^x_i,         family (H) only,
///    since H and M do not commute once g ≠ 0.
struct ModelSpec {
  ModelKind kind = ModelKind::FreeSpins;
  double J = 1.0;
  double h = 0.0;
  double g = 0.0;

  static ModelSpec free_spins() { return {ModelKind::FreeSpins, 0.0, 0.0, 0.0}; }
  static ModelSpec ising_chain(double J, double h) { return {ModelKind::IsingChain, J, h, 0.0}; }
  static ModelSpec curie_weiss(double J, double h) { return {ModelKind::CurieWeiss, J, h, 0.0}; }
  static ModelSpec transverse_ising(double J, double g) { return {ModelKind::TransverseIsing, J, 0.0, g}; }

  /// Number of observables n + 1 in the family this model builds.
  std::size_t observable_count() const noexcept;
  /// Natural region for this model: chains for Ising kinds, the complete
  /// graph for Curie–Weiss and decoupled sites for free spins.
  Region default_region(std::size_t sites, Boundary boundary = Boundary::Periodic) const;
  std::string describe() const;

  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

/// A model spec plus the region it is built on, as read from key=value text.
struct ModelConfig {
  ModelSpec spec;
  Region region;
};

/// Reads `model`, `J`, `h`, `g`, `N`, `boundary` keys.
ModelConfig model_config_from(const KeyValueConfig& config);

/// A hermitian operator on the region's Hilbert space, stored as its
/// diagonal when it is diagonal in the product basis.
class Observable {
 public:
  static Observable diagonal(std::string label, RealVector diag);
  static Observable dense(std::string label, ComplexMatrix matrix);

  const std::string& label() const noexcept { return label_; }
  bool is_diagonal() const noexcept { return is_diagonal_; }
  Eigen::Index dimension() const noexcept { return is_diagonal_ ? diag_.size() : dense_.rows(); }
  /// Only valid for diagonal observables.
  const RealVector& diagonal_values() const;
  ComplexMatrix to_dense() const;

 private:
  std::string label_;
  bool is_diagonal_ = true;
  RealVector diag_;
  ComplexMatrix dense_;
};

/// Intercommuting, linearly independent hermitian observables (Q̂_0 = H, …)
/// on one region. Immutable after construction.
class ObservableFamily {
 public:
  ObservableFamily(Region region, std::size_t local_dimension, std::vector<Observable> observables,
                   std::optional<ModelSpec> spec = std::nullopt);

  const Region& region() const noexcept { return region_; }
  std::size_t local_dimension() const noexcept { return local_dimension_; }
  std::size_t dimension() const noexcept { return dimension_; }
  std::size_t size() const noexcept { return observables_.size(); }
  const Observable& operator[](std::size_t k) const { return observables_.at(k); }
  const std::vector<Observable>& observables() const noexcept { return observables_; }
  const std::optional<ModelSpec>& spec() const noexcept { return spec_; }
  bool all_diagonal() const noexcept;

  /// Spectral decomposition of θ·Q̂ = Σ_k θ_k Q̂_k.
  HermitianSpectrum generator_spectrum(const ControlVector& theta) const;
  /// θ·Q̂ as a dense matrix.
  ComplexMatrix generator(const ControlVector& theta) const;
  /// Tr(ρ Q̂_k) for a density matrix ρ.
  double expectation(std::size_t k, const ComplexMatrix& rho) const;

  void check_control(const ControlVector& theta) const;

 private:
  Region region_;
  std::size_t local_dimension_;
  std::size_t dimension_;
  std::vector<Observable> observables_;
  std::optional<ModelSpec> spec_;
};

struct BuildOptions {
  std::size_t max_dimension = std::size_t{1} << 14;
  /// Families with non-diagonal observables are stored densely.
  std::size_t max_dense_dimension = std::size_t{1} << 11;
};

/// Hilbert-space dimension local_dimension^sites; ResourceError above the cap.
std::size_t checked_dimension(std::size_t local_dimension, std::size_t sites, std::size_t cap);

ObservableFamily build_model(const ModelSpec& spec, const Region& region, const BuildOptions& options = {});

/// Cyclic site shift σ(x): site i → i + x (mod N), as a basis permutation.
class Translation {
 public:
  Translation(std::size_t sites, std::size_t local_dimension, long shift);

  long shift() const noexcept { return shift_; }
  /// Image of a basis index under the shift.
  std::size_t map(std::size_t index) const { return permutation_[index]; }
  const std::vector<std::size_t>& permutation() const noexcept { return permutation_; }

  /// U A U†
  ComplexMatrix conjugate(const ComplexMatrix& a) const;
  RealVector conjugate_diagonal(const RealVector& d) const;
  ComplexMatrix unitary() const;

 private:
  long shift_;
  std::vector<std::size_t> permutation_;
};

struct StructureReport {
  double max_commutator = 0.0;
  double max_hermiticity_defect = 0.0;
  double gram_min_eigenvalue = 0.0;
  /// max_k ‖σ(1) Q̂_k σ(1)⁻¹ − Q̂_k‖_max; absent on open chains.
  std::optional<double> translation_defect;
  /// Sites in the first block of the extensivity split.
  std::size_t split = 0;
  /// Per observable ‖Q̂(A∪B) − (Q̂(A)⊗I + I⊗Q̂(B))‖_max. For interacting
  /// models this is the norm of the boundary term, not a failure.
  std::vector<double> extensivity_defect;

  /// Commutation, hermiticity and independence at the family tolerances.
  bool invariants_hold() const noexcept {
    return max_commutator <= 1e-12 && max_hermiticity_defect <= 1e-12 && gram_min_eigenvalue > 1e-10;
  }
};

/// Structural checks; defects are reported, never thrown. The extensivity
/// split needs a built-in family (sub-regions are rebuilt from its spec) and
/// defaults to ⌊N/2⌋ sites in the first block.
StructureReport verify_family(const ObservableFamily& family, std::optional<std::size_t> split = std::nullopt);

/// Pauli and identity helpers for tests, probes and custom families.
namespace pauli {
ComplexMatrix identity();
ComplexMatrix x();
ComplexMatrix y();
ComplexMatrix z();
/// Embeds a single-site operator at `site` of an N-site register.
ComplexMatrix embed(const ComplexMatrix& local, std::size_t site, std::size_t sites);
}  // namespace pauli

}  // namespace thermolab
