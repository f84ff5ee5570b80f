#pragma once

#include <Eigen/Dense>

#include <complex>
#include <functional>

namespace thermolab {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

/// Eigendecomposition of a hermitian operator, K = V diag(values) V†.
///
/// Diagonal operators skip the solver: `diagonal` is set, `vectors` stays
/// empty and the eigenbasis is the computational basis. Values are kept in
/// the order of the computational basis in that case, ascending otherwise.
struct HermitianSpectrum {
  RealVector values;
  ComplexMatrix vectors;
  bool diagonal = false;

  static HermitianSpectrum of_diagonal(RealVector diag);
  static HermitianSpectrum of_matrix(const ComplexMatrix& m);

  Eigen::Index dimension() const { return values.size(); }

  /// V† A V
  ComplexMatrix to_eigenbasis(const ComplexMatrix& a) const;
  /// V A V†
  ComplexMatrix from_eigenbasis(const ComplexMatrix& a) const;
  /// V f(λ) V† for a complex-valued scalar function.
  ComplexMatrix apply(const std::function<Complex(double)>& f) const;
};

/// ln Σ exp(x_i), shifted by max(x).
double log_sum_exp(const RealVector& x);

/// exp(x_i) / Σ exp(x_j), shifted by max(x).
RealVector softmax(const RealVector& x);

/// max_{ij} |a_ij|
double max_norm(const ComplexMatrix& a);

/// max_{ij} |a_ij - conj(a_ji)|
double hermiticity_defect(const ComplexMatrix& a);

/// Largest singular value.
double operator_norm(const ComplexMatrix& a);

ComplexMatrix dense_from_diagonal(const RealVector& diag);

}  // namespace thermolab
