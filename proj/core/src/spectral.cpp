#include "thermolab/spectral.hpp"

#include "thermolab/errors.hpp"

#include <cmath>
#include <limits>

namespace thermolab {

HermitianSpectrum HermitianSpectrum::of_diagonal(RealVector diag) {
  HermitianSpectrum s;
  s.values = std::move(diag);
  s.diagonal = true;
  return s;
}

HermitianSpectrum HermitianSpectrum::of_matrix(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) throw UsageError("spectral decomposition needs a square matrix");
  // Symmetrize so tiny anti-hermitian noise does not leak into the solver.
  const ComplexMatrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h);
  if (solver.info() != Eigen::Success) throw DataError("hermitian eigensolver did not converge");
  HermitianSpectrum s;
  s.values = solver.eigenvalues();
  s.vectors = solver.eigenvectors();
  return s;
}

ComplexMatrix HermitianSpectrum::to_eigenbasis(const ComplexMatrix& a) const {
  if (diagonal) return a;
  return vectors.adjoint() * a * vectors;
}

ComplexMatrix HermitianSpectrum::from_eigenbasis(const ComplexMatrix& a) const {
  if (diagonal) return a;
  return vectors * a * vectors.adjoint();
}

ComplexMatrix HermitianSpectrum::apply(const std::function<Complex(double)>& f) const {
  const Eigen::Index n = dimension();
  Eigen::VectorXcd fv(n);
  for (Eigen::Index i = 0; i < n; ++i) fv(i) = f(values(i));
  if (diagonal) return fv.asDiagonal();
  return vectors * fv.asDiagonal() * vectors.adjoint();
}

double log_sum_exp(const RealVector& x) {
  if (x.size() == 0) return -std::numeric_limits<double>::infinity();
  const double shift = x.maxCoeff();
  if (!std::isfinite(shift)) return shift;
  return shift + std::log((x.array() - shift).exp().sum());
}

RealVector softmax(const RealVector& x) {
  const double shift = x.maxCoeff();
  RealVector w = (x.array() - shift).exp();
  return w / w.sum();
}

double max_norm(const ComplexMatrix& a) {
  if (a.size() == 0) return 0.0;
  return a.cwiseAbs().maxCoeff();
}

double hermiticity_defect(const ComplexMatrix& a) {
  if (a.rows() != a.cols()) return std::numeric_limits<double>::infinity();
  return max_norm(a - a.adjoint());
}

double operator_norm(const ComplexMatrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<ComplexMatrix> svd(a);
  return svd.singularValues()(0);
}

ComplexMatrix dense_from_diagonal(const RealVector& diag) {
  return diag.cast<Complex>().asDiagonal();
}

}  // namespace thermolab
