#pragma once

#include "thermolab/spectral.hpp"

#include <random>

namespace thermolab {

/// Complex Ginibre matrix with standard normal real and imaginary parts.
inline ComplexMatrix random_complex_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  ComplexMatrix g(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r) {
      const double re = normal(rng);
      const double im = normal(rng);
      g(r, c) = Complex(re, im);
    }
  return g;
}

/// G G† / Tr(G G†): full-rank with probability one.
inline ComplexMatrix random_density_matrix(Eigen::Index dim, std::mt19937_64& rng) {
  const ComplexMatrix g = random_complex_matrix(dim, dim, rng);
  ComplexMatrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return 0.5 * (rho + rho.adjoint());
}

/// Hermitian matrix with operator norm 1.
inline ComplexMatrix random_hermitian(Eigen::Index dim, std::mt19937_64& rng) {
  const ComplexMatrix g = random_complex_matrix(dim, dim, rng);
  ComplexMatrix h = 0.5 * (g + g.adjoint());
  return h / operator_norm(h);
}

/// Arbitrary (non-normal) matrix with operator norm 1.
inline ComplexMatrix random_operator(Eigen::Index dim, std::mt19937_64& rng) {
  const ComplexMatrix g = random_complex_matrix(dim, dim, rng);
  return g / operator_norm(g);
}

}  // namespace thermolab
