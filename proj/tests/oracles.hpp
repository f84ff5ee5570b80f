#pragma once

// Reference values computed independently of the library: direct
// configuration enumeration, transfer matrices, closed forms and bisection.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace oracle {

inline double binary_entropy(double q) {
  double s = 0.0;
  if (q > 0.0) s -= q * std::log(q);
  if (q < 1.0) s -= (1.0 - q) * std::log(1.0 - q);
  return s;
}

/// Spin of site i in configuration x, site 0 most significant; bit 0 is up.
inline int spin(std::size_t x, std::size_t i, std::size_t n) { return ((x >> (n - 1 - i)) & 1u) ? -1 : 1; }

inline std::vector<double> ising_energies(std::size_t n, double J, double h, bool periodic) {
  std::vector<double> out;
  for (std::size_t x = 0; x < (std::size_t{1} << n); ++x) {
    double e = 0.0;
    const std::size_t bonds = periodic ? n : n - 1;
    for (std::size_t i = 0; i < bonds; ++i) e -= J * spin(x, i, n) * spin(x, (i + 1) % n, n);
    for (std::size_t i = 0; i < n; ++i) e -= h * spin(x, i, n);
    out.push_back(e);
  }
  return out;
}

inline std::vector<double> magnetizations(std::size_t n) {
  std::vector<double> out;
  for (std::size_t x = 0; x < (std::size_t{1} << n); ++x) {
    int m = 0;
    for (std::size_t i = 0; i < n; ++i) m += spin(x, i, n);
    out.push_back(m);
  }
  return out;
}

inline std::vector<double> curie_weiss_energies(std::size_t n, double J, double h) {
  std::vector<double> out;
  for (double m : magnetizations(n)) out.push_back(-J / (2.0 * static_cast<double>(n)) * m * m - h * m);
  return out;
}

/// N⁻¹ ln Σ_x exp(−θ_0 E(x) − θ_1 M(x)), summed naively in long double.
inline double enumerated_pressure(const std::vector<double>& e, const std::vector<double>& m, std::size_t n,
                                  double t0, double t1) {
  long double z = 0.0L;
  for (std::size_t x = 0; x < e.size(); ++x) z += std::exp(static_cast<long double>(-t0 * e[x] - t1 * m[x]));
  return static_cast<double>(std::log(z)) / static_cast<double>(n);
}

/// ln λ₊ of the periodic Ising transfer matrix at β = θ_0.
inline double ising_transfer_pressure(double beta, double J, double h) {
  const double lp = std::exp(beta * J) * std::cosh(beta * h) +
                    std::sqrt(std::exp(2 * beta * J) * std::sinh(beta * h) * std::sinh(beta * h) +
                              std::exp(-2 * beta * J));
  return std::log(lp);
}

/// Positive root of m = tanh(θ_0 J m) for θ_0 J > 1, by bisection.
inline double mean_field_magnetization(double theta0J) {
  double lo = 1e-12, hi = 1.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (mid < std::tanh(theta0J * mid) ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

/// max_m [η(m) − θ_0 e(m) − θ_1 m] for e(m) = c1 m + c2 m², by golden-section
/// on each side of every stationary bracket found on a coarse scan.
inline double mean_field_pressure(double c1, double c2, double t0, double t1) {
  const auto g = [&](double m) {
    return binary_entropy(0.5 * (1.0 + m)) - t0 * (c1 * m + c2 * m * m) - t1 * m;
  };
  double best = std::max(g(-1.0), g(1.0));
  const int n = 2000;
  for (int i = 0; i < n; ++i) {
    double a = -1.0 + 2.0 * i / n, b = -1.0 + 2.0 * (i + 1) / n;
    const double r = 0.6180339887498949;
    double c = b - r * (b - a), d = a + r * (b - a);
    for (int it = 0; it < 200 && b - a > 1e-15; ++it) {
      if (g(c) > g(d)) {
        b = d;
      } else {
        a = c;
      }
      c = b - r * (b - a);
      d = a + r * (b - a);
    }
    best = std::max(best, g(0.5 * (a + b)));
  }
  return best;
}

/// Least concave majorant at the sample points, by checking every chord.
inline std::vector<double> concave_envelope(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> out(y);
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t a = 0; a <= i; ++a)
      for (std::size_t b = i; b < x.size(); ++b) {
        if (a == b) continue;
        const double l = (x[b] - x[i]) / (x[b] - x[a]);
        out[i] = std::max(out[i], l * y[a] + (1.0 - l) * y[b]);
      }
  return out;
}

}  // namespace oracle
