#pragma once

// Convex analysis on sampled functions: Legendre-Fenchel conjugates between
// entropy (concave) and reduced pressure (convex), tangent sets and
// differentiability diagnostics. Everything is exact for the piecewise-linear
// interpolant of the samples; nothing is extrapolated beyond the grid hull.

#include "thermolab/thermo_types.hpp"

#include <array>
#include <functional>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace thermolab {

enum class Orientation { Concave, Convex };

const char* to_string(Orientation o) noexcept;
Orientation parse_orientation(const std::string& s);

/// Samples of an entropy-like (concave) or pressure-like (convex) function.
///
/// Three layouts are supported:
///  - a single strictly increasing axis (m = 1),
///  - a product grid, values in row-major order over the axes,
///  - a scattered point list, for curves that live on a lower-dimensional
///    manifold of ℝ^m (e.g. the joint (energy, magnetization) curve).
/// Tangent sets need neighbour structure and are only available on the
/// first two layouts.
class CurveSamples {
 public:
  CurveSamples() = default;

  static CurveSamples on_axis(std::vector<double> grid, std::vector<double> values, Orientation orientation);
  static CurveSamples on_product_grid(std::vector<std::vector<double>> axes, std::vector<double> values,
                                      Orientation orientation);
  static CurveSamples scattered(std::size_t dimension, std::vector<double> coordinates, std::vector<double> values,
                                Orientation orientation);
  static CurveSamples tabulate(std::vector<double> grid, const std::function<double(double)>& f,
                               Orientation orientation);

  std::size_t dimension() const noexcept { return dimension_; }
  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }

  std::span<const double> point(std::size_t i) const { return {coordinates_.data() + i * dimension_, dimension_}; }
  double coordinate(std::size_t i, std::size_t k) const { return coordinates_[i * dimension_ + k]; }
  double value(std::size_t i) const { return values_[i]; }
  const std::vector<double>& values() const noexcept { return values_; }
  const std::vector<double>& coordinates() const noexcept { return coordinates_; }
  Orientation orientation() const noexcept { return orientation_; }

  bool is_grid() const noexcept { return !axes_.empty(); }
  const std::vector<std::vector<double>>& axes() const noexcept { return axes_; }
  /// Flat index of a multi-index on a product grid.
  std::size_t flat_index(std::span<const std::size_t> multi) const;

  /// Same samples with values negated and orientation flipped.
  CurveSamples negated() const;

 private:
  std::size_t dimension_ = 1;
  std::vector<double> coordinates_;
  std::vector<double> values_;
  std::vector<std::vector<double>> axes_;
  Orientation orientation_ = Orientation::Concave;
};

/// Conjugate value plus every grid index attaining the sup/inf.
struct ConjugateValue {
  double value = 0.0;
  std::vector<std::size_t> attaining;
};

/// Discrete Legendre-Fenchel conjugate at a dual point x.
///
/// Concave f (entropy → pressure): sup_i (f_i − x·q_i).
/// Convex f (pressure → entropy): inf_i (f_i + x·q_i).
ConjugateValue conjugate_with_support(const CurveSamples& f, std::span<const double> x);
double conjugate(const CurveSamples& f, std::span<const double> x);
double conjugate(const CurveSamples& f, double x);

/// Conjugate sampled on a 1-D dual grid (for m = 1) or a dual product grid.
/// Orientation of the result is flipped.
CurveSamples conjugate_curve(const CurveSamples& f, std::vector<double> dual_grid);
CurveSamples conjugate_curve(const CurveSamples& f, std::vector<std::vector<double>> dual_axes);

/// Supporting slopes along one coordinate.
///
/// [lower, upper] is the super- (concave) or sub-differential (convex) of the
/// piecewise-linear interpolant, built from the two adjacent chord slopes; it
/// is unbounded on the open side at a grid edge. left/right_derivative are
/// second-order one-sided derivative estimates, whose gap removes the O(h)
/// chord spread of smooth functions and isolates genuine kinks.
struct SlopeInterval {
  double lower = 0.0;
  double upper = 0.0;
  double left_derivative = 0.0;
  double right_derivative = 0.0;

  double width() const noexcept { return upper - lower; }
  double kink_width() const noexcept;
};

struct TangentSet {
  std::vector<double> point;
  std::vector<SlopeInterval> slopes;
  double tolerance = 0.0;
  /// False when the chords are locally non-concave (non-convex), i.e. the
  /// piecewise-linear interpolant has no supporting hyperplane at the point.
  bool supported = true;

  double max_width() const noexcept;
  double max_kink_width() const noexcept;
  /// Numerical differentiability: every kink width ≤ tolerance.
  bool differentiable() const noexcept { return supported && max_kink_width() <= tolerance; }
};

/// Tangent set T_s(q) of a concave sample set. `tol` defaults to
/// 10 × local spacing × local curvature, with curvature read from the
/// neighbouring second differences that do not straddle q.
TangentSet tangent_set(const CurveSamples& f, std::span<const double> q, std::optional<double> tol = {});
TangentSet tangent_set(const CurveSamples& f, double q, std::optional<double> tol = {});

/// Subdifferential of a convex sample set; same construction as tangent_set.
TangentSet subdifferential(const CurveSamples& f, std::span<const double> q, std::optional<double> tol = {});
TangentSet subdifferential(const CurveSamples& f, double q, std::optional<double> tol = {});

/// Largest violation of the support inequality f(q') − f(q) ≤ θ·(q' − q)
/// (concave; reversed for convex) over all samples q'. ≤ 0 means θ supports f at q.
double support_defect(const CurveSamples& f, std::span<const double> q, double f_at_q, std::span<const double> theta);

struct ConcavityViolation {
  std::array<std::size_t, 3> indices{};
  double defect = 0.0;
};

/// Adjacent triples (a, b, c) with b on the segment [a, c] where the chord
/// inequality fails by more than tol (concave: chord − f(b); convex: f(b) − chord).
std::vector<ConcavityViolation> concavity_violations(const CurveSamples& f, double tol);

/// Double conjugate of a concave 1-D sample set: its concave envelope at the
/// grid points. The dual grid is the set of envelope edge slopes, which makes
/// the result exact for the piecewise-linear interpolant.
CurveSamples biconjugate(const CurveSamples& f);

/// Double conjugate through an explicit dual grid (any dimension).
CurveSamples biconjugate(const CurveSamples& f, std::vector<std::vector<double>> dual_axes);

/// Projects a scattered curve onto coordinate k, which must be strictly
/// increasing along the samples. Used to study a curve along its free parameter.
CurveSamples along_coordinate(const CurveSamples& f, std::size_t k);

/// CSV with a `# orientation=...` header and columns q_0,…,q_{m-1},value.
void write_csv(std::ostream& out, const CurveSamples& f, std::span<const std::string> extra_header = {});
CurveSamples read_csv(std::istream& in);

}  // namespace thermolab
