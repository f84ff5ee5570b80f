#include "thermolab/convex.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace thermolab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_strictly_increasing(const std::vector<double>& axis, const char* what) {
  for (std::size_t i = 0; i < axis.size(); ++i) {
    if (!std::isfinite(axis[i])) throw DataError(std::string(what) + ": grid coordinates must be finite");
    if (i > 0 && !(axis[i] > axis[i - 1])) throw DataError(std::string(what) + ": grid must be strictly increasing");
  }
}

void check_values(const CurveSamples& f) {
  if (f.empty()) throw UsageError("operation needs non-empty samples");
  for (double v : f.values())
    if (!std::isfinite(v)) throw DataError("sample values must be finite");
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

double tie_tolerance(double v) { return 1e-12 * std::max(1.0, std::abs(v)); }

// Position of q on a strictly increasing axis: either a node, or the segment
// (lo, lo + 1) containing it.
struct AxisLocation {
  std::size_t lo = 0;
  bool node = false;
};

AxisLocation locate(const std::vector<double>& axis, double q) {
  const double span = axis.back() - axis.front();
  const double eps = 1e-12 * std::max(1.0, span);
  if (q < axis.front() - eps || q > axis.back() + eps)
    throw DomainError("point " + std::to_string(q) + " lies outside the sampled hull [" +
                      std::to_string(axis.front()) + ", " + std::to_string(axis.back()) + "]");
  auto it = std::lower_bound(axis.begin(), axis.end(), q);
  std::size_t i = static_cast<std::size_t>(it - axis.begin());
  // Snap to the nearest node when within relative rounding of it.
  auto near = [&](std::size_t j) {
    const double h = axis.size() > 1 ? (j + 1 < axis.size() ? axis[j + 1] - axis[j] : axis[j] - axis[j - 1]) : 1.0;
    return std::abs(axis[j] - q) <= 1e-9 * h;
  };
  if (i < axis.size() && near(i)) return {i, true};
  if (i > 0 && near(i - 1)) return {i - 1, true};
  if (i == 0) return {0, true};
  if (i >= axis.size()) return {axis.size() - 1, true};
  return {i - 1, false};
}

// Three-point one-sided derivative at x0 from samples at x0, x0 ± h1, x0 ± (h1 + h2).
double one_sided_derivative(double f0, double f1, double f2, double h1, double h2) {
  return -(2 * h1 + h2) / (h1 * (h1 + h2)) * f0 + (h1 + h2) / (h1 * h2) * f1 - h1 / (h2 * (h1 + h2)) * f2;
}

// Second difference (≈ f'') at node j of a 1-D line of samples.
double second_difference(const std::vector<double>& x, const std::vector<double>& v, std::size_t j) {
  const double hl = x[j] - x[j - 1];
  const double hr = x[j + 1] - x[j];
  return 2.0 * ((v[j + 1] - v[j]) / hr - (v[j] - v[j - 1]) / hl) / (hl + hr);
}

struct LineSlopes {
  SlopeInterval interval;
  bool supported = true;
  double default_tol = 0.0;
};

// Slopes at position q along one line of samples (x strictly increasing).
LineSlopes line_slopes(const std::vector<double>& x, const std::vector<double>& v, double q, Orientation orient) {
  LineSlopes out;
  const std::size_t n = x.size();
  if (n < 2) {
    // A single sample supports every slope.
    out.interval = {-kInf, kInf, 0.0, 0.0};
    out.default_tol = 0.0;
    return out;
  }
  const AxisLocation loc = locate(x, q);
  auto chord = [&](std::size_t a) { return (v[a + 1] - v[a]) / (x[a + 1] - x[a]); };

  if (!loc.node) {
    const double c = chord(loc.lo);
    out.interval = {c, c, c, c};
    out.default_tol = 1e-12 * std::max(1.0, std::abs(c));
    return out;
  }

  const std::size_t i = loc.lo;
  const bool has_left = i > 0;
  const bool has_right = i + 1 < n;
  const double left_chord = has_left ? chord(i - 1) : 0.0;
  const double right_chord = has_right ? chord(i) : 0.0;

  double left_d = left_chord;
  double right_d = right_chord;
  if (i >= 2) {
    const double h1 = x[i] - x[i - 1];
    const double h2 = x[i - 1] - x[i - 2];
    // Mirror of the forward formula: derivative along −x, negated.
    left_d = -one_sided_derivative(v[i], v[i - 1], v[i - 2], h1, h2);
  }
  if (i + 2 < n) {
    const double h1 = x[i + 1] - x[i];
    const double h2 = x[i + 2] - x[i + 1];
    right_d = one_sided_derivative(v[i], v[i + 1], v[i + 2], h1, h2);
  }
  if (!has_left) left_d = orient == Orientation::Concave ? kInf : -kInf;
  if (!has_right) right_d = orient == Orientation::Concave ? -kInf : kInf;

  // Concave: superdifferential [right chord, left chord]; convex: [left, right].
  double lower, upper;
  if (orient == Orientation::Concave) {
    lower = has_right ? right_chord : -kInf;
    upper = has_left ? left_chord : kInf;
  } else {
    lower = has_left ? left_chord : -kInf;
    upper = has_right ? right_chord : kInf;
  }
  if (lower > upper) {
    out.supported = false;
    std::swap(lower, upper);
  }
  out.interval = {lower, upper, left_d, right_d};

  // Curvature scale from the neighbouring second differences that do not
  // use the chord pair meeting at q.
  double curvature = 0.0;
  if (i >= 2) curvature = std::max(curvature, std::abs(second_difference(x, v, i - 1)));
  if (i + 2 < n) curvature = std::max(curvature, std::abs(second_difference(x, v, i + 1)));
  double spacing = 0.0;
  if (has_left) spacing = std::max(spacing, x[i] - x[i - 1]);
  if (has_right) spacing = std::max(spacing, x[i + 1] - x[i]);
  const double slope_scale = std::max({1.0, std::abs(left_chord), std::abs(right_chord)});
  out.default_tol = std::max(10.0 * spacing * curvature, 1e-9 * slope_scale);
  return out;
}

TangentSet slopes_at(const CurveSamples& f, std::span<const double> q, std::optional<double> tol) {
  check_values(f);
  if (q.size() != f.dimension())
    throw UsageError("point dimension " + std::to_string(q.size()) + " does not match samples (" +
                     std::to_string(f.dimension()) + ")");
  if (!f.is_grid()) throw UsageError("tangent sets need an axis or product-grid layout");

  TangentSet ts;
  ts.point.assign(q.begin(), q.end());
  const auto& axes = f.axes();
  const std::size_t m = f.dimension();

  std::vector<AxisLocation> locs(m);
  for (std::size_t k = 0; k < m; ++k) locs[k] = locate(axes[k], q[k]);
  if (m > 1)
    for (std::size_t k = 0; k < m; ++k)
      if (!locs[k].node) throw UsageError("multi-dimensional tangent sets are evaluated at grid nodes only");

  double default_tol = 0.0;
  std::vector<std::size_t> multi(m);
  for (std::size_t k = 0; k < m; ++k) multi[k] = locs[k].lo;
  for (std::size_t k = 0; k < m; ++k) {
    std::vector<double> line(axes[k].size());
    std::vector<std::size_t> idx = multi;
    for (std::size_t j = 0; j < axes[k].size(); ++j) {
      idx[k] = j;
      line[j] = f.value(f.flat_index(idx));
    }
    const LineSlopes ls = line_slopes(axes[k], line, q[k], f.orientation());
    ts.slopes.push_back(ls.interval);
    ts.supported = ts.supported && ls.supported;
    default_tol = std::max(default_tol, ls.default_tol);
  }
  ts.tolerance = tol.value_or(default_tol);
  return ts;
}

}  // namespace

const char* to_string(Orientation o) noexcept { return o == Orientation::Concave ? "concave" : "convex"; }

Orientation parse_orientation(const std::string& s) {
  if (s == "concave") return Orientation::Concave;
  if (s == "convex") return Orientation::Convex;
  throw DataError("unknown orientation '" + s + "'");
}

std::string PartialThermoPoint::to_string() const {
  std::ostringstream os;
  os.precision(17);
  os << '(';
  for (std::size_t k = 0; k < components.size(); ++k) {
    if (k) os << ", ";
    if (components[k])
      os << *components[k];
    else
      os << '*';
  }
  os << ')';
  return os.str();
}

// ---------------------------------------------------------------------------
// CurveSamples

CurveSamples CurveSamples::on_axis(std::vector<double> grid, std::vector<double> values, Orientation orientation) {
  std::vector<std::vector<double>> axes;
  axes.push_back(std::move(grid));
  return on_product_grid(std::move(axes), std::move(values), orientation);
}

CurveSamples CurveSamples::on_product_grid(std::vector<std::vector<double>> axes, std::vector<double> values,
                                           Orientation orientation) {
  if (axes.empty()) throw UsageError("product grid needs at least one axis");
  std::size_t count = 1;
  for (const auto& a : axes) {
    check_strictly_increasing(a, "product grid");
    count *= a.size();
  }
  if (count != values.size())
    throw DataError("product grid has " + std::to_string(count) + " nodes but " + std::to_string(values.size()) +
                    " values");
  CurveSamples c;
  c.dimension_ = axes.size();
  c.values_ = std::move(values);
  c.orientation_ = orientation;
  c.coordinates_.resize(count * c.dimension_);
  std::vector<std::size_t> multi(c.dimension_, 0);
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t k = 0; k < c.dimension_; ++k) c.coordinates_[i * c.dimension_ + k] = axes[k][multi[k]];
    for (std::size_t k = c.dimension_; k-- > 0;) {
      if (++multi[k] < axes[k].size()) break;
      multi[k] = 0;
    }
  }
  c.axes_ = std::move(axes);
  return c;
}

CurveSamples CurveSamples::scattered(std::size_t dimension, std::vector<double> coordinates, std::vector<double> values,
                                     Orientation orientation) {
  if (dimension == 0) throw UsageError("sample dimension must be positive");
  if (coordinates.size() != dimension * values.size())
    throw DataError("scattered samples: coordinate count does not match values");
  for (double x : coordinates)
    if (!std::isfinite(x)) throw DataError("scattered samples: coordinates must be finite");
  if (dimension == 1) return on_axis(std::move(coordinates), std::move(values), orientation);

  // Pairwise distinct points.
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::lexicographical_compare(coordinates.begin() + a * dimension, coordinates.begin() + (a + 1) * dimension,
                                        coordinates.begin() + b * dimension, coordinates.begin() + (b + 1) * dimension);
  });
  for (std::size_t j = 1; j < order.size(); ++j)
    if (std::equal(coordinates.begin() + order[j] * dimension, coordinates.begin() + (order[j] + 1) * dimension,
                   coordinates.begin() + order[j - 1] * dimension))
      throw DataError("scattered samples: duplicate point");

  CurveSamples c;
  c.dimension_ = dimension;
  c.coordinates_ = std::move(coordinates);
  c.values_ = std::move(values);
  c.orientation_ = orientation;
  return c;
}

CurveSamples CurveSamples::tabulate(std::vector<double> grid, const std::function<double(double)>& f,
                                    Orientation orientation) {
  std::vector<double> values(grid.size());
  std::transform(grid.begin(), grid.end(), values.begin(), f);
  return on_axis(std::move(grid), std::move(values), orientation);
}

std::size_t CurveSamples::flat_index(std::span<const std::size_t> multi) const {
  std::size_t idx = 0;
  for (std::size_t k = 0; k < axes_.size(); ++k) idx = idx * axes_[k].size() + multi[k];
  return idx;
}

CurveSamples CurveSamples::negated() const {
  CurveSamples c = *this;
  for (double& v : c.values_) v = -v;
  c.orientation_ = orientation_ == Orientation::Concave ? Orientation::Convex : Orientation::Concave;
  return c;
}

// ---------------------------------------------------------------------------
// Conjugation

ConjugateValue conjugate_with_support(const CurveSamples& f, std::span<const double> x) {
  check_values(f);
  if (x.size() != f.dimension()) throw UsageError("dual point dimension does not match samples");
  for (double c : x)
    if (!std::isfinite(c)) throw DataError("dual point must be finite");

  const bool concave = f.orientation() == Orientation::Concave;
  const std::size_t n = f.size();
  std::vector<double> scores(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double xq = dot(x, f.point(i));
    scores[i] = concave ? f.value(i) - xq : f.value(i) + xq;
  }
  ConjugateValue out;
  out.value = concave ? *std::max_element(scores.begin(), scores.end())
                      : *std::min_element(scores.begin(), scores.end());
  const double eps = tie_tolerance(out.value);
  for (std::size_t i = 0; i < n; ++i)
    if (std::abs(scores[i] - out.value) <= eps) out.attaining.push_back(i);
  return out;
}

double conjugate(const CurveSamples& f, std::span<const double> x) { return conjugate_with_support(f, x).value; }

double conjugate(const CurveSamples& f, double x) { return conjugate(f, std::span<const double>(&x, 1)); }

CurveSamples conjugate_curve(const CurveSamples& f, std::vector<double> dual_grid) {
  std::vector<std::vector<double>> axes;
  axes.push_back(std::move(dual_grid));
  return conjugate_curve(f, std::move(axes));
}

CurveSamples conjugate_curve(const CurveSamples& f, std::vector<std::vector<double>> dual_axes) {
  if (dual_axes.size() != f.dimension()) throw UsageError("dual grid dimension does not match samples");
  const Orientation flipped = f.orientation() == Orientation::Concave ? Orientation::Convex : Orientation::Concave;
  // Build an empty-valued grid first to enumerate the dual points.
  std::size_t count = 1;
  for (const auto& a : dual_axes) count *= a.size();
  CurveSamples grid = CurveSamples::on_product_grid(dual_axes, std::vector<double>(count, 0.0), flipped);
  std::vector<double> values(count);
  for (std::size_t j = 0; j < count; ++j) values[j] = conjugate(f, grid.point(j));
  return CurveSamples::on_product_grid(std::move(dual_axes), std::move(values), flipped);
}

// ---------------------------------------------------------------------------
// Tangent sets

double SlopeInterval::kink_width() const noexcept {
  if (!std::isfinite(left_derivative) || !std::isfinite(right_derivative)) return kInf;
  return std::abs(left_derivative - right_derivative);
}

double TangentSet::max_width() const noexcept {
  double w = 0.0;
  for (const auto& s : slopes) w = std::max(w, s.width());
  return w;
}

double TangentSet::max_kink_width() const noexcept {
  double w = 0.0;
  for (const auto& s : slopes) w = std::max(w, s.kink_width());
  return w;
}

TangentSet tangent_set(const CurveSamples& f, std::span<const double> q, std::optional<double> tol) {
  if (f.orientation() != Orientation::Concave) throw UsageError("tangent_set expects concave samples");
  return slopes_at(f, q, tol);
}

TangentSet tangent_set(const CurveSamples& f, double q, std::optional<double> tol) {
  return tangent_set(f, std::span<const double>(&q, 1), tol);
}

TangentSet subdifferential(const CurveSamples& f, std::span<const double> q, std::optional<double> tol) {
  if (f.orientation() != Orientation::Convex) throw UsageError("subdifferential expects convex samples");
  return slopes_at(f, q, tol);
}

TangentSet subdifferential(const CurveSamples& f, double q, std::optional<double> tol) {
  return subdifferential(f, std::span<const double>(&q, 1), tol);
}

double support_defect(const CurveSamples& f, std::span<const double> q, double f_at_q,
                      std::span<const double> theta) {
  check_values(f);
  const double sign = f.orientation() == Orientation::Concave ? 1.0 : -1.0;
  double worst = -kInf;
  std::vector<double> diff(f.dimension());
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto p = f.point(i);
    for (std::size_t k = 0; k < diff.size(); ++k) diff[k] = p[k] - q[k];
    worst = std::max(worst, sign * ((f.value(i) - f_at_q) - dot(theta, diff)));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Concavity

std::vector<ConcavityViolation> concavity_violations(const CurveSamples& f, double tol) {
  std::vector<ConcavityViolation> out;
  if (f.size() < 3) return out;
  const double sign = f.orientation() == Orientation::Concave ? 1.0 : -1.0;

  auto check = [&](std::size_t a, std::size_t b, std::size_t c, double lambda) {
    const double chord = lambda * f.value(a) + (1.0 - lambda) * f.value(c);
    const double defect = sign * (chord - f.value(b));
    if (defect > tol) out.push_back({{a, b, c}, defect});
  };

  if (f.is_grid()) {
    const auto& axes = f.axes();
    const std::size_t m = axes.size();
    std::vector<std::size_t> multi(m, 0);
    for (std::size_t i = 0; i < f.size(); ++i) {
      for (std::size_t k = 0; k < m; ++k) {
        const std::size_t j = multi[k];
        if (j == 0 || j + 1 >= axes[k].size()) continue;
        std::vector<std::size_t> left = multi, right = multi;
        --left[k];
        ++right[k];
        const double lambda = (axes[k][j + 1] - axes[k][j]) / (axes[k][j + 1] - axes[k][j - 1]);
        check(f.flat_index(left), i, f.flat_index(right), lambda);
      }
      for (std::size_t k = m; k-- > 0;) {
        if (++multi[k] < axes[k].size()) break;
        multi[k] = 0;
      }
    }
    return out;
  }

  // Scattered: consecutive triples that are collinear with b between a and c.
  const std::size_t m = f.dimension();
  for (std::size_t b = 1; b + 1 < f.size(); ++b) {
    const auto pa = f.point(b - 1), pb = f.point(b), pc = f.point(b + 1);
    double ac2 = 0.0, proj = 0.0, scale = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      ac2 += (pc[k] - pa[k]) * (pc[k] - pa[k]);
      proj += (pb[k] - pa[k]) * (pc[k] - pa[k]);
      scale = std::max({scale, std::abs(pa[k]), std::abs(pc[k])});
    }
    if (ac2 == 0.0) continue;
    const double t = proj / ac2;  // b = a + t (c − a)
    if (t <= 0.0 || t >= 1.0) continue;
    double off = 0.0;
    for (std::size_t k = 0; k < m; ++k) off = std::max(off, std::abs(pa[k] + t * (pc[k] - pa[k]) - pb[k]));
    if (off > 1e-12 * std::max(1.0, scale)) continue;
    check(b - 1, b, b + 1, 1.0 - t);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Biconjugation

namespace {

// Slopes of the upper (concave) envelope edges of 1-D samples.
std::vector<double> envelope_slopes(const CurveSamples& f) {
  std::vector<std::size_t> hull;
  for (std::size_t i = 0; i < f.size(); ++i) {
    while (hull.size() >= 2) {
      const std::size_t a = hull[hull.size() - 2], b = hull.back();
      const double xa = f.coordinate(a, 0), xb = f.coordinate(b, 0), xi = f.coordinate(i, 0);
      // Drop b when it lies on or below the chord a → i.
      const double cross = (xb - xa) * (f.value(i) - f.value(a)) - (f.value(b) - f.value(a)) * (xi - xa);
      if (cross >= 0.0)
        hull.pop_back();
      else
        break;
    }
    hull.push_back(i);
  }
  std::vector<double> slopes;
  for (std::size_t j = 1; j < hull.size(); ++j) {
    const std::size_t a = hull[j - 1], b = hull[j];
    slopes.push_back((f.value(b) - f.value(a)) / (f.coordinate(b, 0) - f.coordinate(a, 0)));
  }
  if (slopes.empty()) slopes.push_back(0.0);
  return slopes;
}

}  // namespace

CurveSamples biconjugate(const CurveSamples& f) {
  check_values(f);
  if (f.orientation() != Orientation::Concave) throw UsageError("biconjugate expects concave samples");
  if (f.dimension() != 1 || !f.is_grid())
    throw UsageError("biconjugate without an explicit dual grid is defined for 1-D axes");

  const std::vector<double> slopes = envelope_slopes(f);
  std::vector<double> dual_values(slopes.size());
  for (std::size_t j = 0; j < slopes.size(); ++j) dual_values[j] = conjugate(f, slopes[j]);

  std::vector<double> values(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double q = f.coordinate(i, 0);
    double best = kInf;
    for (std::size_t j = 0; j < slopes.size(); ++j) best = std::min(best, dual_values[j] + slopes[j] * q);
    values[i] = best;
  }
  return CurveSamples::on_axis(f.axes()[0], std::move(values), Orientation::Concave);
}

CurveSamples biconjugate(const CurveSamples& f, std::vector<std::vector<double>> dual_axes) {
  check_values(f);
  if (f.orientation() != Orientation::Concave) throw UsageError("biconjugate expects concave samples");
  const CurveSamples dual = conjugate_curve(f, std::move(dual_axes));
  std::vector<double> values(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) values[i] = conjugate(dual, f.point(i));
  if (f.is_grid()) return CurveSamples::on_product_grid(f.axes(), std::move(values), Orientation::Concave);
  return CurveSamples::scattered(f.dimension(), f.coordinates(), std::move(values), Orientation::Concave);
}

CurveSamples along_coordinate(const CurveSamples& f, std::size_t k) {
  if (k >= f.dimension()) throw UsageError("coordinate index out of range");
  std::vector<double> grid(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) grid[i] = f.coordinate(i, k);
  return CurveSamples::on_axis(std::move(grid), f.values(), f.orientation());
}

}  // namespace thermolab
