#include "thermolab/completeness.hpp"

#include "thermolab/parallel.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <optional>

namespace thermolab {

ErgodicFamily ErgodicFamily::product_states(const ModelSpec& spec) {
  switch (spec.kind) {
    case ModelKind::FreeSpins:
      // ⟨n⟩ = (1 − m)/2 on diag((1+m)/2, (1−m)/2).
      return ErgodicFamily(spec, {0.5, -0.5, 0.0}, 1);
    case ModelKind::IsingChain:
      return ErgodicFamily(spec, {0.0, -spec.h, -spec.J}, 2);
    case ModelKind::CurieWeiss:
      return ErgodicFamily(spec, {0.0, -spec.h, -0.5 * spec.J}, 2);
    case ModelKind::TransverseIsing:
      break;
  }
  throw UsageError("product-state family is not defined for " + spec.describe() +
                   ": its energy density depends on more than the polarization");
}

double ErgodicFamily::density(std::size_t k, double m) const {
  if (k >= components_) throw UsageError("density component " + std::to_string(k) + " out of range");
  return k == 0 ? energy(m) : m;
}

double ErgodicFamily::entropy(double m) {
  if (!(m >= -1.0 && m <= 1.0)) throw DomainError("polarization " + std::to_string(m) + " outside [-1, 1]");
  double s = 0.0;
  const double p = 0.5 * (1.0 + m), q = 0.5 * (1.0 - m);
  if (p > 0.0) s -= p * (std::log1p(m) - std::numbers::ln2);
  if (q > 0.0) s -= q * (std::log1p(-m) - std::numbers::ln2);
  return s;
}

std::pair<double, double> ErgodicFamily::reachable(std::size_t k) const {
  if (k >= components_) throw UsageError("density component " + std::to_string(k) + " out of range");
  if (k == 1) return {-1.0, 1.0};
  double lo = std::min(energy(-1.0), energy(1.0));
  double hi = std::max(energy(-1.0), energy(1.0));
  if (c_[2] != 0.0) {
    const double vertex = -c_[1] / (2.0 * c_[2]);
    if (vertex > -1.0 && vertex < 1.0) {
      lo = std::min(lo, energy(vertex));
      hi = std::max(hi, energy(vertex));
    }
  }
  return {lo, hi};
}

namespace {

constexpr double kGolden = 0.6180339887498949;
constexpr double kIntervalSpan = 1e-3;

template <class F>
double golden_minimize(F&& f, double a, double b, double tol) {
  double c = b - kGolden * (b - a), d = a + kGolden * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kGolden * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kGolden * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

template <class F>
double bisect(F&& f, double lo, double hi) {
  double flo = f(lo);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

struct Candidate {
  double m;
  bool flat = false;
  std::pair<double, double> interval{};
};

[[noreturn]] void infeasible(const ErgodicFamily& family, const PartialThermoPoint& constraint) {
  std::vector<InfeasibleError::Range> ranges;
  std::string text;
  for (std::size_t k : constraint.specified_indices()) {
    const auto [lo, hi] = family.reachable(k);
    ranges.push_back({k, lo, hi});
    text += " q_" + std::to_string(k) + " in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]";
  }
  throw InfeasibleError("constraint " + constraint.to_string() + " is not attained by any product state; reachable:" +
                            text,
                        std::move(ranges));
}

// Points of [−1, 1] where e(m) = target, by scan and refinement.
std::vector<Candidate> energy_level_set(const ErgodicFamily& family, double target, const MaximizeOptions& opt) {
  const auto r = [&](double m) { return family.energy(m) - target; };
  const auto steps = static_cast<long>(std::ceil(1.0 / opt.scan_step));
  const long n = 2 * steps + 1;
  const auto grid = [&](long i) { return std::clamp(static_cast<double>(i - steps) / steps, -1.0, 1.0); };
  std::vector<double> res(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) res[static_cast<std::size_t>(i)] = r(grid(i));

  std::vector<Candidate> out;
  std::vector<bool> in_interval(static_cast<std::size_t>(n), false);

  // Runs of feasible scan points wider than kIntervalSpan: flat level sets.
  for (long i = 0; i < n;) {
    if (std::abs(res[static_cast<std::size_t>(i)]) > opt.tol) {
      ++i;
      continue;
    }
    long j = i;
    while (j + 1 < n && std::abs(res[static_cast<std::size_t>(j + 1)]) <= opt.tol) ++j;
    const double a = grid(i), b = grid(j);
    if (b - a > kIntervalSpan) {
      const double best = golden_minimize([](double m) { return -ErgodicFamily::entropy(m); }, a, b, opt.refine_tol);
      const double s = ErgodicFamily::entropy(best);
      const double probe_lo = std::max(a, best - 0.5 * kIntervalSpan);
      const double probe_hi = std::min(b, best + 0.5 * kIntervalSpan);
      Candidate c{best};
      if (ErgodicFamily::entropy(probe_lo) >= s - opt.tol && ErgodicFamily::entropy(probe_hi) >= s - opt.tol) {
        c.flat = true;
        double lo = best, hi = best;
        for (long k = i; k <= j; ++k)
          if (ErgodicFamily::entropy(grid(k)) >= s - opt.tol) {
            lo = std::min(lo, grid(k));
            hi = std::max(hi, grid(k));
          }
        c.interval = {lo, hi};
      }
      out.push_back(c);
      for (long k = i; k <= j; ++k) in_interval[static_cast<std::size_t>(k)] = true;
    }
    i = j + 1;
  }

  for (long i = 0; i < n; ++i) {
    const auto u = static_cast<std::size_t>(i);
    if (in_interval[u]) continue;
    if (res[u] == 0.0) {
      out.push_back({grid(i)});
      continue;
    }
    if (i + 1 < n && res[u + 1] != 0.0 && (res[u] < 0.0) != (res[u + 1] < 0.0)) {
      out.push_back({bisect(r, grid(i), grid(i + 1))});
      continue;
    }
    // Tangential contact: a local minimum of |r| that does not change sign.
    if (i > 0 && i + 1 < n && std::abs(res[u]) <= std::abs(res[u - 1]) && std::abs(res[u]) < std::abs(res[u + 1]) &&
        (res[u - 1] < 0.0) == (res[u] < 0.0) && (res[u + 1] < 0.0) == (res[u] < 0.0)) {
      const double m = golden_minimize([&](double x) { return std::abs(r(x)); }, grid(i - 1), grid(i + 1),
                                       opt.refine_tol);
      if (std::abs(r(m)) <= opt.tol) out.push_back({m});
    }
  }
  return out;
}

}  // namespace

MaximizerSet constrained_entropy_max(const ErgodicFamily& family, const PartialThermoPoint& constraint,
                                     const MaximizeOptions& options) {
  if (constraint.specified_count() == 0) throw UsageError("constraint must specify at least one component");
  if (constraint.components.size() > family.component_count())
    throw UsageError("constraint has " + std::to_string(constraint.components.size()) +
                     " components; the family has " + std::to_string(family.component_count()));
  if (!(options.tol > 0.0)) throw UsageError("tolerance must be positive");
  for (std::size_t k : constraint.specified_indices())
    if (!std::isfinite(*constraint.components[k])) throw DataError("constraint components must be finite");

  std::vector<Candidate> candidates;
  const auto& q = constraint.components;
  if (q.size() > 1 && q[1]) {
    // The polarization pins m.
    const double m = *q[1];
    if (m >= -1.0 - options.tol && m <= 1.0 + options.tol) candidates.push_back({std::clamp(m, -1.0, 1.0)});
  } else {
    candidates = energy_level_set(family, *q[0], options);
  }

  std::erase_if(candidates, [&](const Candidate& c) {
    for (std::size_t k : constraint.specified_indices())
      if (std::abs(family.density(k, c.m) - *q[k]) > options.tol) return true;
    return false;
  });
  if (candidates.empty()) infeasible(family, constraint);

  double best = -std::numeric_limits<double>::infinity();
  for (const auto& c : candidates) best = std::max(best, ErgodicFamily::entropy(c.m));

  std::vector<Candidate> optimal;
  for (const auto& c : candidates)
    if (ErgodicFamily::entropy(c.m) >= best - options.tol) optimal.push_back(c);
  std::sort(optimal.begin(), optimal.end(), [](const Candidate& a, const Candidate& b) { return a.m < b.m; });

  MaximizerSet out;
  out.constraint = constraint;
  out.entropy = best;
  bool flat = false;
  for (std::size_t i = 0; i < optimal.size();) {
    std::size_t j = i, pick = i;
    while (j + 1 < optimal.size() && optimal[j + 1].m - optimal[j].m <= options.merge_radius) {
      ++j;
      if (ErgodicFamily::entropy(optimal[j].m) > ErgodicFamily::entropy(optimal[pick].m)) pick = j;
    }
    out.maximizers.push_back(optimal[pick].m);
    for (std::size_t k = i; k <= j; ++k)
      if (optimal[k].flat) {
        flat = true;
        out.flat_intervals.push_back(optimal[k].interval);
      }
    i = j + 1;
  }
  out.multiplicity = flat ? kInfiniteMultiplicity : out.maximizers.size();
  return out;
}

CompletenessVerdict completeness_verdict(const ErgodicFamily& family, const std::vector<PartialThermoPoint>& constraints,
                                         const MaximizeOptions& options, std::size_t threads) {
  if (constraints.empty()) throw UsageError("completeness_verdict needs at least one constraint");
  CompletenessVerdict verdict;
  verdict.records.resize(constraints.size());
  parallel_for(constraints.size(), threads,
               [&](std::size_t i) { verdict.records[i] = constrained_entropy_max(family, constraints[i], options); });
  for (std::size_t i = 0; i < verdict.records.size(); ++i) {
    if (verdict.records[i].multiplicity != 1) verdict.complete = false;
    if (verdict.records[i].multiplicity > verdict.records[verdict.witness].multiplicity) verdict.witness = i;
  }
  return verdict;
}

std::string to_json(const CompletenessVerdict& verdict, const ErgodicFamily& family) {
  using nlohmann::json;
  json records = json::array();
  for (const auto& r : verdict.records) {
    json constraint = json::array();
    for (const auto& c : r.constraint.components) constraint.push_back(c ? json(*c) : json(nullptr));
    json rec{{"constraint", constraint},
             {"s", r.entropy},
             {"maximizers", r.maximizers},
             {"multiplicity", r.multiplicity == kInfiniteMultiplicity ? json("inf") : json(r.multiplicity)},
             {"verdict", r.unique() ? "unique" : "degenerate"}};
    if (!r.flat_intervals.empty()) {
      json iv = json::array();
      for (const auto& [a, b] : r.flat_intervals) iv.push_back({a, b});
      rec["flat_intervals"] = iv;
    }
    records.push_back(std::move(rec));
  }
  const json doc{{"family", ErgodicFamily::kind()},
                 {"model", family.spec().describe()},
                 {"verdict", verdict.complete ? "Complete" : "Incomplete"},
                 {"witness", verdict.witness},
                 {"records", records}};
  return doc.dump(2);
}

EntropyCurve entropy_curve(const ErgodicFamily& family, const std::vector<ThermoPoint>& grid,
                           const MaximizeOptions& options, std::size_t threads) {
  if (grid.empty()) throw UsageError("entropy_curve needs a non-empty grid");
  const std::size_t dim = grid.front().size();
  if (dim == 0 || dim > family.component_count())
    throw UsageError("grid points must have between 1 and " + std::to_string(family.component_count()) +
                     " components");
  for (const auto& p : grid)
    if (p.size() != dim) throw UsageError("grid points must all have the same number of components");

  std::vector<std::optional<double>> values(grid.size());
  std::vector<std::string> reasons(grid.size());
  parallel_for(grid.size(), threads, [&](std::size_t i) {
    PartialThermoPoint c;
    for (double v : grid[i].components) c.components.emplace_back(v);
    try {
      values[i] = constrained_entropy_max(family, c, options).entropy;
    } catch (const InfeasibleError& e) {
      reasons[i] = e.what();
    }
  });

  EntropyCurve out;
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (values[i])
      kept.push_back(i);
    else
      out.skipped.push_back({i, grid[i], reasons[i]});
  }
  if (kept.empty()) throw InfeasibleError("no grid point is feasible", {});

  if (dim == 1) std::sort(kept.begin(), kept.end(), [&](auto a, auto b) { return grid[a][0] < grid[b][0]; });
  std::vector<double> coords, vals;
  for (std::size_t i : kept) {
    coords.insert(coords.end(), grid[i].components.begin(), grid[i].components.end());
    vals.push_back(*values[i]);
  }
  out.samples = dim == 1 ? CurveSamples::on_axis(std::move(coords), std::move(vals), Orientation::Concave)
                         : CurveSamples::scattered(dim, std::move(coords), std::move(vals), Orientation::Concave);
  return out;
}

CurveSamples joint_entropy_curve(const ErgodicFamily& family, const std::vector<double>& m_grid) {
  if (m_grid.empty()) throw UsageError("joint_entropy_curve needs a non-empty polarization grid");
  for (double m : m_grid)
    if (!(m >= -1.0 && m <= 1.0)) throw DomainError("polarization " + std::to_string(m) + " outside [-1, 1]");

  if (family.component_count() == 1) {
    std::vector<std::size_t> order(m_grid.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](auto a, auto b) { return family.energy(m_grid[a]) < family.energy(m_grid[b]); });
    std::vector<double> e, s;
    for (std::size_t i : order) {
      e.push_back(family.energy(m_grid[i]));
      s.push_back(ErgodicFamily::entropy(m_grid[i]));
    }
    return CurveSamples::on_axis(std::move(e), std::move(s), Orientation::Concave);
  }
  std::vector<double> coords, s;
  for (double m : m_grid) {
    coords.push_back(family.energy(m));
    coords.push_back(m);
    s.push_back(ErgodicFamily::entropy(m));
  }
  return CurveSamples::scattered(2, std::move(coords), std::move(s), Orientation::Concave);
}

SlopeInterval entropy_slopes(const ErgodicFamily& family, double m, double spacing) {
  if (family.component_count() != 2) throw UsageError("entropy_slopes needs an (energy, magnetization) family");
  if (!(m > -1.0 && m < 1.0)) throw DomainError("entropy_slopes needs an interior polarization");
  if (!(spacing > 0.0)) throw UsageError("stencil spacing must be positive");
  const double h = std::min(spacing, (1.0 - std::abs(m)) / 32.0);
  std::vector<double> grid;
  for (int k = -2; k <= 2; ++k) grid.push_back(m + k * h);
  const CurveSamples along = along_coordinate(joint_entropy_curve(family, grid), 1);
  return tangent_set(along, m).slopes.at(0);
}

}  // namespace thermolab
