#include "thermolab/experiment.hpp"

#include "thermolab/completeness.hpp"
#include "thermolab/convex.hpp"
#include "thermolab/gibbs.hpp"
#include "thermolab/kms.hpp"
#include "thermolab/lattice.hpp"
#include "thermolab/parallel.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <sstream>

#ifndef THERMOLAB_VERSION
#define THERMOLAB_VERSION "0.0.0"
#endif

namespace thermolab {

using nlohmann::json;

const char* library_version() noexcept { return THERMOLAB_VERSION; }

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names{"pressure",     "entropy-curve", "legendre",
                                              "completeness", "kms-verify",    "diff-test"};
  return names;
}

ExperimentConfig ExperimentConfig::make(std::string subcommand, KeyValueConfig values) {
  const auto& names = subcommands();
  if (std::find(names.begin(), names.end(), subcommand) == names.end())
    throw UsageError("unknown subcommand '" + subcommand + "'");
  ExperimentConfig cfg;
  cfg.subcommand = std::move(subcommand);
  const long seed = values.get_int("seed", 0);
  if (seed < 0) throw ConfigError("seed", values.line_of("seed"), "seed must be non-negative");
  const long threads = values.get_int("threads", 1);
  if (threads < 1) throw ConfigError("threads", values.line_of("threads"), "threads must be at least 1");
  cfg.seed = static_cast<std::uint64_t>(seed);
  cfg.threads = static_cast<std::size_t>(threads);
  cfg.values = std::move(values);
  return cfg;
}

std::string Manifest::to_json() const {
  json cfg = json::object();
  for (const auto& e : config) cfg[e.key] = e.value;
  json arts = json::array();
  for (const auto& a : artifacts) arts.push_back({{"path", a.path}, {"kind", a.kind}, {"rows", a.rows}});
  const json doc{{"subcommand", subcommand},
                 {"config", cfg},
                 {"seed", seed},
                 {"version", version},
                 {"artifacts", arts},
                 {"wall_ms", wall_ms},
                 {"checks_passed", checks_passed},
                 {"summary", json::parse(summary_json)}};
  return doc.dump(2) + "\n";
}

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const std::set<std::string> kCommonKeys{"model", "J", "h", "g", "N", "boundary", "seed", "threads"};

std::set<std::string> keys_for(const std::string& sub) {
  static const std::map<std::string, std::set<std::string>> extra{
      {"pressure", {"theta_0", "theta_1", "sizes", "extrapolation", "prony_order"}},
      {"entropy-curve", {"curve", "e", "m"}},
      {"legendre", {"source", "curve", "e", "m", "theta_0", "theta_1", "q"}},
      {"completeness", {"constraint", "e", "m", "tol"}},
      {"kms-verify", {"theta_0", "theta_1", "t", "sigma_w", "tolerance", "smeared_tolerance"}},
      {"diff-test", {"theta_0", "theta_1", "m_step", "width_m_step", "width_m_max"}},
  };
  std::set<std::string> keys = kCommonKeys;
  const auto& e = extra.at(sub);
  keys.insert(e.begin(), e.end());
  return keys;
}

// Writes artifacts under one directory and records them for the manifest.
class Writer {
 public:
  Writer(const ExperimentConfig& cfg, Manifest& manifest) : cfg_(cfg), manifest_(manifest) {
    std::error_code ec;
    std::filesystem::create_directories(cfg.out_dir, ec);
    if (ec || !std::filesystem::is_directory(cfg.out_dir))
      throw ResourceError("cannot create output directory '" + cfg.out_dir.string() + "'");
    header_.push_back(std::string("thermolab ") + library_version() + " " + cfg.subcommand);
    header_.push_back("seed=" + std::to_string(cfg.seed));
    for (const auto& e : cfg.values.entries()) header_.push_back("config " + e.key + "=" + e.value);
  }

  void note(std::string line) { header_.push_back(std::move(line)); }
  const std::vector<std::string>& header() const noexcept { return header_; }

  void table(const std::string& name, const std::vector<std::string>& columns,
             const std::vector<std::vector<std::string>>& rows) {
    std::ofstream out = open(name);
    for (const auto& h : header_) out << "# " << h << '\n';
    join(out, columns);
    for (const auto& r : rows) join(out, r);
    finish(out, name, "csv", rows.size());
  }

  void curve(const std::string& name, const CurveSamples& samples) {
    std::ofstream out = open(name);
    write_csv(out, samples, header_);
    finish(out, name, "csv", samples.size());
  }

  void document(const std::string& name, const std::string& text, std::size_t rows) {
    std::ofstream out = open(name);
    out << text;
    if (text.empty() || text.back() != '\n') out << '\n';
    finish(out, name, "json", rows);
  }

 private:
  std::ofstream open(const std::string& name) const {
    std::ofstream out(cfg_.out_dir / name, std::ios::binary);
    if (!out) throw ResourceError("cannot write '" + (cfg_.out_dir / name).string() + "'");
    return out;
  }
  void finish(std::ofstream& out, const std::string& name, const char* kind, std::size_t rows) {
    out.flush();
    if (!out) throw ResourceError("write failed for '" + name + "'");
    manifest_.artifacts.push_back({name, kind, rows});
  }
  static void join(std::ostream& out, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) out << (i ? "," : "") << fields[i];
    out << '\n';
  }

  const ExperimentConfig& cfg_;
  Manifest& manifest_;
  std::vector<std::string> header_;
};

// Cartesian product of the theta_k lists; theta_1 defaults to {0}.
std::vector<ControlVector> theta_grid(const KeyValueConfig& v, std::size_t components) {
  const std::vector<double> t0 = v.get_doubles("theta_0");
  if (components == 1) {
    if (v.has("theta_1")) throw ConfigError("theta_1", v.line_of("theta_1"), "this model has a single observable");
    std::vector<ControlVector> out;
    for (double a : t0) out.push_back(ControlVector{a});
    return out;
  }
  const std::vector<double> t1 = v.get_doubles("theta_1", {0.0});
  std::vector<ControlVector> out;
  for (double a : t0)
    for (double b : t1) out.push_back(ControlVector{a, b});
  return out;
}

std::vector<std::string> theta_columns(std::size_t n) {
  std::vector<std::string> cols;
  for (std::size_t k = 0; k < n; ++k) cols.push_back("theta_" + std::to_string(k));
  return cols;
}

void append_theta(std::vector<std::string>& row, const ControlVector& theta) {
  for (double c : theta.components()) row.push_back(num(c));
}

std::string product_state_note() {
  return "family=product_states: entropy maximized over translation-invariant product states only";
}

ErgodicFamily ergodic_family(const KeyValueConfig& v, const ModelSpec& spec) {
  try {
    return ErgodicFamily::product_states(spec);
  } catch (const UsageError& e) {
    throw ConfigError("model", v.line_of("model"), e.what());
  }
}

// s(q) for entropy-curve and legendre: joint (e, m) locus or energy-only grid.
struct CurveResult {
  CurveSamples samples;
  std::vector<SkippedPoint> skipped;
  std::string layout;
};

CurveResult entropy_samples(const ExperimentConfig& cfg, const ErgodicFamily& family) {
  const KeyValueConfig& v = cfg.values;
  const std::string layout = v.get_string("curve", family.component_count() == 2 ? "joint" : "energy");
  if (layout == "joint") {
    std::vector<double> m;
    if (v.has("m")) {
      m = v.get_doubles("m");
    } else {
      for (int i = -100; i <= 100; ++i) m.push_back(i / 100.0);
    }
    return {joint_entropy_curve(family, m), {}, layout};
  }
  if (layout != "energy") throw ConfigError("curve", v.line_of("curve"), "expected joint or energy");
  std::vector<double> e;
  if (v.has("e")) {
    e = v.get_doubles("e");
  } else {
    const auto [lo, hi] = family.reachable(0);
    for (int i = 0; i <= 200; ++i) e.push_back(lo + (hi - lo) * i / 200.0);
  }
  std::vector<ThermoPoint> grid;
  for (double x : e) grid.push_back({{x}});
  EntropyCurve c = entropy_curve(family, grid, {}, cfg.threads);
  return {std::move(c.samples), std::move(c.skipped), layout};
}

void write_skipped(Writer& w, const std::vector<SkippedPoint>& skipped) {
  if (skipped.empty()) return;
  std::vector<std::vector<std::string>> rows;
  for (const auto& s : skipped) {
    std::string point;
    for (std::size_t k = 0; k < s.point.size(); ++k) point += (k ? ";" : "") + num(s.point[k]);
    std::string reason = s.reason;
    std::replace(reason.begin(), reason.end(), ',', ';');
    rows.push_back({std::to_string(s.index), point, reason});
  }
  w.table("entropy_curve_skipped.csv", {"index", "point", "reason"}, rows);
}

// --- subcommands ----------------------------------------------------------

void run_pressure(const ExperimentConfig& cfg, Writer& w, json& summary) {
  const KeyValueConfig& v = cfg.values;
  const ModelConfig mc = model_config_from(v);
  const std::vector<ControlVector> thetas = theta_grid(v, mc.spec.observable_count());
  std::vector<std::size_t> sizes;
  for (long n : v.get_ints("sizes", {})) {
    if (n < 1) throw ConfigError("sizes", v.line_of("sizes"), "sizes must be positive");
    sizes.push_back(static_cast<std::size_t>(n));
  }
  PressureLimitOptions opts;
  opts.boundary = mc.region.boundary;
  try {
    opts.mode = parse_extrapolation_mode(v.get_string("extrapolation", "affine"));
  } catch (const UsageError& e) {
    throw ConfigError("extrapolation", v.line_of("extrapolation"), e.what());
  }
  const long order = v.get_int("prony_order", 0);
  if (order < 0) throw ConfigError("prony_order", v.line_of("prony_order"), "must be non-negative");
  opts.prony_order = static_cast<std::size_t>(order);
  if (!sizes.empty() && sizes.size() < 3) throw ConfigError("sizes", v.line_of("sizes"), "need at least 3 sizes");

  std::vector<PressureEstimate> results(thetas.size());
  if (sizes.empty()) {
    const ObservableFamily family = build_model(mc.spec, mc.region);
    parallel_for(thetas.size(), cfg.threads, [&](std::size_t i) {
      const double phi = finite_pressure(family, thetas[i]);
      results[i].value = phi;
      results[i].per_size = {{mc.region.volume(), phi}};
    });
  } else {
    parallel_for(thetas.size(), cfg.threads,
                 [&](std::size_t i) { results[i] = pressure_limit(mc.spec, thetas[i], sizes, opts); });
    w.note(std::string("extrapolation=") + to_string(opts.mode));
  }

  std::vector<std::string> cols = theta_columns(mc.spec.observable_count());
  cols.insert(cols.end(), {"N", "phi_N", "value", "extrapolation_error"});
  std::vector<std::vector<std::string>> rows, detail;
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    const auto& [n, phi] = results[i].per_size.back();
    std::vector<std::string> row;
    append_theta(row, thetas[i]);
    row.insert(row.end(), {std::to_string(n), num(phi), num(results[i].value), num(results[i].extrapolation_error)});
    rows.push_back(std::move(row));
    for (const auto& [m, p] : results[i].per_size) {
      std::vector<std::string> d;
      append_theta(d, thetas[i]);
      d.insert(d.end(), {std::to_string(m), num(p)});
      detail.push_back(std::move(d));
    }
  }
  w.table("pressure.csv", cols, rows);
  if (!sizes.empty()) {
    std::vector<std::string> dcols = theta_columns(mc.spec.observable_count());
    dcols.insert(dcols.end(), {"N", "phi_N"});
    w.table("pressure_per_size.csv", dcols, detail);
  }
  summary["points"] = thetas.size();
  if (thetas.size() == 1) summary["value"] = results[0].value;
}

void run_entropy_curve(const ExperimentConfig& cfg, Writer& w, json& summary) {
  const ModelConfig mc = model_config_from(cfg.values);
  const ErgodicFamily family = ergodic_family(cfg.values, mc.spec);
  w.note(product_state_note());
  const CurveResult c = entropy_samples(cfg, family);
  w.curve("entropy_curve.csv", c.samples);
  write_skipped(w, c.skipped);
  summary["layout"] = c.layout;
  summary["points"] = c.samples.size();
  summary["skipped"] = c.skipped.size();
  summary["concavity_violations"] = concavity_violations(c.samples, 1e-9).size();
}

void run_legendre(const ExperimentConfig& cfg, Writer& w, json& summary) {
  const KeyValueConfig& v = cfg.values;
  const ModelConfig mc = model_config_from(v);
  const std::string source = v.get_string("source", "entropy");
  if (source == "entropy") {
    const ErgodicFamily family = ergodic_family(v, mc.spec);
    w.note(product_state_note());
    const CurveResult s = entropy_samples(cfg, family);
    write_skipped(w, s.skipped);
    std::vector<std::vector<double>> dual{v.get_doubles("theta_0")};
    if (s.samples.dimension() == 2) dual.push_back(v.get_doubles("theta_1", {0.0}));
    else if (v.has("theta_1"))
      throw ConfigError("theta_1", v.line_of("theta_1"), "the entropy curve has a single coordinate");
    const CurveSamples phi = s.samples.dimension() == 1 ? conjugate_curve(s.samples, dual[0])
                                                        : conjugate_curve(s.samples, dual);
    w.curve("legendre.csv", phi);
    summary["direction"] = "entropy->pressure";
    summary["points"] = phi.size();
    if (s.samples.dimension() == 1) {
      const CurveSamples env = biconjugate(s.samples);
      double defect = 0.0;
      for (std::size_t i = 0; i < env.size(); ++i) defect = std::max(defect, std::abs(env.value(i) - s.samples.value(i)));
      w.curve("biconjugate.csv", env);
      summary["biconjugate_defect"] = defect;
    }
    return;
  }
  if (source != "pressure") throw ConfigError("source", v.line_of("source"), "expected entropy or pressure");

  // φ_N along θ_0 (other components fixed), conjugated to s on a q grid.
  const ObservableFamily family = build_model(mc.spec, mc.region);
  const std::vector<double> t0 = v.get_doubles("theta_0");
  std::vector<double> rest;
  if (mc.spec.observable_count() == 2) {
    const auto t1 = v.get_doubles("theta_1", {0.0});
    if (t1.size() != 1) throw ConfigError("theta_1", v.line_of("theta_1"), "source=pressure takes a single theta_1");
    rest.push_back(t1[0]);
  }
  std::vector<double> phi(t0.size());
  parallel_for(t0.size(), cfg.threads, [&](std::size_t i) {
    std::vector<double> th{t0[i]};
    th.insert(th.end(), rest.begin(), rest.end());
    phi[i] = finite_pressure(family, ControlVector(th));
  });
  const CurveSamples p = CurveSamples::on_axis(t0, phi, Orientation::Convex);
  const CurveSamples s = conjugate_curve(p, v.get_doubles("q"));
  w.curve("pressure_samples.csv", p);
  w.curve("legendre.csv", s);
  summary["direction"] = "pressure->entropy";
  summary["points"] = s.size();
}

void run_completeness(const ExperimentConfig& cfg, Writer& w, json& summary) {
  const KeyValueConfig& v = cfg.values;
  const ModelConfig mc = model_config_from(v);
  const ErgodicFamily family = ergodic_family(v, mc.spec);
  w.note(product_state_note());
  MaximizeOptions opts;
  opts.tol = v.get_double("tol", opts.tol);
  if (!(opts.tol > 0.0)) throw ConfigError("tol", v.line_of("tol"), "tolerance must be positive");

  const std::string kind = v.get_string("constraint", "energy");
  std::vector<PartialThermoPoint> constraints;
  if (kind == "energy") {
    for (double e : v.get_doubles("e")) constraints.push_back(PartialThermoPoint::energy(e));
  } else if (kind == "joint") {
    if (family.component_count() < 2)
      throw ConfigError("constraint", v.line_of("constraint"), "joint constraints need a two-component family");
    const std::vector<double> m = v.get_doubles("m");
    std::vector<double> e;
    if (v.has("e")) {
      e = v.get_doubles("e");
      if (e.size() != m.size()) throw ConfigError("e", v.line_of("e"), "e and m lists must have equal length");
    } else {
      for (double x : m) e.push_back(family.energy(x));
    }
    for (std::size_t i = 0; i < m.size(); ++i) constraints.push_back(PartialThermoPoint::energy_magnetization(e[i], m[i]));
  } else {
    throw ConfigError("constraint", v.line_of("constraint"), "expected energy or joint");
  }

  const CompletenessVerdict verdict = completeness_verdict(family, constraints, opts, cfg.threads);
  w.document("completeness.json", to_json(verdict, family), verdict.records.size());

  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < verdict.records.size(); ++i) {
    const auto& r = verdict.records[i];
    const auto& c = r.constraint.components;
    std::string maxi;
    for (std::size_t k = 0; k < r.maximizers.size(); ++k) maxi += (k ? ";" : "") + num(r.maximizers[k]);
    rows.push_back({std::to_string(i), c[0] ? num(*c[0]) : "", c.size() > 1 && c[1] ? num(*c[1]) : "", num(r.entropy),
                    r.multiplicity == kInfiniteMultiplicity ? "inf" : std::to_string(r.multiplicity), maxi});
  }
  w.table("completeness.csv", {"index", "e", "m", "s", "multiplicity", "maximizers"}, rows);
  summary["verdict"] = verdict.complete ? "Complete" : "Incomplete";
  summary["witness"] = verdict.witness;
  const auto mult = verdict.records[verdict.witness].multiplicity;
  summary["max_multiplicity"] = mult == kInfiniteMultiplicity ? json("inf") : json(mult);
}

bool run_kms(const ExperimentConfig& cfg, Writer& w, json& summary) {
  const KeyValueConfig& v = cfg.values;
  const ModelConfig mc = model_config_from(v);
  const ObservableFamily family = build_model(mc.spec, mc.region);
  const std::vector<ControlVector> thetas = theta_grid(v, family.size());
  const std::vector<double> times = v.get_doubles("t", {0.0, 0.7, 2.5, 10.0});
  const double tol = v.get_double("tolerance", 1e-9);
  const std::vector<TestOperator> ops = default_probe_operators(family, cfg.seed);
  w.note("probes: Pauli operators at site 0 and a random hermitian operator seeded by seed");

  std::vector<std::unique_ptr<KmsContext>> contexts(thetas.size());
  parallel_for(thetas.size(), cfg.threads,
               [&](std::size_t i) { contexts[i] = std::make_unique<KmsContext>(family, thetas[i]); });

  const std::size_t pairs = ops.size() * ops.size();
  const std::size_t count = thetas.size() * pairs * times.size();
  std::vector<double> residual(count);
  const auto decode = [&](std::size_t idx) {
    const std::size_t ti = idx % times.size();
    const std::size_t pi = (idx / times.size()) % pairs;
    const std::size_t th = idx / (times.size() * pairs);
    return std::array<std::size_t, 4>{th, pi / ops.size(), pi % ops.size(), ti};
  };
  parallel_for(count, cfg.threads, [&](std::size_t idx) {
    const auto [th, a, b, ti] = decode(idx);
    residual[idx] = contexts[th]->residual(ops[a].matrix, ops[b].matrix, times[ti]);
  });

  const std::string model = to_string(mc.spec.kind);
  const std::string n = std::to_string(mc.region.volume());
  std::vector<std::string> cols{"model", "N"};
  const auto tcols = theta_columns(family.size());
  cols.insert(cols.end(), tcols.begin(), tcols.end());
  cols.insert(cols.end(), {"A", "B", "t", "residual"});
  std::vector<std::vector<std::string>> rows;
  double worst = 0.0;
  for (std::size_t idx = 0; idx < count; ++idx) {
    const auto [th, a, b, ti] = decode(idx);
    std::vector<std::string> row{model, n};
    append_theta(row, thetas[th]);
    row.insert(row.end(), {ops[a].label, ops[b].label, num(times[ti]), num(residual[idx])});
    rows.push_back(std::move(row));
    worst = std::max(worst, residual[idx]);
  }
  w.table("kms.csv", cols, rows);
  summary["max_residual"] = worst;
  summary["tolerance"] = tol;
  bool ok = worst <= tol;

  if (v.has("sigma_w")) {
    const TestFunction f = TestFunction::gaussian(v.get_double("sigma_w"));
    const double smeared_tol = v.get_double("smeared_tolerance", 1e-7);
    std::vector<double> smeared(thetas.size() * pairs);
    std::vector<Quadrature> quad(thetas.size());
    for (std::size_t i = 0; i < thetas.size(); ++i) quad[i] = Quadrature::automatic(f, contexts[i]->spread());
    parallel_for(smeared.size(), cfg.threads, [&](std::size_t idx) {
      const std::size_t th = idx / pairs, pi = idx % pairs;
      smeared[idx] = contexts[th]->smeared_residual(ops[pi / ops.size()].matrix, ops[pi % ops.size()].matrix, f,
                                                    quad[th]);
    });
    std::vector<std::string> scols{"model", "N"};
    scols.insert(scols.end(), tcols.begin(), tcols.end());
    scols.insert(scols.end(), {"A", "B", "sigma_w", "quadrature_step", "residual"});
    std::vector<std::vector<std::string>> srows;
    double sworst = 0.0;
    for (std::size_t idx = 0; idx < smeared.size(); ++idx) {
      const std::size_t th = idx / pairs, pi = idx % pairs;
      std::vector<std::string> row{model, n};
      append_theta(row, thetas[th]);
      row.insert(row.end(), {ops[pi / ops.size()].label, ops[pi % ops.size()].label, num(f.width()),
                             num(quad[th].step), num(smeared[idx])});
      srows.push_back(std::move(row));
      sworst = std::max(sworst, smeared[idx]);
    }
    w.table("kms_smeared.csv", scols, srows);
    summary["test_function"] = "gaussian";
    summary["max_smeared_residual"] = sworst;
    summary["smeared_tolerance"] = smeared_tol;
    ok = ok && sworst <= smeared_tol;
  }
  return ok;
}

void run_diff_test(const ExperimentConfig& cfg, Writer& w, json& summary) {
  const KeyValueConfig& v = cfg.values;
  const ModelConfig mc = model_config_from(v);
  const ErgodicFamily family = ergodic_family(v, mc.spec);
  if (family.component_count() != 2)
    throw ConfigError("model", v.line_of("model"), "diff-test needs an (energy, magnetization) family");
  w.note(product_state_note());

  const double m_step = v.get_double("m_step", 1e-5);
  if (!(m_step > 0.0 && m_step <= 0.5)) throw ConfigError("m_step", v.line_of("m_step"), "expected 0 < m_step <= 0.5");
  const auto m_count = static_cast<long>(std::ceil(1.0 / m_step));
  std::vector<double> m_grid;
  for (long i = -m_count; i <= m_count; ++i) m_grid.push_back(static_cast<double>(i) / static_cast<double>(m_count));
  const CurveSamples joint = joint_entropy_curve(family, m_grid);

  std::vector<double> t1;
  if (v.has("theta_1")) {
    t1 = v.get_doubles("theta_1");
  } else {
    for (int i = -50; i <= 50; ++i) t1.push_back(i * 1e-3);
  }
  if (t1.size() < 3) throw ConfigError("theta_1", v.line_of("theta_1"), "need at least 3 points");
  const std::size_t zero = static_cast<std::size_t>(
      std::min_element(t1.begin(), t1.end(), [](double a, double b) { return std::abs(a) < std::abs(b); }) -
      t1.begin());

  const std::vector<double> t0 = v.get_doubles("theta_0", {3.0});
  json kinks = json::array();
  std::vector<std::vector<std::string>> rows;
  for (double theta0 : t0) {
    std::vector<double> phi(t1.size());
    parallel_for(t1.size(), cfg.threads,
                 [&](std::size_t i) { phi[i] = conjugate(joint, std::vector<double>{theta0, t1[i]}); });
    for (std::size_t i = 0; i < t1.size(); ++i) rows.push_back({num(theta0), num(t1[i]), num(phi[i])});
    const CurveSamples along = CurveSamples::on_axis(t1, phi, Orientation::Convex);
    const TangentSet sub = subdifferential(along, t1[zero]);
    const SlopeInterval& s = sub.slopes.at(0);
    kinks.push_back({{"theta_0", theta0},
                     {"theta_1", t1[zero]},
                     {"slope_left", s.lower},
                     {"slope_right", s.upper},
                     {"slope_gap", s.width()},
                     {"left_derivative", s.left_derivative},
                     {"right_derivative", s.right_derivative},
                     {"kink_width", s.kink_width()},
                     {"differentiable", sub.differentiable()}});
  }
  w.table("diff_test.csv", {"theta_0", "theta_1", "phi"}, rows);

  // Tangent widths of s along the polarization at the interior nodes of the
  // width grid, optionally restricted to |m| <= width_m_max.
  const double wm_step = v.get_double("width_m_step", 1e-3);
  const double wm_max = v.get_double("width_m_max", 1.0);
  if (!(wm_step > 0.0 && wm_step <= 0.5) || !(wm_max > 0.0 && wm_max <= 1.0))
    throw ConfigError("width_m_step", v.line_of("width_m_step"),
                      "expected 0 < width_m_step <= 0.5 and 0 < width_m_max <= 1");
  const auto wn = static_cast<long>(std::floor(1.0 / wm_step + 1e-9));
  std::vector<double> wgrid;
  for (long i = -wn; i <= wn; ++i) {
    const double m = static_cast<double>(i) * wm_step;
    if (std::abs(m) < 1.0 && std::abs(m) <= wm_max) wgrid.push_back(m);
  }
  std::vector<SlopeInterval> widths(wgrid.size());
  parallel_for(wgrid.size(), cfg.threads,
               [&](std::size_t i) { widths[i] = entropy_slopes(family, wgrid[i], wm_step); });
  double max_kink = 0.0, max_chord = 0.0;
  for (const auto& sl : widths) {
    max_kink = std::max(max_kink, sl.kink_width());
    max_chord = std::max(max_chord, sl.width());
  }
  const json record{{"kinks", kinks},
                    {"tangent_width", {{"m_step", wm_step}, {"m_max", wm_max}, {"points", wgrid.size()}, {"max_kink_width", max_kink},
                                       {"max_chord_width", max_chord}}}};
  w.document("kink.json", record.dump(2), kinks.size());
  summary["pressure_kink"] = kinks;
  summary["tangent_width"] = record["tangent_width"];
}

}  // namespace

Manifest run(const ExperimentConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  config.values.require_known(keys_for(config.subcommand));

  Manifest manifest;
  manifest.subcommand = config.subcommand;
  manifest.config = config.values.entries();
  manifest.seed = config.seed;
  manifest.version = library_version();

  Writer writer(config, manifest);
  json summary = json::object();
  const std::string& sub = config.subcommand;
  if (sub == "pressure")
    run_pressure(config, writer, summary);
  else if (sub == "entropy-curve")
    run_entropy_curve(config, writer, summary);
  else if (sub == "legendre")
    run_legendre(config, writer, summary);
  else if (sub == "completeness")
    run_completeness(config, writer, summary);
  else if (sub == "kms-verify")
    manifest.checks_passed = run_kms(config, writer, summary);
  else if (sub == "diff-test")
    run_diff_test(config, writer, summary);
  else
    throw UsageError("unknown subcommand '" + sub + "'");

  manifest.summary_json = summary.dump();
  manifest.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  std::ofstream out(config.out_dir / "manifest.json", std::ios::binary);
  if (!out) throw ResourceError("cannot write manifest.json");
  out << manifest.to_json();
  return manifest;
}

}  // namespace thermolab
