#include "oracles.hpp"

#include "thermolab/completeness.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace thermolab;

namespace {

ErgodicFamily cw(double J = 1.0, double h = 0.0) { return ErgodicFamily::product_states(ModelSpec::curie_weiss(J, h)); }

}  // namespace

TEST_SUITE("completeness") {
  TEST_CASE("product-state family densities") {
    const auto f = cw(1.0, 0.3);
    CHECK(f.energy(0.5) == doctest::Approx(-0.125 - 0.15));
    CHECK(ErgodicFamily::entropy(0.0) == doctest::Approx(std::numbers::ln2).epsilon(1e-15));
    CHECK(ErgodicFamily::entropy(1.0) == 0.0);
    CHECK(ErgodicFamily::entropy(-1.0) == 0.0);
    CHECK(ErgodicFamily::entropy(0.5) == doctest::Approx(oracle::binary_entropy(0.75)).epsilon(1e-15));
    CHECK_THROWS_AS(ErgodicFamily::entropy(1.01), DomainError);
    CHECK_THROWS_AS(ErgodicFamily::product_states(ModelSpec::transverse_ising(1, 1)), UsageError);

    const auto [lo, hi] = f.reachable(0);
    CHECK(lo == doctest::Approx(-0.8));
    CHECK(hi == doctest::Approx(0.045).epsilon(1e-12));  // vertex at m = −0.3

    const auto spins = ErgodicFamily::product_states(ModelSpec::free_spins());
    CHECK(spins.component_count() == 1);
    CHECK(spins.energy(1.0) == 0.0);
    CHECK(spins.energy(-1.0) == 1.0);
  }

  TEST_CASE("energy-only constraint has two opposite maximizers") {
    const auto r = constrained_entropy_max(cw(), PartialThermoPoint::energy(-0.125));
    REQUIRE(r.multiplicity == 2);
    CHECK(r.maximizers[0] == doctest::Approx(-0.5).epsilon(1e-10));
    CHECK(r.maximizers[1] == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(r.entropy == doctest::Approx(0.5623351446188083).epsilon(1e-12));
  }

  TEST_CASE("zero energy has the unique symmetric maximizer") {
    const auto r = constrained_entropy_max(cw(), PartialThermoPoint::energy(0.0));
    REQUIRE(r.multiplicity == 1);
    CHECK(std::abs(r.maximizers[0]) <= 1e-6);
    CHECK(r.entropy == doctest::Approx(std::numbers::ln2).epsilon(1e-10));
  }

  TEST_CASE("joint constraint pins the polarization") {
    const auto r = constrained_entropy_max(cw(), PartialThermoPoint::energy_magnetization(-0.125, 0.5));
    REQUIRE(r.multiplicity == 1);
    CHECK(r.maximizers[0] == 0.5);
  }

  TEST_CASE("fully polarized energy") {
    const auto r = constrained_entropy_max(cw(), PartialThermoPoint::energy(-0.5));
    CHECK(r.multiplicity == 2);
    CHECK(r.entropy == 0.0);
  }

  TEST_CASE("infeasible constraints report the reachable range") {
    try {
      constrained_entropy_max(cw(), PartialThermoPoint::energy(-0.6));
      FAIL("expected infeasibility");
    } catch (const InfeasibleError& e) {
      REQUIRE(e.reachable().size() == 1);
      CHECK(e.reachable()[0].lo == doctest::Approx(-0.5));
      CHECK(e.reachable()[0].hi == doctest::Approx(0.0));
    }
    CHECK_THROWS_AS(constrained_entropy_max(cw(), PartialThermoPoint::energy_magnetization(-0.1, 0.9)), InfeasibleError);
    CHECK_THROWS_AS(constrained_entropy_max(cw(), PartialThermoPoint{}), UsageError);
    MaximizeOptions bad;
    bad.tol = 0.0;
    CHECK_THROWS_AS(constrained_entropy_max(cw(), PartialThermoPoint::energy(-0.1), bad), UsageError);
  }

  TEST_CASE("field breaks the degeneracy near the energy minimum") {
    const auto f = cw(1.0, 0.3);
    const double e = f.reachable(0).first + 1e-3;
    const auto r = constrained_entropy_max(f, PartialThermoPoint::energy(e));
    REQUIRE(r.multiplicity == 1);
    // Root of −m²/2 − 0.3 m = e near m = 1.
    CHECK(r.maximizers[0] == doctest::Approx(-0.3 + std::sqrt(0.09 - 2 * e)).epsilon(1e-10));
  }

  TEST_CASE("flat level set is maximized at its entropy peak") {
    // J = h = 0: every m has e = 0; the maximizer is m = 0, not an interval.
    const auto r = constrained_entropy_max(cw(0.0, 0.0), PartialThermoPoint::energy(0.0));
    CHECK(r.multiplicity == 1);
    CHECK(std::abs(r.maximizers[0]) <= 1e-8);
    CHECK(r.flat_intervals.empty());
  }

  TEST_CASE("completeness verdicts") {
    std::vector<PartialThermoPoint> energy, joint;
    for (double e = -0.45; e <= -0.05 + 1e-12; e += 0.05) {
      energy.push_back(PartialThermoPoint::energy(e));
      joint.push_back(PartialThermoPoint::energy_magnetization(e, std::sqrt(-2 * e)));
    }
    const auto v = completeness_verdict(cw(), energy, {}, 2);
    CHECK_FALSE(v.complete);
    for (const auto& r : v.records) CHECK(r.multiplicity == 2);
    const auto j = completeness_verdict(cw(), joint);
    CHECK(j.complete);

    const std::string text = to_json(v, cw());
    CHECK(text.find("\"Incomplete\"") != std::string::npos);
    CHECK(text.find("\"multiplicity\": 2") != std::string::npos);
  }

  TEST_CASE("property: energy-only multiplicity across the open interval") {
    for (double J : {0.5, 1.0, 2.0}) {
      const auto f = cw(J);
      for (int i = 1; i < 20; ++i) {
        const double e = -0.5 * J * i / 20.0;
        const auto r = constrained_entropy_max(f, PartialThermoPoint::energy(e));
        CHECK(r.multiplicity == 2);
        CHECK(r.maximizers[1] == doctest::Approx(std::sqrt(-2 * e / J)).epsilon(1e-9));
      }
      CHECK(constrained_entropy_max(f, PartialThermoPoint::energy(0.0)).multiplicity == 1);
    }
  }

  TEST_CASE("property: joint constraints are always unique") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> m(-1.0, 1.0), h(-0.5, 0.5);
    for (int i = 0; i < 100; ++i) {
      const auto f = cw(1.0, h(rng));
      const double x = m(rng);
      CHECK(constrained_entropy_max(f, PartialThermoPoint::energy_magnetization(f.energy(x), x)).multiplicity == 1);
    }
  }

  TEST_CASE("energy-only entropy curve") {
    const auto f = cw();
    std::vector<ThermoPoint> grid;
    for (int i = 0; i <= 50; ++i) grid.push_back({{-0.5 + i * 0.01}});
    grid.push_back({{0.2}});  // infeasible
    const EntropyCurve c = entropy_curve(f, grid, {}, 2);
    REQUIRE(c.skipped.size() == 1);
    CHECK(c.skipped[0].index == 51);
    CHECK(c.samples.size() == 51);
    CHECK(c.samples.value(0) == 0.0);
    CHECK(c.samples.orientation() == Orientation::Concave);
    // s(e) = η(√(−2e)).
    for (std::size_t i = 0; i < c.samples.size(); ++i) {
      const double e = c.samples.coordinate(i, 0);
      CHECK(c.samples.value(i) == doctest::Approx(ErgodicFamily::entropy(std::sqrt(std::max(0.0, -2 * e)))).epsilon(1e-9));
    }
    CHECK(concavity_violations(c.samples, 1e-9).empty());
  }

  TEST_CASE("joint entropy curve is concave along the polarization") {
    const auto f = cw();
    std::vector<double> m;
    for (int i = -100; i <= 100; ++i) m.push_back(i / 100.0);
    const CurveSamples s = joint_entropy_curve(f, m);
    CHECK(s.dimension() == 2);
    CHECK(concavity_violations(s, 1e-9).empty());
    CHECK(concavity_violations(along_coordinate(s, 1), 1e-9).empty());
    for (std::size_t i = 0; i < s.size(); ++i) CHECK(s.value(i) == ErgodicFamily::entropy(s.coordinate(i, 1)));

    std::vector<ThermoPoint> grid;
    for (double x : {-0.5, 0.0, 0.5}) grid.push_back({{f.energy(x), x}});
    const EntropyCurve c = entropy_curve(f, grid);
    CHECK(c.samples.dimension() == 2);
    CHECK(c.samples.value(1) == doctest::Approx(std::numbers::ln2));
  }

  TEST_CASE("Legendre consistency with the mean-field pressure") {
    for (double h : {0.0, 0.2}) {
      const auto f = cw(1.0, h);
      std::vector<double> m;
      for (int i = -100000; i <= 100000; ++i) m.push_back(i / 100000.0);
      const CurveSamples s = joint_entropy_curve(f, m);
      for (double t0 : {0.5, 1.5, 3.0})
        for (double t1 : {-0.3, 0.0, 0.4}) {
          const double expected = oracle::mean_field_pressure(-h, -0.5, t0, t1);
          CHECK(std::abs(conjugate(s, std::vector<double>{t0, t1}) - expected) <= 1e-8);
        }
    }
  }
}

TEST_SUITE("completeness") {
  TEST_CASE("entropy slopes on the joint curve") {
    const auto cw = ErgodicFamily::product_states(ModelSpec::curie_weiss(1.0, 0.0));
    for (double m : {-0.999, -0.5, 0.0, 0.3, 0.97, 0.999}) {
      const SlopeInterval s = entropy_slopes(cw, m, 1e-3);
      CHECK(s.kink_width() <= 1e-4);
      // η′(m) = −atanh(m).
      CHECK(std::abs(0.5 * (s.left_derivative + s.right_derivative) + std::atanh(m)) <= 1e-4 * std::max(1.0, std::abs(std::atanh(m))));
    }
    CHECK_THROWS_AS(entropy_slopes(ErgodicFamily::product_states(ModelSpec::free_spins()), 0.0, 1e-3), UsageError);
    CHECK_THROWS_AS(entropy_slopes(cw, 1.0, 1e-3), DomainError);
  }
}
