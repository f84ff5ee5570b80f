#include "oracles.hpp"

#include "thermolab/convex.hpp"
#include "thermolab/gibbs.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

using namespace thermolab;

namespace {

std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) g[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  return g;
}

CurveSamples binary_entropy_curve(std::size_t n = 2001) {
  return CurveSamples::tabulate(linspace(0.0, 1.0, n), oracle::binary_entropy, Orientation::Concave);
}

CurveSamples free_spin_pressure_curve(std::size_t n = 2001) {
  return CurveSamples::tabulate(
      linspace(-20.0, 20.0, n), [](double t) { return std::log1p(std::exp(-t)); }, Orientation::Convex);
}

}  // namespace

TEST_SUITE("convex") {
  TEST_CASE("conjugate of the binary entropy at zero is ln 2") {
    CHECK(conjugate(binary_entropy_curve(), 0.0) == doctest::Approx(std::numbers::ln2).epsilon(1e-12));
  }

  TEST_CASE("conjugate of a linear function at its slope vanishes") {
    const double c = 0.7;
    const auto f = CurveSamples::tabulate(linspace(0.0, 1.0, 101), [&](double q) { return c * q; },
                                          Orientation::Concave);
    CHECK(std::abs(conjugate(f, c)) <= 1e-15);
  }

  TEST_CASE("inf-form conjugate of the free-spin pressure recovers the binary entropy") {
    CHECK(conjugate(free_spin_pressure_curve(), 0.25) == doctest::Approx(0.5623351446188083).epsilon(1e-4));
  }

  TEST_CASE("conjugate records every attaining sample") {
    const auto f = CurveSamples::on_axis({-1, 0, 1}, {0, 0, 0}, Orientation::Concave);
    const ConjugateValue v = conjugate_with_support(f, std::vector<double>{0.0});
    CHECK(v.value == 0.0);
    CHECK(v.attaining.size() == 3);
  }

  TEST_CASE("conjugate input validation") {
    CHECK_THROWS_AS(conjugate(CurveSamples{}, 0.0), UsageError);
    const auto bad = CurveSamples::on_axis({0, 1}, {0, std::nan("")}, Orientation::Concave);
    CHECK_THROWS_AS(conjugate(bad, 0.0), DataError);
    CHECK_THROWS_AS(CurveSamples::on_axis({0, 0}, {1, 1}, Orientation::Concave), DataError);
  }

  TEST_CASE("tangent set of minus absolute value at the kink") {
    const auto f = CurveSamples::tabulate(linspace(-1.0, 1.0, 201), [](double q) { return -std::abs(q); },
                                          Orientation::Concave);
    const TangentSet t = tangent_set(f, 0.0);
    CHECK(t.slopes[0].lower == doctest::Approx(-1.0));
    CHECK(t.slopes[0].upper == doctest::Approx(1.0));
    CHECK_FALSE(t.differentiable());
  }

  TEST_CASE("tangent set of the binary entropy is a numerical singleton") {
    const auto f = binary_entropy_curve();
    const TangentSet quarter = tangent_set(f, 0.25);
    CHECK(quarter.slopes[0].left_derivative == doctest::Approx(std::log(3.0)).epsilon(1e-6));
    CHECK(quarter.slopes[0].right_derivative == doctest::Approx(std::log(3.0)).epsilon(1e-6));
    CHECK(quarter.slopes[0].lower <= std::log(3.0));
    CHECK(quarter.slopes[0].upper >= std::log(3.0));
    CHECK(quarter.differentiable());

    const TangentSet half = tangent_set(f, 0.5);
    CHECK(std::abs(half.slopes[0].left_derivative) <= 1e-6);
    CHECK(std::abs(half.slopes[0].right_derivative) <= 1e-6);
    CHECK(half.differentiable());
  }

  TEST_CASE("tangent set errors") {
    const auto f = binary_entropy_curve(101);
    CHECK_THROWS_AS(tangent_set(f, 1.5), DomainError);
    CHECK_THROWS_AS(tangent_set(free_spin_pressure_curve(101), 0.0), UsageError);
    CHECK_THROWS_AS(subdifferential(f, 0.5), UsageError);
  }

  TEST_CASE("tangent intervals shrink under refinement") {
    double previous = std::numeric_limits<double>::infinity();
    for (std::size_t n : {101u, 201u, 401u, 801u, 1601u}) {
      const double w = tangent_set(binary_entropy_curve(n), 0.25).slopes[0].width();
      CHECK(w < previous);
      previous = w;
    }
  }

  TEST_CASE("subdifferential of the free-spin pressure") {
    const TangentSet t = subdifferential(free_spin_pressure_curve(), 0.0);
    // dφ/dθ = −1/(1 + e^θ) = −1/2 at θ = 0.
    CHECK(t.slopes[0].left_derivative == doctest::Approx(-0.5).epsilon(1e-6));
    CHECK(t.differentiable());
  }

  TEST_CASE("concavity violations") {
    CHECK(concavity_violations(binary_entropy_curve(), 1e-12).empty());
    const auto square = CurveSamples::tabulate(linspace(-1, 1, 21), [](double q) { return q * q; }, Orientation::Concave);
    CHECK(concavity_violations(square, 1e-12).size() == 19);
    const ObservableFamily family = build_model(ModelSpec::ising_chain(1.0, 0.3), Region::chain(6));
    const auto phi = CurveSamples::tabulate(linspace(-2, 2, 81), [&](double t) {
      return finite_pressure(family, ControlVector{t, 0.1});
    }, Orientation::Convex);
    CHECK(concavity_violations(phi, 1e-12).empty());
  }

  TEST_CASE("biconjugate of concave and linear samples") {
    const auto s = binary_entropy_curve();
    const auto ss = biconjugate(s);
    for (std::size_t i = 0; i < s.size(); ++i) CHECK(std::abs(ss.value(i) - s.value(i)) <= 1e-4);
    const auto lin = CurveSamples::tabulate(linspace(0, 2, 11), [](double q) { return 3.0 - 0.5 * q; },
                                            Orientation::Concave);
    const auto ll = biconjugate(lin);
    for (std::size_t i = 0; i < lin.size(); ++i) CHECK(ll.value(i) == doctest::Approx(lin.value(i)).epsilon(1e-14));
  }

  TEST_CASE("biconjugate of a double well is its concave envelope") {
    const auto grid = linspace(-1, 1, 201);
    const auto well = [](double q) { return -(q * q - 0.25) * (q * q - 0.25); };
    const auto f = CurveSamples::tabulate(grid, well, Orientation::Concave);
    const auto env = biconjugate(f);
    const auto expected = oracle::concave_envelope(grid, f.values());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      CHECK(env.value(i) == doctest::Approx(expected[i]).epsilon(1e-12));
      if (std::abs(grid[i]) <= 0.5) CHECK(std::abs(env.value(i)) <= 1e-12);
    }
  }

  TEST_CASE("property: conjugate is convex in the dual variable") {
    const auto s = binary_entropy_curve(501);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> x(-8, 8), lam(0, 1);
    for (int i = 0; i < 300; ++i) {
      const double a = x(rng), b = x(rng), l = lam(rng);
      CHECK(conjugate(s, l * a + (1 - l) * b) <= l * conjugate(s, a) + (1 - l) * conjugate(s, b) + 1e-12);
    }
  }

  TEST_CASE("property: Fenchel-Young inequality and equality on the tangent set") {
    const auto s = binary_entropy_curve(1001);
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<std::size_t> idx(1, s.size() - 2);
    std::uniform_real_distribution<double> th(-6, 6);
    for (int i = 0; i < 200; ++i) {
      const std::size_t k = idx(rng);
      const double q = s.coordinate(k, 0), theta = th(rng);
      CHECK(s.value(k) - theta * q <= conjugate(s, theta) + 1e-12);
      const TangentSet t = tangent_set(s, q);
      const double mid = 0.5 * (t.slopes[0].lower + t.slopes[0].upper);
      CHECK(s.value(k) - mid * q == doctest::Approx(conjugate(s, mid)).epsilon(1e-12));
      CHECK(support_defect(s, std::vector<double>{q}, s.value(k), std::vector<double>{mid}) <= 1e-12);
    }
  }

  TEST_CASE("property: biconjugate is idempotent") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> noise;
    std::vector<double> v;
    const auto grid = linspace(-1, 1, 151);
    for (double q : grid) v.push_back(-q * q + 0.05 * noise(rng));
    const auto once = biconjugate(CurveSamples::on_axis(grid, v, Orientation::Concave));
    const auto twice = biconjugate(once);
    for (std::size_t i = 0; i < grid.size(); ++i) CHECK(twice.value(i) == doctest::Approx(once.value(i)).epsilon(1e-12));
  }

  TEST_CASE("two-dimensional conjugate on a product grid") {
    const auto g = linspace(0.0, 1.0, 41);
    std::vector<double> v;
    for (double a : g)
      for (double b : g) v.push_back(oracle::binary_entropy(a) + oracle::binary_entropy(b));
    const auto f = CurveSamples::on_product_grid({g, g}, v, Orientation::Concave);
    CHECK(conjugate(f, std::vector<double>{0.0, 0.0}) == doctest::Approx(2 * std::numbers::ln2).epsilon(1e-12));
    const TangentSet t = tangent_set(f, std::vector<double>{0.25, 0.5});
    CHECK(t.slopes.size() == 2);
    // Second-order one-sided stencils: error ≤ h²/3 · max|η‴| over the stencil, h = 0.025.
    CHECK(std::abs(t.slopes[0].left_derivative - std::log(3.0)) <= 5e-3);
    CHECK(std::abs(t.slopes[1].right_derivative) <= 5e-4);
    CHECK(concavity_violations(f, 1e-12).empty());
  }

  TEST_CASE("csv round trip preserves layout and values") {
    const auto f = binary_entropy_curve(11);
    std::stringstream ss;
    write_csv(ss, f, std::vector<std::string>{"note"});
    const auto g = read_csv(ss);
    CHECK(g.orientation() == Orientation::Concave);
    REQUIRE(g.size() == f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
      CHECK(g.value(i) == f.value(i));
      CHECK(g.coordinate(i, 0) == f.coordinate(i, 0));
    }
    const auto s = CurveSamples::scattered(2, {0, 1, 1, 0, 2, 2}, {1, 2, 3}, Orientation::Convex);
    std::stringstream ts;
    write_csv(ts, s);
    const auto t = read_csv(ts);
    CHECK(t.dimension() == 2);
    CHECK_FALSE(t.is_grid());
    CHECK(t.values() == s.values());
  }
}
