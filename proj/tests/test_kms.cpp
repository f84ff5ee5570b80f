#include "thermolab/kms.hpp"
#include "thermolab/random.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace thermolab;

namespace {

// One site with θ·Q = θ_0 σz.
ObservableFamily sigma_z_site() {
  return ObservableFamily(Region::single_sites(1), 2, {Observable::diagonal("sz", RealVector{{1.0, -1.0}})});
}

TestOperator op(const char* label, const ComplexMatrix& m) { return TestOperator::make(label, m); }

std::vector<ObservableFamily> builtins(std::size_t n) {
  std::vector<ObservableFamily> out;
  out.push_back(build_model(ModelSpec::free_spins(), Region::single_sites(n)));
  out.push_back(build_model(ModelSpec::ising_chain(1.0, 0.4), Region::chain(n)));
  out.push_back(build_model(ModelSpec::curie_weiss(1.0, -0.3), Region::complete_graph(n)));
  out.push_back(build_model(ModelSpec::transverse_ising(1.0, 0.6), Region::chain(n)));
  return out;
}

ControlVector control_for(const ObservableFamily& f, double t0, double t1) {
  return f.size() == 1 ? ControlVector{t0} : ControlVector{t0, t1};
}

}  // namespace

TEST_SUITE("kms") {
  TEST_CASE("evolution of an invariant operator is trivial") {
    const auto f = build_model(ModelSpec::ising_chain(1.0, 0.2), Region::chain(4));
    const auto z = op("Z1", pauli::embed(pauli::z(), 1, 4));
    CHECK(max_norm(evolve(z, f, ControlVector{0.9, 0.3}, 3.7).matrix - z.matrix) <= 1e-15);
    const auto x = op("X0", pauli::embed(pauli::x(), 0, 4));
    CHECK(max_norm(evolve(x, f, ControlVector{0.9, 0.3}, 0.0).matrix - x.matrix) <= 1e-15);
  }

  TEST_CASE("precession of sigma x") {
    const double t = 0.83;
    const auto a = evolve(op("X", pauli::x()), sigma_z_site(), ControlVector{1.0}, t);
    const ComplexMatrix expected = std::cos(2 * t) * pauli::x() - std::sin(2 * t) * pauli::y();
    CHECK(max_norm(a.matrix - expected) <= 1e-15);
  }

  TEST_CASE("evolution preserves the spectrum") {
    std::mt19937_64 rng(2);
    const auto f = build_model(ModelSpec::transverse_ising(1.0, 0.9), Region::chain(4));
    const ComplexMatrix h = random_hermitian(16, rng);
    const auto a = evolve(op("H", h), f, ControlVector{1.3}, 2.1);
    const RealVector before = HermitianSpectrum::of_matrix(h).values;
    const RealVector after = HermitianSpectrum::of_matrix(a.matrix).values;
    CHECK((before - after).cwiseAbs().maxCoeff() <= 1e-10);
  }

  TEST_CASE("pointwise KMS examples") {
    const auto f = sigma_z_site();
    const auto id = op("I", pauli::identity());
    const auto x = op("X", pauli::x());
    CHECK(kms_residual(f, ControlVector{1.0}, id, id, 1.2) <= 1e-15);
    const KmsContext ctx(f, ControlVector{1.0});
    CHECK(std::abs(ctx.forward_correlation(id.matrix, id.matrix, 1.2) - 1.0) <= 1e-15);
    CHECK(kms_residual(f, ControlVector{1.0}, x, x, 0.7) <= 1e-12);

    const auto chain = build_model(ModelSpec::ising_chain(1.0, 0.5), Region::chain(4));
    const auto z0 = op("Z0", pauli::embed(pauli::z(), 0, 4));
    const auto z2 = op("Z2", pauli::embed(pauli::z(), 2, 4));
    for (double t : {0.0, 1.0, 9.5}) CHECK(kms_residual(chain, ControlVector{1.0, 0.2}, z0, z2, t) <= 1e-12);
  }

  TEST_CASE("single-site closed form of both sides") {
    // ω(α_t(σx)σx) = Σ p_j e^{iω t}: with p = (e^{-1}, e)/Z, ω(α_t σx σx) = (e^{-1} e^{2it} + e e^{-2it})/Z.
    const KmsContext ctx(sigma_z_site(), ControlVector{1.0});
    const double t = 0.7, z = std::exp(1.0) + std::exp(-1.0);
    const Complex expected = (std::exp(-1.0) * std::polar(1.0, 2 * t) + std::exp(1.0) * std::polar(1.0, -2 * t)) / z;
    CHECK(std::abs(ctx.forward_correlation(pauli::x(), pauli::x(), t) - expected) <= 1e-15);
    CHECK(std::abs(ctx.shifted_correlation(pauli::x(), pauli::x(), t) - expected) <= 1e-14);
  }

  TEST_CASE("smeared KMS examples") {
    const auto f = sigma_z_site();
    const auto g = TestFunction::gaussian(2.0);
    const KmsContext ctx(f, ControlVector{1.0});
    const Quadrature quad = Quadrature::automatic(g, ctx.spread());
    const auto id = op("I", pauli::identity());
    const auto x = op("X", pauli::x());
    CHECK(kms_smeared_residual(f, ControlVector{1.0}, id, id, g, quad) <= 1e-7);
    CHECK(kms_smeared_residual(f, ControlVector{1.0}, x, x, g, quad) <= 1e-7);
    CHECK(kms_smeared_residual(f, ControlVector{1.0}, x, x, g, Quadrature{0.0, 0.1}) == 0.0);
    CHECK_THROWS_AS(kms_smeared_residual(f, ControlVector{1.0}, x, x, g, Quadrature{quad.range, 3.0}), QuadratureError);
    CHECK_THROWS_AS(TestFunction::gaussian(0.0), UsageError);
  }

  TEST_CASE("gaussian test function on the shifted line") {
    const auto g = TestFunction::gaussian(1.5);
    const Complex v = g(Complex(0.4, -1.0));
    const Complex expected = std::exp(-Complex(0.4, -1.0) * Complex(0.4, -1.0) / (2 * 1.5 * 1.5));
    CHECK(std::abs(v - expected) <= 1e-15);
    CHECK(std::abs(g(Complex(g.support_radius(), -1.0))) <= 1.01e-14);
  }

  TEST_CASE("theta discrimination") {
    const auto f = sigma_z_site();
    const std::vector<KmsProbe> probes{{op("X", pauli::x()), op("X", pauli::x()), 1.0}};
    const auto same = kms_theta_discrimination(f, ControlVector{1.0}, ControlVector{1.0}, probes);
    CHECK(same.score == 0.0);
    CHECK_FALSE(same.distinguishes);

    const auto diff = kms_theta_discrimination(f, ControlVector{1.0}, ControlVector{2.0}, probes);
    const ComplexMatrix d = (std::cos(2.0) - std::cos(4.0)) * pauli::x() - (std::sin(2.0) - std::sin(4.0)) * pauli::y();
    CHECK(diff.score == doctest::Approx(max_norm(d)).epsilon(1e-14));
    CHECK(diff.score > 0.5);
    CHECK(diff.distinguishes);

    // One Curie-Weiss site: H = −J/2 · I, so θ_0 only shifts the identity.
    const auto single = build_model(ModelSpec::curie_weiss(1.0, 0.0), Region::complete_graph(1));
    const auto trivial = kms_theta_discrimination(single, ControlVector{1.0, 0.5}, ControlVector{3.0, 0.5}, probes);
    CHECK(trivial.score <= 1e-10);
    CHECK_FALSE(trivial.distinguishes);
    CHECK_THROWS_AS(kms_theta_discrimination(f, ControlVector{1.0}, ControlVector{2.0}, {}), UsageError);
  }

  TEST_CASE("errors") {
    const auto f = build_model(ModelSpec::ising_chain(1.0, 0.0), Region::chain(6));
    CHECK_THROWS_AS(kms_residual(f, ControlVector{1.0, 0.0}, op("X", pauli::x()), op("X", pauli::x()), 0.1), UsageError);
    CHECK_THROWS_AS(KmsContext(f, ControlVector{200.0, 0.0}), NumericRangeError);
    CHECK_THROWS_AS(TestOperator::make("bad", ComplexMatrix::Zero(2, 3)), DataError);
  }

  TEST_CASE("default probes") {
    const auto f = build_model(ModelSpec::ising_chain(1.0, 0.0), Region::chain(3));
    const auto ops = default_probe_operators(f, 9);
    REQUIRE(ops.size() == 4);
    CHECK(ops[0].label == "X0");
    CHECK(ops[3].label == "H(9)");
    CHECK(hermiticity_defect(ops[3].matrix) <= 1e-15);
    CHECK(max_norm(default_probe_operators(f, 9)[3].matrix - ops[3].matrix) == 0.0);
  }

  TEST_CASE("property: evolution is a one-parameter group") {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(-5, 5);
    for (const auto& f : builtins(4)) {
      const KmsContext ctx(f, control_for(f, 0.8, 0.3));
      const ComplexMatrix a = random_operator(16, rng);
      for (int i = 0; i < 5; ++i) {
        const double t = u(rng), s = u(rng);
        CHECK(max_norm(ctx.evolve(ctx.evolve(a, t), s) - ctx.evolve(a, t + s)) <= 1e-10);
      }
    }
  }

  TEST_CASE("property: evolution commutes with translations on periodic chains") {
    std::mt19937_64 rng(12);
    for (const auto& f : {build_model(ModelSpec::ising_chain(1.0, 0.4), Region::chain(5)),
                          build_model(ModelSpec::transverse_ising(1.0, 0.6), Region::chain(5))}) {
      const KmsContext ctx(f, control_for(f, 0.9, -0.2));
      const Translation shift(5, 2, 1);
      const ComplexMatrix a = random_operator(32, rng);
      for (double t : {0.3, 2.0, 7.5})
        CHECK(max_norm(shift.conjugate(ctx.evolve(a, t)) - ctx.evolve(shift.conjugate(a), t)) <= 1e-10);
    }
  }

  TEST_CASE("property: randomized KMS residuals vanish") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> tt(-10, 10), th(-1, 1);
    for (std::size_t n : {2u, 4u}) {
      for (const auto& f : builtins(n)) {
        const KmsContext ctx(f, control_for(f, 1.0 + th(rng), th(rng)));
        const auto d = static_cast<Eigen::Index>(f.dimension());
        for (int i = 0; i < 5; ++i) {
          const ComplexMatrix a = random_operator(d, rng), b = random_operator(d, rng);
          CHECK(ctx.residual(a, b, tt(rng)) <= 1e-9);
        }
      }
    }
  }

  TEST_CASE("property: the canonical state is stationary") {
    std::mt19937_64 rng(30);
    for (const auto& f : builtins(3)) {
      const KmsContext ctx(f, control_for(f, 1.2, 0.4));
      const ComplexMatrix a = random_operator(8, rng);
      const Complex base = (ctx.state().matrix() * a).trace();
      for (double t : {0.5, 3.0, -8.0}) CHECK(std::abs((ctx.state().matrix() * ctx.evolve(a, t)).trace() - base) <= 1e-10);
    }
  }
}
