#include "thermolab/completeness.hpp"
#include "thermolab/convex.hpp"
#include "thermolab/gibbs.hpp"
#include "thermolab/kms.hpp"
#include "thermolab/lattice.hpp"

#include <benchmark/benchmark.h>

#include <cmath>

using namespace thermolab;

static void BM_FinitePressureIsing(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const ObservableFamily family = build_model(ModelSpec::ising_chain(1.0, 0.5), Region::chain(n));
  const ControlVector theta{1.0, 0.2};
  for (auto _ : state) benchmark::DoNotOptimize(finite_pressure(family, theta));
  state.SetComplexityN(static_cast<long>(family.dimension()));
}
BENCHMARK(BM_FinitePressureIsing)->DenseRange(4, 14, 2)->Complexity();

static void BM_FinitePressureTransverse(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const ObservableFamily family = build_model(ModelSpec::transverse_ising(1.0, 0.7), Region::chain(n));
  const ControlVector theta{1.0};
  for (auto _ : state) benchmark::DoNotOptimize(finite_pressure(family, theta));
}
BENCHMARK(BM_FinitePressureTransverse)->DenseRange(4, 8, 2);

static void BM_CanonicalState(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const ObservableFamily family = build_model(ModelSpec::curie_weiss(1.0, 0.1), Region::complete_graph(n));
  const ControlVector theta{0.8, 0.1};
  for (auto _ : state) benchmark::DoNotOptimize(canonical_state(family, theta).eigenvalues().sum());
}
BENCHMARK(BM_CanonicalState)->DenseRange(4, 10, 2);

static void BM_Conjugate1D(benchmark::State& state) {
  const auto points = static_cast<std::size_t>(state.range(0));
  std::vector<double> q;
  for (std::size_t i = 0; i < points; ++i) q.push_back(1e-6 + (1.0 - 2e-6) * static_cast<double>(i) / (points - 1));
  const CurveSamples s = CurveSamples::tabulate(
      q, [](double x) { return -x * std::log(x) - (1 - x) * std::log(1 - x); }, Orientation::Concave);
  double theta = -2.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(conjugate(s, theta));
    theta = theta > 2.0 ? -2.0 : theta + 1e-3;
  }
  state.SetComplexityN(static_cast<long>(points));
}
BENCHMARK(BM_Conjugate1D)->RangeMultiplier(4)->Range(256, 65536)->Complexity();

static void BM_Biconjugate(benchmark::State& state) {
  std::vector<double> q;
  for (int i = 0; i <= 2000; ++i) q.push_back(1e-6 + (1.0 - 2e-6) * i / 2000.0);
  const CurveSamples s = CurveSamples::tabulate(
      q, [](double x) { return -x * std::log(x) - (1 - x) * std::log(1 - x); }, Orientation::Concave);
  for (auto _ : state) benchmark::DoNotOptimize(biconjugate(s).size());
}
BENCHMARK(BM_Biconjugate);

static void BM_ConstrainedEntropyMax(benchmark::State& state) {
  const ErgodicFamily family = ErgodicFamily::product_states(ModelSpec::curie_weiss(1.0, 0.0));
  for (auto _ : state)
    benchmark::DoNotOptimize(constrained_entropy_max(family, PartialThermoPoint::energy(-0.3)).multiplicity);
}
BENCHMARK(BM_ConstrainedEntropyMax)->Unit(benchmark::kMillisecond);

static void BM_KmsResidual(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const ObservableFamily family = build_model(ModelSpec::ising_chain(1.0, 0.3), Region::chain(n));
  const KmsContext ctx(family, ControlVector{0.7, 0.1});
  const auto ops = default_probe_operators(family, 7);
  for (auto _ : state) benchmark::DoNotOptimize(ctx.residual(ops[0].matrix, ops.back().matrix, 1.3));
}
BENCHMARK(BM_KmsResidual)->DenseRange(2, 6, 2);
BENCHMARK_MAIN();
