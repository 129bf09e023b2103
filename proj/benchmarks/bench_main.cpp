#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>
#include <random>

#include "ftlab/covariance_sampler.hpp"
#include "ftlab/experiment.hpp"
#include "ftlab/flat_trace.hpp"
#include "ftlab/periodic_orbits.hpp"
#include "ftlab/resonances.hpp"
#include "ftlab/statistics.hpp"

using namespace ftlab;

namespace {

const OrbitTable& reference_table(int n) {
  static const OrbitTable t11 = build_orbit_table(make_reference_map(), 11);
  static const OrbitTable t8 = build_orbit_table(make_reference_map(), 8);
  return n == 11 ? t11 : t8;
}

std::vector<double> coordinates(const OrbitTable& t) {
  std::vector<double> xs;
  for (const auto& p : t.points()) xs.push_back(p.x.value());
  return xs;
}

}  // namespace

static void BM_BuildOrbitTable(benchmark::State& state) {
  const auto map = make_reference_map();
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(build_orbit_table(map, n));
  state.SetItemsProcessed(state.iterations() * ((int64_t{1} << n) - 1));
}
BENCHMARK(BM_BuildOrbitTable)->Arg(8)->Arg(11)->Arg(14)->Unit(benchmark::kMillisecond);

static void BM_TracePlanTrace(benchmark::State& state) {
  const auto& table = reference_table(11);
  const TracePlan plan(table);
  std::vector<double> tau = coordinates(table);
  for (auto& v : tau) v = std::cos(2 * std::numbers::pi * v);
  for (auto _ : state) benchmark::DoNotOptimize(plan.trace(tau, 2e6));
}
BENCHMARK(BM_TracePlanTrace);

static void BM_CovarianceBatch(benchmark::State& state) {
  const auto xs = coordinates(reference_table(11));
  const CovarianceSampler sampler(build_default_spectrum(), xs);
  std::uint64_t batch = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sampler.draw_batch(1, batch++));
  state.SetItemsProcessed(state.iterations() * kSamplerBatch);
}
BENCHMARK(BM_CovarianceBatch)->Unit(benchmark::kMicrosecond);

static void BM_CovarianceFactor(benchmark::State& state) {
  const auto xs = coordinates(reference_table(11));
  const auto spec = build_default_spectrum();
  for (auto _ : state) benchmark::DoNotOptimize(CovarianceSampler(spec, xs));
}
BENCHMARK(BM_CovarianceFactor)->Unit(benchmark::kMillisecond);

static void BM_FourierBatch(benchmark::State& state) {
  const auto xs = coordinates(reference_table(11));
  const FieldDrawer drawer(build_default_spectrum(), SamplerBackend::fourier, xs);
  std::uint64_t batch = 0;
  for (auto _ : state) benchmark::DoNotOptimize(drawer.draw_batch(1, batch++));
  state.SetItemsProcessed(state.iterations() * kSamplerBatch);
}
BENCHMARK(BM_FourierBatch)->Unit(benchmark::kMicrosecond);

static void BM_GalerkinAssemble(benchmark::State& state) {
  const auto map = make_reference_map();
  const PointFunction tau = [](double x) { return std::sin(2 * std::numbers::pi * x); };
  const int N = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(assemble_galerkin(map, tau, 3.0, N));
}
BENCHMARK(BM_GalerkinAssemble)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

static void BM_GalerkinEigenvalues(benchmark::State& state) {
  const auto map = make_reference_map();
  const PointFunction tau = [](double x) { return std::sin(2 * std::numbers::pi * x); };
  const auto op = assemble_galerkin(map, tau, 3.0, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(galerkin_eigenvalues(op));
}
BENCHMARK(BM_GalerkinEigenvalues)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

static void BM_KsRayleigh(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::exponential_distribution<double> e(1.0);
  std::vector<double> s(static_cast<std::size_t>(state.range(0)));
  for (auto& v : s) v = std::sqrt(e(rng));
  for (auto _ : state) benchmark::DoNotOptimize(ks_rayleigh(s));
}
BENCHMARK(BM_KsRayleigh)->Arg(10000);

static void BM_WrappedDeviation(benchmark::State& state) {
  const double t = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(wrapped_gaussian_deviation(t, 0.3, 1.1));
}
BENCHMARK(BM_WrappedDeviation)->Arg(10)->Arg(1000);

BENCHMARK_MAIN();
