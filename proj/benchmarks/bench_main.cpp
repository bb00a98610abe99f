#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <vector>

#include "svelab/limitdist.hpp"
#include "svelab/mlf.hpp"
#include "svelab/simulator.hpp"
#include "svelab/volterra1d.hpp"

namespace {

using namespace svelab;

void bm_mittag_leffler(benchmark::State& state) {
  const mlf::MittagLeffler E(0.75, 1.0);
  const double x = -static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(E(x));
}
// 1: series, 8: crossover contour, 100: asymptotic
BENCHMARK(bm_mittag_leffler)->Arg(1)->Arg(8)->Arg(100);

void bm_c_q(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(mlf::c_q(0.8, 1.2, 2.0));
}
BENCHMARK(bm_c_q)->Unit(benchmark::kMillisecond);

void bm_solve_e_rho(benchmark::State& state) {
  const auto k = Kernel::fractional(0.5);
  const auto grid = TimeGrid::graded(5.0, static_cast<std::size_t>(state.range(0)), 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(volterra::solve_e_rho(k, k, 1.0, grid));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(bm_solve_e_rho)->RangeMultiplier(2)->Range(256, 4096)->Complexity()->Unit(benchmark::kMillisecond);

void bm_ensemble(benchmark::State& state) {
  auto p = sim::SVEProblem::scalar_fractional(-1.0, 0.75, 1.0, spectral::ForcingSpec::power(0.0, {1.0}), 3.0);
  p.diffusion = sim::Diffusion::diagonal_multiplicative([](std::size_t, double u) { return std::sin(u); }, "sin", 1.0, 1.0);
  const auto grid = TimeGrid::uniform(3.0, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(sim::run_ensemble(p, grid, 100, {3.0}, 1));
  state.SetItemsProcessed(state.iterations() * 100);
}
BENCHMARK(bm_ensemble)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

void bm_wasserstein_1d(benchmark::State& state) {
  std::mt19937_64 gen(5);
  std::normal_distribution<double> z;
  std::vector<double> x(state.range(0)), y(state.range(0));
  for (auto& v : x) v = z(gen);
  for (auto& v : y) v = z(gen) + 0.1;
  for (auto _ : state) benchmark::DoNotOptimize(limitdist::wasserstein_1d(x, y));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(bm_wasserstein_1d)->RangeMultiplier(4)->Range(1 << 10, 1 << 16)->Complexity();

}  // namespace

BENCHMARK_MAIN();
