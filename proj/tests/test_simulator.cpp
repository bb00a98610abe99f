#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "svelab/empirical.hpp"
#include "svelab/error.hpp"
#include "svelab/mlf.hpp"
#include "svelab/rng.hpp"
#include "svelab/simulator.hpp"

namespace {

using namespace svelab;
using namespace svelab::sim;
using spectral::DiagonalOperator;
using spectral::ForcingSpec;

SVEProblem ou(double mu, double sigma, double x0, double T) {
  auto p = SVEProblem::scalar_fractional(-mu, 1.0, 1.0, ForcingSpec::power(0.0, {x0}), T);
  p.diffusion = Diffusion::additive({sigma});
  return p;
}

TEST(Philox, KnownAnswers) {
  using A4 = std::array<std::uint32_t, 4>;
  EXPECT_EQ(philox4x32({0, 0, 0, 0}, {0, 0}), (A4{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
  EXPECT_EQ(philox4x32({~0u, ~0u, ~0u, ~0u}, {~0u, ~0u}), (A4{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
  EXPECT_EQ(philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}),
            (A4{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(CounterNormal, FillMatchesAddressingAndMoments) {
  const CounterNormal rng(42);
  std::vector<double> z(7);
  rng.fill(3, 11, z.data(), 7);
  for (std::uint32_t m = 0; m < 7; ++m) EXPECT_EQ(z[m], rng(3, 11, m));
  EXPECT_NE(rng(3, 11, 0), CounterNormal(43)(3, 11, 0));
  EXPECT_NE(rng(3, 11, 0), rng(3 | kRestartNamespace, 11, 0));
  const std::size_t n = 200000;
  double s = 0.0, s2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = rng(i, 0, 0);
    s += v;
    s2 += v * v;
  }
  EXPECT_NEAR(s / n, 0.0, 5.0 / std::sqrt(n));
  EXPECT_NEAR(s2 / n, 1.0, 5.0 * std::sqrt(2.0 / n));
}

TEST(SimulatePath, ZeroNoiseZeroDriftIsGg) {
  const auto op = DiagonalOperator::dirichlet_laplacian(1, 4);
  auto p = SVEProblem::spectral_fractional(op, 0.7, 0.9, ForcingSpec::power(0.35, {2.0, -1.0, 0.5, 3.0}), 2.0);
  const auto grid = TimeGrid::uniform(2.0, 50);
  const auto path = simulate_path(p, grid, 0, 7);
  const auto Gg = spectral::compute_Gg(op, p.forcing, 0.7, grid);
  for (std::size_t i = 0; i < grid.size(); ++i)
    for (std::size_t n = 0; n < 4; ++n) EXPECT_EQ(path.value(i, n), Gg.modes[n].value(i));
  const auto laws = run_ensemble(p, grid, 20, {0.4, 2.0}, 7, 2);
  for (const auto& law : laws)
    for (std::size_t n = 0; n < 4; ++n) {
      EXPECT_EQ(law.variance(n), 0.0);
      EXPECT_DOUBLE_EQ(law.mean(n), Gg.modes[n].value(grid.index_of(law.time())));
    }
}

TEST(SimulatePath, MatchesExponentialEulerOuStepper) {
  const double mu = 1.3, sigma = 0.7, x0 = 2.0, T = 3.0;
  const auto grid = TimeGrid::uniform(T, 300);
  const auto path = simulate_path(ou(mu, sigma, x0, T), grid, 5, 99);
  const CounterNormal rng(99);
  double x = x0;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    EXPECT_NEAR(path.value(i), x, 1e-12) << "node " << i;
    x = std::exp(-mu * grid.step(i)) * (x + sigma * std::sqrt(grid.step(i)) * rng(5, static_cast<std::uint32_t>(i), 0));
  }
  EXPECT_NEAR(path.value(grid.size() - 1), x, 1e-12);
}

TEST(SimulatePath, StrongOrderAgainstExactOu) {
  // exact solution sharing the grid increments: I_j = (c/h) dW_j + sqrt(v - c^2/h) Z'_j
  const double mu = 1.0, sigma = 1.0, T = 1.0;
  const std::size_t paths = 2000;
  const CounterNormal extra(1234);
  std::vector<double> errors;
  for (std::size_t N : {16u, 32u, 64u, 128u}) {
    const auto grid = TimeGrid::uniform(T, N);
    const Simulator sim(ou(mu, sigma, 0.0, T), grid);
    const CounterNormal rng(77);
    const double h = T / N, c = (1.0 - std::exp(-mu * h)) / mu, v = (1.0 - std::exp(-2.0 * mu * h)) / (2.0 * mu);
    double sq = 0.0;
    for (std::size_t p = 0; p < paths; ++p) {
      const double u = sim.states_at({N}, p, 77)[0];
      double exact = 0.0;
      for (std::size_t j = 0; j < N; ++j) {
        const double dW = std::sqrt(h) * rng(p, static_cast<std::uint32_t>(j), 0);
        const double I = c / h * dW + std::sqrt(v - c * c / h) * extra(p, static_cast<std::uint32_t>(j), 0);
        exact = std::exp(-mu * h) * exact + sigma * I;
      }
      sq += (u - exact) * (u - exact);
    }
    errors.push_back(std::sqrt(sq / paths));
  }
  const double slope = std::log2(errors.front() / errors.back()) / 3.0;
  EXPECT_GE(slope, 0.9) << errors[0] << " " << errors[3];
}

TEST(SimulatePath, LinearDriftConvergesToFoldedOperator) {
  const double T = 2.0;
  auto p = SVEProblem::scalar_fractional(-1.5, 0.8, 1.0, ForcingSpec::power(0.0, {1.0}), T);
  p.drift = Drift::linear(0.5);
  const auto folded = SVEProblem::scalar_fractional(-1.0, 0.8, 1.0, ForcingSpec::power(0.0, {1.0}), T);
  double prev = 1.0;
  for (std::size_t N : {100u, 200u, 400u}) {
    const auto grid = TimeGrid::uniform(T, N);
    const double err = std::abs(simulate_path(p, grid, 0, 1).states.back() - simulate_path(folded, grid, 0, 1).states.back());
    EXPECT_LT(err, prev);
    prev = err;
  }
  EXPECT_LT(prev, 2e-3);
}

TEST(SimulatePath, GeneralKernelsTrackFractionalPair) {
  const double T = 1.0;
  auto frac = SVEProblem::scalar_fractional(-1.0, 0.75, 1.0, ForcingSpec::power(0.0, {1.0}), T);
  auto gen = SVEProblem::scalar_general(-1.0, Kernel::fractional(0.75), Kernel::fractional(1.0),
                                        ForcingSpec::power(0.0, {1.0}), T);
  for (auto* p : {&frac, &gen}) {
    p->drift = Drift::linear(-0.3);
    p->diffusion = Diffusion::additive({0.5});
  }
  const auto grid = TimeGrid::uniform(T, 200);
  const auto a = simulate_path(frac, grid, 3, 11), b = simulate_path(gen, grid, 3, 11);
  for (std::size_t i = 0; i < grid.size(); ++i) EXPECT_NEAR(a.value(i), b.value(i), 5e-3) << "node " << i;
}

TEST(SimulatePath, CollocationRoundTripIsExact) {
  const auto op = DiagonalOperator::dirichlet_laplacian(1, 8);
  const std::vector<double> x{1.0, 0.5, -0.2, 0.1, 0.0, 0.3, -0.4, 0.05};
  auto add = SVEProblem::spectral_fractional(op, 0.9, 1.0, ForcingSpec::power(0.0, x), 1.0);
  add.diffusion = Diffusion::additive({0.4});
  add.drift = Drift::linear(-0.7);
  auto pw = add;
  pw.diffusion = Diffusion::pointwise_multiplicative([](double) { return 0.4; }, "0.4", 0.0, 0.4);
  pw.drift = Drift::lipschitz([](double v) { return -0.7 * v; }, "-0.7 v", 0.7, 0.7);
  const auto grid = TimeGrid::uniform(1.0, 40);
  const auto a = simulate_path(add, grid, 2, 5), b = simulate_path(pw, grid, 2, 5);
  for (std::size_t k = 0; k < a.states.size(); ++k) EXPECT_NEAR(a.states[k], b.states[k], 1e-12);
}

TEST(SimulatePath, NonlinearPointwiseNoiseRunsAndIsReproducible) {
  const auto op = DiagonalOperator::dirichlet_laplacian(1, 16);
  std::vector<double> x(16, 0.0);
  x[0] = 1.0;
  auto p = SVEProblem::spectral_fractional(op, 1.0, 1.0, ForcingSpec::power(0.0, x), 0.5);
  p.diffusion = Diffusion::pointwise_multiplicative([](double v) { return std::sin(v); }, "sin", 1.0, 1.0);
  p.drift = Drift::lipschitz([](double v) { return std::cos(v); }, "cos", 1.0, 1.0, 1.0);
  const auto grid = TimeGrid::uniform(0.5, 50);
  const auto a = simulate_path(p, grid, 9, 3), b = simulate_path(p, grid, 9, 3);
  EXPECT_EQ(a.states, b.states);
  for (double v : a.states) EXPECT_TRUE(std::isfinite(v));
}

TEST(SimulatePath, NanGuardReportsNode) {
  auto p = SVEProblem::scalar_fractional(-1.0, 1.0, 1.0, ForcingSpec::power(0.0, {10.0}), 1.0);
  p.drift = Drift::lipschitz([](double v) { return 1e300 * v * v; }, "blow-up", 1.0, 1.0);
  const auto grid = TimeGrid::uniform(1.0, 10);
  try {
    simulate_path(p, grid, 0, 1);
    FAIL() << "expected ConvergenceError";
  } catch (const ConvergenceError& e) {
    EXPECT_GE(e.node(), 1u);
  }
  try {
    run_ensemble(p, grid, 3, {1.0}, 1, 2);
    FAIL() << "expected EnsembleError";
  } catch (const EnsembleError& e) {
    ASSERT_EQ(e.failures().size(), 3u);
    EXPECT_EQ(e.failures()[2].path_index, 2u);
  }
}

TEST(SimulatePath, Validation) {
  EXPECT_THROW(SVEProblem::scalar_fractional(1.0, 1.0, 1.0, ForcingSpec::power(0.0, {1.0}), 1.0), DomainError);
  auto p = ou(1.0, 1.0, 0.0, 1.0);
  p.fractional->beta = 0.5;
  EXPECT_THROW(p.validate(), ValidationError);
  p = ou(1.0, 1.0, 0.0, 1.0);
  EXPECT_THROW(simulate_path(p, TimeGrid::uniform(2.0, 10), 0, 0), ValidationError);
  p.scheme = Scheme::exact_gaussian;
  EXPECT_THROW(simulate_path(p, TimeGrid::uniform(1.0, 10), 0, 0), ValidationError);
  p.diffusion = Diffusion::diagonal_multiplicative([](std::size_t, double v) { return v; }, "v", 1.0, 1.0);
  EXPECT_THROW(p.validate(), ValidationError);
  auto q = SVEProblem::spectral_fractional(DiagonalOperator::dirichlet_laplacian(2, 2), 1.0, 1.0,
                                           ForcingSpec::power(0.0, {1, 1, 1, 1}), 1.0);
  q.diffusion = Diffusion::pointwise_multiplicative([](double v) { return v; }, "v", 1.0, 1.0);
  EXPECT_THROW(q.validate(), ValidationError);
  EXPECT_THROW(run_ensemble(ou(1, 1, 0, 1), TimeGrid::uniform(1.0, 10), 0, {1.0}, 0, 1), ValidationError);
}

TEST(ExactGaussian, VarianceIntegralClosedForms) {
  EXPECT_NEAR(variance_integral(2.0, 1.0, 1.0, 1.0), (1.0 - std::exp(-4.0)) / 2.0, 1e-10);
  EXPECT_NEAR(variance_integral(60.0, 4.0, 1.0, 1.0), 1.0 / 8.0, 1e-10);
  // alpha = 1, beta = 2: e_h(s) = 1 - exp(-s), outside the window of the infinite integral
  const double t = 3.0;
  EXPECT_NEAR(variance_integral(t, 1.0, 1.0, 2.0), t - 2.0 * (1.0 - std::exp(-t)) + (1.0 - std::exp(-2.0 * t)) / 2.0,
              1e-9);
  EXPECT_NEAR(variance_integral(2.0, 0.0, 0.8, 0.75), std::pow(2.0, 0.5) / (0.5 * std::pow(std::tgamma(0.75), 2)),
              1e-14);
  // scaling in mu
  const double a = 0.75, b = 1.0, mu = 3.0;
  EXPECT_NEAR(variance_integral(1.5, mu, a, b),
              std::pow(mu, -(2 * b - 1) / a) * variance_integral(std::pow(mu, 1 / a) * 1.5, 1.0, a, b), 1e-12);
}

TEST(ExactGaussian, OuMarginalsAndPointMass) {
  const auto p = ou(1.0, 1.0, 3.0, 40.0);
  const auto laws = sample_exact_gaussian(p, {0.0, 40.0}, 20000, 5);
  for (std::size_t i = 0; i < laws[0].size(); ++i) EXPECT_EQ(laws[0].value(i, 0), 3.0);
  EXPECT_NEAR(laws[1].mean(), 3.0 * std::exp(-40.0), 4.0 * laws[1].mean_stderr());
  EXPECT_NEAR(laws[1].variance(), 0.5, 4.0 * laws[1].variance_stderr());
}

TEST(ExactGaussian, HeatModesAndLinearDriftFold) {
  const auto op = DiagonalOperator::dirichlet_laplacian(1, 4);
  auto p = SVEProblem::spectral_fractional(op, 1.0, 1.0, ForcingSpec::power(0.0, {0, 0, 0, 0}), 30.0);
  p.diffusion = Diffusion::additive({1.0});
  const auto law = sample_exact_gaussian(p, {30.0}, 20000, 8).front();
  for (std::size_t n = 0; n < 4; ++n) {
    const double k = static_cast<double>(n + 1);
    EXPECT_NEAR(law.variance(n), 1.0 / (2.0 * k * k), 4.0 * law.variance_stderr(n));
  }
  auto q = ou(2.0, 1.0, 1.0, 30.0);
  q.drift = Drift::linear(1.0);
  const auto lq = sample_exact_gaussian(q, {30.0}, 20000, 8).front();
  EXPECT_NEAR(lq.variance(), 0.5, 4.0 * lq.variance_stderr());
  q.drift = Drift::linear(2.5);
  EXPECT_THROW(sample_exact_gaussian(q, {1.0}, 10, 8), ValidationError);
}

TEST(ExactGaussian, EulerLawMatchesExactMarginal) {
  auto p = SVEProblem::scalar_fractional(-1.0, 0.75, 1.0, ForcingSpec::power(0.375, {1.0}), 2.0);
  p.diffusion = Diffusion::additive({1.0});
  const std::size_t n = 10000;
  const auto euler = run_ensemble(p, terminal_refined_grid(2.0, 800, 1e-5), n, {2.0}, 21, 1).front();
  const auto exact = sample_exact_gaussian(p, {2.0}, n, 22).front();
  EXPECT_LT(ks_statistic(euler.mode(0), exact.mode(0)), ks_critical_5pct(n, n));
}

TEST(TerminalRefinedGrid, StepsShrinkTowardHorizon) {
  const auto g = terminal_refined_grid(10.0, 50, 1e-3);
  EXPECT_EQ(g[0], 0.0);
  EXPECT_EQ(g.horizon(), 10.0);
  EXPECT_NEAR(g.step(g.steps() - 1), 1e-3, 1e-12);
  for (std::size_t i = 2; i < g.steps(); ++i) EXPECT_NEAR(g.step(i - 1) / g.step(i), g.step(i - 2) / g.step(i - 1), 1e-9);
  EXPECT_THROW(terminal_refined_grid(1.0, 10, 0.2), ValidationError);
}

TEST(TerminalRefinedGrid, LongHorizonsWithTinyFirstStep) {
  for (double T : {1.6e4, 1e7}) {
    const auto g = terminal_refined_grid(T, 4000, 1e-4);
    EXPECT_EQ(g.horizon(), T);
    EXPECT_NEAR(g.step(g.steps() - 1), 1e-4, 4.0 * T * 1e-16);  // node spacing near T
    EXPECT_GT(g[1], 0.0);
  }
}

TEST(Restart, TrivialCases) {
  auto p = SVEProblem::scalar_fractional(-1.0, 0.7, 1.0, ForcingSpec::power(0.35, {2.0}), 3.0);
  const auto grid = TimeGrid::uniform(3.0, 60);
  const auto path = simulate_path(p, grid, 0, 4);
  const auto Gg = spectral::compute_Gg(p.op, p.forcing, 0.7, grid);
  const auto f0 = restart_forcing(p, path, 0.0);
  ASSERT_EQ(f0.kind, ForcingSpec::Kind::mild);
  for (std::size_t i = 0; i < grid.size(); ++i) EXPECT_EQ(f0.g[0].value(i), Gg.modes[0].value(i));
  const auto f1 = restart_forcing(p, path, 1.0);
  const std::size_t k = grid.index_of(1.0);
  for (std::size_t i = 0; i < f1.g[0].size(); ++i) EXPECT_EQ(f1.g[0].value(i), Gg.modes[0].value(i + k));
  EXPECT_THROW(restart_forcing(p, path, 3.0), ValidationError);
}

TEST(Restart, DeterministicNonlinearPathContinues) {
  auto p = SVEProblem::scalar_fractional(-1.0, 0.6, 1.0, ForcingSpec::power(0.0, {1.5}), 2.0);
  p.drift = Drift::lipschitz([](double v) { return std::sin(v) + 0.2; }, "sin + 0.2", 1.0, 1.2);
  const auto grid = TimeGrid::uniform(2.0, 80);
  const auto path = simulate_path(p, grid, 0, 4);
  const auto q = restarted_problem(p, path, 0.5);
  const auto shifted = TimeGrid::uniform(1.5, 60);
  const auto restarted = simulate_path(q, shifted, 0, 4);
  for (std::size_t i = 0; i < shifted.size(); ++i) EXPECT_NEAR(restarted.value(i), path.value(i + 20), 1e-12);
}

TEST(Restart, LawOfRestartedPathMatches) {
  auto p = SVEProblem::scalar_fractional(-1.0, 0.8, 1.0, ForcingSpec::power(0.4, {2.0}), 3.0);
  p.diffusion = Diffusion::additive({1.0});
  const auto grid = TimeGrid::uniform(3.0, 60);
  const std::size_t n = 10000;
  const auto direct = run_ensemble(p, grid, n, {3.0}, 31, 1).front();
  const auto restarted = run_restart_ensemble(p, grid, 1.0, n, {2.0}, 31, 1).front();
  EXPECT_LT(ks_statistic(direct.mode(0), restarted.mode(0)), ks_critical_5pct(n, n));
  EXPECT_NEAR(direct.mean(), restarted.mean(), 4.0 * std::hypot(direct.mean_stderr(), restarted.mean_stderr()));
}

TEST(Ensemble, DeterministicAcrossWorkers) {
  const auto op = DiagonalOperator::dirichlet_laplacian(1, 6);
  auto p = SVEProblem::spectral_fractional(op, 0.9, 1.0, ForcingSpec::power(0.0, {1, 0, 0, 0, 0, 0}), 1.0);
  p.diffusion = Diffusion::pointwise_multiplicative([](double v) { return 0.5 * std::cos(v); }, "cos", 0.5, 0.5);
  const auto grid = TimeGrid::uniform(1.0, 30);
  const auto a = run_ensemble(p, grid, 40, {0.5, 1.0}, 17, 1);
  const auto b = run_ensemble(p, grid, 40, {0.5, 1.0}, 17, 8);
  for (std::size_t r = 0; r < 2; ++r) EXPECT_EQ(a[r].data(), b[r].data());
  const auto single = run_ensemble(p, grid, 1, {1.0}, 17, 1).front();
  EXPECT_EQ(single.data(), simulate_path(p, grid, 0, 17).at(grid.size() - 1));

  auto lin = ou(1.0, 1.0, 1.0, 1.0);
  const auto c = run_ensemble(lin, grid, 100, {1.0}, 3, 1).front();
  const auto d = run_ensemble(lin, grid, 100, {1.0}, 3, 5).front();
  EXPECT_EQ(c.data(), d.data());
  EXPECT_EQ(c.value(7, 0), simulate_path(lin, grid, 7, 3).states.back());
}

TEST(Empirical, CsvAndKs) {
  const EmpiricalDistribution law(1.0, 2, {1, 2, 3, 4, 5, 6});
  EXPECT_EQ(law.size(), 3u);
  EXPECT_DOUBLE_EQ(law.mean(1), 4.0);
  EXPECT_DOUBLE_EQ(law.variance(0), 4.0);
  EXPECT_THROW(EmpiricalDistribution(0.0, 2, {1, 2, 3}), ValidationError);
  EXPECT_THROW(EmpiricalDistribution(0.0, std::vector<double>{}), ValidationError);
  EXPECT_DOUBLE_EQ(ks_statistic({1, 2, 3}, {1, 2, 3}), 0.0);
  EXPECT_DOUBLE_EQ(ks_statistic({0, 0}, {1, 1}), 1.0);
  const std::string path = ::testing::TempDir() + "moments.csv";
  write_moments_csv(path, {law});
  write_samples_csv(::testing::TempDir() + "samples.csv", {law});
  SUCCEED();
}

}  // namespace
