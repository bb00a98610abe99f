#include <cmath>
#include <cstdio>
#include <fstream>

#include <gtest/gtest.h>

#include "svelab/error.hpp"
#include "svelab/mlf.hpp"
#include "svelab/volterra1d.hpp"

namespace {

using namespace svelab;
using volterra::TailModel;

double sup_error_vs(const volterra::Solution& s, double (*exact)(double)) {
  double worst = 0.0;
  for (std::size_t i = 1; i < s.grid().size(); ++i)
    worst = std::max(worst, std::abs(s.values.value(i) - exact(s.grid()[i])));
  return worst;
}

TEST(SolveERho, ConstantKernelGivesExponential) {
  const Kernel one = Kernel::fractional(1.0);
  auto exact = [](double t) { return std::exp(-t); };
  double prev = 0.0;
  for (std::size_t n : {50u, 100u, 200u, 400u}) {
    const auto s = volterra::solve_e_rho(one, one, 1.0, TimeGrid::uniform(5.0, n));
    const double err = sup_error_vs(s, +exact);
    EXPECT_LT(err, 5.0 / (n * n));
    if (prev > 0.0) EXPECT_GT(prev / err, 1.8);
    prev = err;
    const double h = 5.0 / n;
    for (std::size_t j = 0; j < s.cell_means.size(); ++j) {
      const double mean = (std::exp(-h * j) - std::exp(-h * (j + 1))) / h;
      EXPECT_NEAR(s.cell_means[j], mean, 5.0 / (n * n));
    }
  }
}

TEST(SolveERho, FractionalHalfOnGradedGrid) {
  const Kernel k = Kernel::fractional(0.5);
  const auto s = volterra::solve_e_rho(k, k, 1.0, TimeGrid::graded(10.0, 2048, 0.5));
  double worst = 0.0;
  for (std::size_t i = 1; i < s.grid().size(); ++i) {
    const double t = s.grid()[i];
    worst = std::max(worst, std::abs(s.values.value(i) - mlf::e_k_closed(t, 1.0, 0.5)));
  }
  EXPECT_LE(worst, 1e-4);
}

TEST(SolveERho, ConvergenceOrderAlphaAboveOne) {
  const double alpha = 1.5;
  const Kernel k = Kernel::fractional(alpha);
  double prev = 0.0;
  for (std::size_t n : {64u, 128u, 256u}) {
    const auto s = volterra::solve_e_rho(k, k, 2.0, TimeGrid::uniform(4.0, n));
    double err = 0.0;
    for (std::size_t i = 1; i < s.grid().size(); ++i)
      err = std::max(err, std::abs(s.values.value(i) - mlf::e_k_closed(s.grid()[i], 2.0, alpha)));
    if (prev > 0.0) EXPECT_GE(prev / err, 1.8) << n;
    prev = err;
  }
}

TEST(SolveERho, EhMatchesClosedForm) {
  // e_h with h fractional of order beta solves e + mu k*e = h
  const double alpha = 0.7, beta = 0.9, mu = 1.5;
  const auto s = volterra::solve_e_rho(Kernel::fractional(alpha), Kernel::fractional(beta), mu,
                                       TimeGrid::graded(5.0, 1024, 0.7));
  for (std::size_t i = 1; i < s.grid().size(); i += 37) {
    const double t = s.grid()[i];
    EXPECT_NEAR(s.values.value(i), mlf::e_h_closed(t, mu, alpha, beta), 2e-4 * std::max(1.0, std::pow(t, beta - 1)));
  }
}

TEST(SolveERho, DiscreteResidualIsRoundoff) {
  const Kernel k = Kernel::log1p_inverse();
  const Kernel rho = Kernel::fractional(0.6);
  const auto s = volterra::solve_second_kind(k, rho, 2.5, TimeGrid::graded(3.0, 300, 0.6));
  EXPECT_LE(volterra::discrete_residual(k, rho, 2.5, s), 1e-10);
}

TEST(SolveERho, PositivityAndDomination) {
  for (const Kernel& k : {Kernel::fractional(0.4), Kernel::log1p_inverse(),
                          Kernel::exponential_mixture({{1.0, 1.0}, {0.5, 7.0}})}) {
    const auto s = volterra::solve_e_rho(k, k, 3.0, TimeGrid::graded(20.0, 800, 0.4));
    for (std::size_t i = 1; i < s.grid().size(); ++i) {
      const double t = s.grid()[i];
      // late values come out of a cancellation, so zero is resolved to the scheme error only
      EXPECT_GE(s.values.value(i), -1e-6) << k.describe() << " t=" << t;
      EXPECT_LE(s.values.value(i), k(t) * (1 + 1e-9)) << k.describe() << " t=" << t;
    }
  }
}

TEST(SolveERho, MonotoneDecreasingInMu) {
  const Kernel k = Kernel::log1p_inverse();
  const Kernel h = Kernel::fractional(0.8);
  const TimeGrid g = TimeGrid::graded(10.0, 600, 0.5);
  const auto lo = volterra::solve_e_rho(k, h, 0.5, g);
  const auto hi = volterra::solve_e_rho(k, h, 2.0, g);
  for (std::size_t i = 1; i < g.size(); ++i) EXPECT_LE(hi.values.value(i), lo.values.value(i) + 1e-12);
}

TEST(SolveERho, MassNonIntegrableKernels) {
  {
    const Kernel k = Kernel::log1p_inverse();
    const auto s = volterra::solve_e_rho(k, k, 1.0, TimeGrid::geometric(1e6, 2000, 1e-7));
    const auto m = volterra::solution_mass(s, TailModel::inverse_log_square);
    EXPECT_NEAR(m.total, 1.0, 1e-3) << "grid " << m.grid_mass << " tail " << m.tail;
    for (std::size_t i = 2; i < s.grid().size(); ++i) EXPECT_LE(s.values.value(i), s.values.value(i - 1) + 1e-15);
  }
  {
    const Kernel k = Kernel::fractional(0.7);
    const auto s = volterra::solve_e_rho(k, k, 2.0, TimeGrid::geometric(1e3, 3000, 1e-7));
    const auto known = volterra::solution_mass(s, TailModel::power, -1.7);
    EXPECT_NEAR(known.total, 0.5, 1e-3);
    const auto free = volterra::solution_mass(s, TailModel::power);
    EXPECT_NEAR(free.total, 0.5, 1e-3);
    EXPECT_NEAR(free.fitted_exponent, -1.7, 0.05);
    EXPECT_THROW(volterra::solution_mass(s, TailModel::power, -0.5), DomainError);
  }
}

TEST(SolveERho, MassIntegrableKernel) {
  const Kernel k = Kernel::exponential_mixture({{1.0, 1.0}, {2.0, 4.0}});
  const double norm = k.l1_norm();
  const double mu = 1.3;
  const auto s = volterra::solve_e_rho(k, k, mu, TimeGrid::uniform(60.0, 6000));
  const auto m = volterra::solution_mass(s, TailModel::power);
  EXPECT_NEAR(m.total, norm / (1 + mu * norm), 1e-3);
}

TEST(SolveERho, RejectsNegativeMu) {
  const Kernel k = Kernel::fractional(0.5);
  EXPECT_THROW(volterra::solve_e_rho(k, k, -1.0, TimeGrid::uniform(1.0, 4)), DomainError);
}

TEST(Resolvent, ExponentialKernel) {
  const TimeGrid g = TimeGrid::uniform(20.0, 4000);
  const auto rho = GridFunction::sample(g, [](double t) { return 0.5 * std::exp(-t); });
  const auto r = volterra::resolvent_second_kind(rho);
  for (std::size_t i = 0; i < g.size(); i += 50) {
    EXPECT_NEAR(r.values.value(i), 0.5 * std::exp(-0.5 * g[i]), 2e-5);
    EXPECT_GE(r.values.value(i), 0.0);
  }
}

TEST(Resolvent, ZeroAndSupercritical) {
  const TimeGrid g = TimeGrid::uniform(10.0, 1000);
  const auto zero = volterra::resolvent_second_kind(GridFunction::sample(g, [](double) { return 0.0; }));
  for (double v : zero.values.values()) EXPECT_EQ(v, 0.0);
  const auto r = volterra::resolvent_second_kind(GridFunction::sample(g, [](double t) { return 2 * std::exp(-t); }));
  // r = 2 e^{t}
  EXPECT_NEAR(r.values.values().back() / (2 * std::exp(10.0)), 1.0, 1e-3);
  const auto cum = r.cumulative();
  EXPECT_GT(cum.back(), 1e4);
  EXPECT_THROW(volterra::resolvent_second_kind(GridFunction::sample(g, [](double t) { return t - 1; })),
               DomainError);
}

TEST(PaleyWiener, Verdicts) {
  const TimeGrid g = TimeGrid::uniform(40.0, 8000);
  auto mk = [&](double c) { return GridFunction::sample(g, [c](double t) { return c * std::exp(-t); }); };
  const auto half = volterra::paley_wiener_check(mk(0.5), 0.5 * std::exp(-40.0));
  EXPECT_EQ(half.verdict, Verdict::pass);
  EXPECT_TRUE(half.integrable);
  EXPECT_NEAR(half.total_mass, 0.5, 1e-5);
  const auto one = volterra::paley_wiener_check(mk(1.0), std::exp(-40.0));
  EXPECT_EQ(one.verdict, Verdict::inconclusive);
  const auto two = volterra::paley_wiener_check(mk(2.0), 2 * std::exp(-40.0));
  EXPECT_EQ(two.verdict, Verdict::fail);
  EXPECT_NEAR(two.total_mass, 2.0, 1e-4);
}

TEST(Gronwall, Majorant) {
  const TimeGrid g = TimeGrid::uniform(60.0, 6000);
  const double c = 0.4, mu = 1.7;
  const auto rho = GridFunction::sample(g, [c](double t) { return c * std::exp(-t); });
  const auto r = volterra::resolvent_second_kind(rho);
  const auto one = GridFunction::sample(g, [](double) { return 1.0; });
  const auto m = volterra::gronwall_majorant(one, r.values, mu);
  EXPECT_NEAR(m.values().back(), 1 + mu * c / (1 - c), 1e-4);
  const auto zero = GridFunction::sample(g, [](double) { return 0.0; });
  const auto none = volterra::gronwall_majorant(zero, r.values, mu);
  for (double v : none.values()) EXPECT_EQ(v, 0.0);
  const auto f = GridFunction::sample(g, [](double t) { return std::sin(t); });
  const auto same = volterra::gronwall_majorant(f, zero, mu);
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_EQ(same.value(i), f.value(i));
}

TEST(CmPrerequisites, KnownKernels) {
  EXPECT_EQ(volterra::cm_prerequisites(Kernel::fractional(0.5)).verdict, Verdict::pass);
  EXPECT_EQ(volterra::cm_prerequisites(Kernel::log1p_inverse()).verdict, Verdict::pass);
  EXPECT_EQ(volterra::cm_prerequisites(Kernel::exponential_mixture({{1, 0.5}, {3, 9}})).verdict, Verdict::pass);
  const auto flat = volterra::cm_prerequisites(Kernel::fractional(1.0));
  EXPECT_TRUE(flat.nonincreasing);
  EXPECT_TRUE(flat.degenerate_derivative);
  EXPECT_NE(flat.verdict, Verdict::pass);
  const auto few = volterra::cm_prerequisites(Kernel::tabulated({0.0, 1.0, 2.0}, {2.0, 1.0, 0.5}, 0.0));
  EXPECT_EQ(few.verdict, Verdict::inconclusive);
  // linear decay to zero is not log-convex
  std::vector<double> t, v;
  for (int i = 0; i <= 100; ++i) {
    t.push_back(i * 0.01);
    v.push_back(1.0 - 0.9 * i * 0.01);
  }
  EXPECT_EQ(volterra::cm_prerequisites(Kernel::tabulated(t, v, 0.0, Kernel::TableInterp::linear)).verdict,
            Verdict::fail);
}

TEST(LqBoundConvolved, Examples) {
  const Kernel lg = Kernel::log1p_inverse(0.2 / 1.2);
  EXPECT_EQ(volterra::lq_bound_convolved(lg, 0.0, 3.0, 2.0), 0.0);
  const double eps = 0.2, nu = 1.5, mu = 7.0;
  const double want = nu * nu * std::pow(1 + eps, 3) / (eps * eps * (1 - eps)) * std::pow(mu, -(1 - eps));
  EXPECT_NEAR(volterra::lq_bound_convolved(lg, nu, mu, 2.0), want, 1e-12 * want);
  EXPECT_DOUBLE_EQ(volterra::lq_bound_convolved(lg, nu, 0.3, 2.0), volterra::lq_bound_convolved(lg, nu, 1.0, 2.0));
  EXPECT_THROW(volterra::lq_bound_convolved(lg, nu, mu, 6.0), DomainError);
}

TEST(LqBoundConvolved, BoundsFractionalNorm) {
  // h = k * nu with nu a point mass of size 1 at 0 gives h = k; compare with c_q scaling
  const double alpha = 0.8;
  const Kernel k = Kernel::fractional(alpha);
  for (double q : {1.0, 2.0}) {
    for (double mu : {0.1, 0.5, 2.0, 10.0}) {
      const double exact = mlf::lq_norm_e_h(mu, alpha, alpha, q);
      EXPECT_LE(exact, volterra::lq_bound_convolved_sum(k, 1.0, mu, q) * (1 + 1e-9)) << q << " " << mu;
      if (mu >= 1.0) EXPECT_LE(exact, volterra::lq_bound_convolved(k, 1.0, mu, q) * (1 + 1e-9)) << q << " " << mu;
    }
  }
  // below mu = 1 the single-term form misses the 1/mu growth of the mass
  EXPECT_GT(1.0 / 0.1, volterra::lq_bound_convolved(k, 1.0, 0.1, 1.0));
  EXPECT_NEAR(volterra::lq_bound_convolved_sum(k, 2.0, 4.0, 1.0), 2.0 * (1.0 / (std::tgamma(alpha) * alpha) + 1.0) / 4.0,
              1e-12);
}

TEST(TabulatedKernel, PrimitivesMatchAnalytic) {
  const double alpha = 0.5;
  const Kernel exact = Kernel::fractional(alpha);
  std::vector<double> t, v;
  for (int i = 0; i <= 400; ++i) {
    const double x = 1e-4 * std::pow(1e8, i / 400.0);
    t.push_back(x);
    v.push_back(exact(x));
  }
  const Kernel tab = Kernel::tabulated(t, v, 1 - alpha);
  for (double x : {1e-6, 1e-3, 0.5, 3.0, 100.0}) {
    EXPECT_NEAR(tab(x) / exact(x), 1.0, 1e-3);
    EXPECT_NEAR(tab.primitive(x) / exact.primitive(x), 1.0, 1e-3);
    EXPECT_NEAR(tab.second_primitive(x) / exact.second_primitive(x), 1.0, 1e-3);
  }
  EXPECT_EQ(tab(2e4), 0.0);
}

TEST(TabulatedKernel, CsvRoundTrip) {
  const char* path = "tab_kernel_test.csv";
  {
    std::ofstream out(path);
    out << "time,value\n0.1,3.0\n0.5,2.0\n1.0,1.0\n2.0,0.25\n";
  }
  const Kernel k = Kernel::load_csv(path, 0.3);
  EXPECT_DOUBLE_EQ(k(0.5), 2.0);
  EXPECT_NEAR(k(0.75), std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(k(0.05), 3.0 * std::pow(0.5, -0.3), 1e-12);
  std::remove(path);
  {
    std::ofstream out(path);
    out << "0.1,3.0\n0.05,2.0\n";
  }
  EXPECT_THROW(Kernel::load_csv(path, 0.3), ValidationError);
  std::remove(path);
}

}  // namespace
