#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "property_suites.hpp"
#include "svelab/conditions.hpp"
#include "svelab/format.hpp"
#include "svelab/limitdist.hpp"
#include "svelab/mlf.hpp"
#include "svelab/simulator.hpp"
#include "svelab/volterra1d.hpp"

namespace {

using namespace svelab;
using nlohmann::json;
using spectral::ForcingSpec;

struct Outcome {
  bool pass = false;
  std::string detail;
  json values = json::object();
};

struct Criterion {
  int id;
  std::string name;
  double budget_s;
  std::function<Outcome()> run;
};

std::string fmt(double x) {
  std::ostringstream s;
  s.precision(3);
  s << x;
  return s.str();
}

Outcome ml_reductions() {
  double e1 = 0.0, e2 = 0.0;
  for (int i = 0; i <= 500; ++i) {
    const double x = 0.1 * i;
    e1 = std::max(e1, std::abs(mlf::mittag_leffler(1.0, 1.0, -x) - std::exp(-x)));
    e2 = std::max(e2, std::abs(mlf::mittag_leffler(2.0, 1.0, -x * x) - std::cos(x)));
  }
  Outcome o;
  o.pass = e1 <= 1e-10 && e2 <= 1e-10;
  o.detail = "max|E11(-x)-exp(-x)| = " + fmt(e1) + ", max|E21(-x^2)-cos x| = " + fmt(e2) + " (tol 1e-10)";
  o.values = {{"exp_error", e1}, {"cos_error", e2}, {"tolerance", 1e-10}};
  return o;
}

Outcome c1_identity() {
  double worst = 0.0;
  for (double a : {0.3, 0.5, 0.7, 0.9, 1.0}) worst = std::max(worst, std::abs(mlf::c_q(a, a, 1.0) - 1.0));
  Outcome o;
  o.pass = worst <= 1e-6;
  o.detail = "max|c_1(a,a) - 1| = " + fmt(worst) + " (tol 1e-6)";
  o.values = {{"max_error", worst}, {"tolerance", 1e-6}};
  return o;
}

Outcome plancherel() {
  double worst_half = 0.0, worst_full = 0.0;
  std::size_t points = 0;
  for (double a : {0.6, 0.8, 1.0, 1.2, 1.5}) {
    std::vector<double> betas{0.8, 1.0, a, a + 0.4};
    std::sort(betas.begin(), betas.end());
    betas.erase(std::unique(betas.begin(), betas.end()), betas.end());
    for (double b : betas) {
      if (!(b > 0.5 && b < a + 0.5)) continue;
      const double cq = mlf::c_q(a, b, 2.0);
      worst_half = std::max(worst_half, std::abs(cq - mlf::c_2_plancherel(a, b)) / cq);
      const auto pc = mlf::plancherel_phase_check(a, b);
      worst_full = std::max(worst_full, pc.full_angle_rel_diff);
      ++points;
    }
  }
  const bool half = worst_half <= 1e-6, full = worst_full <= 1e-6;
  const std::string verdict = half && !full ? "cos(alpha pi/2)" : full && !half ? "cos(alpha pi)" : "undecided";
  Outcome o;
  o.pass = half;
  o.detail = std::to_string(points) + " points, max rel diff " + fmt(worst_half) + " (tol 1e-6); cos(alpha pi) max rel diff " +
             fmt(worst_full) + "; phase verdict: " + verdict;
  o.values = {{"points", points},
              {"max_rel_diff", worst_half},
              {"max_rel_diff_full_angle", std::isfinite(worst_full) ? json(worst_full) : json(format_double(worst_full))},
              {"phase_verdict", verdict},
              {"tolerance", 1e-6}};
  return o;
}

double sup_error(double alpha, const TimeGrid& g) {
  const auto k = Kernel::fractional(alpha);
  const auto s = volterra::solve_e_rho(k, k, 1.0, g);
  double err = 0.0;
  for (std::size_t i = 1; i < g.size(); ++i)
    err = std::max(err, std::abs(s.values.value(i) - mlf::e_k_closed(g[i], 1.0, alpha)));
  return err;
}

Outcome volterra_closed_form() {
  const double e_half = sup_error(0.5, TimeGrid::graded(5.0, 2048, 0.5));
  const double e1 = sup_error(1.0, TimeGrid::uniform(5.0, 2048)), e2 = sup_error(1.0, TimeGrid::uniform(5.0, 4096));
  Outcome o;
  o.pass = e_half <= 1e-4 && e1 / e2 >= 1.8;
  o.detail = "alpha=0.5 sup error " + fmt(e_half) + " (tol 1e-4); alpha=1 ratio N/2N " + fmt(e1 / e2) + " (min 1.8)";
  o.values = {{"sup_error_half", e_half}, {"ratio_alpha_one", e1 / e2}};
  return o;
}

Outcome kernel_mass() {
  const auto k = Kernel::log1p_inverse();
  const auto s = volterra::solve_e_rho(k, k, 1.0, TimeGrid::geometric(1e6, 2000, 1e-7));
  const auto m = volterra::solution_mass(s, volterra::TailModel::inverse_log_square);
  Outcome o;
  o.pass = std::abs(m.total - 1.0) <= 1e-3;
  o.detail = "grid " + fmt(m.grid_mass) + " + tail " + fmt(m.tail) + " = " + format_double(m.total) + " (tol 1e-3)";
  o.values = {{"grid_mass", m.grid_mass}, {"tail", m.tail}, {"total", m.total}};
  return o;
}

sim::SVEProblem linear_additive(double alpha, double gamma, double x0, double T) {
  auto p = sim::SVEProblem::scalar_fractional(-1.0, alpha, 1.0, ForcingSpec::power(gamma, {x0}), T);
  p.diffusion = sim::Diffusion::additive({1.0});
  return p;
}

Outcome stationary_variance() {
  const double alpha = 0.75, c2 = mlf::c_q(alpha, 1.0, 2.0);
  double T = 1000.0;
  while (sim::variance_integral(T, 1.0, alpha, 1.0) < 0.998 * c2) T *= 2.0;
  const auto grid = sim::terminal_refined_grid(T, 4000, 1e-4);
  double discrete = 0.0;
  for (std::size_t j = 0; j + 1 < grid.size(); ++j) {
    const double e = mlf::e_h_closed(T - grid[j], 1.0, alpha, 1.0);
    discrete += e * e * grid.step(j);
  }
  const auto law = sim::run_ensemble(linear_additive(alpha, 0.0, 0.0, T), grid, 10000, {T}, 606).front();
  const double v = law.variance(0), se = law.variance_stderr(0);
  Outcome o;
  o.pass = std::abs(v - c2) <= 3.0 * se;
  o.detail = "T=" + fmt(T) + " Var=" + fmt(v) + " c_2=" + fmt(c2) + " |diff|/SE=" + fmt(std::abs(v - c2) / se) +
             " (max 3); scheme variance " + fmt(discrete);
  o.values = {{"horizon", T}, {"variance", v}, {"stderr", se}, {"c2", c2}, {"scheme_variance", discrete}};
  return o;
}

Outcome ou_convergence() {
  auto p = sim::SVEProblem::scalar_fractional(-1.0, 1.0, 1.0, ForcingSpec::power(0.0, {3.0}), 8.0);
  p.diffusion = sim::Diffusion::additive({1.0});
  limitdist::ConvergenceOptions o;
  o.times = {1.0, 2.0, 4.0, 8.0};
  o.n_paths = 10000;
  o.step = 0.01;
  o.seed = 707;
  o.oracle = limitdist::GaussianLaw{{0.0}, {std::sqrt(0.5)}};
  const auto r = limitdist::convergence_experiment(p, o);
  bool strictly = true;
  for (std::size_t i = 1; i < r.points.size(); ++i) strictly = strictly && r.points[i].w < r.points[i - 1].w;
  Outcome out;
  out.pass = strictly && r.points.back().w < r.noise_floor;
  std::string ws;
  json pts = json::array();
  for (const auto& pt : r.points) {
    ws += fmt(pt.w) + " ";
    pts.push_back({{"t", pt.t}, {"w", pt.w}, {"stderr", pt.stderr_w}});
  }
  out.detail = "W = " + ws + "floor " + fmt(r.noise_floor) + (strictly ? ", decreasing" : ", not decreasing");
  out.values = {{"points", pts}, {"noise_floor", r.noise_floor}};
  return out;
}

Outcome dichotomy() {
  const auto grid = sim::terminal_refined_grid(1e7, 2000, 1e-3);
  limitdist::DependenceOptions o;
  o.n_paths = 10000;
  o.seed = 808;
  const auto off = limitdist::initial_dependence_experiment(linear_additive(0.8, 0.4, 0.0, grid.horizon()),
                                                            ForcingSpec::power(0.4, {2.0}),
                                                            ForcingSpec::power(0.4, {0.0}), grid, o);
  const auto on = limitdist::initial_dependence_experiment(linear_additive(0.8, 0.8, 0.0, grid.horizon()),
                                                           ForcingSpec::power(0.8, {2.0}),
                                                           ForcingSpec::power(0.8, {0.0}), grid, o);
  const double z = std::abs(on.mean_diff[0] - 2.0) / on.mean_diff_stderr[0];
  Outcome out;
  out.pass = off.w <= off.noise_floor && z <= 3.0 && on.w >= 10.0 * on.noise_floor;
  out.detail = "gamma=0.4: W " + fmt(off.w) + " floor " + fmt(off.noise_floor) + "; gamma=0.8: mean diff " +
               fmt(on.mean_diff[0]) + " (" + fmt(z) + " SE from 2), W " + fmt(on.w) + " = " +
               fmt(on.w / on.noise_floor) + "x floor";
  out.values = {{"off_w", off.w},         {"off_floor", off.noise_floor}, {"on_mean_diff", on.mean_diff[0]},
                {"on_mean_diff_se", on.mean_diff_stderr[0]}, {"on_w", on.w},    {"on_floor", on.noise_floor}};
  return out;
}

Outcome restart_law() {
  const auto p = linear_additive(0.75, 0.0, 1.0, 3.0);
  const auto grid = TimeGrid::uniform(3.0, 300);
  const auto direct = sim::run_ensemble(p, grid, 10000, {3.0}, 909).front();
  const auto restarted = sim::run_restart_ensemble(p, grid, 1.0, 10000, {2.0}, 910).front();
  const double ks = ks_statistic(direct.mode(0), restarted.mode(0)), crit = ks_critical_5pct(10000, 10000);
  Outcome o;
  o.pass = ks < crit;
  o.detail = "KS " + fmt(ks) + " < critical " + fmt(crit);
  o.values = {{"ks", ks}, {"critical", crit}};
  return o;
}

Outcome heat_modes() {
  const auto op = spectral::DiagonalOperator::dirichlet_laplacian(1, 32);
  auto p = sim::SVEProblem::spectral_fractional(op, 1.0, 1.0, ForcingSpec::power(0.0, std::vector<double>(32, 0.0)),
                                                10.0);
  p.diffusion = sim::Diffusion::additive({1.0});
  const auto law = sim::run_ensemble(p, sim::terminal_refined_grid(10.0, 2000, 1e-5), 10000, {10.0}, 1010).front();
  Outcome o;
  o.pass = true;
  json modes = json::array();
  for (int n : {1, 2, 4, 8}) {
    const double v = law.variance(n - 1), se = law.variance_stderr(n - 1), target = 1.0 / (2.0 * n * n);
    const double z = std::abs(v - target) / se;
    o.pass = o.pass && z <= 3.0;
    o.detail += "n=" + std::to_string(n) + ": " + fmt(z) + " SE  ";
    modes.push_back({{"n", n}, {"variance", v}, {"stderr", se}, {"target", target}});
  }
  o.values = {{"modes", modes}};
  return o;
}

Outcome heat_region() {
  const auto iv = conditions::heat_beta_interval(1, 1.0, 0.0, false);
  const auto lo = conditions::check_heat_region(1, 1.0, 0.75, 0.0, 0.0, false);
  const auto hi = conditions::check_heat_region(1, 1.0, 1.5, 0.0, 0.0, false);
  Outcome o;
  o.pass = iv.lower == 0.75 && iv.upper == 1.5 && iv.lower_open && !iv.upper_open && lo.verdict == Verdict::fail &&
           hi.verdict == Verdict::pass;
  o.detail = std::string(iv.lower_open ? "(" : "[") + format_double(iv.lower) + ", " + format_double(iv.upper) +
             (iv.upper_open ? ")" : "]") + "; beta=3/4 " + to_string(lo.verdict) + ", beta=3/2 " +
             to_string(hi.verdict);
  o.values = {{"lower", iv.lower}, {"upper", iv.upper}, {"lower_open", iv.lower_open}, {"upper_open", iv.upper_open}};
  return o;
}

Outcome run_property_suites() {
  const auto& suites = ::property_suites;
  Outcome o;
  o.pass = !suites.empty();
  for (const auto& s : suites) {
    const std::string cmd = "\"" + s + "\" --gtest_brief=1 > /dev/null 2>&1";
    const bool ok = std::system(cmd.c_str()) == 0;
    o.pass = o.pass && ok;
    const auto name = s.substr(s.find_last_of('/') + 1);
    o.detail += name + (ok ? " ok  " : " FAILED  ");
    o.values[name] = ok;
  }
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::vector<int> only;
  std::string out = "acceptance_report.json";
  app.add_option("--only", only, "run these criteria only");
  app.add_option("--out", out, "run artifact (JSON)");
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> criteria{
      {1, "mittag_leffler_reductions", 1.0, ml_reductions},
      {2, "c1_identity", 10.0, c1_identity},
      {3, "plancherel_cross_oracle", 30.0, plancherel},
      {4, "volterra_vs_closed_form", 5.0, volterra_closed_form},
      {5, "kernel_mass_log1p", 5.0, kernel_mass},
      {6, "stationary_variance", 120.0, stationary_variance},
      {7, "ou_limit_convergence", 60.0, ou_convergence},
      {8, "initial_condition_dichotomy", 300.0, dichotomy},
      {9, "restart_law_equality", 120.0, restart_law},
      {10, "spectral_heat_modes", 300.0, heat_modes},
      {11, "heat_region_interval", 1.0, heat_region},
      {12, "property_suites", 300.0, run_property_suites},
  };

  json report = json::array();
  bool all = true;
  for (const auto& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < c.budget_s;
    const bool pass = o.pass && in_time;
    all = all && pass;
    std::printf("[%s] %2d %-28s %s | %.2f s (budget %g s)\n", pass ? "PASS" : "FAIL", c.id, c.name.c_str(),
                o.detail.c_str(), secs, c.budget_s);
    std::fflush(stdout);
    report.push_back({{"id", c.id},
                      {"name", c.name},
                      {"pass", pass},
                      {"runtime_s", secs},
                      {"budget_s", c.budget_s},
                      {"detail", o.detail},
                      {"values", o.values}});
  }
  std::ofstream(out) << json{{"criteria", report}, {"all_pass", all}}.dump(2) << '\n';
  return all ? 0 : 1;
}
