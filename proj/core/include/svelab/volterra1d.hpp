#pragma once

#include <cstddef>
#include <string>
#include <optional>
#include <vector>

#include "svelab/grid.hpp"
#include "svelab/kernel.hpp"
#include "svelab/verdict.hpp"

namespace svelab::volterra {

/// Solution of a scalar second-kind Volterra equation on a grid.
///
/// The unknown is represented by its cell averages; the kernel enters only
/// through exact double integrals over pairs of cells, which are second
/// differences of the kernel's second primitive. Node values are reconstructed
/// from the cell averages (the value at t = 0 is rho(0), possibly +inf).
struct Solution {
  GridFunction values;
  std::vector<double> cell_means;

  const TimeGrid& grid() const { return values.grid(); }
  /// sum_j (t_{j+1} - t_j) * mean_j
  double grid_mass() const;
  /// Cumulative integral int_0^{t_i} at every node.
  std::vector<double> cumulative() const;
};

/// Solves e(t) + lambda int_0^t k(t-s) e(s) ds = rho(t); lambda may be negative.
Solution solve_second_kind(const Kernel& k, const Kernel& rho, double lambda, const TimeGrid& grid);

/// e_rho(t; mu) + mu (k * e_rho)(t) = rho(t), mu >= 0.
Solution solve_e_rho(const Kernel& k, const Kernel& rho, double mu, const TimeGrid& grid);
Solution solve_e_rho(const Kernel& k, const GridFunction& rho, double mu, const TimeGrid& grid);

/// Largest cell-integrated residual of the discrete equation, relative to
/// max(1, |int_cell rho|).
double discrete_residual(const Kernel& k, const Kernel& rho, double lambda, const Solution& sol);

enum class TailModel {
  none,
  power,               // e(t) ~ c t^{p}, p < -1
  inverse_log_square,  // e(t) ~ A / (t (log t + B)^2), for kernels decaying like 1/t
};

/// Tail model matching the asymptotics of e_k for the kernel family.
TailModel default_tail_model(const Kernel& k);

struct MassEstimate {
  double grid_mass = 0.0;
  double tail = 0.0;
  double total = 0.0;
  double fitted_exponent = 0.0;
  TailModel model = TailModel::none;
};

/// Grid mass plus the tail beyond the horizon, fitted on the cell means of the
/// last decade. For the power model a known exponent fixes the slope and only
/// the amplitude is fitted.
MassEstimate solution_mass(const Solution& sol, TailModel model, std::optional<double> exponent = std::nullopt);

/// r = rho + rho * r by forward substitution; rho >= 0 required.
Solution resolvent_second_kind(const GridFunction& rho);

struct PaleyWienerReport {
  Verdict verdict = Verdict::inconclusive;  // pass: int rho < 1, so r in L^1
  bool integrable = false;
  double total_mass = 0.0;
  double error_band = 0.0;
};

/// Decides int_0^inf rho < 1 from the grid mass plus the supplied tail bound.
PaleyWienerReport paley_wiener_check(const GridFunction& rho, double tail_mass);

/// f + mu (r * f) at the nodes of f's grid.
GridFunction gronwall_majorant(const GridFunction& f, const GridFunction& r, double mu);

/// (rho * f)(t_i) at the nodes of f's grid, with rho given as a kernel and f
/// represented by its cell averages.
std::vector<double> convolve(const Kernel& rho, const GridFunction& f);

struct CMReport {
  Verdict verdict = Verdict::inconclusive;
  bool positive = false;
  bool nonincreasing = false;
  bool log_convex = false;
  bool neg_derivative_positive = false;
  bool neg_derivative_log_convex = false;
  bool degenerate_derivative = false;
  std::size_t samples = 0;
  std::string notes;
};

/// Numerical checks of k > 0, k nonincreasing, ln k convex and ln(-k') convex
/// on a logarithmic sample grid.
CMReport cm_prerequisites(const Kernel& k);

/// nu^q max{C^q/(1 - q delta), C^{q-1}} (1 v mu)^{-(1 - q delta)/(1 - delta)},
/// an upper bound on int |e_h(.; mu)|^q for h = k * nu.
double lq_bound_convolved(const Kernel& k, double nu_mass, double mu, double q);

/// nu^q [C^q/(1 - q delta) (1 v mu)^{-(1 - q delta) kappa} + C^{q-1} (1 v mu)^{(q-1) kappa delta} / mu]
/// with kappa = 1/(1 - delta). Valid for every mu > 0; the single-term form
/// above drops the 1/mu growth below mu = 1.
double lq_bound_convolved_sum(const Kernel& k, double nu_mass, double mu, double q);

}  // namespace svelab::volterra
