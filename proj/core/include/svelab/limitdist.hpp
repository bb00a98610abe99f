#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "svelab/empirical.hpp"
#include "svelab/grid.hpp"
#include "svelab/simulator.hpp"
#include "svelab/spectral.hpp"

namespace svelab::limitdist {

/// Exact empirical W_p through the quantile functions; for equal sizes this
/// is the sorted pairing ((1/N) sum |x_(i) - y_(i)|^p)^{1/p}. Unequal sizes
/// merge the quantile breakpoints instead of resampling.
double wasserstein_1d(std::vector<double> x, std::vector<double> y, double p = 2.0);
/// Scalar laws only.
double wasserstein_1d(const EmpiricalDistribution& X, const EmpiricalDistribution& Y, double p = 2.0);

/// (sum_n W_2(mode n)^2)^{1/2}; exact for product laws, an estimate otherwise.
double wasserstein_modewise(const EmpiricalDistribution& X, const EmpiricalDistribution& Y);

/// (mean over random unit directions of W_p(projections)^p)^{1/p}. Diagnostic only.
double sliced_wasserstein(const EmpiricalDistribution& X, const EmpiricalDistribution& Y, double p,
                          std::size_t directions, std::uint64_t seed);

/// W_p for scalar laws, the mode-wise W_2 aggregate otherwise (p must be 2).
double distance(const EmpiricalDistribution& X, const EmpiricalDistribution& Y, double p = 2.0);

/// Diagonal Gaussian law per mode.
struct GaussianLaw {
  std::vector<double> mean;
  std::vector<double> sd;
};

/// Semi-discrete W_2 between the empirical law and a diagonal Gaussian,
/// aggregated over modes; closed form per order statistic.
double wasserstein2_to_gaussian(const EmpiricalDistribution& X, const GaussianLaw& law);

/// Bootstrap standard error of distance(X, Y, p), resampling both sides.
double bootstrap_stderr(const EmpiricalDistribution& X, const EmpiricalDistribution& Y, double p, std::size_t reps,
                        std::uint64_t seed);
double bootstrap_stderr(const EmpiricalDistribution& X, const GaussianLaw& law, std::size_t reps, std::uint64_t seed);

/// Quantile of distance between two same-law samples, from random splits of
/// the pooled samples (equal sizes required).
double permutation_noise_floor(const EmpiricalDistribution& X, const EmpiricalDistribution& Y, double p,
                               std::size_t reps, std::uint64_t seed, double quantile = 0.99);
/// Quantile of wasserstein2_to_gaussian for n exact draws from the law.
double gaussian_noise_floor(std::size_t n, const GaussianLaw& law, std::size_t reps, std::uint64_t seed,
                            double quantile = 0.99);

/// Components of the rate envelope C (D(t/2) + (int_{t/2}^inf r)^{1/p}) with
/// D = xi_decay + ek_tail + klin_tail_sq^{1/2}. All must be non-negative and
/// non-increasing.
struct RateBoundInputs {
  std::function<double(double)> xi_decay;      // ||xi(t) - xi(inf)||
  std::function<double(double)> ek_tail;       // int_t^inf ||E_k||
  std::function<double(double)> klin_tail_sq;  // int_t^inf K_lin^2
  std::function<double(double)> r_tail;        // int_t^inf r
  double p = 2.0;
  std::string description;

  double D(double t) const;
  /// Samples the components on [0, horizon] and throws ValidationError on a
  /// negative or increasing component.
  void validate(double horizon, std::size_t samples = 64) const;
};

enum class FitMode {
  log_least_squares,  // log C = mean of log(w / envelope)
  dominating,         // smallest C with C * envelope >= w at every point
};

struct ConvergenceOptions {
  std::vector<double> times;
  std::size_t n_paths = 10000;
  double p = 2.0;
  double reference_factor = 4.0;  // late-time proxy at this multiple of max(times)
  std::size_t bootstrap = 200;
  std::size_t null_reps = 200;
  double noise_quantile = 0.99;
  double step = 0.01;  // uniform grid step; times must be multiples
  std::uint64_t seed = 1;
  unsigned workers = 1;
  std::optional<GaussianLaw> oracle;  // exact limit law in place of the proxy
  std::optional<RateBoundInputs> rate;  // fills bound_envelope with a fitted constant
  FitMode rate_fit = FitMode::log_least_squares;
};

struct ConvergencePoint {
  double t = 0.0;
  double w = 0.0;
  double stderr_w = 0.0;
  double bound_envelope = 0.0;
};

struct ConvergenceResult {
  std::vector<ConvergencePoint> points;
  double noise_floor = 0.0;
  double reference_time = 0.0;
  bool used_oracle = false;
  std::vector<std::string> warnings;

  /// Each value below its predecessor up to noise_floor.
  bool decreasing_within_noise() const;
  /// Rows (t, W_hat, stderr, bound_envelope).
  void write_csv(const std::string& path) const;
};

ConvergenceResult convergence_experiment(const sim::SVEProblem& problem, const ConvergenceOptions& opts);

enum class LimitVerdict { same_limit, different_limit, inconclusive };
std::string to_string(LimitVerdict v);

struct DependenceOptions {
  std::size_t n_paths = 10000;
  std::size_t null_reps = 200;
  double noise_quantile = 0.99;
  std::size_t min_paths = 200;  // fewer paths are reported inconclusive
  std::uint64_t seed = 1;
  unsigned workers = 1;
};

struct DependenceReport {
  double horizon = 0.0;
  double w = 0.0;
  double noise_floor = 0.0;
  std::vector<double> mean_diff;         // xi run minus eta run, per mode
  std::vector<double> mean_diff_stderr;
  std::optional<std::vector<double>> predicted_mean_diff;  // Gg(inf) difference when a limit statement applies
  LimitVerdict verdict = LimitVerdict::inconclusive;
  std::string diagnostic;
};

/// Late-time laws of u(.; xi) and u(.; eta) from independent ensembles on the grid.
DependenceReport initial_dependence_experiment(const sim::SVEProblem& problem, const spectral::ForcingSpec& xi,
                                               const spectral::ForcingSpec& eta, const TimeGrid& grid,
                                               const DependenceOptions& opts);

/// t -> int_t^inf r for r = rho + rho * r, using int r = m / (1 - m) with
/// m = int rho. Throws DomainError when int rho < 1 cannot be certified.
std::function<double(double)> resolvent_tail(const GridFunction& rho, double rho_tail_mass);

/// Inputs for the scalar problem with A < 0, fractional kernels and p = 2:
/// rho(t) = 3 C_F_lip^2 |e_k|_1 e_k(t) + 3 C_sigma_lip^2 e_h(t)^2 and K_lin = C_sigma_lin e_h.
RateBoundInputs scalar_rate_inputs(double A, double alpha, double beta, double C_F_lip, double C_sigma_lip,
                                   double C_sigma_lin, std::function<double(double)> xi_decay,
                                   double rho_horizon = 200.0, std::size_t rho_steps = 4000);

double rate_bound(const RateBoundInputs& in, double t, double C);

double fit_rate_constant(const RateBoundInputs& in, const std::vector<double>& t, const std::vector<double>& w,
                         FitMode mode = FitMode::log_least_squares);

}  // namespace svelab::limitdist
