#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "svelab/empirical.hpp"
#include "svelab/grid.hpp"
#include "svelab/kernel.hpp"
#include "svelab/spectral.hpp"

namespace svelab::sim {

struct Drift {
  enum class Kind { zero, linear, lipschitz };
  Kind kind = Kind::zero;
  double slope = 0.0;
  /// Scalar map; on a Dirichlet operator in d = 1 it acts pointwise in space.
  std::function<double(double)> f;
  std::string description = "zero";
  double C_F_lip = 0.0;
  double C_F_lin = 0.0;
  std::optional<double> sup_bound;

  static Drift zero();
  static Drift linear(double slope);
  static Drift lipschitz(std::function<double(double)> f, std::string description, double C_F_lip, double C_F_lin,
                         std::optional<double> sup_bound = std::nullopt);
};

struct Diffusion {
  enum class Kind { additive, diagonal_multiplicative, pointwise_multiplicative };
  Kind kind = Kind::additive;
  std::vector<double> sigma0;  // additive amplitude per mode; one entry is broadcast
  std::function<double(std::size_t, double)> mode_map;  // diagonal: sigma_n(u) = mode_map(n, u_n)
  std::function<double(double)> f;                       // pointwise: (sigma(v) w)(x) = f(v(x)) w(x)
  std::string description = "additive";
  double C_sigma_lip = 0.0;
  double C_sigma_lin = 0.0;

  static Diffusion none();
  static Diffusion additive(std::vector<double> sigma0);
  static Diffusion diagonal_multiplicative(std::function<double(std::size_t, double)> map, std::string description,
                                           double C_sigma_lip, double C_sigma_lin);
  static Diffusion pointwise_multiplicative(std::function<double(double)> f, std::string description,
                                            double C_sigma_lip, double C_sigma_lin);
};

enum class Scheme { euler_left, exact_gaussian };

/// Truncated stochastic Volterra equation
///   u(t) = Gg(t) + int_0^t E_k(t-s) F(u(s)) ds + int_0^t E_h(t-s) sigma(u(s)) dW(s)
/// on the modes of a diagonal operator; a scalar problem is a single mode with mu = -A.
struct SVEProblem {
  spectral::DiagonalOperator op;
  bool scalar = false;
  std::optional<spectral::FractionalPair> fractional;
  std::optional<Kernel> k;
  std::optional<Kernel> h;
  Drift drift;
  Diffusion diffusion;
  spectral::ForcingSpec forcing;
  double horizon = 1.0;
  Scheme scheme = Scheme::euler_left;

  static SVEProblem scalar_fractional(double A, double alpha, double beta, spectral::ForcingSpec forcing,
                                      double horizon);
  static SVEProblem scalar_general(double A, Kernel k, Kernel h, spectral::ForcingSpec forcing, double horizon);
  static SVEProblem spectral_fractional(spectral::DiagonalOperator op, double alpha, double beta,
                                        spectral::ForcingSpec forcing, double horizon);
  static SVEProblem spectral_general(spectral::DiagonalOperator op, Kernel k, Kernel h, spectral::ForcingSpec forcing,
                                     double horizon);

  std::size_t modes() const noexcept { return op.size(); }
  /// Throws ValidationError when the problem is inconsistent.
  void validate() const;
  /// Additive noise without drift: a node depends on no earlier state.
  bool is_state_free() const;
};

struct PathSample {
  TimeGrid grid;
  std::vector<double> states;  // node-major, states[i * modes + n]
  std::size_t modes = 1;
  SeedLineage lineage;

  std::vector<double> at(std::size_t node) const;
  double value(std::size_t node, std::size_t mode = 0) const { return states[node * modes + mode]; }
};

/// Path indices with this bit set address the fresh-noise namespace of restarted paths.
inline constexpr std::uint64_t kRestartNamespace = std::uint64_t{1} << 63;

/// Precomputed mean and kernel weights for one (problem, grid) pair; shared
/// read-only across paths.
class Simulator {
 public:
  Simulator(SVEProblem problem, TimeGrid grid);
  ~Simulator();
  Simulator(Simulator&&) noexcept;
  Simulator& operator=(Simulator&&) noexcept;

  const SVEProblem& problem() const noexcept;
  const TimeGrid& grid() const noexcept;
  const spectral::ModeFunction& mean() const noexcept;

  PathSample path(std::uint64_t path_index, std::uint64_t master_seed) const;
  /// Same recursion with the mean replaced by xi (node-major values on grid()).
  PathSample path_with_mean(const std::vector<double>& xi, std::uint64_t path_index, std::uint64_t master_seed) const;
  /// States at the given nodes only; skips intermediate nodes when is_state_free().
  /// A non-null xi replaces the mean as in path_with_mean.
  std::vector<double> states_at(const std::vector<std::size_t>& nodes, std::uint64_t path_index,
                                std::uint64_t master_seed, const std::vector<double>* xi = nullptr) const;
  /// Path restricted to nodes 0..n_nodes-1.
  PathSample prefix(std::size_t n_nodes, std::uint64_t path_index, std::uint64_t master_seed) const;

  /// Restart forcing xi_tau on the shifted grid {t_i - tau : t_i >= tau}, node-major.
  std::vector<double> restart_values(const PathSample& path, std::size_t tau_node) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

PathSample simulate_path(const SVEProblem& problem, const TimeGrid& grid, std::uint64_t path_index,
                         std::uint64_t master_seed);

/// Exact Gaussian marginals: mean Gg(t), per-mode variance sigma0_n^2 int_0^t e_h(s; mu_n)^2 ds.
/// Linear drift c is absorbed into the operator (mu_n -> mu_n - c).
std::vector<EmpiricalDistribution> sample_exact_gaussian(const SVEProblem& problem, const std::vector<double>& times,
                                                         std::size_t n_samples, std::uint64_t master_seed);

/// int_0^t e_h(s; mu)^2 ds for fractional kernels.
double variance_integral(double t, double mu, double alpha, double beta);

/// Grid on [0, T] whose steps grow geometrically backwards from T, the
/// smallest step first_step sitting at the horizon.
TimeGrid terminal_refined_grid(double horizon, std::size_t steps, double first_step);

/// Forcing that restarts the realized path at tau: its mild form on [0, T - tau].
spectral::ForcingSpec restart_forcing(const SVEProblem& problem, const PathSample& path, double tau);
/// The problem with horizon T - tau and the restart forcing.
SVEProblem restarted_problem(const SVEProblem& problem, const PathSample& path, double tau);

struct PathFailure {
  std::uint64_t path_index;
  std::string message;
};

class EnsembleError : public std::runtime_error {
 public:
  explicit EnsembleError(std::vector<PathFailure> failures);
  const std::vector<PathFailure>& failures() const noexcept { return failures_; }

 private:
  std::vector<PathFailure> failures_;
};

/// Marginal samples at record_times (grid nodes) over paths 0..n_paths-1.
/// Bit-identical for any worker count; workers = 0 uses the hardware count.
std::vector<EmpiricalDistribution> run_ensemble(const SVEProblem& problem, const TimeGrid& grid,
                                                std::size_t n_paths, const std::vector<double>& record_times,
                                                std::uint64_t master_seed, unsigned workers = 1);

/// Each path is realized on [0, tau], restarted with fresh noise and recorded
/// at restarted times t (i.e. original times t + tau).
std::vector<EmpiricalDistribution> run_restart_ensemble(const SVEProblem& problem, const TimeGrid& grid, double tau,
                                                        std::size_t n_paths, const std::vector<double>& record_times,
                                                        std::uint64_t master_seed, unsigned workers = 1);

/// Runs body(i) for i in [0, n) on a fixed pool; failures are collected per index.
void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& body);

}  // namespace svelab::sim
