#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "svelab/grid.hpp"
#include "svelab/kernel.hpp"

namespace svelab::spectral {

/// Self-adjoint operator A with A e_n = -mu_n e_n, truncated to finitely many
/// modes. Eigenvalues are kept sorted ascending.
class DiagonalOperator {
 public:
  /// Finite operator given by its eigenvalues; no modes exist beyond the list.
  static DiagonalOperator explicit_list(std::vector<double> eigenvalues);
  /// Dirichlet Laplacian on [0, pi]^d: mu = n_1^2 + ... + n_d^2 with
  /// 1 <= n_i <= per_axis_cap, sorted ascending, ties in lexicographic order.
  static DiagonalOperator dirichlet_laplacian(int dim, int per_axis_cap);

  /// Keeps the n smallest eigenvalues.
  DiagonalOperator truncated(std::size_t n) const;

  std::size_t size() const noexcept { return mu_.size(); }
  double operator[](std::size_t i) const { return mu_[i]; }
  const std::vector<double>& eigenvalues() const noexcept { return mu_; }
  /// Multi-indices (n_1, ..., n_d) of Dirichlet modes; empty for explicit lists.
  const std::vector<std::vector<int>>& indices() const noexcept { return idx_; }
  bool is_dirichlet() const noexcept { return dim_ > 0; }
  int dimension() const noexcept { return dim_; }
  /// Lower bound on every eigenvalue that is not retained (+inf for explicit lists).
  double tail_threshold() const noexcept { return tail_threshold_; }

  /// Upper bound on sum over the modes not retained of mu^s (+inf when the
  /// full series diverges, i.e. 2s >= -d). Lattice-point comparison with
  /// the volume integral over the complement of a ball.
  double tail_power_sum(double s) const;

  void save_csv(const std::string& path) const;
  static DiagonalOperator load_csv(const std::string& path);

 private:
  DiagonalOperator() = default;
  std::vector<double> mu_;
  std::vector<std::vector<int>> idx_;
  int dim_ = 0;
  double tail_threshold_ = 0.0;
};

/// ||x||_lambda = (sum mu_n^{2 lambda} x_n^2)^{1/2}.
double fractional_norm(const DiagonalOperator& op, double lambda, const std::vector<double>& x);

/// ||i||_{L(H^delta, H)} = mu_1^{-delta}.
double embedding_norm(const DiagonalOperator& op, double delta);

enum class KernelRole { k, h };

/// Fractional kernels k = t^{alpha-1}/Gamma(alpha), h = t^{beta-1}/Gamma(beta).
struct FractionalPair {
  double alpha = 1.0;
  double beta = 1.0;
  double exponent(KernelRole role) const { return role == KernelRole::k ? alpha : beta; }
};

/// Componentwise x_n e_rho(t; mu_n) with the closed-form fractional resolvent.
std::vector<double> apply_resolvent(const DiagonalOperator& op, const FractionalPair& kernels, KernelRole role,
                                    double t, const std::vector<double>& x);

/// Same for general kernels: e_rho(t; mu_n) from a Volterra solve on a graded
/// grid over [0, t] with the given number of steps.
std::vector<double> apply_resolvent(const DiagonalOperator& op, const Kernel& k, const Kernel& rho, double t,
                                    const std::vector<double>& x, std::size_t steps = 400);

enum class NormCase {
  bounded,          // int ||E(t)||^q_{L(H^lambda, H^rho)} <= c_q sum mu^s
  hilbert_schmidt,  // int ||E(t)||^2_{L_2(H^lambda, H^rho)} = c_2 sum mu^s
  single_mode,      // int ||E(t)||^q_{L(H)} = c_q mu_1^{...}
};

struct SeriesValue {
  double value = 0.0;       // truncated series (times its constant)
  double tail_bound = 0.0;  // bound on the omitted modes
  double constant = 0.0;    // c_q or the closed-form prefactor
  double exponent = 0.0;    // power of mu_n in the series
  bool divergent = false;
  double critical_exponent = 0.0;  // series converges iff exponent < critical
  std::string diagnostic;
  double upper() const { return value + tail_bound; }
};

/// Time integral of the q-th power of the operator norm of E_k or E_h for
/// fractional kernels, as a mode series with its tail bound.
SeriesValue operator_norm_series(const DiagonalOperator& op, const FractionalPair& kernels, KernelRole role,
                                 NormCase norm, double q, double lambda, double rho);

struct CmBound {
  SeriesValue printed;   // closed form as stated
  SeriesValue two_term;  // per-mode two-term bound from the proof (q > 1 only)
};

/// Bounds on int ||E_h||^q for h = k * nu with completely monotone k:
/// q = 1 gives sum mu^{rho - lambda - 1} (1/mu_1 in L(H)); q in (1, 1/delta)
/// gives the prefactor max{C^q/(1 - q delta), C^{q-1}} with per-mode factor
/// mu^{q(rho - lambda)} (1 v mu)^{-(1 - q delta)/(1 - delta)}.
/// Throws ValidationError when the kernel fails cm_prerequisites.
/// NormCase::single_mode gives the L(H) bound (mode 1 only); bounded and
/// hilbert_schmidt give the mode series (the latter with q = 2).
CmBound operator_norm_series_cm(const DiagonalOperator& op, const Kernel& k, NormCase norm, double q,
                                double lambda, double rho, double nu_mass = 1.0);

/// Forcing g in the mild formulation, per mode.
struct ForcingSpec {
  enum class Kind {
    power,             // g(t) = int_0^t (t-s)^{gamma-1}/Gamma(gamma) g0(s) ds; constant g0 gives t^gamma/Gamma(1+gamma) x
    kernel_convolved,  // g = k * g0
    tabulated,         // g given per mode on a grid
    mild,              // xi = Gg given directly per mode on a grid
  };
  Kind kind = Kind::power;
  double gamma = 0.0;
  std::vector<double> x;               // constant g0 per mode
  std::vector<GridFunction> g0;        // time-varying g0 per mode (optional)
  std::vector<double> g0_limit;        // declared g0(inf) per mode
  std::vector<GridFunction> g;         // tabulated g per mode

  static ForcingSpec power(double gamma, std::vector<double> x);
  static ForcingSpec power(double gamma, std::vector<GridFunction> g0, std::vector<double> g0_limit);
  static ForcingSpec kernel_convolved(std::vector<double> x);
  static ForcingSpec kernel_convolved(std::vector<GridFunction> g0, std::vector<double> g0_limit);
  static ForcingSpec tabulated(std::vector<GridFunction> g);
  /// The mild-form forcing itself; compute_Gg only resamples it.
  static ForcingSpec mild(std::vector<GridFunction> xi);

  std::size_t modes() const;
};

/// Mode-vector valued function on a grid.
struct ModeFunction {
  std::vector<GridFunction> modes;
  const TimeGrid& grid() const { return modes.front().grid(); }
  std::vector<double> at(std::size_t node) const;
};

/// Gg on the grid for fractional k with exponent alpha.
ModeFunction compute_Gg(const DiagonalOperator& op, const ForcingSpec& forcing, double alpha, const TimeGrid& grid);
/// Gg on the grid for a general kernel; mode n solves Gg + mu_n k * Gg = g.
ModeFunction compute_Gg(const DiagonalOperator& op, const ForcingSpec& forcing, const Kernel& k, const TimeGrid& grid);

/// xi(inf) = lim Gg(t): 0 for gamma < alpha, (-A)^{-1} g0(inf) for gamma = alpha,
/// (||k||_1^{-1} - A)^{-1} g0(inf) for k-convolved forcing. Throws
/// ValidationError when the hypotheses of the limit statement fail.
std::vector<double> Gg_limit(const DiagonalOperator& op, const ForcingSpec& forcing, double alpha, const Kernel& k);

/// lim e_1(t; mu_n) = 1/(1 + khat(0) mu_n), zero when k is not integrable.
std::vector<double> e1_infinity(const DiagonalOperator& op, const Kernel& k);

}  // namespace svelab::spectral
