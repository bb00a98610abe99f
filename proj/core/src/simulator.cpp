#include "svelab/simulator.hpp"

#include <fftw3.h>

#include <boost/math/tools/toms748_solve.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "svelab/error.hpp"
#include "svelab/mlf.hpp"
#include "svelab/quadrature.hpp"
#include "svelab/rng.hpp"
#include "svelab/volterra1d.hpp"

namespace svelab::sim {

using spectral::DiagonalOperator;
using spectral::ForcingSpec;
using spectral::ModeFunction;

Drift Drift::zero() { return Drift{}; }

Drift Drift::linear(double slope) {
  if (!std::isfinite(slope)) throw DomainError("Drift::linear: slope must be finite");
  Drift d;
  d.kind = Kind::linear;
  d.slope = slope;
  d.description = "linear";
  d.C_F_lip = d.C_F_lin = std::abs(slope);
  return d;
}

Drift Drift::lipschitz(std::function<double(double)> f, std::string description, double C_F_lip, double C_F_lin,
                       std::optional<double> sup_bound) {
  if (!f) throw ValidationError("Drift::lipschitz: empty map");
  if (!(C_F_lip >= 0.0) || !(C_F_lin >= 0.0)) throw DomainError("Drift::lipschitz: constants must be non-negative");
  Drift d;
  d.kind = Kind::lipschitz;
  d.f = std::move(f);
  d.description = std::move(description);
  d.C_F_lip = C_F_lip;
  d.C_F_lin = C_F_lin;
  d.sup_bound = sup_bound;
  return d;
}

Diffusion Diffusion::none() { return additive({0.0}); }

Diffusion Diffusion::additive(std::vector<double> sigma0) {
  if (sigma0.empty()) throw ValidationError("Diffusion::additive: no amplitudes");
  for (double s : sigma0)
    if (!std::isfinite(s)) throw DomainError("Diffusion::additive: amplitudes must be finite");
  Diffusion d;
  d.sigma0 = std::move(sigma0);
  return d;
}

Diffusion Diffusion::diagonal_multiplicative(std::function<double(std::size_t, double)> map, std::string description,
                                             double C_sigma_lip, double C_sigma_lin) {
  if (!map) throw ValidationError("Diffusion::diagonal_multiplicative: empty map");
  Diffusion d;
  d.kind = Kind::diagonal_multiplicative;
  d.mode_map = std::move(map);
  d.description = std::move(description);
  d.C_sigma_lip = C_sigma_lip;
  d.C_sigma_lin = C_sigma_lin;
  return d;
}

Diffusion Diffusion::pointwise_multiplicative(std::function<double(double)> f, std::string description,
                                              double C_sigma_lip, double C_sigma_lin) {
  if (!f) throw ValidationError("Diffusion::pointwise_multiplicative: empty map");
  Diffusion d;
  d.kind = Kind::pointwise_multiplicative;
  d.f = std::move(f);
  d.description = std::move(description);
  d.C_sigma_lip = C_sigma_lip;
  d.C_sigma_lin = C_sigma_lin;
  return d;
}

namespace {

DiagonalOperator scalar_operator(double A) {
  if (!(A < 0.0) || !std::isfinite(A)) throw DomainError("SVEProblem: scalar problems need a finite A < 0");
  return DiagonalOperator::explicit_list({-A});
}

bool has_collocation(const DiagonalOperator& op) {
  if (!op.is_dirichlet() || op.dimension() != 1) return false;
  for (std::size_t i = 0; i < op.size(); ++i)
    if (op.indices()[i][0] != static_cast<int>(i + 1)) return false;
  return true;
}

SVEProblem bare_problem(DiagonalOperator op) {
  return SVEProblem{std::move(op), false, {}, {}, {}, Drift{}, Diffusion::none(), ForcingSpec{}, 1.0,
                    Scheme::euler_left};
}

}  // namespace

SVEProblem SVEProblem::scalar_fractional(double A, double alpha, double beta, ForcingSpec forcing, double horizon) {
  SVEProblem p = bare_problem(scalar_operator(A));
  p.scalar = true;
  p.fractional = spectral::FractionalPair{alpha, beta};
  p.forcing = std::move(forcing);
  p.horizon = horizon;
  return p;
}

SVEProblem SVEProblem::scalar_general(double A, Kernel k, Kernel h, ForcingSpec forcing, double horizon) {
  SVEProblem p = bare_problem(scalar_operator(A));
  p.scalar = true;
  p.k = std::move(k);
  p.h = std::move(h);
  p.forcing = std::move(forcing);
  p.horizon = horizon;
  return p;
}

SVEProblem SVEProblem::spectral_fractional(DiagonalOperator op, double alpha, double beta, ForcingSpec forcing,
                                           double horizon) {
  SVEProblem p = bare_problem(std::move(op));
  p.fractional = spectral::FractionalPair{alpha, beta};
  p.forcing = std::move(forcing);
  p.horizon = horizon;
  return p;
}

SVEProblem SVEProblem::spectral_general(DiagonalOperator op, Kernel k, Kernel h, ForcingSpec forcing,
                                        double horizon) {
  SVEProblem p = bare_problem(std::move(op));
  p.k = std::move(k);
  p.h = std::move(h);
  p.forcing = std::move(forcing);
  p.horizon = horizon;
  return p;
}

void SVEProblem::validate() const {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ValidationError("SVEProblem: horizon must be positive");
  if (fractional.has_value() == (k.has_value() && h.has_value()))
    throw ValidationError("SVEProblem: give either a fractional pair or a general kernel pair");
  if (fractional) {
    if (!(fractional->alpha > 0.0 && fractional->alpha <= 2.0))
      throw ValidationError("SVEProblem: alpha must lie in (0, 2]");
    if (!(fractional->beta > 0.5)) throw ValidationError("SVEProblem: beta > 1/2 is required for an L2 noise kernel");
  } else if (!(h->singularity_exponent() < 0.5)) {
    throw ValidationError("SVEProblem: h must be square integrable near 0 (singularity exponent < 1/2)");
  }
  if (forcing.modes() != modes()) throw ValidationError("SVEProblem: forcing does not match the number of modes");
  if (scalar && modes() != 1) throw ValidationError("SVEProblem: scalar problems have one mode");
  const bool collocation = has_collocation(op);
  if (drift.kind == Drift::Kind::lipschitz && !scalar && !collocation)
    throw ValidationError("SVEProblem: a nonlinear drift needs a scalar problem or a Dirichlet operator in d = 1");
  switch (diffusion.kind) {
    case Diffusion::Kind::additive:
      if (diffusion.sigma0.size() != 1 && diffusion.sigma0.size() != modes())
        throw ValidationError("SVEProblem: additive amplitudes do not match the number of modes");
      break;
    case Diffusion::Kind::diagonal_multiplicative:
      break;
    case Diffusion::Kind::pointwise_multiplicative:
      if (!scalar && !collocation)
        throw ValidationError("SVEProblem: pointwise multiplicative noise needs a Dirichlet operator in d = 1");
      break;
  }
  if (scheme == Scheme::exact_gaussian) {
    if (drift.kind == Drift::Kind::lipschitz || diffusion.kind != Diffusion::Kind::additive)
      throw ValidationError("SVEProblem: exact_gaussian needs a zero or linear drift and additive noise");
    if (!fractional) throw ValidationError("SVEProblem: exact_gaussian needs fractional kernels");
  }
}

bool SVEProblem::is_state_free() const {
  return drift.kind == Drift::Kind::zero && diffusion.kind == Diffusion::Kind::additive;
}

std::vector<double> PathSample::at(std::size_t node) const {
  return {states.begin() + static_cast<std::ptrdiff_t>(node * modes),
          states.begin() + static_cast<std::ptrdiff_t>((node + 1) * modes)};
}

namespace {

std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

/// Sine collocation on x_j = j pi / (N + 1) for the orthonormal basis
/// sqrt(2/pi) sin(n x); both directions are a scaled DST-I.
class SineCollocation {
 public:
  explicit SineCollocation(std::size_t n) : n_(n) {
    std::vector<double> in(n), out(n);
    std::lock_guard lock(fftw_planner_mutex());
    plan_ = fftw_plan_r2r_1d(static_cast<int>(n), in.data(), out.data(), FFTW_RODFT00,
                             FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!plan_) throw std::runtime_error("SineCollocation: FFTW planning failed");
  }
  ~SineCollocation() {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(plan_);
  }
  SineCollocation(const SineCollocation&) = delete;
  SineCollocation& operator=(const SineCollocation&) = delete;

  void to_values(const double* coeffs, double* values) const { apply(coeffs, values, synth_scale()); }
  void to_coeffs(const double* values, double* coeffs) const {
    apply(values, coeffs, synth_scale() * std::numbers::pi / static_cast<double>(n_ + 1));
  }

 private:
  static double synth_scale() { return 0.5 * std::sqrt(2.0 / std::numbers::pi); }
  void apply(const double* in, double* out, double scale) const {
    std::vector<double> buf(in, in + n_);
    fftw_execute_r2r(plan_, buf.data(), out);
    for (std::size_t i = 0; i < n_; ++i) out[i] *= scale;
  }
  std::size_t n_;
  fftw_plan plan_;
};

using Eval = std::function<double(double)>;

/// Kernel-weight rows for j < i, either as lag tables (uniform grids) or per node.
struct WeightTable {
  bool lag = false;
  std::vector<std::vector<double>> lag_values;                         // [mode][lag index]
  std::map<std::size_t, std::vector<std::vector<double>>> row_values;  // node -> [mode][j]

  /// Pointer and stride such that value(j) = p[stride * j].
  std::pair<const double*, std::ptrdiff_t> slice(std::size_t n, std::size_t i) const {
    if (lag) return {lag_values[n].data() + i, -1};
    return {row_values.at(i)[n].data(), 1};
  }
};

constexpr std::size_t kMaxRowEntries = 50'000'000;

}  // namespace

struct Simulator::Impl {
  SVEProblem problem;
  TimeGrid grid;
  std::size_t M = 1;
  ModeFunction mean_fn;
  std::vector<double> mean;  // node-major
  std::vector<double> sigma0;
  std::vector<Eval> cum_ek, eh;
  bool need_drift = false;
  bool need_noise = true;
  WeightTable wk_table, eh_table;
  std::unique_ptr<SineCollocation> colloc;
  std::mutex rows_mutex;

  Impl(SVEProblem p, TimeGrid g) : problem(std::move(p)), grid(std::move(g)) {
    problem.validate();
    if (problem.scheme != Scheme::euler_left)
      throw ValidationError("Simulator: paths need the euler_left scheme");
    if (std::abs(grid.horizon() - problem.horizon) > 1e-9 * problem.horizon)
      throw ValidationError("Simulator: grid horizon differs from the problem horizon");
    M = problem.modes();
    const auto& op = problem.op;
    mean_fn = problem.fractional ? spectral::compute_Gg(op, problem.forcing, problem.fractional->alpha, grid)
                                 : spectral::compute_Gg(op, problem.forcing, *problem.k, grid);
    mean.resize(grid.size() * M);
    for (std::size_t i = 0; i < grid.size(); ++i)
      for (std::size_t n = 0; n < M; ++n) mean[i * M + n] = mean_fn.modes[n].value(i);

    need_drift = problem.drift.kind != Drift::Kind::zero;
    if (problem.diffusion.kind == Diffusion::Kind::additive) {
      const auto& s = problem.diffusion.sigma0;
      sigma0 = s.size() == 1 ? std::vector<double>(M, s[0]) : s;
      need_noise = std::any_of(sigma0.begin(), sigma0.end(), [](double v) { return v != 0.0; });
    }
    if (!problem.scalar && (problem.drift.kind == Drift::Kind::lipschitz ||
                            problem.diffusion.kind == Diffusion::Kind::pointwise_multiplicative))
      colloc = std::make_unique<SineCollocation>(M);

    build_evaluators();
    wk_table.lag = eh_table.lag = grid.is_uniform();
    if (grid.is_uniform()) {
      const std::size_t N = grid.size();
      if (need_drift) {
        wk_table.lag_values.assign(M, std::vector<double>(N, 0.0));
        for (std::size_t n = 0; n < M; ++n)
          for (std::size_t m = 1; m < N; ++m) wk_table.lag_values[n][m] = cum_ek[n](grid[m]) - cum_ek[n](grid[m - 1]);
      }
      if (need_noise) {
        eh_table.lag_values.assign(M, std::vector<double>(N, 0.0));
        for (std::size_t n = 0; n < M; ++n)
          for (std::size_t m = 1; m < N; ++m) eh_table.lag_values[n][m] = eh[n](grid[m]);
      }
    } else if (!problem.is_state_free()) {
      if (grid.size() * grid.size() / 2 * M * (need_drift + need_noise) > kMaxRowEntries)
        throw ValidationError("Simulator: non-uniform grid too large for stored weight rows; use a uniform grid");
      std::vector<std::size_t> all(grid.size());
      for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
      ensure_rows(all);
    }
  }

  void build_evaluators() {
    cum_ek.resize(M);
    eh.resize(M);
    for (std::size_t n = 0; n < M; ++n) {
      const double mu = problem.op[n];
      if (problem.fractional) {
        const double a = problem.fractional->alpha, b = problem.fractional->beta;
        cum_ek[n] = [mu, a](double t) { return mlf::cumulative_e_k(t, mu, a); };
        eh[n] = [mu, a, b](double t) { return mlf::e_h_closed(t, mu, a, b); };
      } else {
        if (need_drift) {
          const auto ek = volterra::solve_e_rho(*problem.k, *problem.k, mu, grid);
          cum_ek[n] = [f = GridFunction(grid, ek.cumulative(), Interpolation::linear)](double t) { return f(t); };
        }
        if (need_noise) {
          const auto sol = volterra::solve_e_rho(*problem.k, *problem.h, mu, grid);
          eh[n] = [f = sol.values](double t) { return f(t); };
        }
      }
    }
  }

  /// Fills per-node rows for non-uniform grids.
  void ensure_rows(const std::vector<std::size_t>& nodes) {
    if (grid.is_uniform()) return;
    std::lock_guard lock(rows_mutex);
    for (std::size_t i : nodes) {
      if (need_drift && !wk_table.row_values.count(i)) {
        std::vector<std::vector<double>> rows(M, std::vector<double>(i));
        for (std::size_t n = 0; n < M; ++n)
          for (std::size_t j = 0; j < i; ++j) rows[n][j] = cum_ek[n](grid[i] - grid[j]) - cum_ek[n](grid[i] - grid[j + 1]);
        wk_table.row_values.emplace(i, std::move(rows));
      }
      if (need_noise && !eh_table.row_values.count(i)) {
        std::vector<std::vector<double>> rows(M, std::vector<double>(i));
        for (std::size_t n = 0; n < M; ++n)
          for (std::size_t j = 0; j < i; ++j) rows[n][j] = eh[n](grid[i] - grid[j]);
        eh_table.row_values.emplace(i, std::move(rows));
      }
    }
  }

  void drift_values(const double* u, double* out) const {
    const Drift& d = problem.drift;
    if (d.kind == Drift::Kind::linear) {
      for (std::size_t n = 0; n < M; ++n) out[n] = d.slope * u[n];
    } else if (problem.scalar) {
      out[0] = d.f(u[0]);
    } else {
      std::vector<double> v(M);
      colloc->to_values(u, v.data());
      for (double& x : v) x = d.f(x);
      colloc->to_coeffs(v.data(), out);
    }
  }

  /// sigma(u) dW in mode coordinates; z holds the standard normals of the step.
  void noise_values(const double* u, const double* z, double sqrt_h, double* out) const {
    const Diffusion& s = problem.diffusion;
    switch (s.kind) {
      case Diffusion::Kind::additive:
        for (std::size_t n = 0; n < M; ++n) out[n] = sigma0[n] * (sqrt_h * z[n]);
        return;
      case Diffusion::Kind::diagonal_multiplicative:
        for (std::size_t n = 0; n < M; ++n) out[n] = s.mode_map(n, u[n]) * (sqrt_h * z[n]);
        return;
      case Diffusion::Kind::pointwise_multiplicative:
        if (problem.scalar) {
          out[0] = s.f(u[0]) * (sqrt_h * z[0]);
          return;
        }
        std::vector<double> v(M), w(M), dw(M);
        colloc->to_values(u, v.data());
        for (std::size_t n = 0; n < M; ++n) dw[n] = sqrt_h * z[n];
        colloc->to_values(dw.data(), w.data());
        for (std::size_t n = 0; n < M; ++n) v[n] = s.f(v[n]) * w[n];
        colloc->to_coeffs(v.data(), out);
        return;
    }
  }

  static void guard(double v, std::size_t node) {
    if (!std::isfinite(v)) throw ConvergenceError("simulate_path: non-finite state", node);
  }

  /// Full recursion over the first n_nodes nodes; Fv and Sv receive F(u_j) and sigma(u_j) dW_j.
  std::vector<double> run(const double* xi, std::size_t n_nodes, std::uint64_t path, std::uint64_t seed,
                          std::vector<double>* Fv_out = nullptr, std::vector<double>* Sv_out = nullptr) const {
    const CounterNormal rng(seed);
    std::vector<double> u(n_nodes * M), Fv(need_drift ? n_nodes * M : 0), Sv(need_noise ? n_nodes * M : 0), z(M);
    for (std::size_t i = 0; i < n_nodes; ++i) {
      for (std::size_t n = 0; n < M; ++n) {
        double acc = xi[i * M + n];
        if (need_drift) {
          const auto [p, s] = wk_table.slice(n, i);
          for (std::size_t j = 0; j < i; ++j) acc += p[s * static_cast<std::ptrdiff_t>(j)] * Fv[j * M + n];
        }
        if (need_noise) {
          const auto [p, s] = eh_table.slice(n, i);
          for (std::size_t j = 0; j < i; ++j) acc += p[s * static_cast<std::ptrdiff_t>(j)] * Sv[j * M + n];
        }
        guard(acc, i);
        u[i * M + n] = acc;
      }
      if (i + 1 == grid.size()) break;
      if (need_drift) drift_values(&u[i * M], &Fv[i * M]);
      if (need_noise) {
        rng.fill(path, static_cast<std::uint32_t>(i), z.data(), static_cast<std::uint32_t>(M));
        noise_values(&u[i * M], z.data(), std::sqrt(grid.step(i)), &Sv[i * M]);
      }
    }
    if (Fv_out) *Fv_out = std::move(Fv);
    if (Sv_out) *Sv_out = std::move(Sv);
    return u;
  }

  /// States at selected nodes of a state-free problem.
  std::vector<double> run_nodes(const double* xi, const std::vector<std::size_t>& nodes, std::uint64_t path,
                                std::uint64_t seed) const {
    std::vector<double> out(nodes.size() * M);
    const std::size_t last = nodes.empty() ? 0 : *std::max_element(nodes.begin(), nodes.end());
    std::vector<double> Sv;
    if (need_noise) {
      const CounterNormal rng(seed);
      Sv.resize(last * M);
      std::vector<double> z(M);
      for (std::size_t j = 0; j < last; ++j) {
        rng.fill(path, static_cast<std::uint32_t>(j), z.data(), static_cast<std::uint32_t>(M));
        noise_values(nullptr, z.data(), std::sqrt(grid.step(j)), &Sv[j * M]);
      }
    }
    for (std::size_t r = 0; r < nodes.size(); ++r) {
      const std::size_t i = nodes[r];
      for (std::size_t n = 0; n < M; ++n) {
        double acc = xi[i * M + n];
        if (need_noise) {
          const auto [p, s] = eh_table.slice(n, i);
          for (std::size_t j = 0; j < i; ++j) acc += p[s * static_cast<std::ptrdiff_t>(j)] * Sv[j * M + n];
        }
        guard(acc, i);
        out[r * M + n] = acc;
      }
    }
    return out;
  }
};

Simulator::Simulator(SVEProblem problem, TimeGrid grid)
    : impl_(std::make_unique<Impl>(std::move(problem), std::move(grid))) {}
Simulator::~Simulator() = default;
Simulator::Simulator(Simulator&&) noexcept = default;
Simulator& Simulator::operator=(Simulator&&) noexcept = default;

const SVEProblem& Simulator::problem() const noexcept { return impl_->problem; }
const TimeGrid& Simulator::grid() const noexcept { return impl_->grid; }
const ModeFunction& Simulator::mean() const noexcept { return impl_->mean_fn; }

PathSample Simulator::path(std::uint64_t path_index, std::uint64_t master_seed) const {
  return path_with_mean(impl_->mean, path_index, master_seed);
}

PathSample Simulator::path_with_mean(const std::vector<double>& xi, std::uint64_t path_index,
                                     std::uint64_t master_seed) const {
  if (xi.size() != impl_->mean.size()) throw ValidationError("Simulator: mean has the wrong size");
  PathSample out{impl_->grid, impl_->run(xi.data(), impl_->grid.size(), path_index, master_seed), impl_->M,
                 SeedLineage{master_seed, path_index}};
  return out;
}

std::vector<double> Simulator::states_at(const std::vector<std::size_t>& nodes, std::uint64_t path_index,
                                         std::uint64_t master_seed, const std::vector<double>* xi) const {
  for (std::size_t i : nodes)
    if (i >= impl_->grid.size()) throw ValidationError("Simulator: record node beyond the grid");
  if (xi && xi->size() != impl_->mean.size()) throw ValidationError("Simulator: mean has the wrong size");
  const double* m = xi ? xi->data() : impl_->mean.data();
  if (impl_->problem.is_state_free()) {
    impl_->ensure_rows(nodes);
    return impl_->run_nodes(m, nodes, path_index, master_seed);
  }
  const std::size_t last = nodes.empty() ? 0 : *std::max_element(nodes.begin(), nodes.end()) + 1;
  const auto u = impl_->run(m, last, path_index, master_seed);
  std::vector<double> out(nodes.size() * impl_->M);
  for (std::size_t r = 0; r < nodes.size(); ++r)
    std::copy_n(u.begin() + static_cast<std::ptrdiff_t>(nodes[r] * impl_->M), impl_->M,
                out.begin() + static_cast<std::ptrdiff_t>(r * impl_->M));
  return out;
}

PathSample Simulator::prefix(std::size_t n_nodes, std::uint64_t path_index, std::uint64_t master_seed) const {
  if (n_nodes > impl_->grid.size()) throw ValidationError("Simulator: prefix beyond the grid");
  return PathSample{impl_->grid, impl_->run(impl_->mean.data(), n_nodes, path_index, master_seed), impl_->M,
                    SeedLineage{master_seed, path_index}};
}

std::vector<double> Simulator::restart_values(const PathSample& path, std::size_t tau_node) const {
  const Impl& s = *impl_;
  const std::size_t M = s.M, N = s.grid.size();
  if (path.grid.size() < tau_node + 1 || path.modes != M || path.states.size() < tau_node * M)
    throw ValidationError("restart_forcing: path does not cover the restart time");
  for (std::size_t j = 0; j <= tau_node; ++j)
    if (path.grid[j] != s.grid[j]) throw ValidationError("restart_forcing: path grid differs from the simulator grid");
  // F(u_j) and sigma(u_j) dW_j recomputed from the path's RNG lineage
  std::vector<double> Fv(tau_node * M), Sv(tau_node * M), z(M);
  const CounterNormal rng(path.lineage.master_seed);
  for (std::size_t j = 0; j < tau_node; ++j) {
    if (s.need_drift) s.drift_values(&path.states[j * M], &Fv[j * M]);
    if (s.need_noise) {
      rng.fill(path.lineage.first_path, static_cast<std::uint32_t>(j), z.data(), static_cast<std::uint32_t>(M));
      s.noise_values(&path.states[j * M], z.data(), std::sqrt(s.grid.step(j)), &Sv[j * M]);
    }
  }
  std::vector<std::size_t> nodes;
  for (std::size_t k = tau_node; k < N; ++k) nodes.push_back(k);
  impl_->ensure_rows(nodes);
  std::vector<double> xi((N - tau_node) * M);
  for (std::size_t k = tau_node; k < N; ++k)
    for (std::size_t n = 0; n < M; ++n) {
      double acc = s.mean[k * M + n];
      if (s.need_drift) {
        const auto [p, st] = s.wk_table.slice(n, k);
        for (std::size_t j = 0; j < tau_node; ++j) acc += p[st * static_cast<std::ptrdiff_t>(j)] * Fv[j * M + n];
      }
      if (s.need_noise) {
        const auto [p, st] = s.eh_table.slice(n, k);
        for (std::size_t j = 0; j < tau_node; ++j) acc += p[st * static_cast<std::ptrdiff_t>(j)] * Sv[j * M + n];
      }
      xi[(k - tau_node) * M + n] = acc;
    }
  return xi;
}

PathSample simulate_path(const SVEProblem& problem, const TimeGrid& grid, std::uint64_t path_index,
                         std::uint64_t master_seed) {
  return Simulator(problem, grid).path(path_index, master_seed);
}

namespace {

std::vector<double> shifted_nodes(const TimeGrid& grid, std::size_t tau_node) {
  std::vector<double> nodes;
  for (std::size_t k = tau_node; k < grid.size(); ++k) nodes.push_back(grid[k] - grid[tau_node]);
  return nodes;
}

TimeGrid shifted_grid(const TimeGrid& grid, std::size_t tau_node) {
  if (grid.is_uniform()) return TimeGrid::uniform(grid.horizon() - grid[tau_node], grid.steps() - tau_node);
  return TimeGrid::from_nodes(shifted_nodes(grid, tau_node));
}

std::size_t restart_node(const TimeGrid& grid, double tau) {
  if (!(tau >= 0.0) || tau >= grid.horizon()) throw ValidationError("restart_forcing: tau beyond the realized horizon");
  return grid.index_of(tau);
}

ForcingSpec mild_forcing(const TimeGrid& shifted, const std::vector<double>& xi, std::size_t M) {
  std::vector<GridFunction> modes;
  for (std::size_t n = 0; n < M; ++n) {
    std::vector<double> v(shifted.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = xi[i * M + n];
    modes.emplace_back(shifted, std::move(v), Interpolation::linear);
  }
  return ForcingSpec::mild(std::move(modes));
}

}  // namespace

ForcingSpec restart_forcing(const SVEProblem& problem, const PathSample& path, double tau) {
  const std::size_t tau_node = restart_node(path.grid, tau);
  const Simulator sim(problem, path.grid);
  return mild_forcing(shifted_grid(path.grid, tau_node), sim.restart_values(path, tau_node), sim.problem().modes());
}

SVEProblem restarted_problem(const SVEProblem& problem, const PathSample& path, double tau) {
  SVEProblem out = problem;
  out.forcing = restart_forcing(problem, path, tau);
  out.horizon = problem.horizon - path.grid[path.grid.index_of(tau)];
  return out;
}

double variance_integral(double t, double mu, double alpha, double beta) {
  if (!(t >= 0.0)) throw DomainError("variance_integral: t must be non-negative");
  if (!(mu >= 0.0)) throw DomainError("variance_integral: mu must be non-negative");
  if (!(beta > 0.5)) throw DomainError("variance_integral: beta must exceed 1/2");
  if (t == 0.0) return 0.0;
  if (mu == 0.0) {
    const double g = std::tgamma(beta);
    return std::pow(t, 2.0 * beta - 1.0) / ((2.0 * beta - 1.0) * g * g);
  }
  // scaling s -> mu^{1/alpha} s maps onto the unit-rate integral
  const double scale = std::pow(mu, -(2.0 * beta - 1.0) / alpha);
  const double x = std::pow(mu, 1.0 / alpha) * t;
  try {
    return scale * mlf::c_q_incomplete(alpha, beta, 2.0, x);
  } catch (const DomainError&) {
    // outside the window of the infinite integral: substitute s = x u^m to flatten s^{2 beta - 2}
    const double m = std::max(1.0, 1.0 / (2.0 * beta - 1.0));
    const mlf::MittagLeffler ml(alpha, beta);
    auto f = [&](double u) {
      if (u <= 0.0) return 0.0;
      const double s = x * std::pow(u, m);
      const double e = std::pow(s, beta - 1.0) * ml(-std::pow(s, alpha));
      return e * e * x * m * std::pow(u, m - 1.0);
    };
    return scale * quad::gauss_kronrod(f, 0.0, 1.0, {0.0, 1e-11, 4000}).value;
  }
}

TimeGrid terminal_refined_grid(double horizon, std::size_t steps, double first_step) {
  if (!(horizon > 0.0) || !(first_step > 0.0) || steps < 2 || !(first_step * static_cast<double>(steps) < horizon))
    throw ValidationError("terminal_refined_grid: need N * first_step < T");
  // ratio r > 1 with first_step (r^N - 1) / (r - 1) = T
  const double N = static_cast<double>(steps);
  // in logs: r^N overflows for long horizons
  auto excess = [&](double r) {
    const double y = N * std::log(r);
    const double log_expm1 = y > 30.0 ? y + std::log1p(-std::exp(-y)) : std::log(std::expm1(y));
    return std::log(first_step) + log_expm1 - std::log(r - 1.0) - std::log(horizon);
  };
  double hi = 2.0;
  while (excess(hi) < 0.0) hi *= 2.0;
  boost::uintmax_t iters = 200;
  const auto [lo_r, hi_r] = boost::math::tools::toms748_solve(excess, 1.0 + 1e-15, hi,
                                                              boost::math::tools::eps_tolerance<double>(52), iters);
  const double r = 0.5 * (lo_r + hi_r);
  std::vector<double> nodes(steps + 1);
  double h = first_step;
  nodes[steps] = horizon;
  for (std::size_t i = steps; i-- > 1;) {
    nodes[i] = nodes[i + 1] - h;
    h *= r;
  }
  nodes[0] = 0.0;
  return TimeGrid::from_nodes(std::move(nodes));
}

std::vector<EmpiricalDistribution> sample_exact_gaussian(const SVEProblem& problem, const std::vector<double>& times,
                                                         std::size_t n_samples, std::uint64_t master_seed) {
  SVEProblem p = problem;
  p.scheme = Scheme::exact_gaussian;
  p.validate();
  if (n_samples == 0) throw ValidationError("sample_exact_gaussian: n_samples must be positive");
  if (times.empty()) throw ValidationError("sample_exact_gaussian: no times");
  const std::size_t M = p.modes();
  const double a = p.fractional->alpha, b = p.fractional->beta;
  // linear drift c: same solution as the operator with mu_n - c and no drift
  std::vector<double> mu(p.op.eigenvalues());
  if (p.drift.kind == Drift::Kind::linear)
    for (double& m : mu) m -= p.drift.slope;
  for (double m : mu)
    if (!(m > 0.0)) throw ValidationError("sample_exact_gaussian: linear drift makes a mode non-dissipative");
  const DiagonalOperator shifted = DiagonalOperator::explicit_list(mu);

  std::vector<double> nodes{0.0};
  const double tmax = *std::max_element(times.begin(), times.end());
  if (!(tmax <= p.horizon * (1.0 + 1e-12)) || *std::min_element(times.begin(), times.end()) < 0.0)
    throw ValidationError("sample_exact_gaussian: times outside [0, horizon]");
  const bool closed = p.forcing.g0.empty() && (p.forcing.kind == ForcingSpec::Kind::power ||
                                               p.forcing.kind == ForcingSpec::Kind::kernel_convolved);
  if (tmax > 0.0) {
    if (!closed) {
      const TimeGrid u = TimeGrid::uniform(tmax, 2048);
      nodes.assign(u.nodes().begin(), u.nodes().end());
    }
    for (double t : times) nodes.push_back(t);
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end(), [](double x, double y) { return std::abs(x - y) <= 1e-12 * std::max(1.0, y); }),
                nodes.end());
  } else {
    nodes.push_back(1.0);
  }
  const TimeGrid grid = TimeGrid::from_nodes(nodes);
  const ModeFunction Gg = spectral::compute_Gg(shifted, p.forcing, a, grid);

  const auto& s0 = p.diffusion.sigma0;
  const CounterNormal rng(master_seed);
  std::vector<EmpiricalDistribution> out;
  std::vector<double> z(M);
  for (std::size_t r = 0; r < times.size(); ++r) {
    const double t = times[r];
    const std::size_t node = grid.locate(t);
    std::vector<double> m(M), sd(M);
    for (std::size_t n = 0; n < M; ++n) {
      m[n] = Gg.modes[n].value(node);
      const double s = s0.size() == 1 ? s0[0] : s0[n];
      sd[n] = std::abs(s) * std::sqrt(variance_integral(t, mu[n], a, b));
    }
    std::vector<double> data(n_samples * M);
    for (std::size_t i = 0; i < n_samples; ++i) {
      rng.fill(i, static_cast<std::uint32_t>(r), z.data(), static_cast<std::uint32_t>(M));
      for (std::size_t n = 0; n < M; ++n) data[i * M + n] = m[n] + sd[n] * z[n];
    }
    out.emplace_back(t, M, std::move(data), SeedLineage{master_seed, 0});
  }
  return out;
}

EnsembleError::EnsembleError(std::vector<PathFailure> failures)
    : std::runtime_error([&] {
        std::ostringstream os;
        os << failures.size() << " path(s) failed";
        if (!failures.empty()) os << "; first: path " << failures.front().path_index << ": " << failures.front().message;
        return os.str();
      }()),
      failures_(std::move(failures)) {}

void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& body) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  std::vector<std::string> errors(n);
  std::vector<char> failed(n, 0);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        body(i);
      } catch (const std::exception& e) {
        failed[i] = 1;
        errors[i] = e.what();
      }
    }
  };
  const unsigned count = static_cast<unsigned>(std::min<std::size_t>(workers, n));
  if (count <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < count; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  std::vector<PathFailure> failures;
  for (std::size_t i = 0; i < n; ++i)
    if (failed[i]) failures.push_back({i, errors[i]});
  if (!failures.empty()) throw EnsembleError(std::move(failures));
}

namespace {

std::vector<std::size_t> record_nodes(const TimeGrid& grid, const std::vector<double>& times) {
  if (times.empty()) throw ValidationError("run_ensemble: no record times");
  std::vector<std::size_t> nodes;
  for (double t : times) nodes.push_back(grid.index_of(t));
  return nodes;
}

std::vector<EmpiricalDistribution> collect(const std::vector<std::vector<double>>& data, const TimeGrid& grid,
                                           const std::vector<std::size_t>& nodes, std::size_t M, std::uint64_t seed) {
  std::vector<EmpiricalDistribution> out;
  for (std::size_t r = 0; r < nodes.size(); ++r) out.emplace_back(grid[nodes[r]], M, data[r], SeedLineage{seed, 0});
  return out;
}

}  // namespace

std::vector<EmpiricalDistribution> run_ensemble(const SVEProblem& problem, const TimeGrid& grid,
                                                std::size_t n_paths, const std::vector<double>& record_times,
                                                std::uint64_t master_seed, unsigned workers) {
  if (n_paths == 0) throw ValidationError("run_ensemble: n_paths must be at least 1");
  if (problem.scheme == Scheme::exact_gaussian)
    return sample_exact_gaussian(problem, record_times, n_paths, master_seed);
  const Simulator sim(problem, grid);
  const auto nodes = record_nodes(grid, record_times);
  const std::size_t M = problem.modes();
  std::vector<std::vector<double>> data(nodes.size(), std::vector<double>(n_paths * M));
  parallel_for(n_paths, workers, [&](std::size_t p) {
    const auto v = sim.states_at(nodes, p, master_seed);
    for (std::size_t r = 0; r < nodes.size(); ++r)
      std::copy_n(v.begin() + static_cast<std::ptrdiff_t>(r * M), M, data[r].begin() + static_cast<std::ptrdiff_t>(p * M));
  });
  return collect(data, grid, nodes, M, master_seed);
}

std::vector<EmpiricalDistribution> run_restart_ensemble(const SVEProblem& problem, const TimeGrid& grid, double tau,
                                                        std::size_t n_paths, const std::vector<double>& record_times,
                                                        std::uint64_t master_seed, unsigned workers) {
  if (n_paths == 0) throw ValidationError("run_restart_ensemble: n_paths must be at least 1");
  const std::size_t tau_node = restart_node(grid, tau);
  const Simulator original(problem, grid);
  const TimeGrid shifted = shifted_grid(grid, tau_node);
  const std::size_t M = problem.modes();

  SVEProblem template_problem = problem;
  template_problem.horizon = shifted.horizon();
  template_problem.forcing =
      mild_forcing(shifted, std::vector<double>(shifted.size() * M, 0.0), M);  // replaced per path
  const Simulator restarted(template_problem, shifted);
  const auto nodes = record_nodes(shifted, record_times);

  std::vector<std::vector<double>> data(nodes.size(), std::vector<double>(n_paths * M));
  parallel_for(n_paths, workers, [&](std::size_t p) {
    const auto xi = original.restart_values(original.prefix(tau_node, p, master_seed), tau_node);
    const auto u = restarted.states_at(nodes, p | kRestartNamespace, master_seed, &xi);
    for (std::size_t r = 0; r < nodes.size(); ++r)
      std::copy_n(u.begin() + static_cast<std::ptrdiff_t>(r * M), M, data[r].begin() + static_cast<std::ptrdiff_t>(p * M));
  });
  return collect(data, shifted, nodes, M, master_seed);
}

}  // namespace svelab::sim
