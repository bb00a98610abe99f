#include "svelab/limitdist.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>

#include <boost/math/special_functions/erf.hpp>

#include "svelab/error.hpp"
#include "svelab/format.hpp"
#include "svelab/mlf.hpp"
#include "svelab/quadrature.hpp"
#include "svelab/rng.hpp"
#include "svelab/volterra1d.hpp"

namespace svelab::limitdist {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_p(double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw DomainError("wasserstein: p must satisfy 1 <= p < inf");
}

double power_abs(double d, double p) {
  const double a = std::abs(d);
  if (p == 1.0) return a;
  if (p == 2.0) return a * a;
  return std::pow(a, p);
}

double sum(const std::vector<double>& v) { return quad::pairwise_sum(v.data(), v.size()); }

/// Seeds for independent sub-streams of one experiment.
std::uint64_t derive_seed(std::uint64_t seed, std::uint32_t tag) { return counter_bits(seed, 0x5eedULL, tag, 0xabcd); }

std::uint64_t uniform_index(std::uint64_t seed, std::uint64_t a, std::uint32_t b, std::uint32_t c, std::size_t n) {
  return counter_bits(seed, a, b, c) % n;
}

EmpiricalDistribution resample(const EmpiricalDistribution& X, std::uint64_t seed, std::uint64_t rep,
                               std::uint32_t side) {
  const std::size_t n = X.size(), M = X.dimension();
  std::vector<double> data(n * M);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t k = uniform_index(seed, rep, side, static_cast<std::uint32_t>(i), n);
    std::copy_n(X.data().begin() + static_cast<std::ptrdiff_t>(k * M), M,
                data.begin() + static_cast<std::ptrdiff_t>(i * M));
  }
  return EmpiricalDistribution(X.time(), M, std::move(data), X.lineage());
}

double sample_sd(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = sum(v) / static_cast<double>(v.size());
  std::vector<double> d(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) d[i] = (v[i] - m) * (v[i] - m);
  return std::sqrt(sum(d) / static_cast<double>(v.size() - 1));
}

double upper_quantile(std::vector<double> v, double q) {
  if (v.empty()) throw ValidationError("noise floor: no replicates");
  if (!(q > 0.0 && q < 1.0)) throw DomainError("noise floor: quantile must lie in (0, 1)");
  std::sort(v.begin(), v.end());
  const auto k = static_cast<std::size_t>(std::ceil(q * static_cast<double>(v.size())));
  return v[std::min(v.size(), std::max<std::size_t>(k, 1)) - 1];
}

void check_gaussian(const GaussianLaw& law, std::size_t M) {
  if (law.mean.size() != M || law.sd.size() != M)
    throw ValidationError("GaussianLaw: mean and sd must match the number of modes");
  for (double s : law.sd)
    if (!(s >= 0.0)) throw DomainError("GaussianLaw: sd must be non-negative");
}

double normal_quantile(double u) { return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * u); }
double normal_pdf(double z) {
  return std::isinf(z) ? 0.0 : std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

}  // namespace

double wasserstein_1d(std::vector<double> x, std::vector<double> y, double p) {
  check_p(p);
  if (x.empty() || y.empty()) throw ValidationError("wasserstein_1d: empty input");
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const std::size_t n = x.size(), m = y.size();
  std::vector<double> terms;
  terms.reserve(n + m);
  if (n == m) {
    for (std::size_t i = 0; i < n; ++i) terms.push_back(power_abs(x[i] - y[i], p));
    return std::pow(sum(terms) / static_cast<double>(n), 1.0 / p);
  }
  // quantile breakpoints in units of 1/(n m)
  std::size_t i = 0, j = 0;
  std::uint64_t pos = 0;
  while (i < n && j < m) {
    const std::uint64_t bx = static_cast<std::uint64_t>(i + 1) * m, by = static_cast<std::uint64_t>(j + 1) * n;
    const std::uint64_t next = std::min(bx, by);
    terms.push_back(static_cast<double>(next - pos) * power_abs(x[i] - y[j], p));
    pos = next;
    if (bx == next) ++i;
    if (by == next) ++j;
  }
  return std::pow(sum(terms) / (static_cast<double>(n) * static_cast<double>(m)), 1.0 / p);
}

double wasserstein_1d(const EmpiricalDistribution& X, const EmpiricalDistribution& Y, double p) {
  if (X.dimension() != 1 || Y.dimension() != 1) throw ValidationError("wasserstein_1d: scalar samples required");
  return wasserstein_1d(X.data(), Y.data(), p);
}

double wasserstein_modewise(const EmpiricalDistribution& X, const EmpiricalDistribution& Y) {
  if (X.dimension() != Y.dimension()) throw ValidationError("wasserstein_modewise: dimension mismatch");
  std::vector<double> sq(X.dimension());
  for (std::size_t n = 0; n < sq.size(); ++n) {
    const double w = wasserstein_1d(X.mode(n), Y.mode(n), 2.0);
    sq[n] = w * w;
  }
  return std::sqrt(sum(sq));
}

double sliced_wasserstein(const EmpiricalDistribution& X, const EmpiricalDistribution& Y, double p,
                          std::size_t directions, std::uint64_t seed) {
  check_p(p);
  if (X.dimension() != Y.dimension()) throw ValidationError("sliced_wasserstein: dimension mismatch");
  if (directions == 0) throw ValidationError("sliced_wasserstein: need at least one direction");
  const std::size_t M = X.dimension();
  const CounterNormal rng(seed);
  std::vector<double> dir(M), acc(directions);
  auto project = [&](const EmpiricalDistribution& Z) {
    std::vector<double> v(Z.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      double s = 0.0;
      for (std::size_t n = 0; n < M; ++n) s += dir[n] * Z.value(i, n);
      v[i] = s;
    }
    return v;
  };
  for (std::size_t d = 0; d < directions; ++d) {
    rng.fill(d, 0, dir.data(), static_cast<std::uint32_t>(M));
    double norm = 0.0;
    for (double v : dir) norm += v * v;
    norm = std::sqrt(norm);
    for (double& v : dir) v /= norm;
    acc[d] = std::pow(wasserstein_1d(project(X), project(Y), p), p);
  }
  return std::pow(sum(acc) / static_cast<double>(directions), 1.0 / p);
}

double distance(const EmpiricalDistribution& X, const EmpiricalDistribution& Y, double p) {
  if (X.dimension() != Y.dimension()) throw ValidationError("distance: dimension mismatch");
  if (X.dimension() == 1) return wasserstein_1d(X, Y, p);
  if (p != 2.0) throw DomainError("distance: mode-wise aggregation is defined for p = 2");
  return wasserstein_modewise(X, Y);
}

double wasserstein2_to_gaussian(const EmpiricalDistribution& X, const GaussianLaw& law) {
  const std::size_t M = X.dimension(), N = X.size();
  check_gaussian(law, M);
  // per cell ((i-1)/N, i/N): int z du = phi(z_{i-1}) - phi(z_i), and int z^2 du sums to 1
  std::vector<double> pdf(N + 1);
  for (std::size_t i = 0; i <= N; ++i) {
    const double u = static_cast<double>(i) / static_cast<double>(N);
    pdf[i] = (i == 0 || i == N) ? 0.0 : normal_pdf(normal_quantile(u));
  }
  std::vector<double> per_mode(M);
  for (std::size_t n = 0; n < M; ++n) {
    auto x = X.mode(n);
    std::sort(x.begin(), x.end());
    std::vector<double> sq(N), cross(N);
    for (std::size_t i = 0; i < N; ++i) {
      const double y = x[i] - law.mean[n];
      sq[i] = y * y;
      cross[i] = y * (pdf[i] - pdf[i + 1]);
    }
    const double s = law.sd[n];
    per_mode[n] = std::max(0.0, sum(sq) / static_cast<double>(N) - 2.0 * s * sum(cross) + s * s);
  }
  return std::sqrt(sum(per_mode));
}

double bootstrap_stderr(const EmpiricalDistribution& X, const EmpiricalDistribution& Y, double p, std::size_t reps,
                        std::uint64_t seed) {
  if (reps < 2) throw ValidationError("bootstrap_stderr: need at least two replicates");
  std::vector<double> w(reps);
  for (std::size_t r = 0; r < reps; ++r) w[r] = distance(resample(X, seed, r, 0), resample(Y, seed, r, 1), p);
  return sample_sd(w);
}

double bootstrap_stderr(const EmpiricalDistribution& X, const GaussianLaw& law, std::size_t reps,
                        std::uint64_t seed) {
  if (reps < 2) throw ValidationError("bootstrap_stderr: need at least two replicates");
  std::vector<double> w(reps);
  for (std::size_t r = 0; r < reps; ++r) w[r] = wasserstein2_to_gaussian(resample(X, seed, r, 0), law);
  return sample_sd(w);
}

double permutation_noise_floor(const EmpiricalDistribution& X, const EmpiricalDistribution& Y, double p,
                               std::size_t reps, std::uint64_t seed, double quantile) {
  if (X.dimension() != Y.dimension()) throw ValidationError("permutation_noise_floor: dimension mismatch");
  if (X.size() != Y.size()) throw ValidationError("permutation_noise_floor: equal sample counts required");
  const std::size_t n = X.size(), M = X.dimension();
  std::vector<double> pooled(X.data());
  pooled.insert(pooled.end(), Y.data().begin(), Y.data().end());
  std::vector<std::size_t> perm(2 * n);
  std::vector<double> w(reps);
  for (std::size_t r = 0; r < reps; ++r) {
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    for (std::size_t i = perm.size() - 1; i > 0; --i)
      std::swap(perm[i], perm[uniform_index(seed, r, 2, static_cast<std::uint32_t>(i), i + 1)]);
    std::vector<double> a(n * M), b(n * M);
    for (std::size_t i = 0; i < n; ++i) {
      std::copy_n(pooled.begin() + static_cast<std::ptrdiff_t>(perm[i] * M), M,
                  a.begin() + static_cast<std::ptrdiff_t>(i * M));
      std::copy_n(pooled.begin() + static_cast<std::ptrdiff_t>(perm[n + i] * M), M,
                  b.begin() + static_cast<std::ptrdiff_t>(i * M));
    }
    w[r] = distance(EmpiricalDistribution(X.time(), M, std::move(a)), EmpiricalDistribution(Y.time(), M, std::move(b)),
                    p);
  }
  return upper_quantile(std::move(w), quantile);
}

double gaussian_noise_floor(std::size_t n, const GaussianLaw& law, std::size_t reps, std::uint64_t seed,
                            double quantile) {
  const std::size_t M = law.mean.size();
  check_gaussian(law, M);
  if (n == 0) throw ValidationError("gaussian_noise_floor: n must be positive");
  const CounterNormal rng(seed);
  std::vector<double> w(reps), z(M);
  for (std::size_t r = 0; r < reps; ++r) {
    std::vector<double> data(n * M);
    for (std::size_t i = 0; i < n; ++i) {
      rng.fill(i, static_cast<std::uint32_t>(r), z.data(), static_cast<std::uint32_t>(M));
      for (std::size_t k = 0; k < M; ++k) data[i * M + k] = law.mean[k] + law.sd[k] * z[k];
    }
    w[r] = wasserstein2_to_gaussian(EmpiricalDistribution(0.0, M, std::move(data)), law);
  }
  return upper_quantile(std::move(w), quantile);
}

bool ConvergenceResult::decreasing_within_noise() const {
  for (std::size_t i = 1; i < points.size(); ++i)
    if (!(points[i].w < points[i - 1].w + noise_floor)) return false;
  return true;
}

void ConvergenceResult::write_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << "t,W_hat,stderr,bound_envelope\n";
  for (const auto& pt : points)
    out << format_double(pt.t) << ',' << format_double(pt.w) << ',' << format_double(pt.stderr_w) << ','
        << format_double(pt.bound_envelope) << '\n';
}

ConvergenceResult convergence_experiment(const sim::SVEProblem& problem, const ConvergenceOptions& opts) {
  if (opts.times.empty()) throw ValidationError("convergence_experiment: no times");
  if (!std::is_sorted(opts.times.begin(), opts.times.end()) ||
      std::adjacent_find(opts.times.begin(), opts.times.end()) != opts.times.end())
    throw ValidationError("convergence_experiment: times must be increasing");
  if (!(opts.step > 0.0)) throw ValidationError("convergence_experiment: step must be positive");
  if (!opts.oracle && !(opts.reference_factor > 1.0))
    throw ValidationError("convergence_experiment: reference time must exceed the comparison times");
  if (opts.oracle && opts.p != 2.0) throw DomainError("convergence_experiment: the Gaussian oracle needs p = 2");

  ConvergenceResult res;
  res.used_oracle = opts.oracle.has_value();
  const double tmax = opts.times.back();
  res.reference_time = res.used_oracle ? tmax : opts.reference_factor * tmax;
  const auto steps = static_cast<std::size_t>(std::llround(res.reference_time / opts.step));
  const TimeGrid grid = TimeGrid::uniform(res.reference_time, std::max<std::size_t>(steps, 1));
  sim::SVEProblem p = problem;
  p.horizon = res.reference_time;

  const auto laws = sim::run_ensemble(p, grid, opts.n_paths, opts.times, derive_seed(opts.seed, 1), opts.workers);
  if (res.used_oracle) {
    for (const auto& law : laws)
      res.points.push_back({law.time(), wasserstein2_to_gaussian(law, *opts.oracle),
                            bootstrap_stderr(law, *opts.oracle, opts.bootstrap, derive_seed(opts.seed, 2)), 0.0});
    res.noise_floor =
        gaussian_noise_floor(opts.n_paths, *opts.oracle, opts.null_reps, derive_seed(opts.seed, 3), opts.noise_quantile);
  } else {
    const auto ref = sim::run_ensemble(p, grid, opts.n_paths, {res.reference_time}, derive_seed(opts.seed, 4),
                                       opts.workers).front();
    const auto ref2 = sim::run_ensemble(p, grid, opts.n_paths, {res.reference_time}, derive_seed(opts.seed, 5),
                                        opts.workers).front();
    for (const auto& law : laws)
      res.points.push_back({law.time(), distance(law, ref, opts.p),
                            bootstrap_stderr(law, ref, opts.p, opts.bootstrap, derive_seed(opts.seed, 2)), 0.0});
    res.noise_floor = std::max(
        permutation_noise_floor(ref, ref2, opts.p, opts.null_reps, derive_seed(opts.seed, 3), opts.noise_quantile),
        distance(ref, ref2, opts.p));
  }
  if (opts.rate) {
    std::vector<double> ts, ws;
    for (const auto& pt : res.points) {
      ts.push_back(pt.t);
      ws.push_back(pt.w);
    }
    const double C = fit_rate_constant(*opts.rate, ts, ws, opts.rate_fit);
    for (auto& pt : res.points) pt.bound_envelope = rate_bound(*opts.rate, pt.t, C);
  }
  if (res.points.front().w <= res.noise_floor)
    res.warnings.push_back("reference law indistinguishable from the earliest time; horizon may be too short");
  return res;
}

std::string to_string(LimitVerdict v) {
  switch (v) {
    case LimitVerdict::same_limit: return "same_limit";
    case LimitVerdict::different_limit: return "different_limit";
    case LimitVerdict::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

DependenceReport initial_dependence_experiment(const sim::SVEProblem& problem, const spectral::ForcingSpec& xi,
                                               const spectral::ForcingSpec& eta, const TimeGrid& grid,
                                               const DependenceOptions& opts) {
  DependenceReport rep;
  rep.horizon = grid.horizon();
  sim::SVEProblem a = problem, b = problem;
  a.forcing = xi;
  b.forcing = eta;
  a.horizon = b.horizon = grid.horizon();
  const auto la = sim::run_ensemble(a, grid, opts.n_paths, {rep.horizon}, derive_seed(opts.seed, 11), opts.workers)
                      .front();
  const auto lb = sim::run_ensemble(b, grid, opts.n_paths, {rep.horizon}, derive_seed(opts.seed, 12), opts.workers)
                      .front();
  rep.w = distance(la, lb, 2.0);
  rep.noise_floor = permutation_noise_floor(la, lb, 2.0, opts.null_reps, derive_seed(opts.seed, 13), opts.noise_quantile);
  for (std::size_t n = 0; n < la.dimension(); ++n) {
    rep.mean_diff.push_back(la.mean(n) - lb.mean(n));
    rep.mean_diff_stderr.push_back(std::hypot(la.mean_stderr(n), lb.mean_stderr(n)));
  }
  if (problem.fractional) {
    try {
      const double alpha = problem.fractional->alpha;
      const Kernel k = Kernel::fractional(alpha);
      const auto ga = spectral::Gg_limit(problem.op, xi, alpha, k), gb = spectral::Gg_limit(problem.op, eta, alpha, k);
      std::vector<double> d(ga.size());
      for (std::size_t n = 0; n < d.size(); ++n) d[n] = ga[n] - gb[n];
      rep.predicted_mean_diff = std::move(d);
    } catch (const std::exception& e) {
      rep.diagnostic = std::string("no predicted limit: ") + e.what();
    }
  }
  if (opts.n_paths < opts.min_paths) {
    rep.verdict = LimitVerdict::inconclusive;
    rep.diagnostic = "underpowered: fewer paths than min_paths";
  } else {
    rep.verdict = rep.w <= rep.noise_floor ? LimitVerdict::same_limit : LimitVerdict::different_limit;
  }
  return rep;
}

double RateBoundInputs::D(double t) const { return xi_decay(t) + ek_tail(t) + std::sqrt(klin_tail_sq(t)); }

void RateBoundInputs::validate(double horizon, std::size_t samples) const {
  if (!xi_decay || !ek_tail || !klin_tail_sq || !r_tail) throw ValidationError("RateBoundInputs: missing component");
  if (!(p >= 1.0)) throw DomainError("RateBoundInputs: p must be at least 1");
  const std::function<double(double)>* parts[] = {&xi_decay, &ek_tail, &klin_tail_sq, &r_tail};
  const char* names[] = {"xi_decay", "ek_tail", "klin_tail_sq", "r_tail"};
  for (std::size_t c = 0; c < 4; ++c) {
    double prev = kInf;
    for (std::size_t i = 0; i <= samples; ++i) {
      const double t = horizon * static_cast<double>(i) / static_cast<double>(samples);
      const double v = (*parts[c])(t);
      if (!(v >= 0.0)) throw ValidationError(std::string("RateBoundInputs: ") + names[c] + " is negative");
      if (v > prev * (1.0 + 1e-9) + 1e-15)
        throw ValidationError(std::string("RateBoundInputs: ") + names[c] + " increases");
      prev = v;
    }
  }
}

std::function<double(double)> resolvent_tail(const GridFunction& rho, double rho_tail_mass) {
  const auto pw = volterra::paley_wiener_check(rho, rho_tail_mass);
  if (!pw.integrable) throw DomainError("resolvent_tail: int rho < 1 not certified, r is not integrable");
  const double m = pw.total_mass;
  if (m == 0.0) return [](double) { return 0.0; };
  const auto r = volterra::resolvent_second_kind(rho);
  const GridFunction cum(rho.grid(), r.cumulative(), Interpolation::linear);
  const double total = m / (1.0 - m);
  const double horizon = rho.grid().horizon();
  return [cum, total, horizon](double t) { return std::max(0.0, total - cum(std::clamp(t, 0.0, horizon))); };
}

RateBoundInputs scalar_rate_inputs(double A, double alpha, double beta, double C_F_lip, double C_sigma_lip,
                                   double C_sigma_lin, std::function<double(double)> xi_decay, double rho_horizon,
                                   std::size_t rho_steps) {
  if (!(A < 0.0)) throw DomainError("scalar_rate_inputs: A must be negative");
  const double mu = -A;
  double V_inf = kInf;
  try {
    V_inf = std::pow(mu, -(2.0 * beta - 1.0) / alpha) * mlf::c_q(alpha, beta, 2.0);
  } catch (const DomainError&) {
  }
  RateBoundInputs in;
  in.p = 2.0;
  in.xi_decay = std::move(xi_decay);
  in.ek_tail = [mu, alpha](double t) { return std::max(0.0, 1.0 / mu - mlf::cumulative_e_k(t, mu, alpha)); };
  in.klin_tail_sq = [=](double t) {
    if (C_sigma_lin == 0.0) return 0.0;
    return C_sigma_lin * C_sigma_lin * std::max(0.0, V_inf - sim::variance_integral(t, mu, alpha, beta));
  };
  // rho cell averages from exact primitives, so singular kernels are integrated exactly
  const TimeGrid grid = TimeGrid::uniform(rho_horizon, rho_steps);
  const double a = 3.0 * C_F_lip * C_F_lip / mu, b = 3.0 * C_sigma_lip * C_sigma_lip;
  if (b > 0.0 && std::isinf(V_inf)) throw DomainError("scalar_rate_inputs: e_h is not square integrable");
  auto eh_sq = [&](double s) {
    const double v = mlf::e_h_closed(s, mu, alpha, beta);
    return v * v;
  };
  std::vector<double> cells(grid.size());
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    double m = a * (mlf::cumulative_e_k(grid[i + 1], mu, alpha) - mlf::cumulative_e_k(grid[i], mu, alpha));
    if (b > 0.0)
      m += b * (i == 0 ? sim::variance_integral(grid[1], mu, alpha, beta)
                       : quad::gauss_kronrod(eh_sq, grid[i], grid[i + 1], {0.0, 1e-10, 50}).value);
    cells[i] = std::max(0.0, m) / grid.step(i);
  }
  cells.back() = cells[grid.size() - 2];
  const GridFunction rho(grid, std::move(cells), Interpolation::constant_left);
  const double tail = a * (1.0 / mu - mlf::cumulative_e_k(rho_horizon, mu, alpha)) +
                      (b > 0.0 ? b * (V_inf - sim::variance_integral(rho_horizon, mu, alpha, beta)) : 0.0);
  in.r_tail = resolvent_tail(rho, std::max(tail, 0.0));
  in.description = "scalar A=" + std::to_string(A) + " alpha=" + std::to_string(alpha) + " beta=" + std::to_string(beta);
  return in;
}

double rate_bound(const RateBoundInputs& in, double t, double C) {
  if (!(C >= 0.0)) throw DomainError("rate_bound: C must be non-negative");
  if (!(t >= 0.0)) throw DomainError("rate_bound: t must be non-negative");
  if (std::isinf(t)) return 0.0;
  return C * (in.D(0.5 * t) + std::pow(in.r_tail(0.5 * t), 1.0 / in.p));
}

double fit_rate_constant(const RateBoundInputs& in, const std::vector<double>& t, const std::vector<double>& w,
                         FitMode mode) {
  if (t.size() != w.size() || t.empty()) throw ValidationError("fit_rate_constant: need matching non-empty samples");
  std::vector<double> logs;
  double C = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double env = rate_bound(in, t[i], 1.0);
    if (!(env > 0.0) || !(w[i] > 0.0)) continue;
    logs.push_back(std::log(w[i] / env));
    C = std::max(C, w[i] / env);
  }
  if (logs.empty()) throw ValidationError("fit_rate_constant: no point with positive envelope and distance");
  if (mode == FitMode::dominating) return C;
  return std::exp(sum(logs) / static_cast<double>(logs.size()));
}

}  // namespace svelab::limitdist
