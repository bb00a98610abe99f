#include "svelab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "svelab/error.hpp"
#include "svelab/mlf.hpp"
#include "svelab/quadrature.hpp"
#include "svelab/volterra1d.hpp"

namespace svelab::spectral {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double pairwise(std::vector<double>& terms) { return quad::pairwise_sum(terms.data(), terms.size()); }

void check_modes(const DiagonalOperator& op, std::size_t n, const char* what) {
  if (n != op.size()) {
    std::ostringstream os;
    os << what << ": mode vector has " << n << " entries, operator has " << op.size();
    throw ValidationError(os.str());
  }
}

}  // namespace

DiagonalOperator DiagonalOperator::explicit_list(std::vector<double> eigenvalues) {
  if (eigenvalues.empty()) throw ValidationError("DiagonalOperator: empty eigenvalue list");
  for (double m : eigenvalues)
    if (!(m > 0.0) || !std::isfinite(m)) throw DomainError("DiagonalOperator: eigenvalues must be positive and finite");
  std::sort(eigenvalues.begin(), eigenvalues.end());
  DiagonalOperator op;
  op.mu_ = std::move(eigenvalues);
  op.tail_threshold_ = kInf;
  return op;
}

DiagonalOperator DiagonalOperator::dirichlet_laplacian(int dim, int per_axis_cap) {
  if (dim < 1 || dim > 3) throw DomainError("dirichlet_laplacian: dimension must be 1, 2 or 3");
  if (per_axis_cap < 1) throw DomainError("dirichlet_laplacian: per-axis mode cap must be positive");
  std::vector<std::vector<int>> idx;
  std::vector<int> n(static_cast<std::size_t>(dim), 1);
  for (;;) {
    idx.push_back(n);
    int a = dim - 1;
    while (a >= 0 && n[static_cast<std::size_t>(a)] == per_axis_cap) n[static_cast<std::size_t>(a--)] = 1;
    if (a < 0) break;
    ++n[static_cast<std::size_t>(a)];
  }
  auto mu_of = [](const std::vector<int>& v) {
    double s = 0.0;
    for (int x : v) s += static_cast<double>(x) * x;
    return s;
  };
  // enumeration is lexicographic, so a stable sort keeps that order on ties
  std::stable_sort(idx.begin(), idx.end(), [&](const auto& a, const auto& b) { return mu_of(a) < mu_of(b); });
  DiagonalOperator op;
  op.dim_ = dim;
  op.idx_ = std::move(idx);
  op.mu_.reserve(op.idx_.size());
  for (const auto& v : op.idx_) op.mu_.push_back(mu_of(v));
  const double cap = per_axis_cap + 1.0;
  op.tail_threshold_ = cap * cap + (dim - 1);
  return op;
}

DiagonalOperator DiagonalOperator::truncated(std::size_t n) const {
  if (n == 0 || n > mu_.size()) throw DomainError("DiagonalOperator::truncated: need 1 <= n <= size");
  DiagonalOperator op = *this;
  if (n == mu_.size()) return op;
  op.tail_threshold_ = std::min(tail_threshold_, mu_[n]);
  op.mu_.resize(n);
  if (!op.idx_.empty()) op.idx_.resize(n);
  return op;
}

double DiagonalOperator::tail_power_sum(double s) const {
  if (!is_dirichlet()) return 0.0;
  const int d = dim_;
  if (!(2.0 * s < -d)) return kInf;
  // lattice points with |n|^2 >= tau. Points below radius r1 are summed
  // directly; beyond it each unit cell [n - 1, n] lies outside the ball of
  // radius |n| - sqrt(d), where |x|^{2s} >= |n|^{2s}.
  const double tau = tail_threshold_;
  const double sqrt_d = std::sqrt(static_cast<double>(d));
  const double r1 = std::max(std::sqrt(tau), 2.0 * sqrt_d + 1.0);
  std::vector<double> terms;
  const int lim = static_cast<int>(std::ceil(r1));
  std::vector<int> n(static_cast<std::size_t>(d), 1);
  for (;;) {
    double r2 = 0.0;
    for (int x : n) r2 += static_cast<double>(x) * x;
    if (r2 >= tau && r2 < r1 * r1) terms.push_back(std::pow(r2, s));
    int a = d - 1;
    while (a >= 0 && n[static_cast<std::size_t>(a)] == lim) n[static_cast<std::size_t>(a--)] = 1;
    if (a < 0) break;
    ++n[static_cast<std::size_t>(a)];
  }
  const double orthant = d == 1 ? 1.0 : std::numbers::pi / 2.0;  // |S^{d-1}| / 2^d
  const double r0 = r1 - sqrt_d;
  const double far = orthant * std::pow(r0, 2.0 * s + d) / (-(2.0 * s + d));
  return pairwise(terms) + far;
}

void DiagonalOperator::save_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw ValidationError("DiagonalOperator::save_csv: cannot open " + path);
  out << "eigenvalue\n";
  out.precision(17);
  for (double m : mu_) out << m << '\n';
}

DiagonalOperator DiagonalOperator::load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("DiagonalOperator::load_csv: cannot open " + path);
  std::vector<double> mu;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    double v;
    if (!(ls >> v)) {
      if (lineno == 1) continue;  // header
      throw ValidationError("DiagonalOperator::load_csv: bad value on line " + std::to_string(lineno));
    }
    mu.push_back(v);
  }
  return explicit_list(std::move(mu));
}

double fractional_norm(const DiagonalOperator& op, double lambda, const std::vector<double>& x) {
  check_modes(op, x.size(), "fractional_norm");
  std::vector<double> t(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) t[i] = std::pow(op[i], 2.0 * lambda) * x[i] * x[i];
  return std::sqrt(pairwise(t));
}

double embedding_norm(const DiagonalOperator& op, double delta) {
  if (!(delta >= 0.0)) throw DomainError("embedding_norm: delta must be non-negative");
  return std::pow(op[0], -delta);
}

std::vector<double> apply_resolvent(const DiagonalOperator& op, const FractionalPair& kernels, KernelRole role,
                                    double t, const std::vector<double>& x) {
  check_modes(op, x.size(), "apply_resolvent");
  const double beta = kernels.exponent(role);
  std::vector<double> out(x.size());
  if (t == 0.0) {
    if (beta == 1.0) return x;
    if (beta > 1.0) return std::vector<double>(x.size(), 0.0);
    throw DomainError("apply_resolvent: e_rho is singular at t = 0 for exponent below 1");
  }
  for (std::size_t n = 0; n < x.size(); ++n) out[n] = x[n] * mlf::e_h_closed(t, op[n], kernels.alpha, beta);
  return out;
}

std::vector<double> apply_resolvent(const DiagonalOperator& op, const Kernel& k, const Kernel& rho, double t,
                                    const std::vector<double>& x, std::size_t steps) {
  check_modes(op, x.size(), "apply_resolvent");
  if (!(t > 0.0)) throw DomainError("apply_resolvent: t must be positive for a general kernel");
  const TimeGrid grid = TimeGrid::graded(t, steps, 0.5);
  std::vector<double> out(x.size());
  for (std::size_t n = 0; n < x.size(); ++n)
    out[n] = x[n] * volterra::solve_e_rho(k, rho, op[n], grid).values.values().back();
  return out;
}

namespace {

SeriesValue power_series(const DiagonalOperator& op, double constant, double s) {
  SeriesValue r;
  r.constant = constant;
  r.exponent = s;
  r.critical_exponent = op.is_dirichlet() ? -0.5 * op.dimension() : kInf;
  if (op.is_dirichlet() && !(s < r.critical_exponent)) {
    std::ostringstream os;
    os << "mode series diverges: exponent " << s << " must be below " << r.critical_exponent << " in dimension "
       << op.dimension();
    r.divergent = true;
    r.diagnostic = os.str();
    r.value = kInf;
    r.tail_bound = kInf;
    return r;
  }
  std::vector<double> terms(op.size());
  for (std::size_t n = 0; n < op.size(); ++n) terms[n] = std::pow(op[n], s);
  r.value = constant * pairwise(terms);
  r.tail_bound = constant * op.tail_power_sum(s);
  return r;
}

}  // namespace

SeriesValue operator_norm_series(const DiagonalOperator& op, const FractionalPair& kernels, KernelRole role,
                                 NormCase norm, double q, double lambda, double rho) {
  const double alpha = kernels.alpha;
  const double beta = kernels.exponent(role);
  switch (norm) {
    case NormCase::bounded: {
      const double c = mlf::c_q(alpha, beta, q);
      return power_series(op, c, -q * (lambda + beta / alpha) + q * rho + (q - 1.0) / alpha);
    }
    case NormCase::hilbert_schmidt: {
      if (q != 2.0) throw DomainError("operator_norm_series: the Hilbert-Schmidt identity is for q = 2");
      const double c = mlf::c_q(alpha, beta, 2.0);
      return power_series(op, c, -2.0 * (lambda + beta / alpha) + 2.0 * rho + 1.0 / alpha);
    }
    case NormCase::single_mode: {
      if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("operator_norm_series: L(H) identity needs alpha in (0, 1]");
      if (!(beta >= alpha)) throw DomainError("operator_norm_series: L(H) identity needs beta >= alpha");
      if (!(1.0 < beta + 1.0 / q)) throw DomainError("operator_norm_series: L(H) identity needs 1 < beta + 1/q");
      SeriesValue r;
      r.constant = mlf::c_q(alpha, beta, q);
      r.exponent = -beta * q / alpha + (q - 1.0) / alpha;
      r.critical_exponent = kInf;
      r.value = r.constant * std::pow(op[0], r.exponent);
      return r;
    }
  }
  throw DomainError("operator_norm_series: unknown norm case");
}

CmBound operator_norm_series_cm(const DiagonalOperator& op, const Kernel& k, NormCase norm, double q,
                                double lambda, double rho, double nu_mass) {
  const auto cm = volterra::cm_prerequisites(k);
  if (cm.verdict != Verdict::pass)
    throw ValidationError("operator_norm_series_cm: kernel fails the complete-monotonicity prerequisites (" +
                          (cm.notes.empty() ? k.describe() : cm.notes) + ")");
  if (!(nu_mass >= 0.0)) throw DomainError("operator_norm_series_cm: measure mass must be non-negative");
  if (!(q >= 1.0)) throw DomainError("operator_norm_series_cm: q must satisfy q >= 1");
  if (norm == NormCase::hilbert_schmidt && q != 2.0)
    throw DomainError("operator_norm_series_cm: the Hilbert-Schmidt bound is for q = 2");
  const double nu_q = std::pow(nu_mass, q);
  CmBound out;
  if (q == 1.0) {
    // int e_k(.; mu) <= 1/mu for every mu
    if (norm == NormCase::single_mode) {
      SeriesValue r;
      r.constant = nu_q;
      r.exponent = -1.0;
      r.critical_exponent = kInf;
      r.value = nu_q / op[0];
      out.printed = out.two_term = r;
    } else {
      out.printed = out.two_term = power_series(op, nu_q, rho - lambda - 1.0);
    }
    return out;
  }
  const double delta = k.singularity_exponent();
  const double c = k.singularity_constant();
  if (!(q * delta < 1.0)) throw DomainError("operator_norm_series_cm: need q < 1/delta");
  const double kappa = 1.0 / (1.0 - delta);
  const double head = std::pow(c, q) / (1.0 - q * delta);
  const double rest = std::pow(c, q - 1.0);
  const double decay = -(1.0 - q * delta) * kappa;
  const double weight = norm == NormCase::single_mode ? 0.0 : q * (rho - lambda);
  auto per_mode_printed = [&](double mu) { return std::pow(mu, weight) * std::pow(std::max(1.0, mu), decay); };
  auto per_mode_two_term = [&](double mu) {
    const double m = std::max(1.0, mu);
    return std::pow(mu, weight) *
           (head * std::pow(m, decay) + rest * std::pow(m, (q - 1.0) * kappa * delta) / mu) / (head + rest);
  };
  const double pref = nu_q * std::max(head, rest);
  const double pref_sum = nu_q * (head + rest);
  if (norm == NormCase::single_mode) {
    SeriesValue p;
    p.constant = pref;
    p.exponent = decay;
    p.critical_exponent = kInf;
    p.value = pref * per_mode_printed(op[0]);
    SeriesValue t = p;
    t.constant = pref_sum;
    t.value = pref_sum * per_mode_two_term(op[0]);
    out.printed = p;
    out.two_term = t;
    return out;
  }
  // for mu >= 1 both per-mode factors are mu^{weight + decay}
  const double s = weight + decay;
  out.printed = power_series(op, pref, s);
  out.two_term = power_series(op, pref_sum, s);
  if (!out.printed.divergent) {
    std::vector<double> a(op.size()), b(op.size());
    for (std::size_t n = 0; n < op.size(); ++n) {
      a[n] = per_mode_printed(op[n]);
      b[n] = per_mode_two_term(op[n]);
    }
    out.printed.value = pref * pairwise(a);
    out.two_term.value = pref_sum * pairwise(b);
  }
  return out;
}

ForcingSpec ForcingSpec::power(double gamma, std::vector<double> x) {
  if (!(gamma >= 0.0)) throw DomainError("ForcingSpec::power: gamma must be non-negative");
  ForcingSpec f;
  f.kind = Kind::power;
  f.gamma = gamma;
  f.g0_limit = x;
  f.x = std::move(x);
  return f;
}

ForcingSpec ForcingSpec::power(double gamma, std::vector<GridFunction> g0, std::vector<double> g0_limit) {
  if (!(gamma >= 0.0)) throw DomainError("ForcingSpec::power: gamma must be non-negative");
  if (g0.empty()) throw ValidationError("ForcingSpec::power: no mode functions");
  if (!g0_limit.empty() && g0_limit.size() != g0.size())
    throw ValidationError("ForcingSpec::power: limit vector does not match the mode functions");
  ForcingSpec f;
  f.kind = Kind::power;
  f.gamma = gamma;
  f.g0 = std::move(g0);
  f.g0_limit = std::move(g0_limit);
  return f;
}

ForcingSpec ForcingSpec::kernel_convolved(std::vector<double> x) {
  ForcingSpec f;
  f.kind = Kind::kernel_convolved;
  f.g0_limit = x;
  f.x = std::move(x);
  return f;
}

ForcingSpec ForcingSpec::kernel_convolved(std::vector<GridFunction> g0, std::vector<double> g0_limit) {
  if (g0.empty()) throw ValidationError("ForcingSpec::kernel_convolved: no mode functions");
  if (!g0_limit.empty() && g0_limit.size() != g0.size())
    throw ValidationError("ForcingSpec::kernel_convolved: limit vector does not match the mode functions");
  ForcingSpec f;
  f.kind = Kind::kernel_convolved;
  f.g0 = std::move(g0);
  f.g0_limit = std::move(g0_limit);
  return f;
}

ForcingSpec ForcingSpec::tabulated(std::vector<GridFunction> g) {
  if (g.empty()) throw ValidationError("ForcingSpec::tabulated: no mode functions");
  ForcingSpec f;
  f.kind = Kind::tabulated;
  f.g = std::move(g);
  return f;
}

ForcingSpec ForcingSpec::mild(std::vector<GridFunction> xi) {
  if (xi.empty()) throw ValidationError("ForcingSpec::mild: no mode functions");
  ForcingSpec f;
  f.kind = Kind::mild;
  f.g = std::move(xi);
  return f;
}

std::size_t ForcingSpec::modes() const {
  if (kind == Kind::tabulated || kind == Kind::mild) return g.size();
  return g0.empty() ? x.size() : g0.size();
}

std::vector<double> ModeFunction::at(std::size_t node) const {
  std::vector<double> v(modes.size());
  for (std::size_t n = 0; n < modes.size(); ++n) v[n] = modes[n].value(node);
  return v;
}

namespace {

// sum_j mean_j [F(t_i - t_j) - F(t_i - t_{j+1})] with F(0) = 0, F a primitive
// of the convolution kernel (a measure with an atom at 0 when F(0+) != 0)
std::vector<double> convolve_with_primitive(const TimeGrid& grid, const std::function<double(double)>& F,
                                            const GridFunction& g0) {
  const std::size_t n = grid.steps();
  std::vector<double> mean(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double a = grid[j], b = grid[j + 1];
    mean[j] = 0.5 * (g0(a) + g0(b));
  }
  std::vector<double> lag;
  if (grid.is_uniform()) {
    lag.resize(grid.size());
    lag[0] = 0.0;
    for (std::size_t m = 1; m < grid.size(); ++m) lag[m] = F(grid[m]);
  }
  auto prim = [&](std::size_t i, std::size_t j) {
    if (i == j) return 0.0;
    return lag.empty() ? F(grid[i] - grid[j]) : lag[i - j];
  };
  std::vector<double> out(grid.size(), 0.0);
  std::vector<double> terms;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    terms.resize(i);
    for (std::size_t j = 0; j < i; ++j) terms[j] = mean[j] * (prim(i, j) - prim(i, j + 1));
    out[i] = quad::pairwise_sum(terms.data(), terms.size());
  }
  return out;
}

void check_forcing(const DiagonalOperator& op, const ForcingSpec& f) { check_modes(op, f.modes(), "compute_Gg"); }

GridFunction resample(const GridFunction& f, const TimeGrid& grid) {
  if (f.grid().horizon() < grid.horizon() * (1.0 - 1e-12))
    throw ValidationError("compute_Gg: mode function does not cover the grid horizon");
  return GridFunction::sample(grid, [&](double t) { return f(std::min(t, f.grid().horizon())); },
                              Interpolation::linear);
}

ModeFunction resampled_mild(const ForcingSpec& forcing, const TimeGrid& grid) {
  ModeFunction out;
  for (const auto& xi : forcing.g) out.modes.push_back(resample(xi, grid));
  return out;
}

}  // namespace

ModeFunction compute_Gg(const DiagonalOperator& op, const ForcingSpec& forcing, double alpha, const TimeGrid& grid) {
  check_forcing(op, forcing);
  if (forcing.kind == ForcingSpec::Kind::mild) return resampled_mild(forcing, grid);
  if (forcing.kind == ForcingSpec::Kind::tabulated) return compute_Gg(op, forcing, Kernel::fractional(alpha), grid);
  // k * g0 with fractional k is the power forcing with gamma = alpha
  const double gamma = forcing.kind == ForcingSpec::Kind::kernel_convolved ? alpha : forcing.gamma;
  if (forcing.kind == ForcingSpec::Kind::power && !(gamma >= 0.0 && gamma <= alpha))
    throw DomainError("compute_Gg: power forcing needs 0 <= gamma <= alpha");
  ModeFunction out;
  out.modes.reserve(op.size());
  for (std::size_t n = 0; n < op.size(); ++n) {
    const double mu = op[n];
    // F(t) = t^gamma E_{alpha,gamma+1}(-mu t^alpha), the primitive of t^{gamma-1} E_{alpha,gamma}(-mu t^alpha)
    const mlf::MittagLeffler ml(alpha, gamma + 1.0);
    auto F = [&](double t) { return t <= 0.0 ? 0.0 : std::pow(t, gamma) * ml(-mu * std::pow(t, alpha)); };
    std::vector<double> v(grid.size());
    if (forcing.g0.empty()) {
      for (std::size_t i = 0; i < grid.size(); ++i) v[i] = forcing.x[n] * F(grid[i]);
      if (gamma == 0.0) v[0] = forcing.x[n];
    } else {
      const GridFunction g0 = resample(forcing.g0[n], grid);
      v = convolve_with_primitive(grid, F, g0);
      if (gamma == 0.0) v[0] = g0.value(0);
    }
    out.modes.emplace_back(grid, std::move(v), Interpolation::linear);
  }
  return out;
}

ModeFunction compute_Gg(const DiagonalOperator& op, const ForcingSpec& forcing, const Kernel& k, const TimeGrid& grid) {
  check_forcing(op, forcing);
  if (forcing.kind == ForcingSpec::Kind::mild) return resampled_mild(forcing, grid);
  ModeFunction out;
  out.modes.reserve(op.size());
  for (std::size_t n = 0; n < op.size(); ++n) {
    const double mu = op[n];
    std::vector<double> v(grid.size());
    switch (forcing.kind) {
      case ForcingSpec::Kind::kernel_convolved: {
        // Gg_n = e_k(.; mu) * g0 through the cumulative of e_k
        const auto ek = volterra::solve_e_rho(k, k, mu, grid);
        const GridFunction cum(grid, ek.cumulative(), Interpolation::linear);
        if (forcing.g0.empty()) {
          v = cum.values();
          for (double& x : v) x *= forcing.x[n];
        } else {
          const GridFunction g0 = resample(forcing.g0[n], grid);
          v = convolve_with_primitive(grid, [&](double t) { return cum(std::min(t, grid.horizon())); }, g0);
        }
        break;
      }
      case ForcingSpec::Kind::power: {
        if (!forcing.g0.empty() && forcing.gamma > 0.0) {
          // g = (t^{gamma-1}/Gamma(gamma)) * g0
          const GridFunction g0 = resample(forcing.g0[n], grid);
          const auto g = volterra::convolve(Kernel::fractional(forcing.gamma), g0);
          v = volterra::solve_e_rho(k, GridFunction(grid, g, Interpolation::linear), mu, grid).values.values();
        } else if (!forcing.g0.empty()) {
          v = volterra::solve_e_rho(k, resample(forcing.g0[n], grid), mu, grid).values.values();
        } else {
          const double gamma = forcing.gamma, x = forcing.x[n];
          const auto g = GridFunction::sample(
              grid, [&](double t) { return x * std::pow(t, gamma) / std::tgamma(1.0 + gamma); }, Interpolation::linear);
          v = volterra::solve_e_rho(k, g, mu, grid).values.values();
        }
        break;
      }
      case ForcingSpec::Kind::tabulated:
      case ForcingSpec::Kind::mild:
        v = volterra::solve_e_rho(k, resample(forcing.g[n], grid), mu, grid).values.values();
        break;
    }
    out.modes.emplace_back(grid, std::move(v), Interpolation::linear);
  }
  return out;
}

namespace {

std::vector<double> declared_limit(const DiagonalOperator& op, const ForcingSpec& f) {
  if (f.g0_limit.size() != op.size())
    throw ValidationError("Gg_limit: forcing declares no limit g0(inf) for every mode");
  for (std::size_t n = 0; n < f.g0.size(); ++n) {
    const GridFunction& g0 = f.g0[n];
    const double lim = f.g0_limit[n];
    if (!std::isfinite(lim)) throw ValidationError("Gg_limit: declared limit g0(inf) is not finite");
    for (double v : g0.values())
      if (!std::isfinite(v)) throw ValidationError("Gg_limit: g0 is not bounded");
    const double last = g0.values().back();
    if (std::abs(last - lim) > 0.1 * (1.0 + std::abs(lim))) {
      std::ostringstream os;
      os << "Gg_limit: g0 of mode " << n << " ends at " << last << ", far from its declared limit " << lim;
      throw ValidationError(os.str());
    }
  }
  return f.g0_limit;
}

}  // namespace

std::vector<double> Gg_limit(const DiagonalOperator& op, const ForcingSpec& forcing, double alpha, const Kernel& k) {
  check_modes(op, forcing.modes(), "Gg_limit");
  std::vector<double> out(op.size(), 0.0);
  switch (forcing.kind) {
    case ForcingSpec::Kind::power: {
      if (!(forcing.gamma >= 0.0 && forcing.gamma <= alpha))
        throw ValidationError("Gg_limit: power forcing needs 0 <= gamma <= alpha");
      if (forcing.gamma < alpha) {
        for (const auto& g0 : forcing.g0)
          for (double v : g0.values())
            if (!std::isfinite(v)) throw ValidationError("Gg_limit: g0 is not bounded");
        return out;
      }
      const auto lim = declared_limit(op, forcing);
      for (std::size_t n = 0; n < op.size(); ++n) out[n] = lim[n] / op[n];
      return out;
    }
    case ForcingSpec::Kind::kernel_convolved: {
      if (k.form() != Kernel::Form::fractional) {
        const auto cm = volterra::cm_prerequisites(k);
        if (cm.verdict != Verdict::pass)
          throw ValidationError("Gg_limit: kernel fails the complete-monotonicity prerequisites (" + cm.notes + ")");
      }
      const auto lim = declared_limit(op, forcing);
      const double mass = k.l1_norm();
      const double inv = std::isinf(mass) ? 0.0 : 1.0 / mass;
      for (std::size_t n = 0; n < op.size(); ++n) out[n] = lim[n] / (inv + op[n]);
      return out;
    }
    case ForcingSpec::Kind::tabulated:
    case ForcingSpec::Kind::mild:
      throw ValidationError("Gg_limit: no limit statement covers tabulated forcing");
  }
  return out;
}

std::vector<double> e1_infinity(const DiagonalOperator& op, const Kernel& k) {
  const double mass = k.l1_norm();
  std::vector<double> out(op.size(), 0.0);
  if (std::isinf(mass)) return out;
  for (std::size_t n = 0; n < op.size(); ++n) out[n] = 1.0 / (1.0 + mass * op[n]);
  return out;
}

}  // namespace svelab::spectral
