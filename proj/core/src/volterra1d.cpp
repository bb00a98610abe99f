#include "svelab/volterra1d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <tuple>
#include <utility>

#include "svelab/error.hpp"
#include "svelab/quadrature.hpp"

namespace svelab::volterra {
namespace {

// Rows of a primitive evaluated at t_i - t_j, j = 0..i, with a shared lookup
// table on uniform grids where t_i - t_j depends only on i - j.
class LagTable {
 public:
  LagTable(const TimeGrid& grid, double (Kernel::*prim)(double) const, const Kernel& k)
      : grid_(grid), k_(k), prim_(prim) {
    if (grid.is_uniform()) {
      const double h = grid.step(0);
      by_lag_.resize(grid.size());
      for (std::size_t m = 0; m < grid.size(); ++m) by_lag_[m] = (k.*prim)(h * static_cast<double>(m));
    }
  }

  void fill_row(std::size_t i, std::vector<double>& row) const {
    row.resize(i + 1);
    if (!by_lag_.empty()) {
      for (std::size_t j = 0; j <= i; ++j) row[j] = by_lag_[i - j];
      return;
    }
    const double ti = grid_[i];
    for (std::size_t j = 0; j < i; ++j) row[j] = (k_.*prim_)(ti - grid_[j]);
    row[i] = 0.0;
  }

 private:
  const TimeGrid& grid_;
  const Kernel& k_;
  double (Kernel::*prim_)(double) const;
  std::vector<double> by_lag_;
};

// Convolutions of k with rho when both may be singular at 0:
//   conv(t)  = (k * rho)(t)
//   prim(t)  = int_0^t (k * rho) = (K1 * rho)(t)
// On [0, t/2] the factor k(t - s) (or K1(t - s)) is smooth and interpolated
// linearly against the exact moments of rho; on [t/2, t] rho (or R1, after an
// integration by parts) is interpolated against the exact moments of k.
class KRhoConvolution {
 public:
  KRhoConvolution(const Kernel& k, const Kernel& rho, const TimeGrid& grid)
      : k_(k), rho_(rho), grid_(grid),
        kv_(grid, &Kernel::operator(), k), k1_(grid, &Kernel::primitive, k),
        k2_(grid, &Kernel::second_primitive, k) {
    r1_.resize(grid.size());
    r2_.resize(grid.size());
    rv_.resize(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) {
      r1_[j] = rho.primitive(grid[j]);
      r2_[j] = rho.second_primitive(grid[j]);
      rv_[j] = j == 0 ? 0.0 : rho(grid[j]);
    }
  }

  /// Returns {conv(t_i), prim(t_i)}.
  std::pair<double, double> at(std::size_t i) {
    const double t = grid_[i];
    const double m = 0.5 * t;
    kv_.fill_row(i, kv_row_);
    k1_.fill_row(i, k1_row_);
    k2_.fill_row(i, k2_row_);
    double conv = 0.0, prim = -k_.primitive(t - m) * rho_.primitive(m);
    for (std::size_t j = 0; j < i; ++j) {
      const double a = grid_[j], b = grid_[j + 1];
      // cells that are coarse relative to t are split so the linear
      // interpolant of the smooth factor stays accurate
      const bool coarse = (b - a) * kRefine > t;
      if (b <= m && !coarse) {
        const double m0 = r1_[j + 1] - r1_[j];
        const double m1 = (b - a) * r1_[j + 1] - (r2_[j + 1] - r2_[j]);
        conv += linear_against(m0, m1, b - a, kv_row_[j], kv_row_[j + 1]);
        prim += linear_against(m0, m1, b - a, k1_row_[j], k1_row_[j + 1]);
      } else if (a >= m && !coarse) {
        const double m0 = k1_row_[j] - k1_row_[j + 1];
        const double m1 = k2_row_[j] - k2_row_[j + 1] - (b - a) * k1_row_[j + 1];
        conv += linear_against(m0, m1, b - a, rv_[j], rv_[j + 1]);
        prim += linear_against(m0, m1, b - a, r1_[j], r1_[j + 1]);
      } else {
        if (a < m) first_half_split(t, a, std::min(b, m), conv, prim);
        if (b > m) second_half_split(t, std::max(a, m), b, conv, prim);
      }
    }
    return {conv, prim};
  }

 private:
  static constexpr double kRefine = 64.0;

  // int_a^b f(s) w(s) ds with f linear from fa to fb and the weight's moments
  // m0 = int w, m1 = int (s - a) w
  static double linear_against(double m0, double m1, double h, double fa, double fb) {
    return fa * m0 + (fb - fa) / h * m1;
  }

  static int pieces(double t, double a, double b) {
    return std::max(1, static_cast<int>(std::ceil((b - a) * kRefine / t)));
  }

  void first_half_split(double t, double a, double b, double& conv, double& prim) const {
    const int n = pieces(t, a, b);
    double x0 = a, r1a = rho_.primitive(a), r2a = rho_.second_primitive(a);
    double ka = k_(t - a), k1a = k_.primitive(t - a);
    for (int p = 1; p <= n; ++p) {
      const double x1 = p == n ? b : a + (b - a) * p / n;
      const double r1b = rho_.primitive(x1), r2b = rho_.second_primitive(x1);
      const double kb = k_(t - x1), k1b = k_.primitive(t - x1);
      const double m0 = r1b - r1a, m1 = (x1 - x0) * r1b - (r2b - r2a);
      conv += linear_against(m0, m1, x1 - x0, ka, kb);
      prim += linear_against(m0, m1, x1 - x0, k1a, k1b);
      x0 = x1;
      r1a = r1b;
      r2a = r2b;
      ka = kb;
      k1a = k1b;
    }
  }

  void second_half_split(double t, double a, double b, double& conv, double& prim) const {
    const int n = pieces(t, a, b);
    double x0 = a, k1a = k_.primitive(t - a), k2a = k_.second_primitive(t - a);
    double ra = rho_(a), r1a = rho_.primitive(a);
    for (int p = 1; p <= n; ++p) {
      const double x1 = p == n ? b : a + (b - a) * p / n;
      const double k1b = k_.primitive(t - x1), k2b = k_.second_primitive(t - x1);
      const double rb = rho_(x1), r1b = rho_.primitive(x1);
      const double m0 = k1a - k1b, m1 = k2a - k2b - (x1 - x0) * k1b;
      conv += linear_against(m0, m1, x1 - x0, ra, rb);
      prim += linear_against(m0, m1, x1 - x0, r1a, r1b);
      x0 = x1;
      k1a = k1b;
      k2a = k2b;
      ra = rb;
      r1a = r1b;
    }
  }

  const Kernel& k_;
  const Kernel& rho_;
  const TimeGrid& grid_;
  LagTable kv_, k1_, k2_;
  std::vector<double> r1_, r2_, rv_;
  std::vector<double> kv_row_, k1_row_, k2_row_;
};

struct LineFit {
  double slope = 0.0, intercept = 0.0;
  bool ok = false;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  LineFit f;
  const std::size_t n = x.size();
  if (n < 2) return f;
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx <= 0.0) return f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.ok = true;
  return f;
}

}  // namespace

double Solution::grid_mass() const {
  const TimeGrid& g = grid();
  std::vector<double> parts(cell_means.size());
  for (std::size_t j = 0; j < parts.size(); ++j) parts[j] = cell_means[j] * g.step(j);
  return quad::pairwise_sum(parts.data(), parts.size());
}

std::vector<double> Solution::cumulative() const {
  const TimeGrid& g = grid();
  std::vector<double> out(g.size(), 0.0);
  for (std::size_t j = 0; j < cell_means.size(); ++j) out[j + 1] = out[j] + cell_means[j] * g.step(j);
  return out;
}

namespace {

struct Prepared {
  std::vector<double> rho_mean;   // cell averages of rho
  std::vector<double> conv;       // (k * rho)(t_i)
  std::vector<double> conv_prim;  // int_0^{t_i} (k * rho)
};

Prepared prepare(const Kernel& k, const Kernel& rho, const TimeGrid& grid) {
  Prepared p;
  const std::size_t n = grid.steps();
  p.rho_mean.resize(n);
  for (std::size_t j = 0; j < n; ++j)
    p.rho_mean[j] = (rho.primitive(grid[j + 1]) - rho.primitive(grid[j])) / grid.step(j);
  p.conv.assign(grid.size(), 0.0);
  p.conv_prim.assign(grid.size(), 0.0);
  KRhoConvolution krho(k, rho, grid);
  for (std::size_t i = 1; i < grid.size(); ++i) std::tie(p.conv[i], p.conv_prim[i]) = krho.at(i);
  return p;
}

// cell-pair weight int_{t_i}^{t_{i+1}} int_{t_j}^{t_{j+1}} k(t - s) ds dt from rows of K2
inline double pair_weight(const std::vector<double>& cur, const std::vector<double>& next, std::size_t j) {
  return (next[j] - cur[j]) - (next[j + 1] - cur[j + 1]);
}

}  // namespace

constexpr double kNearCells = 8.0;

// The unknown is split as e = rho + w. The bounded part w solves
//   w + lambda k*w = -lambda k*rho
// and is represented by cell averages; the pair weights are exact double
// integrals of k, the load uses the product-integrated k*rho.
Solution solve_second_kind(const Kernel& k, const Kernel& rho, double lambda, const TimeGrid& grid) {
  if (!std::isfinite(lambda)) throw DomainError("Volterra solve: coefficient must be finite");
  const std::size_t n = grid.steps();
  const Prepared prep = prepare(k, rho, grid);
  std::vector<double> w(n, 0.0);
  const LagTable k2(grid, &Kernel::second_primitive, k);
  std::vector<double> cur, next;
  k2.fill_row(0, cur);
  for (std::size_t i = 0; i < n; ++i) {
    k2.fill_row(i + 1, next);
    double acc = 0.0;
    for (std::size_t j = 0; j < i; ++j) acc += pair_weight(cur, next, j) * w[j];
    const double h = grid.step(i);
    const double load = -lambda * (prep.conv_prim[i + 1] - prep.conv_prim[i]);
    const double denom = h + lambda * next[i];
    if (!(denom > 0.0)) {
      std::ostringstream os;
      os << "Volterra solve: implicit step is singular (step " << h << " too large for coefficient " << lambda << ")";
      throw ConvergenceError(os.str(), i + 1);
    }
    w[i] = (load - lambda * acc) / denom;
    if (!std::isfinite(w[i])) throw ConvergenceError("Volterra solve: non-finite value", i + 1);
    std::swap(cur, next);
  }
  // node values: w is reconstructed linearly inside each cell with slopes
  // from neighbouring means and weighted by the exact moments of k
  std::vector<double> slope(n, 0.0);
  for (std::size_t j = 0; j < n && n > 1; ++j) {
    const std::size_t lo = j == 0 ? 0 : j - 1, hi = j + 1 == n ? j : j + 1;
    const double mlo = 0.5 * (grid[lo] + grid[lo + 1]), mhi = 0.5 * (grid[hi] + grid[hi + 1]);
    slope[j] = (w[hi] - w[lo]) / (mhi - mlo);
  }
  std::vector<double> values(grid.size());
  values[0] = rho(0.0);
  const LagTable k1(grid, &Kernel::primitive, k);
  std::vector<double> row1, row2;
  for (std::size_t i = 1; i <= n; ++i) {
    k1.fill_row(i, row1);
    k2.fill_row(i, row2);
    double acc = 0.0;
    for (std::size_t j = 0; j < i; ++j) {
      const double h = grid.step(j);
      const double m0 = row1[j] - row1[j + 1];
      const double m1 = row2[j] - row2[j + 1] - h * row1[j + 1];
      acc += w[j] * m0;
      // far from t_i the kernel is smooth over the cell, the correction is
      // third order and its moment difference is pure roundoff
      if (h * kNearCells > grid[i] - grid[j + 1]) acc += slope[j] * (m1 - 0.5 * h * m0);
    }
    values[i] = rho(grid[i]) - lambda * (prep.conv[i] + acc);
  }
  std::vector<double> mean(n);
  for (std::size_t j = 0; j < n; ++j) mean[j] = prep.rho_mean[j] + w[j];
  return Solution{GridFunction(grid, std::move(values), Interpolation::linear), std::move(mean)};
}

Solution solve_e_rho(const Kernel& k, const Kernel& rho, double mu, const TimeGrid& grid) {
  if (!(mu >= 0.0)) throw DomainError("solve_e_rho: mu must be non-negative");
  return solve_second_kind(k, rho, mu, grid);
}

Solution solve_e_rho(const Kernel& k, const GridFunction& rho, double mu, const TimeGrid& grid) {
  return solve_e_rho(k, Kernel::from_grid_function(rho), mu, grid);
}

double discrete_residual(const Kernel& k, const Kernel& rho, double lambda, const Solution& sol) {
  const TimeGrid& grid = sol.grid();
  const Prepared prep = prepare(k, rho, grid);
  double worst = 0.0;
  for (std::size_t i = 0; i < sol.cell_means.size(); ++i) {
    const double ti = grid[i], ti1 = grid[i + 1];
    double acc = 0.0;
    for (std::size_t j = 0; j <= i; ++j) {
      const double tj = grid[j], tj1 = grid[j + 1];
      const double v = k.second_primitive(ti1 - tj) - k.second_primitive(ti - tj) -
                       k.second_primitive(ti1 - tj1) + k.second_primitive(ti - tj1);
      acc += v * (sol.cell_means[j] - prep.rho_mean[j]);
    }
    const double load = -lambda * (prep.conv_prim[i + 1] - prep.conv_prim[i]);
    const double lhs = (ti1 - ti) * (sol.cell_means[i] - prep.rho_mean[i]) + lambda * acc;
    const double scale = std::max({std::abs(load), std::abs(lhs), std::abs(lambda * acc),
                                   std::abs((ti1 - ti) * prep.rho_mean[i]), 1e-300});
    worst = std::max(worst, std::abs(lhs - load) / scale);
  }
  return worst;
}

TailModel default_tail_model(const Kernel& k) {
  if (k.form() == Kernel::Form::log1p_inverse) return TailModel::inverse_log_square;
  if (k.form() == Kernel::Form::tabulated) return TailModel::none;
  return TailModel::power;
}

MassEstimate solution_mass(const Solution& sol, TailModel model, std::optional<double> exponent) {
  MassEstimate m;
  m.grid_mass = sol.grid_mass();
  m.model = model;
  const TimeGrid& g = sol.grid();
  const double T = g.horizon();
  const double inf = std::numeric_limits<double>::infinity();
  if (exponent && !(*exponent < -1.0)) throw DomainError("solution_mass: tail exponent must be below -1");
  if (model != TailModel::none) {
    std::vector<double> x, y;
    for (std::size_t j = 0; j < sol.cell_means.size(); ++j) {
      const double v = sol.cell_means[j];
      const double mid = 0.5 * (g[j] + g[j + 1]);
      if (g[j] < T / 10.0 || !(v > 0.0) || !std::isfinite(v)) continue;
      x.push_back(std::log(mid));
      y.push_back(model == TailModel::power ? std::log(v) : 1.0 / std::sqrt(mid * v));
    }
    if (model == TailModel::power && exponent) {
      m.fitted_exponent = *exponent;
      if (x.empty()) {
        m.tail = inf;
      } else {
        double c = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) c += y[i] - *exponent * x[i];
        c /= static_cast<double>(x.size());
        const double vT = std::exp(c + *exponent * std::log(T));
        m.tail = vT * T / (-(*exponent + 1.0));
      }
    } else {
      const LineFit fit = least_squares(x, y);
      if (!fit.ok) {
        m.tail = inf;
      } else if (model == TailModel::power) {
        m.fitted_exponent = fit.slope;
        const double vT = std::exp(fit.intercept + fit.slope * std::log(T));
        m.tail = fit.slope < -1.0 ? vT * T / (-(fit.slope + 1.0)) : inf;
      } else {
        // 1/sqrt(t e(t)) = (log t + B)/sqrt(A)
        const double A = 1.0 / (fit.slope * fit.slope);
        const double B = fit.intercept / fit.slope;
        m.fitted_exponent = -1.0;
        m.tail = (fit.slope > 0.0 && std::log(T) + B > 0.0) ? A / (std::log(T) + B) : inf;
      }
    }
  }
  m.total = m.grid_mass + m.tail;
  return m;
}

Solution resolvent_second_kind(const GridFunction& rho) {
  for (std::size_t i = 0; i < rho.size(); ++i)
    if (!(rho.value(i) >= 0.0))
      throw DomainError("resolvent_second_kind: rho must be non-negative (node " + std::to_string(i) + ")");
  const Kernel kr = Kernel::from_grid_function(rho);
  return solve_second_kind(kr, kr, -1.0, rho.grid());
}

PaleyWienerReport paley_wiener_check(const GridFunction& rho, double tail_mass) {
  if (!(tail_mass >= 0.0)) throw DomainError("paley_wiener_check: tail mass must be non-negative");
  for (double v : rho.values())
    if (!(v >= 0.0)) throw DomainError("paley_wiener_check: rho must be non-negative");
  const double fine = rho.integral();
  double band = 0.0;
  const TimeGrid& g = rho.grid();
  if (g.size() >= 3) {
    // same rule on every other node as an error indicator
    std::vector<double> nodes, vals;
    for (std::size_t i = 0; i < g.size(); i += 2) {
      nodes.push_back(g[i]);
      vals.push_back(rho.value(i));
    }
    if (nodes.back() != g.horizon()) {
      nodes.push_back(g.horizon());
      vals.push_back(rho.values().back());
    }
    const double coarse = GridFunction(TimeGrid::from_nodes(nodes), vals, rho.interpolation()).integral();
    band = 2.0 * std::abs(fine - coarse);
  }
  PaleyWienerReport r;
  r.total_mass = fine + tail_mass;
  r.error_band = band + 1e-12 * r.total_mass;
  r.verdict = compare_strict_less(r.total_mass, 1.0, r.error_band);
  r.integrable = r.verdict == Verdict::pass;
  return r;
}

std::vector<double> convolve(const Kernel& rho, const GridFunction& f) {
  const TimeGrid& g = f.grid();
  std::vector<double> out(g.size(), 0.0);
  const LagTable r1(g, &Kernel::primitive, rho);
  std::vector<double> row;
  std::vector<double> avg(g.steps());
  for (std::size_t j = 0; j < avg.size(); ++j) avg[j] = f.cell_average(j);
  for (std::size_t i = 1; i < g.size(); ++i) {
    r1.fill_row(i, row);
    double acc = 0.0;
    for (std::size_t j = 0; j < i; ++j) acc += (row[j] - row[j + 1]) * avg[j];
    out[i] = acc;
  }
  return out;
}

GridFunction gronwall_majorant(const GridFunction& f, const GridFunction& r, double mu) {
  if (f.grid().horizon() > r.grid().horizon() * (1.0 + 1e-12))
    throw ValidationError("gronwall_majorant: r must cover the horizon of f");
  const std::vector<double> conv = convolve(Kernel::from_grid_function(r), f);
  std::vector<double> out(f.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f.value(i) + mu * conv[i];
  return GridFunction(f.grid(), std::move(out), f.interpolation());
}

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// noise[i] is an absolute error estimate for g[i]
bool slopes_nondecreasing(const std::vector<double>& t, const std::vector<double>& g,
                          const std::vector<double>& noise) {
  std::vector<double> s, ds;
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    const double h = t[i + 1] - t[i];
    s.push_back((g[i + 1] - g[i]) / h);
    ds.push_back((noise[i] + noise[i + 1]) / h);
  }
  for (std::size_t i = 0; i + 1 < s.size(); ++i)
    if (s[i + 1] < s[i] - 1e-8 * (std::abs(s[i]) + std::abs(s[i + 1])) - ds[i] - ds[i + 1]) return false;
  return true;
}

}  // namespace

constexpr std::size_t kMinTableNodes = 5;

CMReport cm_prerequisites(const Kernel& k) {
  CMReport rep;
  std::vector<double> t;
  if (k.form() == Kernel::Form::tabulated) {
    // sample inside the table only
    const double end = k.support_end();
    const double start = std::max(end * 1e-8, 1e-12);
    for (int i = 0; i <= 80; ++i) {
      const double x = start * std::pow(end / start, i / 80.0);
      if (x <= end) t.push_back(x);
    }
    if (k.singularity_constant() == 0.0 && k.l1_norm() == 0.0) t.clear();
  } else {
    double hi = 1e4;
    if (k.form() == Kernel::Form::exponential_mixture) {
      double min_rate = std::numeric_limits<double>::infinity();
      for (const auto& e : k.exp_terms())
        if (e.weight > 0.0) min_rate = std::min(min_rate, e.rate);
      hi = std::min(hi, 600.0 / min_rate);
    }
    const double lo = std::min(1e-4, hi * 1e-6);
    for (int i = 0; i <= 80; ++i) t.push_back(lo * std::pow(hi / lo, i / 80.0));
  }
  rep.samples = t.size();
  if (k.form() == Kernel::Form::tabulated && k.table_size() < kMinTableNodes) {
    rep.verdict = Verdict::inconclusive;
    rep.notes = "too few table nodes for finite-difference checks";
    return rep;
  }
  if (t.size() < 5) {
    rep.verdict = Verdict::inconclusive;
    rep.notes = "too few samples for finite-difference checks";
    return rep;
  }
  std::vector<double> v(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) v[i] = k(t[i]);
  rep.positive = std::all_of(v.begin(), v.end(), [](double x) { return x > 0.0; });
  rep.nonincreasing = true;
  for (std::size_t i = 0; i + 1 < v.size(); ++i)
    if (v[i + 1] > v[i] * (1.0 + 1e-13)) rep.nonincreasing = false;
  if (rep.positive) {
    std::vector<double> g(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) g[i] = std::log(v[i]);
    rep.log_convex = slopes_nondecreasing(t, g, std::vector<double>(g.size(), 8.0 * kEps));
  }
  // -k' by difference quotients, attached to the cell midpoint
  std::vector<double> td, d;
  double vmax = *std::max_element(v.begin(), v.end());
  bool all_zero = true;
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    const double di = -(v[i + 1] - v[i]) / (t[i + 1] - t[i]);
    td.push_back(0.5 * (t[i] + t[i + 1]));
    d.push_back(di);
    if (std::abs(v[i + 1] - v[i]) > 1e-14 * vmax) all_zero = false;
  }
  rep.degenerate_derivative = all_zero;
  if (!all_zero) {
    rep.neg_derivative_positive = std::all_of(d.begin(), d.end(), [](double x) { return x > 0.0; });
    if (rep.neg_derivative_positive) {
      std::vector<double> g(d.size());
      std::vector<double> noise(d.size());
      for (std::size_t i = 0; i < d.size(); ++i) {
        g[i] = std::log(d[i]);
        noise[i] = 8.0 * kEps * (std::abs(v[i]) + std::abs(v[i + 1])) / std::abs(v[i + 1] - v[i]);
      }
      rep.neg_derivative_log_convex = slopes_nondecreasing(td, g, noise);
    }
  }
  if (rep.degenerate_derivative) {
    rep.verdict = Verdict::inconclusive;
    rep.notes = "-k' vanishes identically; ln(-k') is undefined";
  } else if (rep.positive && rep.nonincreasing && rep.log_convex && rep.neg_derivative_positive &&
             rep.neg_derivative_log_convex) {
    rep.verdict = Verdict::pass;
  } else {
    rep.verdict = Verdict::fail;
  }
  return rep;
}

namespace {

void check_lq_args(const Kernel& k, double nu_mass, double mu, double q) {
  if (!(nu_mass >= 0.0)) throw DomainError("lq_bound_convolved: measure mass must be non-negative");
  if (!(mu > 0.0)) throw DomainError("lq_bound_convolved: mu must be positive");
  if (!(q >= 1.0)) throw DomainError("lq_bound_convolved: q must satisfy q >= 1");
  if (!(q * k.singularity_exponent() < 1.0)) throw DomainError("lq_bound_convolved: need q < 1/delta");
}

}  // namespace

double lq_bound_convolved(const Kernel& k, double nu_mass, double mu, double q) {
  check_lq_args(k, nu_mass, mu, q);
  if (nu_mass == 0.0) return 0.0;
  const double delta = k.singularity_exponent();
  const double c = k.singularity_constant();
  const double pref = std::max(std::pow(c, q) / (1.0 - q * delta), std::pow(c, q - 1.0));
  return std::pow(nu_mass, q) * pref * std::pow(std::max(1.0, mu), -(1.0 - q * delta) / (1.0 - delta));
}

double lq_bound_convolved_sum(const Kernel& k, double nu_mass, double mu, double q) {
  check_lq_args(k, nu_mass, mu, q);
  if (nu_mass == 0.0) return 0.0;
  const double delta = k.singularity_exponent();
  const double c = k.singularity_constant();
  const double kappa = 1.0 / (1.0 - delta);
  const double m = std::max(1.0, mu);
  const double head = std::pow(c, q) / (1.0 - q * delta) * std::pow(m, -(1.0 - q * delta) * kappa);
  const double rest = std::pow(c, q - 1.0) * std::pow(m, (q - 1.0) * kappa * delta) / mu;
  return std::pow(nu_mass, q) * (head + rest);
}

}  // namespace svelab::volterra
