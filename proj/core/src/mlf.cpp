#include "svelab/mlf.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <sstream>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "svelab/error.hpp"
#include "svelab/quadrature.hpp"

namespace svelab::mlf {
namespace {

using cplx = std::complex<double>;
constexpr double kPi = std::numbers::pi;
constexpr double kSeriesRadius = 3.0;
constexpr double kAsymptoticRadius = 45.0;
constexpr double kLogEps = -36.043653389117154;  // log(2^-52)

double rgamma(double y) {
  if (y <= 0.0 && std::abs(y - std::round(y)) < 1e-12) return 0.0;
  if (y > 171.0) return 0.0;
  return 1.0 / std::tgamma(y);
}

void check_params(double alpha, double beta) {
  const bool boundary = alpha == 2.0 && (beta == 1.0 || beta == 2.0);
  if (!(alpha > 0.0 && alpha < 2.0) && !boundary)
    throw DomainError("Mittag-Leffler: alpha must lie in (0, 2), or equal 2 with beta 1 or 2");
  if (!(beta > 0.0)) throw DomainError("Mittag-Leffler: beta must be positive");
}

struct ContourParams {
  double mu = 0.0;
  double h = 0.0;
  double n = std::numeric_limits<double>::infinity();
};

// Optimal parameters on a region bounded by two singularities.
ContourParams optimal_bounded(double phi_j, double phi_j1, double pj, double qj,
                              double log_epsilon) {
  const double fac = 1.01;
  const double f_max = std::exp(log_epsilon - kLogEps);
  const double sq_j = std::sqrt(phi_j);
  const double threshold = 2.0 * std::sqrt(log_epsilon - kLogEps);
  const double sq_j1 = std::min(std::sqrt(phi_j1), threshold - sq_j);
  double sqb_j = 0.0, sqb_j1 = 0.0, f_bar = 1.0;
  bool admissible = false;
  if (pj < 1e-14 && qj < 1e-14) {
    sqb_j = sq_j;
    sqb_j1 = sq_j1;
    admissible = true;
  } else if (pj < 1e-14) {
    sqb_j = sq_j;
    const double f_min = sq_j > 0 ? fac * std::pow(sq_j / (sq_j1 - sq_j), qj) : fac;
    if (f_min < f_max) {
      f_bar = f_min + f_min / f_max * (f_max - f_min);
      const double fq = std::pow(f_bar, -1.0 / qj);
      sqb_j1 = (2.0 * sq_j1 - fq * sq_j) / (2.0 + fq);
      admissible = true;
    }
  } else if (qj < 1e-14) {
    sqb_j1 = sq_j1;
    const double f_min = fac * std::pow(sq_j1 / (sq_j1 - sq_j), pj);
    if (f_min < f_max) {
      f_bar = f_min + f_min / f_max * (f_max - f_min);
      const double fp = std::pow(f_bar, -1.0 / pj);
      sqb_j = (2.0 * sq_j + fp * sq_j1) / (2.0 - fp);
      admissible = true;
    }
  } else {
    double f_min = fac * std::pow((sq_j + sq_j1) / (sq_j1 - sq_j), std::max(pj, qj));
    if (f_min < f_max) {
      f_min = std::max(f_min, 1.5);
      f_bar = f_min + f_min / f_max * (f_max - f_min);
      const double fp = std::pow(f_bar, -1.0 / pj);
      const double fq = std::pow(f_bar, -1.0 / qj);
      const double w = -phi_j1 / log_epsilon;
      const double den = 2.0 + w - (1.0 + w) * fp + fq;
      sqb_j = ((2.0 + w + fq) * sq_j + fp * sq_j1) / den;
      sqb_j1 = (-(1.0 + w) * fq * sq_j + (2.0 + w - (1.0 + w) * fp) * sq_j1) / den;
      admissible = true;
    }
  }
  ContourParams out;
  if (!admissible) return out;
  const double log_eps_adj = log_epsilon - std::log(f_bar);
  const double w = -sqb_j1 * sqb_j1 / log_eps_adj;
  const double m = ((1.0 + w) * sqb_j + sqb_j1) / (2.0 + w);
  out.mu = m * m;
  out.h = -2.0 * kPi / log_eps_adj * (sqb_j1 - sqb_j) / ((1.0 + w) * sqb_j + sqb_j1);
  out.n = std::ceil(std::sqrt(1.0 - log_eps_adj / out.mu) / out.h);
  return out;
}

// Optimal parameters on the unbounded region to the right of the last singularity.
ContourParams optimal_unbounded(double phi_j, double pj, double log_epsilon) {
  const double sq_phi_j = std::sqrt(phi_j);
  double phib = phi_j > 0 ? phi_j * 1.01 : 0.01;
  double sqb = std::sqrt(phib);
  const double f_min = 1.0, f_max = 10.0, f_tar = 5.0;
  double n = 0.0, a = 0.0, sq_mu = 0.0;
  for (int iter = 0; iter < 200; ++iter) {
    const double phi_t = phib;
    const double le = log_epsilon / phi_t;
    n = std::ceil(phi_t / kPi * (1.0 - 1.5 * le + std::sqrt(1.0 - 2.0 * le)));
    a = kPi * n / phi_t;
    sq_mu = sqb * std::abs(4.0 - a) / std::abs(7.0 - std::sqrt(1.0 + 12.0 * a));
    const double fbar = std::pow((sqb - sq_phi_j) / sq_mu, -pj);
    if (pj < 1e-14 || (f_min < fbar && fbar < f_max)) break;
    sqb = std::pow(f_tar, -1.0 / pj) * sq_mu + sq_phi_j;
    phib = sqb * sqb;
  }
  ContourParams out;
  out.mu = sq_mu * sq_mu;
  out.h = (-3.0 * a - 2.0 + 2.0 * std::sqrt(1.0 + 12.0 * a)) / (4.0 - a) / n;
  out.n = n;
  const double threshold = log_epsilon - kLogEps;
  if (out.mu > threshold) {
    const double q = std::abs(pj) < 1e-14 ? 0.0 : std::pow(f_tar, -1.0 / pj) * std::sqrt(out.mu);
    const double pb = (q + std::sqrt(phi_j)) * (q + std::sqrt(phi_j));
    if (pb < threshold) {
      const double w = std::sqrt(kLogEps / (kLogEps - log_epsilon));
      const double u = std::sqrt(-pb / kLogEps);
      out.mu = threshold;
      out.n = std::ceil(w * log_epsilon / 2.0 / kPi / (u * w - 1.0));
      out.h = std::sqrt(kLogEps / (kLogEps - log_epsilon)) / out.n;
    } else {
      out.n = std::numeric_limits<double>::infinity();
      out.h = 0.0;
    }
  }
  return out;
}

}  // namespace

MittagLeffler::MittagLeffler(double alpha, double beta) : alpha_(alpha), beta_(beta) {
  check_params(alpha, beta);
  if (alpha == 1.0 && beta == 1.0) closed_form_ = 1;
  if (alpha == 1.0 && beta == 2.0) closed_form_ = 2;
  if (alpha == 2.0) {
    closed_form_ = beta == 1.0 ? 3 : 4;
    series_coef_.push_back(rgamma(beta));
    return;
  }
  // Series terms are needed while |x|^n / Gamma(alpha n + beta) is significant
  // for |x|^{1/alpha} <= kSeriesRadius.
  for (int n = 0;; ++n) {
    const double arg = alpha * n + beta;
    series_coef_.push_back(rgamma(arg));
    if (arg > kSeriesRadius + 10.0 &&
        n * alpha * std::log(kSeriesRadius) - std::lgamma(arg) < -42.0)
      break;
  }
  // Asymptotic terms; the optimal truncation index never exceeds r/alpha for
  // the smallest radius handled, and larger radii stop earlier.
  const int kmax = static_cast<int>(std::ceil(kAsymptoticRadius / alpha)) + 2;
  asym_coef_.reserve(kmax);
  asym_log_envelope_.reserve(kmax);
  for (int k = 1; k <= kmax; ++k) {
    asym_coef_.push_back(rgamma(beta - alpha * k));
    asym_log_envelope_.push_back(std::lgamma(alpha * k + 1.0 - beta) - std::log(kPi));
  }
}

double MittagLeffler::operator()(double x) const {
  if (std::isnan(x) || x > 0.0)
    throw DomainError("Mittag-Leffler: argument must be real and non-positive");
  if (x == 0.0) return series_coef_[0];
  if (closed_form_ == 1) return std::exp(x);
  if (closed_form_ == 2) return std::expm1(x) / x;
  if (closed_form_ == 3) return std::cos(std::sqrt(-x));
  if (closed_form_ == 4) return std::sin(std::sqrt(-x)) / std::sqrt(-x);
  const double z = -x;
  const double r = std::pow(z, 1.0 / alpha_);
  if (r <= kSeriesRadius) return series(x);
  if (r >= kAsymptoticRadius) return asymptotic(z);
  return contour(x);
}

double MittagLeffler::series(double x) const {
  double sum = 0.0;
  double pw = 1.0;
  for (std::size_t n = 0; n < series_coef_.size(); ++n) {
    sum += pw * series_coef_[n];
    pw *= x;
  }
  return sum;
}

double MittagLeffler::asymptotic(double z) const {
  const double r = std::pow(z, 1.0 / alpha_);
  const double log_z = std::log(z);
  double sum = 0.0;
  double zk = 1.0;
  const double inv_z = 1.0 / z;
  // Truncation follows the envelope Gamma(alpha k + 1 - beta) / (pi z^k), whose
  // minimum sits near k = r / alpha; individual coefficients may be tiny near
  // Gamma poles and are not a reliable stopping signal.
  const double k_opt = r / alpha_;
  for (std::size_t k = 1; k <= asym_coef_.size(); ++k) {
    zk *= inv_z;
    const double term = asym_coef_[k - 1] * zk;
    sum += (k % 2 == 1) ? term : -term;
    const double env = std::exp(asym_log_envelope_[k - 1] - static_cast<double>(k) * log_z);
    if (env < 1e-18 * std::abs(sum) || static_cast<double>(k) >= k_opt || zk == 0.0) break;
  }
  if (alpha_ > 1.0) {
    const cplx s = std::polar(r, kPi / alpha_);
    const cplx res = std::pow(s, 1.0 - beta_) * std::exp(s);
    sum += 2.0 / alpha_ * res.real();
  }
  return sum;
}

double MittagLeffler::contour(double x) const {
  // Inversion of the Laplace transform s^{alpha-beta}/(s^alpha - x) along an
  // optimal parabolic contour, t = 1.
  const double alpha = alpha_, beta = beta_;
  const double absx = -x;
  const double theta = kPi;
  const int kmin = static_cast<int>(std::ceil(-alpha / 2.0 - theta / (2.0 * kPi)));
  const int kmax = static_cast<int>(std::floor(alpha / 2.0 - theta / (2.0 * kPi)));
  std::vector<std::pair<double, cplx>> poles;
  for (int k = kmin; k <= kmax; ++k) {
    const cplx s = std::polar(std::pow(absx, 1.0 / alpha), (theta + 2.0 * k * kPi) / alpha);
    const double phi = 0.5 * (s.real() + std::abs(s));
    if (phi > 1e-15) poles.emplace_back(phi, s);
  }
  std::sort(poles.begin(), poles.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<cplx> s_star{cplx(0.0)};
  std::vector<double> phi{0.0};
  for (const auto& p : poles) {
    phi.push_back(p.first);
    s_star.push_back(p.second);
  }
  const std::size_t j1 = s_star.size();
  std::vector<double> p(j1, 1.0), q(j1, 1.0);
  p[0] = std::max(0.0, -2.0 * (alpha - beta + 1.0));
  q[j1 - 1] = std::numeric_limits<double>::infinity();
  phi.push_back(std::numeric_limits<double>::infinity());

  double log_epsilon = std::log(1e-15);
  std::vector<ContourParams> params(j1);
  std::size_t best = 0;
  for (int attempt = 0; attempt < 40; ++attempt) {
    for (std::size_t j = 0; j < j1; ++j) {
      params[j] = ContourParams{};
      const bool admissible = phi[j] < (log_epsilon - kLogEps) && phi[j] < phi[j + 1];
      if (!admissible) continue;
      params[j] = (j + 1 < j1) ? optimal_bounded(phi[j], phi[j + 1], p[j], q[j], log_epsilon)
                               : optimal_unbounded(phi[j], p[j], log_epsilon);
    }
    best = 0;
    for (std::size_t j = 1; j < j1; ++j)
      if (params[j].n < params[best].n) best = j;
    if (params[best].n <= 200.0) break;
    log_epsilon += std::log(10.0);
  }
  const ContourParams& cp = params[best];
  if (!std::isfinite(cp.n)) throw ConvergenceError("Mittag-Leffler contour selection failed", 0);
  const int n = static_cast<int>(cp.n);
  // Nodes come in conjugate pairs, so only k >= 0 is evaluated.
  auto integrand = [&](double u) {
    const cplx z = cp.mu * (cplx(1.0, u) * cplx(1.0, u));
    const cplx zd = cplx(-2.0 * cp.mu * u, 2.0 * cp.mu);
    const cplx f = std::pow(z, alpha - beta) / (std::pow(z, alpha) - x) * zd;
    return std::exp(z) * f;
  };
  double acc = integrand(0.0).imag() * 0.5;
  for (int k = 1; k <= n; ++k) acc += integrand(cp.h * k).imag();
  double value = cp.h * acc / kPi;
  for (std::size_t j = best + 1; j < j1; ++j)
    value += (1.0 / alpha * std::pow(s_star[j], 1.0 - beta) * std::exp(s_star[j])).real();
  return value;
}

double mittag_leffler(double alpha, double beta, double x) {
  check_params(alpha, beta);
  if (x == 0.0) return rgamma(beta);
  // small per-thread cache of coefficient tables, round-robin replacement
  thread_local std::vector<MittagLeffler> cache;
  thread_local std::size_t next_slot = 0;
  for (const auto& ml : cache)
    if (ml.alpha() == alpha && ml.beta() == beta) return ml(x);
  if (cache.size() < 8) {
    cache.emplace_back(alpha, beta);
    return cache.back()(x);
  }
  cache[next_slot] = MittagLeffler(alpha, beta);
  const double v = cache[next_slot](x);
  next_slot = (next_slot + 1) % cache.size();
  return v;
}

double e_k_closed(double t, double mu, double alpha) {
  return e_h_closed(t, mu, alpha, alpha);
}

double e_h_closed(double t, double mu, double alpha, double beta) {
  check_params(alpha, beta);
  if (!(t > 0.0)) throw DomainError("resolvent kernel: t must be positive");
  if (!(mu >= 0.0)) throw DomainError("resolvent kernel: mu must be non-negative");
  return std::pow(t, beta - 1.0) * mittag_leffler(alpha, beta, -mu * std::pow(t, alpha));
}

double cumulative_e_k(double T, double mu, double alpha) {
  check_params(alpha, alpha);
  if (!(T >= 0.0)) throw DomainError("cumulative_e_k: T must be non-negative");
  if (std::isinf(T)) {
    if (!(mu > 0.0)) throw DomainError("cumulative_e_k: infinite horizon needs mu > 0");
    return 1.0 / mu;
  }
  if (T == 0.0) return 0.0;
  return std::pow(T, alpha) * mittag_leffler(alpha, alpha + 1.0, -mu * std::pow(T, alpha));
}

double cumulative_e_h(double T, double mu, double alpha, double beta) {
  check_params(alpha, beta);
  if (!(T >= 0.0) || std::isinf(T)) throw DomainError("cumulative_e_h: T must be finite and non-negative");
  if (T == 0.0) return 0.0;
  return std::pow(T, beta) * mittag_leffler(alpha, beta + 1.0, -mu * std::pow(T, alpha));
}

void check_cq_window(double alpha, double beta, double q) {
  check_params(alpha, beta);
  if (!(q >= 1.0)) throw DomainError("c_q: q must satisfy q >= 1");
  std::ostringstream os;
  if (alpha == beta) {
    if (!(1.0 < alpha + 1.0 / q)) {
      os << "c_q: integrability violated, need 1 < alpha + 1/q (alpha=" << alpha << ", q=" << q << ")";
      throw DomainError(os.str());
    }
    return;
  }
  if (!(1.0 - 1.0 / q < beta)) {
    os << "c_q: integrability at 0 violated, need 1 - 1/q < beta (beta=" << beta << ", q=" << q << ")";
    throw DomainError(os.str());
  }
  if (!(beta < alpha + 1.0 - 1.0 / q)) {
    os << "c_q: integrability at infinity violated, need beta < alpha + 1 - 1/q (alpha=" << alpha
       << ", beta=" << beta << ", q=" << q << ")";
    throw DomainError(os.str());
  }
}

namespace {

// Tail of int |t^{beta-1}E(-t^alpha)|^q from T to infinity using the
// asymptotic expansion, valid for T >= kAsymptoticRadius and beyond the
// exponentially small pole contributions.
class TailExpansion {
 public:
  TailExpansion(double alpha, double beta, double q) : alpha_(alpha), beta_(beta), q_(q) {}

  double integral_from(double T) const {
    const int kmax = static_cast<int>(std::ceil(T / alpha_)) + 2;
    std::vector<double> a;
    a.reserve(kmax);
    for (int k = 1; k <= kmax; ++k) a.push_back(((k % 2 == 1) ? 1.0 : -1.0) * rgamma(beta_ - alpha_ * k));
    int k0 = -1;
    for (int k = 0; k < kmax; ++k)
      if (a[k] != 0.0) {
        k0 = k;
        break;
      }
    if (k0 < 0) {
      // E_{1,1}(-t) = exp(-t): no algebraic tail
      return std::exp(-q_ * T) / q_;
    }
    const double w = std::pow(T, -alpha_);
    // p_m = a_{k0+m}/a_{k0}, truncated at the smallest envelope term
    std::vector<double> p{1.0};
    const double log_w = std::log(w);
    const double k_opt = T / alpha_;
    for (int m = 1; k0 + m < kmax; ++m) {
      const int k = k0 + m + 1;
      if (k >= k_opt) break;
      p.push_back(a[k0 + m] / a[k0]);
      const double env = std::lgamma(alpha_ * k + 1.0 - beta_) + m * log_w - std::log(std::abs(a[k0]));
      if (env < -44.0) break;
    }
    // (1 + sum p_m w^m)^q by the power-series recurrence
    const std::size_t M = p.size();
    std::vector<double> b(M, 0.0);
    b[0] = 1.0;
    for (std::size_t m = 1; m < M; ++m) {
      double s = 0.0;
      for (std::size_t j = 1; j <= m; ++j)
        s += ((q_ + 1.0) * static_cast<double>(j) - static_cast<double>(m)) * p[j] * b[m - j];
      b[m] = s / static_cast<double>(m);
    }
    const double e0 = q_ * (beta_ - 1.0 - alpha_ * (k0 + 1));
    double total = 0.0;
    for (std::size_t m = M; m-- > 0;) {
      const double e = e0 - alpha_ * static_cast<double>(m) + 1.0;
      total += b[m] * std::pow(T, e) / (-e);
    }
    return std::pow(std::abs(a[k0]), q_) * total;
  }

 private:
  double alpha_, beta_, q_;
};

double tail_start(double alpha) {
  double t = kAsymptoticRadius;
  if (alpha > 1.0) t = std::max(t, 40.0 / std::abs(std::cos(kPi / alpha)));
  return std::min(t, 1e7);
}

struct CqIntegrand {
  MittagLeffler ml;
  double alpha, beta, q;
  double operator()(double t) const {
    if (t == 0.0) return 0.0;
    return std::pow(std::abs(std::pow(t, beta - 1.0) * ml(-std::pow(t, alpha))), q);
  }
};

// int_0^1 with u = t^c, c = q(beta-1)+1, which absorbs the t^{q(beta-1)} factor.
quad::Result head_integral(const CqIntegrand& f, double upper, double rel_tol) {
  const double c = f.q * (f.beta - 1.0) + 1.0;
  const double ucap = std::pow(upper, c);
  auto g = [&](double u) {
    if (u == 0.0) return std::pow(f.ml(0.0), f.q) / c;
    const double t = std::pow(u, 1.0 / c);
    return std::pow(std::abs(f.ml(-std::pow(t, f.alpha))), f.q) / c;
  };
  quad::Options opts;
  opts.rel_tol = rel_tol;
  opts.max_intervals = 20000;
  return quad::gauss_kronrod(g, 0.0, ucap, opts);
}

quad::Result body_integral(const CqIntegrand& f, double a, double b, double abs_tol) {
  quad::Result total;
  quad::Options opts;
  opts.rel_tol = 1e-13;
  opts.max_intervals = 20000;
  std::vector<double> parts;
  double lo = a;
  while (lo < b) {
    const double hi = std::min(b, lo * 2.0);
    opts.abs_tol = abs_tol * (hi - lo) / (b - a);
    const quad::Result r = quad::gauss_kronrod(std::cref(f), lo, hi, opts);
    parts.push_back(r.value);
    total.abs_error += r.abs_error;
    total.converged = total.converged && r.converged;
    lo = hi;
  }
  total.value = quad::pairwise_sum(parts.data(), parts.size());
  return total;
}

}  // namespace

CqValue c_q_detailed(double alpha, double beta, double q, double rel_tol) {
  check_cq_window(alpha, beta, q);
  CqIntegrand f{MittagLeffler(alpha, beta), alpha, beta, q};
  const quad::Result head = head_integral(f, 1.0, rel_tol);
  const double T = tail_start(alpha);
  const quad::Result body = body_integral(f, 1.0, T, rel_tol * std::abs(head.value));
  const double tail = TailExpansion(alpha, beta, q).integral_from(T);
  CqValue out;
  out.value = head.value + body.value + tail;
  out.abs_error = head.abs_error + body.abs_error + 1e-15 * std::abs(tail) +
                  std::exp(-T) * std::abs(out.value);
  if (!head.converged || !body.converged)
    out.abs_error = std::max(out.abs_error, 1e-8 * std::abs(out.value));
  return out;
}

double c_q(double alpha, double beta, double q, double rel_tol) {
  return c_q_detailed(alpha, beta, q, rel_tol).value;
}

double c_q_incomplete(double alpha, double beta, double q, double upper, double rel_tol) {
  check_cq_window(alpha, beta, q);
  if (!(upper >= 0.0)) throw DomainError("c_q_incomplete: upper limit must be non-negative");
  if (upper == 0.0) return 0.0;
  if (std::isinf(upper)) return c_q(alpha, beta, q, rel_tol);
  CqIntegrand f{MittagLeffler(alpha, beta), alpha, beta, q};
  const quad::Result head = head_integral(f, std::min(upper, 1.0), rel_tol);
  if (upper <= 1.0) return head.value;
  const double T = tail_start(alpha);
  if (upper <= T) {
    const quad::Result body = body_integral(f, 1.0, upper, rel_tol * std::abs(head.value));
    return head.value + body.value;
  }
  const TailExpansion tail(alpha, beta, q);
  const quad::Result body = body_integral(f, 1.0, T, rel_tol * std::abs(head.value));
  return head.value + body.value + tail.integral_from(T) - tail.integral_from(upper);
}

namespace {

double frequency_integral(double alpha, double beta, double phase, double rel_tol) {
  const double c = std::cos(phase);
  const double s = std::sin(phase);
  if (std::abs(s) < 1e-14 && c < 0.0) return std::numeric_limits<double>::infinity();
  auto g = [=](double r) {
    const double ra = std::pow(r, alpha);
    const double quad_form = (ra + c) * (ra + c) + s * s;
    return std::pow(r, 2.0 * alpha - 2.0 * beta) / quad_form;
  };
  boost::math::quadrature::tanh_sinh<double> ts;
  boost::math::quadrature::exp_sinh<double> es;
  const double head = ts.integrate(g, 0.0, 1.0, rel_tol);
  const double tail = es.integrate(g, 1.0, std::numeric_limits<double>::infinity(), rel_tol);
  return (head + tail) / kPi;
}

}  // namespace

double c_2_plancherel(double alpha, double beta, double rel_tol) {
  check_params(alpha, beta);
  if (!(beta > 0.5))
    throw DomainError("c_2_plancherel: integrability at infinity violated, need beta > 1/2");
  if (!(beta < alpha + 0.5))
    throw DomainError("c_2_plancherel: integrability at 0 violated, need beta < alpha + 1/2");
  return frequency_integral(alpha, beta, alpha * kPi / 2.0, rel_tol);
}

PhaseCheck plancherel_phase_check(double alpha, double beta) {
  PhaseCheck out;
  out.alpha = alpha;
  out.beta = beta;
  out.time_domain = c_q(alpha, beta, 2.0);
  out.half_angle = c_2_plancherel(alpha, beta);
  try {
    out.full_angle = frequency_integral(alpha, beta, alpha * kPi, 1e-13);
  } catch (const std::exception&) {
    out.full_angle = std::numeric_limits<double>::infinity();
  }
  out.half_angle_rel_diff = std::abs(out.half_angle - out.time_domain) / out.time_domain;
  out.full_angle_rel_diff = std::abs(out.full_angle - out.time_domain) / out.time_domain;
  return out;
}

double lq_norm_e_h(double mu, double alpha, double beta, double q) {
  check_cq_window(alpha, beta, q);
  if (!(mu > 0.0)) throw DomainError("lq_norm_e_h: mu must be positive");
  return std::pow(mu, -beta * q / alpha + (q - 1.0) / alpha) * c_q(alpha, beta, q);
}

}  // namespace svelab::mlf
