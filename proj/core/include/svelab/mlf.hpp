#pragma once

#include <cstddef>
#include <vector>

namespace svelab::mlf {

/// Two-parameter Mittag-Leffler function E_{alpha,beta}(x) on the negative
/// real axis, alpha in (0, 2), beta > 0, plus the closed forms at alpha = 2
/// with beta 1 or 2. Coefficient tables are built once per (alpha, beta) so
/// repeated evaluation is cheap.
///
/// Evaluation regimes, with r = |x|^{1/alpha}:
///   r <= 3          power series
///   r >= 45         asymptotic expansion (optimally truncated) plus the
///                   residues of the poles in the principal sheet (alpha > 1)
///   otherwise       inverse Laplace transform on an optimal parabolic contour
/// Absolute accuracy is about 1e-15 on |x| <= 1e3.
class MittagLeffler {
 public:
  MittagLeffler(double alpha, double beta);

  double operator()(double x) const;

  double alpha() const noexcept { return alpha_; }
  double beta() const noexcept { return beta_; }

 private:
  double series(double x) const;
  double asymptotic(double z) const;
  double contour(double x) const;

  double alpha_;
  double beta_;
  int closed_form_ = 0;  // 1: exp(x), 2: expm1(x)/x, 3: cos(sqrt(-x)), 4: sin(sqrt(-x))/sqrt(-x)
  std::vector<double> series_coef_;  // 1/Gamma(alpha n + beta)
  std::vector<double> asym_coef_;    // 1/Gamma(beta - alpha k), k >= 1
  std::vector<double> asym_log_envelope_;
};

double mittag_leffler(double alpha, double beta, double x);

/// e_k(t; mu) = t^{alpha-1} E_{alpha,alpha}(-mu t^alpha), the resolvent of the
/// fractional kernel k(t) = t^{alpha-1}/Gamma(alpha).
double e_k_closed(double t, double mu, double alpha);

/// e_h(t; mu) = t^{beta-1} E_{alpha,beta}(-mu t^alpha); mu = 0 gives h itself.
double e_h_closed(double t, double mu, double alpha, double beta);

/// int_0^T e_k(s; mu) ds = T^alpha E_{alpha,alpha+1}(-mu T^alpha); T = +inf gives 1/mu.
double cumulative_e_k(double T, double mu, double alpha);

/// int_0^T e_h(s; mu) ds = T^beta E_{alpha,beta+1}(-mu T^alpha).
double cumulative_e_h(double T, double mu, double alpha, double beta);

/// Throws DomainError naming the violated inequality when |e_h(.;1)|^q is not
/// integrable on (0, inf).
void check_cq_window(double alpha, double beta, double q);

struct CqValue {
  double value = 0.0;
  double abs_error = 0.0;
};

/// c_q(alpha, beta) = int_0^inf |t^{beta-1} E_{alpha,beta}(-t^alpha)|^q dt.
CqValue c_q_detailed(double alpha, double beta, double q, double rel_tol = 1e-11);
double c_q(double alpha, double beta, double q, double rel_tol = 1e-11);

/// int_0^upper |t^{beta-1} E_{alpha,beta}(-t^alpha)|^q dt for finite upper.
double c_q_incomplete(double alpha, double beta, double q, double upper,
                      double rel_tol = 1e-11);

/// Frequency-domain value of c_2:
///   (1/pi) int_0^inf dr / (r^{2beta} + 2 r^{2beta-alpha} cos(alpha pi/2) + r^{2beta-2alpha}).
/// Requires 1/2 < beta < alpha + 1/2.
double c_2_plancherel(double alpha, double beta, double rel_tol = 1e-13);

/// Compares the time-domain c_2 with the frequency-domain integral evaluated
/// with phase cos(alpha pi/2) and with phase cos(alpha pi).
struct PhaseCheck {
  double alpha = 0.0;
  double beta = 0.0;
  double time_domain = 0.0;
  double half_angle = 0.0;  // cos(alpha pi / 2)
  double full_angle = 0.0;  // cos(alpha pi); +inf where the integral diverges
  double half_angle_rel_diff = 0.0;
  double full_angle_rel_diff = 0.0;
};
PhaseCheck plancherel_phase_check(double alpha, double beta);

/// ||e_h(.; mu)||_{L^q} ^ q = mu^{-beta q/alpha + (q-1)/alpha} c_q(alpha, beta).
double lq_norm_e_h(double mu, double alpha, double beta, double q);

}  // namespace svelab::mlf
