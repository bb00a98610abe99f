#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "svelab/kernel.hpp"
#include "svelab/spectral.hpp"
#include "svelab/verdict.hpp"

namespace svelab::conditions {

/// Lipschitz and linear-growth constants of the drift F and the diffusion sigma.
/// Additive noise is C_sigma_lip = 0.
struct CoefficientConstants {
  double C_F_lip = 0.0;
  double C_F_lin = 0.0;
  double C_sigma_lip = 0.0;
  double C_sigma_lin = 0.0;
  double sup_F = std::numeric_limits<double>::infinity();

  /// Throws DomainError on negative or NaN entries.
  void validate() const;
};

struct Term {
  std::string name;
  double value = 0.0;
};

struct Interval {
  double lower = 0.0;
  double upper = 0.0;
  bool lower_open = true;
  bool upper_open = false;
  bool contains(double x) const;
  bool empty() const;
};

struct ConditionReport {
  std::string name;
  double lhs = 0.0;
  double threshold = 1.0;
  double error_band = 0.0;  // half-width of the propagated numerical uncertainty of lhs
  Verdict verdict = Verdict::inconclusive;
  std::vector<Term> terms;
  std::string diagnostic;
  std::optional<Interval> interval;        // admissible beta range for region checks
  std::vector<ConditionReport> variants;  // alternative readings, reported alongside

  /// Value of the named sub-term; throws std::out_of_range when absent.
  double term(const std::string& term_name) const;
};

/// JSON with fields name, lhs, threshold, error_band, verdict, terms and the
/// optional diagnostic, interval and variants. Non-finite numbers are written
/// as the strings "inf", "-inf" and "nan".
std::string to_json(const ConditionReport& report, int indent = 2);
std::string to_json(const std::vector<ConditionReport>& reports, int indent = 2);
/// Strict inverse of to_json; unknown or missing fields throw ValidationError.
ConditionReport report_from_json(const std::string& text);

struct OneDimReports {
  ConditionReport a;  // c_1 C_F_lin < |A|, additive noise only
  ConditionReport b;  // 6 C_F_lin^2 c_1^2 |A|^-2 + 3 c_2^2 C_sigma_lin^2 |A|^{-(2 beta - 1)/alpha} < 1
};

/// Scalar equation with A < 0 and fractional kernels; c_1 is c_1(alpha, alpha).
/// Condition (b) carries the variant with c_2 to the first power.
OneDimReports check_1d_theorem(double A, double alpha, double beta, const CoefficientConstants& consts);

enum class Variant {
  limit,      // 3 |i|^2 (2 C_F_lin^2 |E_k|_1^2 + |K_lin|_2^2) < 1
  stability,  // 3 |i|^2 (C_F_lip^2 |E_k|_1^2 + |K_lip|_2^2) < 1
};

/// Dissipativity condition of the general theorem on a diagonal operator with
/// H_F = H_sigma = U = H and V = H^delta; the diffusion is an identity-scaled
/// multiplier, so |K|_2^2 = C_sigma^2 int |E_h|^2_{L_2(H, V)}.
ConditionReport check_general_limit(const spectral::DiagonalOperator& op, const spectral::FractionalPair& kernels,
                                    const CoefficientConstants& consts, double delta, Variant variant);
/// Same for a completely monotone k and h = k * nu with nu(R+) = nu_mass,
/// using the per-mode Lq bounds for E_k and E_h.
ConditionReport check_general_limit(const spectral::DiagonalOperator& op, const Kernel& k, double nu_mass,
                                    const CoefficientConstants& consts, double delta, Variant variant);

/// Additive-noise condition |i| C_F_lin |E_k|_{L1(L(H, V))} < 1 with V = H^delta.
ConditionReport check_additive(const spectral::DiagonalOperator& op, double alpha, double C_F_lin, double delta);
ConditionReport check_additive(const spectral::DiagonalOperator& op, const Kernel& k, double C_F_lin, double delta);

/// Admissible beta for the heat examples:
///   additive, delta = 0:  alpha in (0, 1], alpha d/4 + 1/2 < beta <= alpha + 1/2
///   additive, delta > 0:  d = 1, alpha in (2/3, 2), the same interval and
///                         delta < min{3/4 - 1/(2 alpha), (2 beta - 1)/(2 alpha) - 1/4}
///   multiplicative:       1/2 + (delta + d/4) alpha < beta <= alpha + 1/2
Interval heat_beta_interval(int d, double alpha, double delta, bool multiplicative);
/// Membership of (alpha, beta, delta, gamma) in the admissible region, with
/// gamma in [0, alpha]. Exact arithmetic; never inconclusive.
ConditionReport check_heat_region(int d, double alpha, double beta, double delta, double gamma, bool multiplicative);

/// Closed-form bound of the multiplicative heat example:
/// 3 C_f_lin^2 c_2(alpha, beta) omega_d / ((4 beta - 2)/alpha - 4 delta - d) < 1
/// with omega_1 = 1, omega_2 = pi/2, omega_3 = pi.
ConditionReport check_multiplicative_heat_closed_form(int d, double alpha, double beta, double delta,
                                                       double C_f_lin);

}  // namespace svelab::conditions
