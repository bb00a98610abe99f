#include "svelab/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "svelab/error.hpp"
#include "svelab/mlf.hpp"

namespace svelab::conditions {

using spectral::DiagonalOperator;
using spectral::FractionalPair;
using spectral::KernelRole;
using spectral::NormCase;
using spectral::SeriesValue;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEps = std::numeric_limits<double>::epsilon();
// floor on the relative uncertainty of a quadrature constant
constexpr double kConstRelFloor = 1e-10;

// Enclosure [lo, hi] of a nonnegative quantity.
struct Bound {
  double lo = 0.0;
  double hi = 0.0;
  bool divergent = false;
  std::string diagnostic;
};

double cq_rel_error(double alpha, double beta, double q) {
  const auto v = mlf::c_q_detailed(alpha, beta, q);
  return std::max(v.abs_error / v.value, kConstRelFloor);
}

Bound from_series(const SeriesValue& s, double rel, const std::string& factor) {
  Bound b;
  if (s.divergent) {
    b.divergent = true;
    b.lo = b.hi = kInf;
    b.diagnostic = factor + ": " + s.diagnostic;
    return b;
  }
  b.lo = s.value * (1.0 - rel);
  b.hi = (s.value + s.tail_bound) * (1.0 + rel);
  return b;
}

Bound divergent(const std::string& why) {
  Bound b;
  b.divergent = true;
  b.lo = b.hi = kInf;
  b.diagnostic = why;
  return b;
}

Bound exact(double v) { return Bound{v, v, false, {}}; }

void finish(ConditionReport& r, double lo, double hi) {
  if (!std::isfinite(hi)) {
    r.lhs = kInf;
    r.error_band = 0.0;
    r.verdict = Verdict::fail;
    return;
  }
  r.lhs = 0.5 * (lo + hi);
  r.error_band = 0.5 * (hi - lo) + 4.0 * kEps * std::abs(hi);
  r.verdict = compare_strict_less(r.lhs, r.threshold, r.error_band);
}

void append_diag(ConditionReport& r, const std::string& d) {
  if (d.empty()) return;
  if (!r.diagnostic.empty()) r.diagnostic += "; ";
  r.diagnostic += d;
}

void check_delta(double delta) {
  if (!(delta >= 0.0) || !std::isfinite(delta)) throw DomainError("conditions: delta must be a finite value >= 0");
}

// |E_k|_{L1(R+; L(H, H^delta))} for k = t^{alpha-1}/Gamma(alpha)
Bound ek_l1_fractional(const DiagonalOperator& op, double alpha, double delta) {
  const FractionalPair fk{alpha, alpha};
  try {
    const bool single = delta == 0.0 && alpha <= 1.0;
    const SeriesValue s = single
                              ? spectral::operator_norm_series(op, fk, KernelRole::k, NormCase::single_mode, 1.0, 0.0, 0.0)
                              : spectral::operator_norm_series(op, fk, KernelRole::k, NormCase::bounded, 1.0, 0.0, delta);
    return from_series(s, cq_rel_error(alpha, alpha, 1.0), "E_k");
  } catch (const DomainError& e) {
    return divergent(std::string("E_k: ") + e.what());
  }
}

// int |E_h|^2_{L_2(H, H^delta)} for h = t^{beta-1}/Gamma(beta)
Bound eh_hs_fractional(const DiagonalOperator& op, double alpha, double beta, double delta) {
  try {
    const SeriesValue s = spectral::operator_norm_series(op, FractionalPair{alpha, beta}, KernelRole::h,
                                                         NormCase::hilbert_schmidt, 2.0, 0.0, delta);
    return from_series(s, cq_rel_error(alpha, beta, 2.0), "E_h");
  } catch (const DomainError& e) {
    return divergent(std::string("E_h: ") + e.what());
  }
}

Bound ek_l1_cm(const DiagonalOperator& op, const Kernel& k, double delta) {
  const NormCase c = delta == 0.0 ? NormCase::single_mode : NormCase::bounded;
  try {
    return from_series(spectral::operator_norm_series_cm(op, k, c, 1.0, 0.0, delta).printed, 4.0 * kEps, "E_k");
  } catch (const DomainError& e) {
    return divergent(std::string("E_k: ") + e.what());
  }
}

Bound eh_hs_cm(const DiagonalOperator& op, const Kernel& k, double nu_mass, double delta) {
  try {
    return from_series(
        spectral::operator_norm_series_cm(op, k, NormCase::hilbert_schmidt, 2.0, 0.0, delta, nu_mass).two_term,
        4.0 * kEps, "E_h");
  } catch (const DomainError& e) {
    return divergent(std::string("E_h: ") + e.what());
  }
}

// 3 |i|^2 (w C_F^2 Ek^2 + C_sigma^2 HS); a factor multiplied by a zero
// constant is dropped even when it diverges
ConditionReport general_report(const DiagonalOperator& op, const CoefficientConstants& c, double delta,
                               Variant variant, const Bound& ek, const Bound& hs) {
  ConditionReport r;
  r.name = variant == Variant::limit ? "general_limit" : "general_stability";
  r.threshold = 1.0;
  const double w = variant == Variant::limit ? 2.0 : 1.0;
  const double cf = variant == Variant::limit ? c.C_F_lin : c.C_F_lip;
  const double cs = variant == Variant::limit ? c.C_sigma_lin : c.C_sigma_lip;
  const double i2 = std::pow(op[0], -2.0 * delta);
  r.terms.push_back({"norm_i", std::sqrt(i2)});
  double lo = 0.0, hi = 0.0;
  if (cf > 0.0) {
    r.terms.push_back({"E_k_L1", ek.divergent ? kInf : 0.5 * (ek.lo + ek.hi)});
    if (ek.divergent) {
      append_diag(r, ek.diagnostic);
      hi = kInf;
    } else {
      lo += 3.0 * i2 * w * cf * cf * ek.lo * ek.lo;
      hi += 3.0 * i2 * w * cf * cf * ek.hi * ek.hi;
    }
  }
  if (cs > 0.0) {
    r.terms.push_back({variant == Variant::limit ? "K_lin_L2_sq" : "K_lip_L2_sq",
                       hs.divergent ? kInf : cs * cs * 0.5 * (hs.lo + hs.hi)});
    if (hs.divergent) {
      append_diag(r, hs.diagnostic);
      hi = kInf;
    } else {
      lo += 3.0 * i2 * cs * cs * hs.lo;
      hi += 3.0 * i2 * cs * cs * hs.hi;
    }
  }
  const double drift = cf > 0.0 ? 3.0 * i2 * w * cf * cf * ek.hi * ek.hi : 0.0;
  const double diffusion = cs > 0.0 ? 3.0 * i2 * cs * cs * hs.hi : 0.0;
  r.terms.push_back({"drift_part", drift});
  r.terms.push_back({"diffusion_part", diffusion});
  if (variant == Variant::stability)
    append_diag(r, "the stability variant also requires F(0) = 0 and sigma(0) = 0, which are not checked");
  finish(r, lo, hi);
  return r;
}

ConditionReport additive_report(const DiagonalOperator& op, double C_F_lin, double delta, const Bound& ek) {
  ConditionReport r;
  r.name = "additive_limit";
  r.threshold = 1.0;
  const double i = std::pow(op[0], -delta);
  r.terms.push_back({"norm_i", i});
  r.terms.push_back({"C_F_lin", C_F_lin});
  r.terms.push_back({"E_k_L1", ek.divergent ? kInf : 0.5 * (ek.lo + ek.hi)});
  if (C_F_lin == 0.0) {
    finish(r, 0.0, 0.0);
    return r;
  }
  append_diag(r, ek.diagnostic);
  if (ek.divergent) {
    finish(r, kInf, kInf);
    return r;
  }
  finish(r, i * C_F_lin * ek.lo, i * C_F_lin * ek.hi);
  return r;
}

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 2.0)) throw DomainError("conditions: alpha must lie in (0, 2)");
}

void check_dim(int d) {
  if (d < 1 || d > 3) throw DomainError("conditions: dimension must be 1, 2 or 3");
}

}  // namespace

void CoefficientConstants::validate() const {
  for (double v : {C_F_lip, C_F_lin, C_sigma_lip, C_sigma_lin, sup_F})
    if (!(v >= 0.0)) throw DomainError("CoefficientConstants: constants must be non-negative");
  for (double v : {C_F_lip, C_F_lin, C_sigma_lip, C_sigma_lin})
    if (!std::isfinite(v)) throw DomainError("CoefficientConstants: Lipschitz and growth constants must be finite");
}

bool Interval::contains(double x) const {
  const bool lo_ok = lower_open ? x > lower : x >= lower;
  const bool hi_ok = upper_open ? x < upper : x <= upper;
  return lo_ok && hi_ok;
}

bool Interval::empty() const {
  if (lower < upper) return false;
  return lower > upper || lower_open || upper_open;
}

double ConditionReport::term(const std::string& term_name) const {
  for (const auto& t : terms)
    if (t.name == term_name) return t.value;
  throw std::out_of_range("ConditionReport: no term named " + term_name);
}

OneDimReports check_1d_theorem(double A, double alpha, double beta, const CoefficientConstants& consts) {
  if (!(A < 0.0) || !std::isfinite(A)) throw DomainError("check_1d_theorem: A must be negative and finite");
  check_alpha(alpha);
  if (!(beta > 0.5)) throw DomainError("check_1d_theorem: beta must satisfy beta > 1/2");
  consts.validate();
  const double absA = -A;
  const auto c1v = mlf::c_q_detailed(alpha, alpha, 1.0);
  const double c1 = c1v.value;
  const double r1 = std::max(c1v.abs_error / c1, kConstRelFloor);

  OneDimReports out;
  ConditionReport& a = out.a;
  a.name = "1d_theorem_a";
  a.threshold = absA;
  a.terms = {{"c_1", c1}, {"C_F_lin", consts.C_F_lin}, {"abs_A", absA}};
  finish(a, c1 * (1.0 - r1) * consts.C_F_lin, c1 * (1.0 + r1) * consts.C_F_lin);
  if (consts.C_sigma_lip > 0.0) {
    a.verdict = Verdict::fail;
    append_diag(a, "condition (a) needs constant sigma (C_sigma_lip = 0)");
  }

  ConditionReport& b = out.b;
  b.name = "1d_theorem_b";
  b.threshold = 1.0;
  const double drift_lo = 6.0 * std::pow(consts.C_F_lin * c1 * (1.0 - r1) / absA, 2.0);
  const double drift_hi = 6.0 * std::pow(consts.C_F_lin * c1 * (1.0 + r1) / absA, 2.0);
  const double scale = consts.C_sigma_lin * consts.C_sigma_lin * std::pow(absA, -(2.0 * beta - 1.0) / alpha);
  b.terms = {{"c_1", c1}, {"drift_part", drift_hi}};
  ConditionReport first = b;
  first.name = "1d_theorem_b_first_power_c2";
  if (consts.C_sigma_lin == 0.0) {
    b.terms.push_back({"diffusion_part", 0.0});
    first.terms.push_back({"diffusion_part", 0.0});
    finish(b, drift_lo, drift_hi);
    finish(first, drift_lo, drift_hi);
  } else {
    try {
      const auto c2v = mlf::c_q_detailed(alpha, beta, 2.0);
      const double c2 = c2v.value;
      const double r2 = std::max(c2v.abs_error / c2, kConstRelFloor);
      b.terms.insert(b.terms.begin() + 1, {"c_2", c2});
      first.terms.insert(first.terms.begin() + 1, {"c_2", c2});
      const double sq_lo = 3.0 * std::pow(c2 * (1.0 - r2), 2.0) * scale;
      const double sq_hi = 3.0 * std::pow(c2 * (1.0 + r2), 2.0) * scale;
      b.terms.push_back({"diffusion_part", sq_hi});
      finish(b, drift_lo + sq_lo, drift_hi + sq_hi);
      const double one_lo = 3.0 * c2 * (1.0 - r2) * scale;
      const double one_hi = 3.0 * c2 * (1.0 + r2) * scale;
      first.terms.push_back({"diffusion_part", one_hi});
      finish(first, drift_lo + one_lo, drift_hi + one_hi);
    } catch (const DomainError& e) {
      const std::string why = std::string("c_2(alpha, beta) is not finite: ") + e.what();
      for (ConditionReport* r : {&b, &first}) {
        r->terms.push_back({"diffusion_part", kInf});
        append_diag(*r, why);
        finish(*r, kInf, kInf);
      }
    }
  }
  b.variants.push_back(std::move(first));
  return out;
}

ConditionReport check_general_limit(const DiagonalOperator& op, const FractionalPair& kernels,
                                    const CoefficientConstants& consts, double delta, Variant variant) {
  check_alpha(kernels.alpha);
  if (!(kernels.beta > 0.5)) throw DomainError("check_general_limit: beta must satisfy beta > 1/2");
  check_delta(delta);
  consts.validate();
  const double cf = variant == Variant::limit ? consts.C_F_lin : consts.C_F_lip;
  const double cs = variant == Variant::limit ? consts.C_sigma_lin : consts.C_sigma_lip;
  const Bound ek = cf > 0.0 ? ek_l1_fractional(op, kernels.alpha, delta) : exact(0.0);
  const Bound hs = cs > 0.0 ? eh_hs_fractional(op, kernels.alpha, kernels.beta, delta) : exact(0.0);
  return general_report(op, consts, delta, variant, ek, hs);
}

ConditionReport check_general_limit(const DiagonalOperator& op, const Kernel& k, double nu_mass,
                                    const CoefficientConstants& consts, double delta, Variant variant) {
  check_delta(delta);
  consts.validate();
  if (!(nu_mass >= 0.0)) throw DomainError("check_general_limit: measure mass must be non-negative");
  const double cf = variant == Variant::limit ? consts.C_F_lin : consts.C_F_lip;
  const double cs = variant == Variant::limit ? consts.C_sigma_lin : consts.C_sigma_lip;
  const Bound ek = cf > 0.0 ? ek_l1_cm(op, k, delta) : exact(0.0);
  const Bound hs = cs > 0.0 ? eh_hs_cm(op, k, nu_mass, delta) : exact(0.0);
  return general_report(op, consts, delta, variant, ek, hs);
}

ConditionReport check_additive(const DiagonalOperator& op, double alpha, double C_F_lin, double delta) {
  check_alpha(alpha);
  check_delta(delta);
  if (!(C_F_lin >= 0.0) || !std::isfinite(C_F_lin)) throw DomainError("check_additive: C_F_lin must be finite and >= 0");
  ConditionReport r = additive_report(op, C_F_lin, delta, ek_l1_fractional(op, alpha, delta));
  if (op.is_dirichlet() && op.dimension() == 1 && delta > 0.0) {
    // integral comparison int_1^inf x^{-2 + 2 delta} dx in place of the series
    ConditionReport v;
    v.name = "additive_limit_closed_form";
    v.threshold = 1.0;
    const auto c1v = mlf::c_q_detailed(alpha, alpha, 1.0);
    const double rel = std::max(c1v.abs_error / c1v.value, kConstRelFloor);
    v.terms = {{"c_1", c1v.value}, {"C_F_lin", C_F_lin}};
    if (delta >= 0.5) {
      append_diag(v, "c_1/(1 - 2 delta) requires delta < 1/2");
      finish(v, kInf, kInf);
    } else {
      const double val = C_F_lin * c1v.value / (1.0 - 2.0 * delta);
      finish(v, val * (1.0 - rel), val * (1.0 + rel));
    }
    r.variants.push_back(std::move(v));
  }
  return r;
}

ConditionReport check_additive(const DiagonalOperator& op, const Kernel& k, double C_F_lin, double delta) {
  check_delta(delta);
  if (!(C_F_lin >= 0.0) || !std::isfinite(C_F_lin)) throw DomainError("check_additive: C_F_lin must be finite and >= 0");
  return additive_report(op, C_F_lin, delta, ek_l1_cm(op, k, delta));
}

Interval heat_beta_interval(int d, double alpha, double delta, bool multiplicative) {
  check_dim(d);
  if (!(alpha > 0.0)) throw DomainError("heat_beta_interval: alpha must be positive");
  check_delta(delta);
  Interval iv;
  iv.upper = alpha + 0.5;
  iv.upper_open = false;
  iv.lower_open = true;
  if (multiplicative) {
    iv.lower = 0.5 + (delta + d / 4.0) * alpha;
  } else {
    iv.lower = alpha * d / 4.0 + 0.5;
    if (delta > 0.0) iv.lower = std::max(iv.lower, alpha * (delta + 0.25) + 0.5);
  }
  return iv;
}

ConditionReport check_heat_region(int d, double alpha, double beta, double delta, double gamma, bool multiplicative) {
  ConditionReport r;
  r.name = multiplicative ? "heat_region_multiplicative" : "heat_region_additive";
  const Interval iv = heat_beta_interval(d, alpha, delta, multiplicative);
  r.interval = iv;
  r.lhs = beta;
  r.threshold = iv.upper;
  r.terms = {{"beta_lower", iv.lower}, {"beta_upper", iv.upper}, {"beta", beta}, {"gamma", gamma}};
  bool ok = true;
  auto require = [&](bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      append_diag(r, what);
    }
  };
  require(alpha < 2.0, "alpha must lie in (0, 2)");
  require(beta > 0.5, "beta must exceed 1/2");
  require(iv.contains(beta), "beta outside the admissible interval");
  require(gamma >= 0.0 && gamma <= alpha, "gamma must lie in [0, alpha]");
  if (!multiplicative) {
    if (delta == 0.0) {
      require(alpha <= 1.0, "delta = 0 needs alpha in (0, 1]");
    } else {
      const double bound = 0.75 - 0.5 / alpha;
      r.terms.push_back({"delta_bound", bound});
      require(d == 1, "delta > 0 is admissible only in dimension 1");
      require(alpha > 2.0 / 3.0, "delta > 0 needs alpha in (2/3, 2)");
      require(delta < bound, "delta must be below 3/4 - 1/(2 alpha)");
    }
  }
  r.error_band = 0.0;
  r.verdict = ok ? Verdict::pass : Verdict::fail;
  return r;
}

ConditionReport check_multiplicative_heat_closed_form(int d, double alpha, double beta, double delta,
                                                       double C_f_lin) {
  check_dim(d);
  check_alpha(alpha);
  check_delta(delta);
  if (!(C_f_lin >= 0.0) || !std::isfinite(C_f_lin)) throw DomainError("closed form: C_f_lin must be finite and >= 0");
  ConditionReport r;
  r.name = "multiplicative_heat_closed_form";
  r.threshold = 1.0;
  const double omega = d == 1 ? 1.0 : (d == 2 ? std::numbers::pi / 2.0 : std::numbers::pi);
  const double denom = (4.0 * beta - 2.0) / alpha - 4.0 * delta - d;
  r.terms = {{"omega_d", omega}, {"denominator", denom}};
  if (C_f_lin == 0.0) {
    finish(r, 0.0, 0.0);
    return r;
  }
  if (!(denom > 0.0)) {
    append_diag(r, "mode series diverges: (4 beta - 2)/alpha - 4 delta - d must be positive");
    finish(r, kInf, kInf);
    return r;
  }
  try {
    const auto c2v = mlf::c_q_detailed(alpha, beta, 2.0);
    const double rel = std::max(c2v.abs_error / c2v.value, kConstRelFloor);
    r.terms.insert(r.terms.begin(), {"c_2", c2v.value});
    const double val = 3.0 * C_f_lin * C_f_lin * c2v.value * omega / denom;
    finish(r, val * (1.0 - rel), val * (1.0 + rel));
  } catch (const DomainError& e) {
    append_diag(r, std::string("c_2(alpha, beta) is not finite: ") + e.what());
    finish(r, kInf, kInf);
  }
  return r;
}

namespace {

using ojson = nlohmann::ordered_json;

ojson number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double read_number(const ojson& j, const std::string& field) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return kInf;
    if (s == "-inf") return -kInf;
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw ValidationError("report JSON: field '" + field + "' is not a number");
}

ojson to_ojson(const ConditionReport& r) {
  ojson j;
  j["name"] = r.name;
  j["lhs"] = number(r.lhs);
  j["threshold"] = number(r.threshold);
  j["error_band"] = number(r.error_band);
  j["verdict"] = to_string(r.verdict);
  ojson terms = ojson::array();
  for (const auto& t : r.terms) terms.push_back(ojson{{"name", t.name}, {"value", number(t.value)}});
  j["terms"] = terms;
  if (!r.diagnostic.empty()) j["diagnostic"] = r.diagnostic;
  if (r.interval) {
    j["interval"] = ojson{{"lower", number(r.interval->lower)},
                          {"upper", number(r.interval->upper)},
                          {"lower_open", r.interval->lower_open},
                          {"upper_open", r.interval->upper_open}};
  }
  if (!r.variants.empty()) {
    ojson v = ojson::array();
    for (const auto& x : r.variants) v.push_back(to_ojson(x));
    j["variants"] = v;
  }
  return j;
}

void require_keys(const ojson& j, const std::set<std::string>& required, const std::set<std::string>& optional,
                  const std::string& what) {
  if (!j.is_object()) throw ValidationError("report JSON: " + what + " must be an object");
  for (const auto& [key, _] : j.items())
    if (!required.count(key) && !optional.count(key))
      throw ValidationError("report JSON: unknown field '" + key + "' in " + what);
  for (const auto& key : required)
    if (!j.contains(key)) throw ValidationError("report JSON: missing field '" + key + "' in " + what);
}

ConditionReport from_ojson(const ojson& j) {
  require_keys(j, {"name", "lhs", "threshold", "error_band", "verdict", "terms"},
               {"diagnostic", "interval", "variants"}, "report");
  ConditionReport r;
  if (!j["name"].is_string()) throw ValidationError("report JSON: 'name' must be a string");
  r.name = j["name"].get<std::string>();
  r.lhs = read_number(j["lhs"], "lhs");
  r.threshold = read_number(j["threshold"], "threshold");
  r.error_band = read_number(j["error_band"], "error_band");
  const std::string v = j["verdict"].is_string() ? j["verdict"].get<std::string>() : "";
  if (v == "pass")
    r.verdict = Verdict::pass;
  else if (v == "fail")
    r.verdict = Verdict::fail;
  else if (v == "inconclusive")
    r.verdict = Verdict::inconclusive;
  else
    throw ValidationError("report JSON: verdict must be pass, fail or inconclusive");
  if (!j["terms"].is_array()) throw ValidationError("report JSON: 'terms' must be an array");
  for (const auto& t : j["terms"]) {
    require_keys(t, {"name", "value"}, {}, "term");
    if (!t["name"].is_string()) throw ValidationError("report JSON: term name must be a string");
    r.terms.push_back({t["name"].get<std::string>(), read_number(t["value"], "value")});
  }
  if (j.contains("diagnostic")) {
    if (!j["diagnostic"].is_string()) throw ValidationError("report JSON: 'diagnostic' must be a string");
    r.diagnostic = j["diagnostic"].get<std::string>();
  }
  if (j.contains("interval")) {
    const auto& i = j["interval"];
    require_keys(i, {"lower", "upper", "lower_open", "upper_open"}, {}, "interval");
    if (!i["lower_open"].is_boolean() || !i["upper_open"].is_boolean())
      throw ValidationError("report JSON: interval openness flags must be booleans");
    r.interval = Interval{read_number(i["lower"], "lower"), read_number(i["upper"], "upper"),
                          i["lower_open"].get<bool>(), i["upper_open"].get<bool>()};
  }
  if (j.contains("variants")) {
    if (!j["variants"].is_array()) throw ValidationError("report JSON: 'variants' must be an array");
    for (const auto& x : j["variants"]) r.variants.push_back(from_ojson(x));
  }
  return r;
}

}  // namespace

std::string to_json(const ConditionReport& report, int indent) { return to_ojson(report).dump(indent); }

std::string to_json(const std::vector<ConditionReport>& reports, int indent) {
  ojson a = ojson::array();
  for (const auto& r : reports) a.push_back(to_ojson(r));
  return a.dump(indent);
}

ConditionReport report_from_json(const std::string& text) {
  ojson j;
  try {
    j = ojson::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(std::string("report JSON: ") + e.what());
  }
  return from_ojson(j);
}

}  // namespace svelab::conditions
