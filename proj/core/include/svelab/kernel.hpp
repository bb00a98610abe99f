#pragma once

#include <memory>
#include <string>
#include <vector>

#include "svelab/grid.hpp"

namespace svelab {

struct ExpTerm {
  double weight = 0.0;  // theta_i >= 0
  double rate = 0.0;    // lambda_i > 0
};

/// Scalar convolution kernel with closed-form first and second primitives
///   K1(t) = int_0^t k,   K2(t) = int_0^t K1,
/// and singularity metadata k(t) <= C_delta t^{-delta} near 0.
class Kernel {
 public:
  enum class Form { fractional, log1p_inverse, exponential_mixture, tabulated };
  enum class TableInterp { log_linear, linear, constant_left };

  /// k(t) = t^{alpha-1}/Gamma(alpha). Completely monotone for alpha <= 1;
  /// alpha > 1 is accepted as a power-law forcing profile.
  static Kernel fractional(double alpha);
  /// k(t) = log(1 + 1/t); delta in (0, 1) selects the bound log(1+1/t) <= t^{-delta}/delta.
  static Kernel log1p_inverse(double delta = 0.5);
  static Kernel exponential_mixture(std::vector<ExpTerm> terms);
  /// Values at strictly increasing times. Below the first node the kernel is
  /// extended as value_0 (t/t_0)^{-delta}; beyond the last node it is zero.
  static Kernel tabulated(std::vector<double> times, std::vector<double> values, double delta,
                          TableInterp interp = TableInterp::log_linear);
  /// Kernel following the grid function's own interpolation rule (zero beyond the horizon).
  static Kernel from_grid_function(const GridFunction& f);
  /// Two-column CSV (time, value), optional header row.
  static Kernel load_csv(const std::string& path, double delta);

  double operator()(double t) const;
  double primitive(double t) const;
  double second_primitive(double t) const;
  /// int_0^inf k, +inf when k is not integrable.
  double l1_norm() const;

  Form form() const noexcept { return form_; }
  double alpha() const noexcept { return alpha_; }
  bool is_completely_monotone() const noexcept { return completely_monotone_; }
  double singularity_exponent() const noexcept { return delta_; }
  double singularity_constant() const noexcept { return c_delta_; }
  /// Finite support end for tabulated kernels, +inf otherwise.
  double support_end() const;
  /// Number of table nodes for tabulated kernels, 0 otherwise.
  std::size_t table_size() const noexcept;
  const std::vector<ExpTerm>& exp_terms() const noexcept { return terms_; }
  std::string describe() const;

 private:
  struct Table;
  Kernel() = default;

  Form form_ = Form::fractional;
  double alpha_ = 1.0;
  double gamma_alpha_ = 1.0;
  double delta_ = 0.0;
  double c_delta_ = 1.0;
  bool completely_monotone_ = false;
  std::vector<ExpTerm> terms_;
  std::shared_ptr<const Table> table_;
};

}  // namespace svelab
