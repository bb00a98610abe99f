#pragma once

#include <cstddef>
#include <functional>

namespace svelab::quad {

struct Result {
  double value = 0.0;
  double abs_error = 0.0;
  std::size_t evaluations = 0;
  bool converged = true;
};

struct Options {
  double abs_tol = 0.0;
  double rel_tol = 1e-10;
  std::size_t max_intervals = 4000;
};

/// Globally adaptive 15-point Gauss-Kronrod quadrature on a finite interval.
/// Subdivides the interval with the largest error estimate until the total
/// estimate is below max(abs_tol, rel_tol * |value|).
Result gauss_kronrod(const std::function<double(double)>& f, double a, double b,
                     const Options& opts = {});

/// Fixed 15-point Kronrod rule on [a, b]; returns the Kronrod value and the
/// Gauss/Kronrod difference as error estimate.
Result kronrod15(const std::function<double(double)>& f, double a, double b);

/// Sum with pairwise (cascade) reduction; deterministic for a fixed input order.
double pairwise_sum(const double* data, std::size_t n);

}  // namespace svelab::quad
