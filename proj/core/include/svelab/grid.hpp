#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace svelab {

/// Strictly increasing time nodes starting at 0.
class TimeGrid {
 public:
  enum class Style { uniform, graded, custom };

  static TimeGrid uniform(double horizon, std::size_t steps);
  /// t_j = T (j/N)^{1/grading}, grading in (0, 1]; clusters nodes near 0.
  static TimeGrid graded(double horizon, std::size_t steps, double grading);
  /// 0, then `steps` nodes spaced geometrically from first_step to horizon.
  static TimeGrid geometric(double horizon, std::size_t steps, double first_step);
  static TimeGrid from_nodes(std::vector<double> nodes);

  std::size_t size() const noexcept { return nodes_.size(); }
  std::size_t steps() const noexcept { return nodes_.size() - 1; }
  double operator[](std::size_t i) const { return nodes_[i]; }
  double step(std::size_t i) const { return nodes_[i + 1] - nodes_[i]; }
  double horizon() const { return nodes_.back(); }
  std::span<const double> nodes() const noexcept { return nodes_; }
  Style style() const noexcept { return style_; }
  double grading() const noexcept { return grading_; }
  bool is_uniform() const noexcept { return style_ == Style::uniform; }
  /// Index of the node equal to t up to relative tolerance, or throws.
  std::size_t index_of(double t, double rel_tol = 1e-9) const;
  /// Last node index i with nodes[i] <= t.
  std::size_t locate(double t) const;

 private:
  TimeGrid(std::vector<double> nodes, Style style, double grading);
  std::vector<double> nodes_;
  Style style_;
  double grading_ = 1.0;
};

enum class Interpolation { constant_left, linear };

/// Values at the nodes of a TimeGrid with an interpolation rule.
class GridFunction {
 public:
  GridFunction(TimeGrid grid, std::vector<double> values,
               Interpolation interp = Interpolation::linear);

  template <class F>
  static GridFunction sample(const TimeGrid& grid, F&& f,
                             Interpolation interp = Interpolation::linear) {
    std::vector<double> v(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) v[i] = f(grid[i]);
    return GridFunction(grid, std::move(v), interp);
  }

  const TimeGrid& grid() const noexcept { return grid_; }
  const std::vector<double>& values() const noexcept { return values_; }
  double value(std::size_t i) const { return values_[i]; }
  std::size_t size() const noexcept { return values_.size(); }
  Interpolation interpolation() const noexcept { return interp_; }

  /// Interpolated value on [0, horizon].
  double operator()(double t) const;
  /// Average over cell [t_j, t_{j+1}] under the interpolation rule.
  double cell_average(std::size_t j) const;
  /// Integral over [0, horizon] under the interpolation rule.
  double integral() const;

 private:
  TimeGrid grid_;
  std::vector<double> values_;
  Interpolation interp_;
};

}  // namespace svelab
