#include "svelab/grid.hpp"

#include <algorithm>
#include <cmath>

#include "svelab/error.hpp"
#include "svelab/quadrature.hpp"

namespace svelab {

TimeGrid::TimeGrid(std::vector<double> nodes, Style style, double grading)
    : nodes_(std::move(nodes)), style_(style), grading_(grading) {
  if (nodes_.size() < 2) throw ValidationError("TimeGrid: at least 2 nodes required");
  if (nodes_.front() != 0.0) throw ValidationError("TimeGrid: first node must be 0");
  for (std::size_t i = 1; i < nodes_.size(); ++i)
    if (!(nodes_[i] > nodes_[i - 1]) || !std::isfinite(nodes_[i]))
      throw ValidationError("TimeGrid: nodes must be finite and strictly increasing");
}

TimeGrid TimeGrid::uniform(double horizon, std::size_t steps) {
  if (!(horizon > 0.0) || steps < 1) throw ValidationError("TimeGrid::uniform: need T > 0 and N >= 1");
  std::vector<double> n(steps + 1);
  const double h = horizon / static_cast<double>(steps);
  for (std::size_t i = 0; i <= steps; ++i) n[i] = h * static_cast<double>(i);
  n.back() = horizon;
  return TimeGrid(std::move(n), Style::uniform, 1.0);
}

TimeGrid TimeGrid::graded(double horizon, std::size_t steps, double grading) {
  if (!(horizon > 0.0) || steps < 1) throw ValidationError("TimeGrid::graded: need T > 0 and N >= 1");
  if (!(grading > 0.0 && grading <= 1.0)) throw ValidationError("TimeGrid::graded: grading must lie in (0, 1]");
  if (grading == 1.0) return uniform(horizon, steps);
  std::vector<double> n(steps + 1);
  for (std::size_t i = 0; i <= steps; ++i)
    n[i] = horizon * std::pow(static_cast<double>(i) / static_cast<double>(steps), 1.0 / grading);
  n.back() = horizon;
  return TimeGrid(std::move(n), Style::graded, grading);
}

TimeGrid TimeGrid::geometric(double horizon, std::size_t steps, double first_step) {
  if (!(horizon > first_step && first_step > 0.0) || steps < 2)
    throw ValidationError("TimeGrid::geometric: need 0 < first_step < T and N >= 2");
  std::vector<double> n(steps + 1);
  n[0] = 0.0;
  const double ratio = std::log(horizon / first_step) / static_cast<double>(steps - 1);
  for (std::size_t i = 1; i <= steps; ++i) n[i] = first_step * std::exp(ratio * static_cast<double>(i - 1));
  n.back() = horizon;
  return TimeGrid(std::move(n), Style::custom, 1.0);
}

TimeGrid TimeGrid::from_nodes(std::vector<double> nodes) {
  return TimeGrid(std::move(nodes), Style::custom, 1.0);
}

std::size_t TimeGrid::locate(double t) const {
  if (t <= 0.0) return 0;
  auto it = std::upper_bound(nodes_.begin(), nodes_.end(), t);
  return static_cast<std::size_t>(it - nodes_.begin()) - 1;
}

std::size_t TimeGrid::index_of(double t, double rel_tol) const {
  auto it = std::lower_bound(nodes_.begin(), nodes_.end(), t);
  const double tol = rel_tol * std::max(1.0, std::abs(t));
  std::size_t best = nodes_.size();
  double best_d = tol;
  for (auto cand : {it, it == nodes_.begin() ? it : it - 1}) {
    if (cand == nodes_.end()) continue;
    const double d = std::abs(*cand - t);
    if (d <= best_d) {
      best_d = d;
      best = static_cast<std::size_t>(cand - nodes_.begin());
    }
  }
  if (best == nodes_.size())
    throw ValidationError("time " + std::to_string(t) + " is not a grid node");
  return best;
}

GridFunction::GridFunction(TimeGrid grid, std::vector<double> values, Interpolation interp)
    : grid_(std::move(grid)), values_(std::move(values)), interp_(interp) {
  if (values_.size() != grid_.size())
    throw ValidationError("GridFunction: number of values must equal number of nodes");
}

double GridFunction::operator()(double t) const {
  const double T = grid_.horizon();
  if (t < 0.0 || t > T * (1.0 + 1e-12))
    throw DomainError("GridFunction: evaluation outside [0, horizon]");
  const std::size_t j = std::min(grid_.locate(t), grid_.size() - 1);
  if (j + 1 >= grid_.size()) return values_.back();
  if (interp_ == Interpolation::constant_left || t == grid_[j]) return values_[j];
  const double w = (t - grid_[j]) / grid_.step(j);
  return values_[j] + w * (values_[j + 1] - values_[j]);
}

double GridFunction::cell_average(std::size_t j) const {
  if (interp_ == Interpolation::constant_left) return values_[j];
  return 0.5 * (values_[j] + values_[j + 1]);
}

double GridFunction::integral() const {
  std::vector<double> parts(grid_.steps());
  for (std::size_t j = 0; j < parts.size(); ++j) parts[j] = cell_average(j) * grid_.step(j);
  return quad::pairwise_sum(parts.data(), parts.size());
}

}  // namespace svelab
