#include "stieltjes/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "stieltjes/errors.hpp"

namespace stieltjes {

Trajectory::Trajectory(Derivator governing, std::vector<double> grid,
                       std::vector<double> left_values, std::vector<double> right_values,
                       Interpolation rule, DenseEvaluator dense)
    : governing_(std::move(governing)),
      grid_(std::move(grid)),
      left_(std::move(left_values)),
      right_(std::move(right_values)),
      rule_(rule),
      dense_(std::move(dense)) {
  if (grid_.size() < 2) throw std::invalid_argument("trajectory grid needs two points");
  if (left_.size() != grid_.size() || right_.size() != grid_.size())
    throw std::invalid_argument("trajectory value arrays do not match the grid");
  for (std::size_t k = 1; k < grid_.size(); ++k)
    if (!(grid_[k] > grid_[k - 1])) throw std::invalid_argument("trajectory grid must increase");
  if (grid_.front() < governing_.a() || grid_.back() > governing_.b())
    throw std::invalid_argument("trajectory grid leaves the derivator interval");
  for (const Jump& j : governing_.jumps()) {
    if (j.at < grid_.front() || j.at >= grid_.back()) continue;
    if (!std::binary_search(grid_.begin(), grid_.end(), j.at))
      throw std::invalid_argument("trajectory grid misses a jump of its derivator");
  }
  for (std::size_t k = 0; k < grid_.size(); ++k) {
    const bool same = left_[k] == right_[k] || (std::isnan(left_[k]) && std::isnan(right_[k]));
    if (!same && !governing_.is_jump(grid_[k]))
      throw std::invalid_argument("trajectory jumps where its derivator is continuous");
  }
}

std::size_t Trajectory::cell(double t) const {
  if (!(t >= grid_.front() && t <= grid_.back()))
    throw DomainError("time outside the trajectory span");
  // k with grid[k] < t <= grid[k+1]; t == grid.front() maps to cell 0.
  const auto it = std::lower_bound(grid_.begin(), grid_.end(), t);
  const auto idx = static_cast<std::size_t>(it - grid_.begin());
  return idx == 0 ? 0 : idx - 1;
}

double Trajectory::value(double t) const {
  if (dense_) {
    if (!(t >= grid_.front() && t <= grid_.back()))
      throw DomainError("time outside the trajectory span");
    return dense_(t);
  }
  const std::size_t k = cell(t);
  if (t == grid_[k]) return left_[k];
  if (t == grid_[k + 1]) return left_[k + 1];
  const double start = right_[k];
  if (rule_ == Interpolation::piecewise_constant) return start;
  const double g_lo = governing_.eval_right(grid_[k]);
  const double g_hi = governing_.eval(grid_[k + 1]);
  if (g_hi == g_lo) return start;
  return start + (left_[k + 1] - start) * ((governing_.eval(t) - g_lo) / (g_hi - g_lo));
}

double Trajectory::right_value(double t) const {
  const auto it = std::lower_bound(grid_.begin(), grid_.end(), t);
  if (it != grid_.end() && *it == t) return right_[static_cast<std::size_t>(it - grid_.begin())];
  return value(t);
}

Trajectory Trajectory::compose(const std::function<double(double)>& phi) const {
  std::vector<double> left(left_.size());
  std::vector<double> right(right_.size());
  std::transform(left_.begin(), left_.end(), left.begin(), phi);
  std::transform(right_.begin(), right_.end(), right.begin(), phi);
  DenseEvaluator dense;
  if (dense_) dense = [inner = dense_, phi](double t) { return phi(inner(t)); };
  return Trajectory(governing_, grid_, std::move(left), std::move(right), rule_, std::move(dense));
}

}  // namespace stieltjes
