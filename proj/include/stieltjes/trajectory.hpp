#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "stieltjes/derivator.hpp"

namespace stieltjes {

/// How values between grid points are reconstructed.
enum class Interpolation {
  /// Linear in the governing derivator: x moves in proportion to g on each cell.
  g_linear,
  /// x(t) = x(t_k+) on (t_k, t_{k+1}).
  piecewise_constant,
};

/// Left-continuous scalar function sampled on a grid, with x(t) and x(t+)
/// stored at every grid time.
///
/// The grid contains every jump of the governing derivator inside its span and
/// the right value differs from the left value only at those jumps. An optional
/// dense evaluator supplies exact off-grid values (primitives carry one).
class Trajectory {
 public:
  using DenseEvaluator = std::function<double(double)>;

  Trajectory(Derivator governing, std::vector<double> grid, std::vector<double> left_values,
             std::vector<double> right_values, Interpolation rule = Interpolation::g_linear,
             DenseEvaluator dense = {});

  const Derivator& governing() const noexcept { return governing_; }
  std::span<const double> grid() const noexcept { return grid_; }
  std::span<const double> left_values() const noexcept { return left_; }
  std::span<const double> right_values() const noexcept { return right_; }
  Interpolation interpolation() const noexcept { return rule_; }
  bool has_dense() const noexcept { return static_cast<bool>(dense_); }
  std::size_t size() const noexcept { return grid_.size(); }
  double front_time() const noexcept { return grid_.front(); }
  double back_time() const noexcept { return grid_.back(); }

  /// x(t) for t in the grid span.
  double value(double t) const;
  /// x(t+).
  double right_value(double t) const;

  /// phi applied pointwise (left values, right values and the dense evaluator).
  Trajectory compose(const std::function<double(double)>& phi) const;

 private:
  std::size_t cell(double t) const;

  Derivator governing_;
  std::vector<double> grid_;
  std::vector<double> left_;
  std::vector<double> right_;
  Interpolation rule_;
  DenseEvaluator dense_;
};

}  // namespace stieltjes
