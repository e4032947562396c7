#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stieltjes/derivator.hpp"
#include "stieltjes/measure.hpp"
#include "stieltjes/trajectory.hpp"

namespace stieltjes {

/// f(t, x) for the whole system; must return a vector of the system dimension.
using Rhs = std::function<std::vector<double>(double t, std::span<const double> x)>;

/// x'_{g_j}(t) = f_j(t, x(t)), x(t0) = x0, solved on [t0, t0 + horizon].
struct SystemSpec {
  std::vector<Derivator> derivators;
  Rhs rhs;
  std::vector<double> initial;
  double horizon = 0.0;

  std::size_t dimension() const noexcept { return derivators.size(); }
  double t0() const { return derivators.front().a(); }
  double end_time() const { return t0() + horizon; }
  /// Throws std::invalid_argument when the spec is malformed.
  void validate() const;
};

struct CaratheodoryBound {
  double radius = 1.0;
  /// h_j >= 0 with |f_j(t, x)| <= h_j(t) on the ball of the given radius.
  std::vector<Integrand> dominators;
  /// Grid cells per breakpoint gap for the horizon search.
  std::size_t resolution = 1024;
};

/// Largest grid time tau (relative to t0) with
/// max_j int_[t0, t0 + tau) h_j d|mu_{g_j}| <= radius.
/// Throws HorizonSelectionError when even the first grid step is too long.
double select_horizon(const SystemSpec& spec, const CaratheodoryBound& bound);

/// Breakpoints of every derivator inside [t0, t0 + horizon] with `mesh`
/// uniform cells between consecutive ones.
std::vector<double> solver_grid(const SystemSpec& spec, std::size_t mesh);

struct JumpAuditRow {
  std::size_t component = 0;
  double at = 0.0;
  double left = 0.0;
  double right = 0.0;
  /// f_j(t, x(t)) with the pre-jump state.
  double rhs = 0.0;
  double delta = 0.0;
  /// (right - left) - rhs * delta
  double residual = 0.0;
  bool pass = false;
};

struct SolverRun {
  std::vector<Trajectory> components;
  bool converged = true;
  /// Picard only: index of the accepted iterate (at least 1).
  std::size_t iterations = 0;
  /// Picard only: sup-norm change of the last iteration.
  double last_change = 0.0;
  std::vector<JumpAuditRow> jump_audit;
  /// Times where two or more components jump together.
  std::vector<double> simultaneous_jumps;
  std::vector<std::string> warnings;
  /// Time at which the state left the safety ball, when it did.
  std::optional<double> left_ball_at;
  bool halted = false;
};

struct StepOptions {
  /// Warn when ||x - x0||_inf exceeds this.
  std::optional<double> safety_radius;
  /// Stop at the first grid time outside the safety ball.
  bool halt_outside_ball = false;
};

SolverRun solve_euler(const SystemSpec& spec, std::size_t mesh, const StepOptions& options = {});

SolverRun solve_picard(const SystemSpec& spec, std::size_t mesh, std::size_t max_iter, double tol,
                       const StepOptions& options = {});

struct SolveConfig {
  std::size_t mesh = 1024;
  bool picard = false;
  std::size_t max_iter = 100;
  double tol = 1e-12;
  std::optional<CaratheodoryBound> bound;
  StepOptions step;
};

struct SolutionReport {
  /// Horizon actually solved (relative to t0).
  double horizon = 0.0;
  /// Run at the requested mesh.
  SolverRun run;
  /// Run at twice the mesh.
  SolverRun refined;
  /// sup over the coarse grid of |coarse - refined|, left and right values.
  double error_estimate = 0.0;
  /// Richardson combination of the two runs on the coarse grid.
  std::vector<Trajectory> extrapolated;
  bool converged = true;
  std::vector<std::string> warnings;
};

SolutionReport solve(const SystemSpec& spec, const SolveConfig& config = {});

}  // namespace stieltjes
