#include "stieltjes/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "stieltjes/errors.hpp"

namespace stieltjes {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<double> call_rhs(const SystemSpec& spec, double t, std::span<const double> x) {
  std::vector<double> out = spec.rhs(t, x);
  if (out.size() != spec.dimension())
    throw RhsEvaluationError("rhs returned " + std::to_string(out.size()) + " values, expected " +
                                 std::to_string(spec.dimension()),
                             t);
  for (double v : out)
    if (!std::isfinite(v)) throw RhsEvaluationError("rhs is not finite at t = " + fmt(t), t);
  return out;
}

bool ulp_close(double left, double right, double increment) {
  const double scale = std::max({std::abs(left), std::abs(right), std::abs(increment)});
  return std::abs((right - left) - increment) <= 4.0 * kEps * scale;
}

// Values of all components on the grid, indexed [component][grid index].
struct Field {
  std::vector<std::vector<double>> left;
  std::vector<std::vector<double>> right;

  Field(std::size_t n, std::size_t points, std::span<const double> x0) {
    for (std::size_t j = 0; j < n; ++j) {
      left.emplace_back(points, x0[j]);
      right.emplace_back(points, x0[j]);
    }
  }
};

double distance_from(std::span<const double> x0, const std::vector<std::vector<double>>& values,
                     std::size_t k) {
  double d = 0.0;
  for (std::size_t j = 0; j < x0.size(); ++j) d = std::max(d, std::abs(values[j][k] - x0[j]));
  return d;
}

class Stepper {
 public:
  Stepper(const SystemSpec& spec, std::size_t mesh, const StepOptions& options)
      : spec_(spec), options_(options), grid_(solver_grid(spec, mesh)) {
    spec.validate();
    if (options.safety_radius && !(*options.safety_radius > 0.0))
      throw std::invalid_argument("safety radius must be positive");
  }

  const std::vector<double>& grid() const { return grid_; }
  std::size_t n() const { return spec_.dimension(); }

  // Applies the jump rule at grid index k from field.left[.][k].
  void jump(Field& field, std::size_t k, SolverRun* record) const {
    const double t = grid_[k];
    std::size_t jumping = 0;
    for (std::size_t j = 0; j < n(); ++j)
      if (spec_.derivators[j].is_jump(t)) ++jumping;
    for (std::size_t j = 0; j < n(); ++j) field.right[j][k] = field.left[j][k];
    if (jumping == 0) return;

    std::vector<double> state(n());
    for (std::size_t j = 0; j < n(); ++j) state[j] = field.left[j][k];
    const std::vector<double> f = call_rhs(spec_, t, state);
    for (std::size_t j = 0; j < n(); ++j) {
      const double delta = spec_.derivators[j].jump_at(t);
      if (delta == 0.0) continue;
      const double increment = f[j] * delta;
      field.right[j][k] = state[j] + increment;
      if (record) {
        JumpAuditRow row;
        row.component = j;
        row.at = t;
        row.left = state[j];
        row.right = field.right[j][k];
        row.rhs = f[j];
        row.delta = delta;
        row.residual = (row.right - row.left) - increment;
        row.pass = ulp_close(row.left, row.right, increment);
        record->jump_audit.push_back(row);
      }
    }
    if (record && jumping > 1) {
      record->simultaneous_jumps.push_back(t);
      record->warnings.push_back("components jump together at t = " + fmt(t) +
                                 "; each jump uses the shared pre-jump state");
    }
  }

  // True when the run must stop at grid index k.
  bool check_ball(const Field& field, std::size_t k, SolverRun& run) const {
    if (!options_.safety_radius) return false;
    if (distance_from(spec_.initial, field.left, k) <= *options_.safety_radius) return false;
    if (!run.left_ball_at) {
      run.left_ball_at = grid_[k];
      run.warnings.push_back("state left the safety ball of radius " +
                             fmt(*options_.safety_radius) + " at t = " + fmt(grid_[k]));
    }
    return options_.halt_outside_ball;
  }

  std::vector<Trajectory> trajectories(const Field& field, std::size_t points) const {
    std::vector<Trajectory> out;
    const std::vector<double> grid(grid_.begin(), grid_.begin() + static_cast<long>(points));
    for (std::size_t j = 0; j < n(); ++j) {
      std::vector<double> left(field.left[j].begin(), field.left[j].begin() + static_cast<long>(points));
      std::vector<double> right(field.right[j].begin(),
                                field.right[j].begin() + static_cast<long>(points));
      right.back() = left.back();
      out.emplace_back(spec_.derivators[j], grid, std::move(left), std::move(right),
                       Interpolation::g_linear);
    }
    return out;
  }

  const SystemSpec& spec() const { return spec_; }

 private:
  const SystemSpec& spec_;
  StepOptions options_;
  std::vector<double> grid_;
};

// Value at s in (t_k, t_{k+1}) of a field interpolated linearly in g_j.
double interpolate(const Derivator& g, const Field& field, std::size_t j, std::size_t k, double lo,
                   double hi, double s) {
  const double start = field.right[j][k];
  const double end = field.left[j][k + 1];
  const double g_lo = g.eval_right(lo);
  const double g_hi = g.eval(hi);
  if (g_hi == g_lo || start == end) return start;
  return start + (end - start) * ((g.eval(s) - g_lo) / (g_hi - g_lo));
}

double sup_change(const Field& a, const Field& b, std::size_t points) {
  double change = 0.0;
  for (std::size_t j = 0; j < a.left.size(); ++j)
    for (std::size_t k = 0; k < points; ++k)
      change = std::max({change, std::abs(a.left[j][k] - b.left[j][k]),
                         std::abs(a.right[j][k] - b.right[j][k])});
  return change;
}

}  // namespace

void SystemSpec::validate() const {
  if (derivators.empty()) throw std::invalid_argument("system needs at least one component");
  const double a = derivators.front().a();
  const double b = derivators.front().b();
  for (const Derivator& g : derivators)
    if (g.a() != a || g.b() != b)
      throw std::invalid_argument("all derivators must share the same interval");
  if (!rhs) throw std::invalid_argument("system has no right-hand side");
  if (initial.size() != derivators.size())
    throw std::invalid_argument("initial vector has " + std::to_string(initial.size()) +
                                " entries, expected " + std::to_string(derivators.size()));
  for (double v : initial)
    if (!std::isfinite(v)) throw std::invalid_argument("initial value is not finite");
  if (!(horizon > 0.0) || !(t0() + horizon <= b * (1.0 + 4.0 * kEps) + 4.0 * kEps))
    throw std::invalid_argument("horizon must lie in (0, b - a]");
}

std::vector<double> solver_grid(const SystemSpec& spec, std::size_t mesh) {
  if (mesh < 1) throw std::invalid_argument("mesh must be at least 1");
  const double lo = spec.t0();
  const double hi = std::min(spec.end_time(), spec.derivators.front().b());
  std::vector<double> breaks{lo, hi};
  for (const Derivator& g : spec.derivators)
    for (double p : g.breakpoints())
      if (p > lo && p < hi) breaks.push_back(p);
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  return refine_breakpoints(breaks, mesh);
}

double select_horizon(const SystemSpec& spec, const CaratheodoryBound& bound) {
  spec.validate();
  if (!(bound.radius > 0.0)) throw std::invalid_argument("radius must be positive");
  if (bound.dominators.size() != spec.dimension())
    throw std::invalid_argument("need one dominator per component");
  const std::vector<double> grid = solver_grid(spec, std::max<std::size_t>(bound.resolution, 1));
  const double t0 = grid.front();
  const double limit = bound.radius * (1.0 + 1e-12);
  auto mass = [&](std::size_t i) {
    double worst = 0.0;
    for (std::size_t j = 0; j < spec.dimension(); ++j) {
      const StieltjesMeasure mu(spec.derivators[j], Signature::total_variation);
      worst = std::max(worst, mu.integrate(bound.dominators[j], t0, grid[i]));
    }
    return worst;
  };
  const std::size_t last = grid.size() - 1;
  if (mass(last) <= limit) return spec.horizon;
  if (mass(1) > limit)
    throw HorizonSelectionError("no grid time keeps the dominator integral within radius " +
                                fmt(bound.radius) + "; choose a larger radius");
  std::size_t good = 1;
  std::size_t bad = last;
  while (bad - good > 1) {
    const std::size_t mid = good + (bad - good) / 2;
    (mass(mid) <= limit ? good : bad) = mid;
  }
  return grid[good] - t0;
}

SolverRun solve_euler(const SystemSpec& spec, std::size_t mesh, const StepOptions& options) {
  const Stepper stepper(spec, mesh, options);
  const auto& grid = stepper.grid();
  const std::size_t n = stepper.n();
  Field field(n, grid.size(), spec.initial);
  SolverRun run;

  std::size_t points = grid.size();
  std::vector<double> state(n);
  for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
    stepper.jump(field, k, &run);
    const double t = grid[k];
    const double next = grid[k + 1];
    std::vector<double> dg(n);
    bool moves = false;
    for (std::size_t j = 0; j < n; ++j) {
      dg[j] = spec.derivators[j].eval(next) - spec.derivators[j].eval_right(t);
      moves = moves || dg[j] != 0.0;
      state[j] = field.right[j][k];
    }
    std::vector<double> f;
    if (moves) f = call_rhs(spec, t, state);
    for (std::size_t j = 0; j < n; ++j)
      field.left[j][k + 1] = dg[j] == 0.0 ? state[j] : state[j] + f[j] * dg[j];
    if (stepper.check_ball(field, k + 1, run)) {
      points = k + 2;
      run.halted = true;
      break;
    }
  }
  run.components = stepper.trajectories(field, points);
  return run;
}

SolverRun solve_picard(const SystemSpec& spec, std::size_t mesh, std::size_t max_iter, double tol,
                       const StepOptions& options) {
  if (max_iter < 1) throw std::invalid_argument("max_iter must be at least 1");
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
  const Stepper stepper(spec, mesh, options);
  const auto& grid = stepper.grid();
  const std::size_t n = stepper.n();
  std::vector<StieltjesMeasure> measures;
  for (const Derivator& g : spec.derivators) measures.emplace_back(g, Signature::signed_measure);

  Field old(n, grid.size(), spec.initial);
  SolverRun run;
  std::size_t points = grid.size();
  run.converged = false;

  for (std::size_t iter = 1; iter <= max_iter; ++iter) {
    Field next(n, grid.size(), spec.initial);
    SolverRun scratch;
    bool halted = false;
    std::vector<double> state(n);
    for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
      stepper.jump(next, k, &scratch);
      const double t = grid[k];
      const double t1 = grid[k + 1];
      for (std::size_t j = 0; j < n; ++j) {
        const Derivator& g = spec.derivators[j];
        double value = next.right[j][k];
        if (g.eval(t1) != g.eval_right(t)) {
          const Integrand integrand([&, j](double s) {
            for (std::size_t i = 0; i < n; ++i)
              state[i] = interpolate(spec.derivators[i], old, i, k, t, t1, s);
            return call_rhs(spec, s, state)[j];
          });
          value += measures[j].integrate_continuous(integrand, t, t1);
        }
        next.left[j][k + 1] = value;
      }
      if (stepper.check_ball(next, k + 1, scratch)) {
        points = k + 2;
        halted = true;
        break;
      }
    }
    const double change = halted ? std::numeric_limits<double>::infinity()
                                 : sup_change(next, old, grid.size());
    scratch.components = stepper.trajectories(next, halted ? points : grid.size());
    scratch.iterations = std::max<std::size_t>(1, iter - 1);
    scratch.last_change = change;
    scratch.halted = halted;
    run = std::move(scratch);
    if (halted) break;
    if (change < tol) {
      run.converged = true;
      return run;
    }
    old = std::move(next);
  }
  run.converged = false;
  run.iterations = max_iter;
  run.warnings.push_back(run.halted ? "Picard iterate left the safety ball; iteration stopped"
                                    : "Picard iteration did not reach tolerance " + fmt(tol) +
                                          " in " + std::to_string(max_iter) + " iterations");
  return run;
}

SolutionReport solve(const SystemSpec& spec, const SolveConfig& config) {
  spec.validate();
  SolutionReport report;
  SystemSpec local = spec;
  StepOptions step = config.step;
  if (config.bound) {
    local.horizon = select_horizon(spec, *config.bound);
    if (!step.safety_radius) step.safety_radius = config.bound->radius;
  }
  report.horizon = local.horizon;

  auto run_once = [&](std::size_t mesh) {
    return config.picard ? solve_picard(local, mesh, config.max_iter, config.tol, step)
                         : solve_euler(local, mesh, step);
  };
  report.run = run_once(config.mesh);
  report.refined = run_once(2 * config.mesh);
  report.converged = report.run.converged && report.refined.converged;
  report.warnings = report.run.warnings;
  for (const std::string& w : report.refined.warnings)
    report.warnings.push_back("refined run: " + w);

  const auto& coarse = report.run.components;
  const auto& fine = report.refined.components;
  if (report.run.halted || report.refined.halted) {
    report.error_estimate = std::numeric_limits<double>::quiet_NaN();
    report.extrapolated = coarse;
    report.warnings.push_back("run halted; no error estimate or extrapolation");
    return report;
  }

  const double weight = config.picard ? 1.0 / 3.0 : 1.0;
  for (std::size_t j = 0; j < coarse.size(); ++j) {
    const auto grid = coarse[j].grid();
    const auto cl = coarse[j].left_values();
    const auto cr = coarse[j].right_values();
    const auto fgrid = fine[j].grid();
    const auto fl = fine[j].left_values();
    const auto fr = fine[j].right_values();
    std::vector<double> left(grid.size());
    std::vector<double> right(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
      double fine_left = 0.0;
      double fine_right = 0.0;
      if (2 * k < fgrid.size() && fgrid[2 * k] == grid[k]) {
        fine_left = fl[2 * k];
        fine_right = fr[2 * k];
      } else {
        fine_left = fine[j].value(grid[k]);
        fine_right = fine[j].right_value(grid[k]);
      }
      report.error_estimate = std::max(
          {report.error_estimate, std::abs(fine_left - cl[k]), std::abs(fine_right - cr[k])});
      left[k] = fine_left + (fine_left - cl[k]) * weight;
      right[k] = cr[k] == cl[k] && fine_right == fine_left ? left[k]
                                                            : fine_right + (fine_right - cr[k]) * weight;
    }
    report.extrapolated.emplace_back(coarse[j].governing(),
                                     std::vector<double>(grid.begin(), grid.end()),
                                     std::move(left), std::move(right), Interpolation::g_linear);
  }
  return report;
}

}  // namespace stieltjes
