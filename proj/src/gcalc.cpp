#include "stieltjes/gcalc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "stieltjes/errors.hpp"

namespace stieltjes {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Extrapolates q(delta) to delta -> 0 over delta_k = delta0 / 2^k, assuming an
// error expansion in delta^power, delta^(2 power), ...
double extrapolate(const std::function<double(double)>& q, double delta0, int power,
                   const DerivativeOptions& options) {
  constexpr std::size_t kColumns = 7;
  const double step = std::pow(2.0, power);
  std::vector<double> prev;
  std::vector<double> row;
  double best = q(delta0);
  if (!std::isfinite(best)) throw ConvergenceError("g-derivative quotient is not finite", best);
  double err = kInf;
  prev.push_back(best);
  double delta = delta0;
  for (int k = 1; k < options.max_levels; ++k) {
    delta *= 0.5;
    row.assign(1, q(delta));
    if (!std::isfinite(row[0])) break;
    double factor = 1.0;
    for (std::size_t j = 1; j <= std::min(prev.size(), kColumns - 1); ++j) {
      factor *= step;
      const double next = row[j - 1] + (row[j - 1] - prev[j - 1]) / (factor - 1.0);
      row.push_back(next);
      const double errt = std::max(std::abs(next - row[j - 1]), std::abs(next - prev[j - 1]));
      if (errt <= err) {
        err = errt;
        best = next;
      }
    }
    if (err <= std::max(options.rel_tol * std::abs(best), options.abs_tol)) return best;
    prev.swap(row);
  }
  throw ConvergenceError("g-derivative quotient did not converge", best);
}

struct Bracket {
  double lo;
  double hi;
  bool kink;
};

// Monotone smooth piece around a non-jump point t of g.
Bracket smooth_piece(const Derivator& g, double t) {
  const Segment& seg = g.segments()[g.segment_index(t)];
  Bracket b{seg.lo(), seg.hi(), false};
  for (double k : seg.kinks()) {
    if (k < t) b.lo = std::max(b.lo, k);
    if (k > t) b.hi = std::min(b.hi, k);
    if (k == t) b.kink = true;
  }
  return b;
}

[[noreturn]] void undefined_at(double t) {
  throw UndefinedPointError(
      "g-derivative undefined at " + std::to_string(t) + " (in F_g \\ D_g or closure of C_g)", t);
}

}  // namespace

double g_derivative(const Trajectory& h, double t, const DerivativeOptions& options) {
  const Derivator& g = h.governing();
  const double delta = g.jump_at(t);
  if (delta != 0.0) return (h.right_value(t) - h.value(t)) / delta;
  if (!g.is_derivative_point(t)) undefined_at(t);

  Bracket b = smooth_piece(g, t);
  b.lo = std::max(b.lo, h.front_time());
  b.hi = std::min(b.hi, h.back_time());
  if (!h.has_dense()) {
    // Grid data is g-linear per cell; stay inside the cell(s) touching t.
    const auto grid = h.grid();
    const auto it = std::lower_bound(grid.begin(), grid.end(), t);
    if (it != grid.end()) {
      b.hi = std::min(b.hi, *it == t && std::next(it) != grid.end() ? *std::next(it) : *it);
      if (it != grid.begin()) b.lo = std::max(b.lo, *std::prev(it));
    }
    if (it != grid.end() && *it == t) b.kink = true;
  }
  const double delta0 = 0.5 * std::min(t - b.lo, b.hi - t);
  if (!(delta0 > 0.0)) undefined_at(t);
  auto quotient = [&](double d) {
    return (h.value(t + d) - h.value(t - d)) / (g.eval(t + d) - g.eval(t - d));
  };
  return extrapolate(quotient, delta0, b.kink ? 1 : 2, options);
}

double g_derivative(const Derivator& g, const std::function<double(double)>& fn, double t,
                    const DerivativeOptions& options) {
  const double delta = g.jump_at(t);
  if (delta != 0.0) {
    const Segment& next = g.segments()[g.segment_index(std::nextafter(t, kInf))];
    double hi = next.hi();
    for (double k : next.kinks()) hi = std::min(hi, k);
    const double base_f = fn(t);
    const double base_g = g.eval(t);
    auto quotient = [&](double d) { return (fn(t + d) - base_f) / (g.eval(t + d) - base_g); };
    return extrapolate(quotient, 0.5 * (hi - t), 1, options);
  }
  if (!g.is_derivative_point(t)) undefined_at(t);
  const Bracket b = smooth_piece(g, t);
  const double delta0 = 0.5 * std::min(t - b.lo, b.hi - t);
  if (!(delta0 > 0.0)) undefined_at(t);
  auto quotient = [&](double d) {
    return (fn(t + d) - fn(t - d)) / (g.eval(t + d) - g.eval(t - d));
  };
  return extrapolate(quotient, delta0, b.kink ? 1 : 2, options);
}

Trajectory primitive(const StieltjesMeasure& m, const Integrand& v, std::size_t grid_hint) {
  if (m.signature() != Signature::signed_measure)
    throw std::invalid_argument("primitive is taken against the signed measure");
  if (grid_hint < 2) throw std::invalid_argument("grid_hint must be at least 2");
  const Derivator& g = m.derivator();
  auto grid = std::make_shared<const std::vector<double>>(segment_grid(g, grid_hint));
  const std::size_t n = grid->size();
  std::vector<double> left(n, 0.0);
  auto right = std::make_shared<std::vector<double>>(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = (*grid)[k];
    const double delta = g.jump_at(t);
    (*right)[k] = delta != 0.0 ? left[k] + v(t) * delta : left[k];
    if (k + 1 < n) left[k + 1] = (*right)[k] + m.integrate_continuous(v, t, (*grid)[k + 1]);
  }

  auto dense = [m, v, grid, right](double x) {
    const auto& ts = *grid;
    const auto it = std::lower_bound(ts.begin(), ts.end(), x);
    if (it == ts.begin()) return 0.0;
    const auto k = static_cast<std::size_t>(it - ts.begin()) - 1;
    return (*right)[k] + m.integrate_continuous(v, ts[k], x);
  };
  return Trajectory(g, *grid, std::move(left), *right, Interpolation::g_linear, dense);
}

FtcReport ftc_roundtrip(const Trajectory& h, double threshold) {
  const Derivator& g = h.governing();
  const StieltjesMeasure mu(g, Signature::signed_measure);
  const auto grid = h.grid();
  const auto left = h.left_values();
  FtcReport report;
  const Integrand derivative([&h, &report](double s) {
    try {
      return g_derivative(h, s);
    } catch (const ConvergenceError& e) {
      ++report.unsettled_quotients;
      return std::isfinite(e.last_estimate()) ? e.last_estimate() : 0.0;
    }
  });
  const QuadratureOptions loose{1e-8, 1e-3 * threshold, 30};

  report.threshold = threshold;
  double cumulative = 0.0;
  for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
    const double t = grid[k];
    const double delta = g.jump_at(t);
    if (delta != 0.0) cumulative += g_derivative(h, t) * delta;
    const double mass = g.variation(t, grid[k + 1]) - std::abs(delta);
    if (mass == 0.0) {
      ++report.cells_skipped;
    } else {
      try {
        cumulative += mu.integrate_continuous(derivative, t, grid[k + 1], loose);
      } catch (const QuadratureError& e) {
        if (!(e.error() < 0.1 * threshold)) throw;
        cumulative += e.estimate();
      }
    }
    const double deviation = std::abs(left[k + 1] - left[0] - cumulative);
    report.max_deviation = std::max(report.max_deviation, deviation);
    ++report.points_checked;
  }
  report.pass = report.max_deviation < threshold;
  return report;
}

ChainRuleReport chain_rule_check(const Derivator& g1, const Derivator& g2,
                                 const std::function<double(double)>& f,
                                 const std::function<double(double)>& h, double x0,
                                 double threshold) {
  if (!g1.is_derivative_point(x0)) undefined_at(x0);
  const double y0 = f(x0);
  if (g2.is_jump(y0)) throw DomainError("f(x0) is a jump point of g2");
  ChainRuleReport report;
  report.lhs = g_derivative(g1, [&](double x) { return h(f(x)); }, x0);
  const double outer = g_derivative(g2, h, y0);
  const double inner = g_derivative(g1, [&](double x) { return g2.eval(f(x)); }, x0);
  report.rhs = outer * inner;
  report.relative_difference =
      std::abs(report.lhs - report.rhs) /
      std::max({1.0, std::abs(report.lhs), std::abs(report.rhs)});
  report.pass = report.relative_difference < threshold;
  return report;
}

double g_continuity_modulus(const Trajectory& h, double epsilon) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  const Derivator& g = h.governing();
  const auto grid = h.grid();
  const auto left = h.left_values();
  const auto right = h.right_values();
  const double start = grid.front();

  struct Sample {
    double position;  // var_g from the start of the span
    double value;
  };
  std::vector<Sample> samples;
  samples.reserve(grid.size() + g.jumps().size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double pos = g.variation(start, grid[k]);
    samples.push_back({pos, left[k]});
    const double jump = g.jump_at(grid[k]);
    if (jump != 0.0 || right[k] != left[k]) samples.push_back({pos + std::abs(jump), right[k]});
  }
  const double top = g.variation(start, grid.back());

  // Smallest var_g separation among pairs whose values differ by at least epsilon.
  double closest = kInf;
  for (std::size_t p = 0; p < samples.size(); ++p) {
    for (std::size_t q = p + 1; q < samples.size(); ++q) {
      const double gap = samples[q].position - samples[p].position;
      if (gap >= closest) break;
      if (std::abs(samples[q].value - samples[p].value) >= epsilon) closest = gap;
    }
  }
  auto admissible = [closest](double delta) { return delta <= closest; };

  if (admissible(top)) return top;
  double upper = top;
  double lower = 0.5 * top;
  while (lower > 0.0 && !admissible(lower)) {
    upper = lower;
    lower *= 0.5;
  }
  if (lower == 0.0) return 0.0;
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (lower + upper);
    if (mid <= lower || mid >= upper) break;
    (admissible(mid) ? lower : upper) = mid;
  }
  return lower;
}

}  // namespace stieltjes
