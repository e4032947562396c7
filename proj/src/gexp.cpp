#include "stieltjes/gexp.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "stieltjes/errors.hpp"

namespace stieltjes {

const char* to_string(Regime r) {
  switch (r) {
    case Regime::ec1: return "ec1";
    case Regime::ec2: return "ec2";
    case Regime::ec3: return "ec3";
  }
  return "unknown";
}

LinearCoefficient::LinearCoefficient(Integrand c, Derivator g)
    : c_(std::move(c)), g_(std::move(g)) {
  for (const Jump& j : g_.jumps()) {
    const double cv = c_(j.at);
    if (!std::isfinite(cv)) throw std::invalid_argument("coefficient is not finite at a jump");
    const JumpFactor jf{j.at, j.delta, 1.0 + cv * j.delta};
    factors_.push_back(jf);
    if (std::abs(jf.factor) < kZeroFactor) {
      t_zero_.push_back(jf.at);
    } else {
      if (jf.factor < 0.0) t_minus_.push_back(jf.at);
      if (std::abs(jf.factor) < kIllConditioned) warnings_.push_back(jf.at);
    }
  }
  regime_ = !t_zero_.empty() ? Regime::ec3 : (!t_minus_.empty() ? Regime::ec2 : Regime::ec1);
}

std::optional<double> LinearCoefficient::extinction_time() const {
  if (t_zero_.empty()) return std::nullopt;
  return t_zero_.front();
}

double LinearCoefficient::effective_factor(double t) const {
  const auto it = std::lower_bound(factors_.begin(), factors_.end(), t,
                                   [](const JumpFactor& f, double x) { return f.at < x; });
  if (it == factors_.end() || it->at != t) return 1.0;
  return std::abs(it->factor) < kZeroFactor ? 0.0 : it->factor;
}

double transform_coefficient(const LinearCoefficient& lc, double t) {
  const Derivator& g = lc.derivator();
  if (!(t >= g.a() && t < g.b())) throw DomainError("coefficient transform needs t in [a, b)");
  const double delta = g.jump_at(t);
  if (delta == 0.0) return lc.c()(t);
  const double factor = lc.effective_factor(t);
  if (factor == 0.0)
    throw DegenerateCoefficientError("jump factor vanishes at t = " + std::to_string(t));
  return std::log(std::abs(factor)) / delta;
}

double g_exponential(const LinearCoefficient& lc, double t) {
  const Derivator& g = lc.derivator();
  if (!(t >= g.a() && t <= g.b())) throw DomainError("g-exponential evaluated outside [a, b]");
  if (const auto t0 = lc.extinction_time(); t0 && t > *t0) return 0.0;
  const StieltjesMeasure mu(g, Signature::signed_measure);
  // Atoms of c~ against mu_g contribute ln|factor| directly; delta cancels.
  double exponent = mu.integrate_continuous(lc.c(), g.a(), t);
  int flips = 0;
  for (const JumpFactor& jf : lc.jump_factors()) {
    if (jf.at >= t) break;
    exponent += std::log(std::abs(jf.factor));
    if (jf.factor < 0.0) ++flips;
  }
  const double magnitude = std::exp(exponent);
  return flips % 2 == 0 ? magnitude : -magnitude;
}

GExponential build_g_exponential(const LinearCoefficient& lc, std::size_t grid_hint) {
  const Derivator& g = lc.derivator();
  const StieltjesMeasure mu(g, Signature::signed_measure);
  std::vector<double> grid = segment_grid(g, grid_hint);
  const std::size_t n = grid.size();
  std::vector<double> left(n);
  std::vector<double> right(n);
  const auto t0 = lc.extinction_time();

  double exponent = 0.0;
  bool negative = false;
  bool extinct = false;
  for (std::size_t k = 0; k < n; ++k) {
    const double t = grid[k];
    left[k] = extinct ? 0.0 : (negative ? -std::exp(exponent) : std::exp(exponent));
    const double factor = lc.effective_factor(t);
    right[k] = factor == 1.0 ? left[k] : left[k] * factor;
    if (k + 1 == n) break;
    if (g.is_jump(t)) {
      if (factor == 0.0) {
        extinct = true;
      } else {
        exponent += std::log(std::abs(factor));
        negative = negative != (factor < 0.0);
      }
    }
    if (!extinct) exponent += mu.integrate_continuous(lc.c(), t, grid[k + 1]);
  }
  (void)t0;
  auto dense = [lc](double t) { return g_exponential(lc, t); };
  return GExponential{lc, Trajectory(g, std::move(grid), std::move(left), std::move(right),
                                     Interpolation::g_linear, dense)};
}

LinearSolutionReport verify_linear_solution(const LinearCoefficient& lc, std::size_t grid_hint,
                                            double threshold) {
  const GExponential e = build_g_exponential(lc, grid_hint);
  const Derivator& g = lc.derivator();
  const StieltjesMeasure mu(g, Signature::signed_measure);
  const auto grid = e.values.grid();
  const auto left = e.values.left_values();
  const auto right = e.values.right_values();

  LinearSolutionReport report;
  report.conditioning_warnings = lc.conditioning_warnings();
  double integral = 0.0;  // int_[a, t_k) c e dmu_g
  for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
    const double t = grid[k];
    const double delta = g.jump_at(t);
    if (delta != 0.0) {
      ++report.jumps_checked;
      if (right[k] != left[k] * lc.effective_factor(t)) report.jump_identity_exact = false;
      integral += lc.c()(t) * left[k] * delta;
    }
    const double start = right[k];
    if (start != 0.0) {
      // On the open cell e(s) = e(t+) exp(int_(t, s) c dmu_g).
      const Integrand c_times_e([&](double s) {
        return lc.c()(s) * start * std::exp(mu.integrate_continuous(lc.c(), t, s));
      });
      integral += mu.integrate_continuous(c_times_e, t, grid[k + 1]);
    }
    report.max_residual =
        std::max(report.max_residual, std::abs(left[k + 1] - 1.0 - integral));
  }
  report.pass = report.max_residual < threshold && report.jump_identity_exact;
  return report;
}

}  // namespace stieltjes
