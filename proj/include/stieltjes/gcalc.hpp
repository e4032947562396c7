#pragma once

#include <cstddef>
#include <functional>

#include "stieltjes/derivator.hpp"
#include "stieltjes/measure.hpp"
#include "stieltjes/trajectory.hpp"

namespace stieltjes {

struct DerivativeOptions {
  /// Stopping tolerance of the extrapolated difference quotient.
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  int max_levels = 40;
};

/// g-derivative of a trajectory at t.
///
/// At a jump of g this is (h(t+) - h(t)) / (g(t+) - g(t)) from the stored
/// values. Elsewhere it is the two-sided quotient limit, extrapolated from
/// brackets that never leave the monotone piece containing t. Throws
/// UndefinedPointError on F_g \ D_g and on the closure of C_g.
double g_derivative(const Trajectory& h, double t, const DerivativeOptions& options = {});

/// Same for a plain function. At a jump the right-hand quotient limit is
/// extrapolated from one-sided brackets.
double g_derivative(const Derivator& g, const std::function<double(double)>& fn, double t,
                    const DerivativeOptions& options = {});

/// h(x) = integral of v over [a, x) against the signed measure, on a grid with
/// every breakpoint of g and `grid_hint` points per segment. Off-grid values are
/// computed exactly by the returned trajectory's dense evaluator.
Trajectory primitive(const StieltjesMeasure& m, const Integrand& v, std::size_t grid_hint = 256);

struct FtcReport {
  double max_deviation = 0.0;
  double threshold = 1e-6;
  bool pass = false;
  std::size_t points_checked = 0;
  /// Cells where g is constant and therefore carry no mass.
  std::size_t cells_skipped = 0;
  /// Quadrature nodes where the difference quotient did not settle, typically
  /// next to a kink of h. Their last estimate is used.
  std::size_t unsettled_quotients = 0;
};

/// Differentiates h numerically, integrates the derivative back against mu_g
/// and compares with h(t) - h(a) at every grid time.
FtcReport ftc_roundtrip(const Trajectory& h, double threshold = 1e-6);

struct ChainRuleReport {
  double lhs = 0.0;
  double rhs = 0.0;
  /// |lhs - rhs| / max(1, |lhs|, |rhs|)
  double relative_difference = 0.0;
  bool pass = false;
};

/// Compares (h∘f)'_{g1}(x0) with h'_{g2}(f(x0)) * (g2∘f)'_{g1}(x0).
ChainRuleReport chain_rule_check(const Derivator& g1, const Derivator& g2,
                                 const std::function<double(double)>& f,
                                 const std::function<double(double)>& h, double x0,
                                 double threshold = 1e-6);

/// Largest delta such that every sampled pair with var_g between them below
/// delta has |h(t) - h(s)| < epsilon. Samples are the grid times and, where
/// g jumps, their right limits. The search walks a halving ladder from
/// var_g over the span and bisects the final bracket. Returns 0 when no
/// positive delta works.
double g_continuity_modulus(const Trajectory& h, double epsilon);

}  // namespace stieltjes
