#pragma once

#include <functional>

namespace stieltjes {

struct QuadratureOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-14;
  /// Maximum bisection depth of any subinterval.
  int max_depth = 64;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  int evaluations = 0;
};

/// Globally adaptive 7/15-point Gauss-Kronrod quadrature of f over [a, b].
///
/// The subinterval with the largest error estimate is bisected until the
/// summed estimate drops below max(abs_tol, rel_tol * |I|) or reaches the
/// roundoff floor. Throws QuadratureError once a subinterval would exceed
/// max_depth bisections.
QuadratureResult gauss_kronrod(const std::function<double(double)>& f, double a, double b,
                               const QuadratureOptions& options = {});

}  // namespace stieltjes
