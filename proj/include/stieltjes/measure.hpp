#pragma once

#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "stieltjes/derivator.hpp"
#include "stieltjes/quadrature.hpp"

namespace stieltjes {

/// Bounded real function on a compact interval.
class Integrand {
 public:
  enum class Kind { closure, piecewise_poly, tabulated };

  Integrand(std::function<double(double)> fn, Kind kind = Kind::closure)
      : fn_(std::move(fn)), kind_(kind) {}

  static Integrand closure(std::function<double(double)> fn) { return Integrand(std::move(fn)); }
  static Integrand constant(double value);
  /// sum_k coefficients[k] * t^k (Horner).
  static Integrand polynomial(std::vector<double> coefficients);
  /// Linear interpolation through sorted (t, value) samples, constant beyond the ends.
  static Integrand tabulated(std::vector<std::pair<double, double>> points);

  double operator()(double t) const { return fn_(t); }
  Kind kind() const noexcept { return kind_; }
  const std::function<double(double)>& function() const noexcept { return fn_; }

 private:
  std::function<double(double)> fn_;
  Kind kind_;
};

/// Half-open interval [lo, hi).
struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

enum class Signature { signed_measure, positive_part, negative_part, total_variation };

/// Only half-open [lo, hi) intervals are supported for now.
enum class IntervalShape { closed_open, closed, open, open_closed };

std::string to_string(Signature s);

/// One of mu_g, mu_g+, mu_g-, |mu_g| seen through a derivator.
class StieltjesMeasure {
 public:
  StieltjesMeasure(Derivator g, Signature signature) : g_(std::move(g)), signature_(signature) {}

  const Derivator& derivator() const noexcept { return g_; }
  Signature signature() const noexcept { return signature_; }

  /// Measure of [lo, hi).
  double interval(double lo, double hi, IntervalShape shape = IntervalShape::closed_open) const;
  /// Measure of {t}.
  double point(double t) const;

  /// Integral of f over [lo, hi): continuous part plus atoms.
  double integrate(const Integrand& f, double lo, double hi,
                   const QuadratureOptions& options = {}) const;
  /// Integral over [lo, hi) against the non-atomic part only.
  double integrate_continuous(const Integrand& f, double lo, double hi,
                              const QuadratureOptions& options = {}) const;
  /// sum over jumps at in [lo, hi) of f(at) times the atom mass.
  double integrate_atoms(const Integrand& f, double lo, double hi) const;

 private:
  double atom_weight(double delta) const noexcept;
  double segment_sign(Direction d) const noexcept;

  Derivator g_;
  Signature signature_;
};

struct HahnRow {
  double lo = 0.0;
  double hi = 0.0;
  double positive_residual = 0.0;
  double negative_residual = 0.0;
  bool pass = false;
};

struct HahnReport {
  std::vector<HahnRow> rows;
  bool pass = true;
};

/// For each [lo, hi) checks mu+(E) = mu(E ∩ (A+ ∪ D+)) and
/// mu-(E) = -mu(E ∩ (A- ∪ D-)), the intersections taken from the structural sets.
HahnReport hahn_check(const StieltjesMeasure& m, std::span<const Range> intervals,
                      double tolerance = 1e-10);

}  // namespace stieltjes
