#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "stieltjes/derivator.hpp"
#include "stieltjes/measure.hpp"
#include "stieltjes/trajectory.hpp"

namespace stieltjes {

/// ec1: every jump factor 1 + c*delta is positive. ec2: all nonzero, some
/// negative. ec3: at least one factor vanishes.
enum class Regime { ec1, ec2, ec3 };

const char* to_string(Regime r);

struct JumpFactor {
  double at = 0.0;
  double delta = 0.0;
  double factor = 1.0;
};

/// Coefficient c of x'_g = c x together with the jump bookkeeping it induces.
class LinearCoefficient {
 public:
  /// |factor| below this counts as zero.
  static constexpr double kZeroFactor = 1e-14;
  /// |factor| below this is reported as ill-conditioned.
  static constexpr double kIllConditioned = 1e-8;

  LinearCoefficient(Integrand c, Derivator g);

  const Integrand& c() const noexcept { return c_; }
  const Derivator& derivator() const noexcept { return g_; }
  std::span<const JumpFactor> jump_factors() const noexcept { return factors_; }
  /// Jumps with negative factor (T_c^-), sorted.
  const std::vector<double>& t_minus() const noexcept { return t_minus_; }
  /// Jumps with vanishing factor (T_c^0), sorted.
  const std::vector<double>& t_zero() const noexcept { return t_zero_; }
  Regime regime() const noexcept { return regime_; }
  /// min T_c^0, after which the exponential is identically zero.
  std::optional<double> extinction_time() const;
  /// Jump locations whose factor is nonzero but below kIllConditioned.
  const std::vector<double>& conditioning_warnings() const noexcept { return warnings_; }

  /// 1 + c(t) delta(t) at a jump (0 for T_c^0 members), 1 elsewhere.
  double effective_factor(double t) const;

 private:
  Integrand c_;
  Derivator g_;
  std::vector<JumpFactor> factors_;
  std::vector<double> t_minus_;
  std::vector<double> t_zero_;
  std::vector<double> warnings_;
  Regime regime_ = Regime::ec1;
};

/// c(t) off the jumps, ln|1 + c(t) delta| / delta on them.
double transform_coefficient(const LinearCoefficient& lc, double t);

/// e_{g,c,a}(t): (-1)^k exp(int_[a,t) c~ dmu_g) with k the number of T_c^-
/// points in [a, t), and 0 for t past the extinction time.
double g_exponential(const LinearCoefficient& lc, double t);

struct GExponential {
  LinearCoefficient coefficient;
  /// Grid values; the right value at a jump is e(t) times the jump factor.
  Trajectory values;
};

GExponential build_g_exponential(const LinearCoefficient& lc, std::size_t grid_hint = 256);

struct LinearSolutionReport {
  /// max over grid times of |e(t) - 1 - int_[a,t) c e dmu_g|
  double max_residual = 0.0;
  bool pass = false;
  /// e(t+) == e(t) * factor(t) held bit-for-bit at every jump.
  bool jump_identity_exact = true;
  std::size_t jumps_checked = 0;
  std::vector<double> conditioning_warnings;
};

LinearSolutionReport verify_linear_solution(const LinearCoefficient& lc,
                                            std::size_t grid_hint = 256,
                                            double threshold = 1e-6);

}  // namespace stieltjes
