#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "stieltjes/quadrature.hpp"

namespace stieltjes {

/// g(t) - g(lo+) = slope * (t - lo)
struct LinearProfile {
  double slope = 0.0;
};

/// g(t) - g(lo+) = scale * ((t - origin)^exponent - (lo - origin)^exponent), exponent > 0.
struct PowerProfile {
  double exponent = 1.0;
  double scale = 1.0;
};

struct ConstantProfile {};

/// Piecewise-linear interpolation through (origin, 0) and the given
/// (t, increment) samples. Samples must be strictly monotone and the last
/// abscissa must sit at the segment end.
struct TabulatedProfile {
  std::vector<std::pair<double, double>> points;
};

using Profile = std::variant<LinearProfile, PowerProfile, ConstantProfile, TabulatedProfile>;

enum class Direction { nondecreasing, nonincreasing, constant };

/// Closed interval [lo, hi] on which the continuous part of g is monotone.
///
/// The profile is anchored at `origin` (defaults to lo). Segments produced by
/// splitting a longer segment at an interior jump keep the original origin so
/// both halves describe the same curve.
class Segment {
 public:
  Segment(double lo, double hi, Profile profile, std::optional<double> origin = std::nullopt);

  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }
  double origin() const noexcept { return origin_; }
  const Profile& profile() const noexcept { return profile_; }
  Direction direction() const noexcept { return direction_; }
  bool is_constant() const noexcept { return direction_ == Direction::constant; }

  /// g(t) - g(lo+) for t in [lo, hi].
  double increment(double t) const;

  /// Signed integral of f against the continuous part of g over [u, v] within this segment.
  double integrate(const std::function<double(double)>& f, double u, double v,
                   const QuadratureOptions& options) const;

  /// Interior points where the profile is not smooth (tabulated knots).
  std::vector<double> kinks() const;

  /// Same curve restricted to [lo, hi] ⊂ [lo(), hi()].
  Segment restricted(double lo, double hi) const;

 private:
  double raw(double t) const;

  double lo_;
  double hi_;
  Profile profile_;
  double origin_;
  Direction direction_;
};

struct Jump {
  double at = 0.0;
  /// g(at+) - g(at), nonzero.
  double delta = 0.0;
};

struct OpenInterval {
  double lo = 0.0;
  double hi = 0.0;
  friend bool operator==(const OpenInterval&, const OpenInterval&) = default;
};

struct StructuralSets {
  std::vector<double> d_plus;
  std::vector<double> d_minus;
  std::vector<OpenInterval> lambda_plus;
  std::vector<OpenInterval> lambda_minus;
  std::vector<OpenInterval> constant;
  /// Segment boundaries that are not interior to a constancy interval.
  std::vector<double> f_set;
};

enum class VariationKind { total, positive, negative };

/// Left-continuous derivator of controlled variation on [a, b]: a finite tiling
/// of monotone segments plus a finite list of jumps.
///
/// Immutable; copies share the underlying data.
class Derivator {
 public:
  /// Jumps falling strictly inside a segment split that segment, so every jump
  /// sits on a segment boundary after construction.
  Derivator(double a, double b, double anchor, std::vector<Segment> segments,
            std::vector<Jump> jumps = {});

  static Derivator identity(double a, double b);
  static Derivator constant(double a, double b, double value);

  double a() const noexcept;
  double b() const noexcept;
  double anchor() const noexcept;
  std::span<const Segment> segments() const noexcept;
  std::span<const Jump> jumps() const noexcept;

  /// g(t), left-continuous.
  double eval(double t) const;
  /// g(t+); equals eval(b) at t = b.
  double eval_right(double t) const;

  /// delta at t, or 0 when t is not a jump.
  double jump_at(double t) const noexcept;
  bool is_jump(double t) const noexcept;

  /// Index of the segment with lo < t <= hi (0 for t = a).
  std::size_t segment_index(double t) const;

  /// var over [lo, hi).
  double variation(double lo, double hi, VariationKind kind = VariationKind::total) const;

  StructuralSets structural_sets() const;

  /// True on D_g ∪ (I \ (F_g ∪ closure(C_g))), the points where the g-derivative is defined.
  bool is_derivative_point(double t) const noexcept;

  /// Sorted segment boundaries (includes a, b and every jump).
  std::vector<double> breakpoints() const;

 private:
  struct Data;
  std::shared_ptr<const Data> data_;
};

/// Sorted breakpoints with `cells` equal cells inserted between each consecutive pair.
std::vector<double> refine_breakpoints(const std::vector<double>& breaks, std::size_t cells);

/// Grid over [lo, hi] made of the derivator's breakpoints plus `points_per_segment`
/// evenly spaced points (endpoints included) on every segment piece.
std::vector<double> segment_grid(const Derivator& g, std::size_t points_per_segment);
std::vector<double> segment_grid(const Derivator& g, std::size_t points_per_segment, double lo,
                                 double hi);

}  // namespace stieltjes
