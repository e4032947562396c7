#include "stieltjes/derivator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "stieltjes/errors.hpp"

namespace stieltjes {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string describe(double lo, double hi) {
  std::ostringstream out;
  out << "[" << lo << ", " << hi << "]";
  return out.str();
}

void validate_tabulated(const TabulatedProfile& tab, double origin, double hi, bool restricted) {
  if (tab.points.empty()) throw std::invalid_argument("tabulated profile needs at least one sample");
  double prev_t = origin;
  double prev_v = 0.0;
  int sign = 0;
  for (const auto& [t, v] : tab.points) {
    if (!std::isfinite(t) || !std::isfinite(v))
      throw std::invalid_argument("tabulated profile sample is not finite");
    if (!(t > prev_t)) throw std::invalid_argument("tabulated abscissae must increase strictly");
    const double diff = v - prev_v;
    const int s = diff > 0.0 ? 1 : (diff < 0.0 ? -1 : 0);
    if (s == 0) throw std::invalid_argument("tabulated profile must be strictly monotone");
    if (sign != 0 && s != sign)
      throw std::invalid_argument("tabulated profile changes direction");
    sign = s;
    prev_t = t;
    prev_v = v;
  }
  if (restricted) {
    if (tab.points.back().first < hi)
      throw std::invalid_argument("tabulated profile does not reach the segment end");
  } else if (tab.points.back().first != hi) {
    throw std::invalid_argument("last tabulated abscissa must equal the segment end");
  }
}

double interpolate(const TabulatedProfile& tab, double origin, double t) {
  const auto& pts = tab.points;
  if (t <= origin) return 0.0;
  auto it = std::lower_bound(pts.begin(), pts.end(), t,
                             [](const auto& p, double x) { return p.first < x; });
  if (it == pts.end()) return pts.back().second;
  if (it->first == t) return it->second;
  const double t0 = it == pts.begin() ? origin : std::prev(it)->first;
  const double v0 = it == pts.begin() ? 0.0 : std::prev(it)->second;
  return v0 + (it->second - v0) * ((t - t0) / (it->first - t0));
}

}  // namespace

std::vector<double> refine_breakpoints(const std::vector<double>& breaks, std::size_t cells) {
  if (breaks.size() < 2 || cells < 1) throw std::invalid_argument("refinement needs two breakpoints and one cell");
  std::vector<double> grid;
  grid.reserve((breaks.size() - 1) * cells + 1);
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double lo = breaks[i];
    const double width = breaks[i + 1] - lo;
    grid.push_back(lo);
    for (std::size_t k = 1; k < cells; ++k)
      grid.push_back(lo + width * static_cast<double>(k) / static_cast<double>(cells));
  }
  grid.push_back(breaks.back());
  return grid;
}

// ---------------------------------------------------------------------------
// Segment

Segment::Segment(double lo, double hi, Profile profile, std::optional<double> origin)
    : lo_(lo), hi_(hi), profile_(std::move(profile)), origin_(origin.value_or(lo)) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi))
    throw std::invalid_argument("segment needs lo < hi, got " + describe(lo, hi));
  if (origin_ > lo_) throw std::invalid_argument("segment origin lies right of lo");
  std::visit(overloaded{
                 [](const LinearProfile& p) {
                   if (!std::isfinite(p.slope))
                     throw std::invalid_argument("linear slope is not finite");
                 },
                 [](const PowerProfile& p) {
                   if (!(p.exponent > 0.0) || !std::isfinite(p.exponent) ||
                       !std::isfinite(p.scale))
                     throw std::invalid_argument("power profile needs exponent > 0");
                 },
                 [](const ConstantProfile&) {},
                 [&](const TabulatedProfile& p) {
                   validate_tabulated(p, origin_, hi_, origin.has_value());
                 },
             },
             profile_);

  const double total = increment(hi_);
  direction_ = total > 0.0 ? Direction::nondecreasing
                           : (total < 0.0 ? Direction::nonincreasing : Direction::constant);

  // Sampling refinement: no adjacent pair may step against the declared direction.
  constexpr int kSamples = 64;
  double prev = 0.0;
  for (int k = 1; k <= kSamples; ++k) {
    const double t = k == kSamples ? hi_ : lo_ + (hi_ - lo_) * k / kSamples;
    const double v = increment(t);
    const double slack = 4.0 * std::numeric_limits<double>::epsilon() *
                         std::max(std::abs(v), std::abs(prev));
    const bool bad = (direction_ == Direction::nondecreasing && v < prev - slack) ||
                     (direction_ == Direction::nonincreasing && v > prev + slack) ||
                     (direction_ == Direction::constant && v != 0.0);
    if (bad) throw std::invalid_argument("segment profile is not monotone on " + describe(lo_, hi_));
    prev = v;
  }
}

double Segment::raw(double t) const {
  return std::visit(overloaded{
                        [&](const LinearProfile& p) { return p.slope * (t - origin_); },
                        [&](const PowerProfile& p) {
                          return p.scale * std::pow(t - origin_, p.exponent);
                        },
                        [](const ConstantProfile&) { return 0.0; },
                        [&](const TabulatedProfile& p) { return interpolate(p, origin_, t); },
                    },
                    profile_);
}

double Segment::increment(double t) const {
  if (const auto* lin = std::get_if<LinearProfile>(&profile_)) return lin->slope * (t - lo_);
  if (std::holds_alternative<ConstantProfile>(profile_)) return 0.0;
  return raw(t) - raw(lo_);
}

std::vector<double> Segment::kinks() const {
  std::vector<double> out;
  if (const auto* tab = std::get_if<TabulatedProfile>(&profile_)) {
    for (const auto& p : tab->points)
      if (p.first > lo_ && p.first < hi_) out.push_back(p.first);
  }
  return out;
}

double Segment::integrate(const std::function<double(double)>& f, double u, double v,
                          const QuadratureOptions& options) const {
  if (!(u < v)) return 0.0;
  return std::visit(
      overloaded{
          [&](const LinearProfile& p) {
            if (p.slope == 0.0) return 0.0;
            return p.slope * gauss_kronrod(f, u, v, options).value;
          },
          [&](const PowerProfile& p) {
            if (p.scale == 0.0) return 0.0;
            const double e = p.exponent;
            if (e >= 1.0) {
              auto weighted = [&](double t) {
                return f(t) * e * std::pow(t - origin_, e - 1.0);
              };
              return p.scale * gauss_kronrod(weighted, u, v, options).value;
            }
            // Substitute w = (t - origin)^e so the density singularity at the origin vanishes.
            const double inv = 1.0 / e;
            auto pulled_back = [&](double w) {
              return f(std::clamp(origin_ + std::pow(w, inv), u, v));
            };
            return p.scale * gauss_kronrod(pulled_back, std::pow(u - origin_, e),
                                           std::pow(v - origin_, e), options)
                                 .value;
          },
          [](const ConstantProfile&) { return 0.0; },
          [&](const TabulatedProfile& p) {
            // Piecewise linear: constant density between knots.
            std::vector<double> cuts{u};
            for (const auto& pt : p.points)
              if (pt.first > u && pt.first < v) cuts.push_back(pt.first);
            cuts.push_back(v);
            double sum = 0.0;
            for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
              const double lo = cuts[i];
              const double hi = cuts[i + 1];
              const double slope = (raw(hi) - raw(lo)) / (hi - lo);
              if (slope != 0.0) sum += slope * gauss_kronrod(f, lo, hi, options).value;
            }
            return sum;
          },
      },
      profile_);
}

Segment Segment::restricted(double lo, double hi) const {
  if (lo < lo_ || hi > hi_) throw std::invalid_argument("restriction outside the segment");
  if (std::holds_alternative<LinearProfile>(profile_) ||
      std::holds_alternative<ConstantProfile>(profile_))
    return Segment(lo, hi, profile_);
  return Segment(lo, hi, profile_, origin_);
}

// ---------------------------------------------------------------------------
// Derivator

struct Derivator::Data {
  double a;
  double b;
  double anchor;
  std::vector<Segment> segments;
  std::vector<Jump> jumps;
  std::vector<double> his;
  std::vector<double> start_values;  // g(lo_i+)
};

Derivator::Derivator(double a, double b, double anchor, std::vector<Segment> segments,
                     std::vector<Jump> jumps) {
  if (!std::isfinite(a) || !std::isfinite(b) || !(a < b))
    throw std::invalid_argument("derivator interval needs a < b");
  if (!std::isfinite(anchor)) throw std::invalid_argument("anchor is not finite");
  if (segments.empty()) throw std::invalid_argument("derivator needs at least one segment");
  if (segments.front().lo() != a || segments.back().hi() != b)
    throw std::invalid_argument("segments must start at a and end at b");
  for (std::size_t i = 0; i + 1 < segments.size(); ++i) {
    if (segments[i].hi() != segments[i + 1].lo())
      throw std::invalid_argument("segments must tile the interval without gaps or overlaps");
  }

  std::sort(jumps.begin(), jumps.end(), [](const Jump& x, const Jump& y) { return x.at < y.at; });
  for (std::size_t i = 0; i < jumps.size(); ++i) {
    const Jump& j = jumps[i];
    if (!std::isfinite(j.delta) || j.delta == 0.0)
      throw std::invalid_argument("jump delta must be finite and nonzero");
    if (!(j.at >= a && j.at < b)) throw std::invalid_argument("jump location must lie in [a, b)");
    if (i > 0 && jumps[i - 1].at == j.at)
      throw std::invalid_argument("two jumps share the same location");
  }

  std::vector<Segment> split;
  split.reserve(segments.size() + jumps.size());
  auto jump_it = jumps.begin();
  for (const Segment& seg : segments) {
    double lo = seg.lo();
    while (jump_it != jumps.end() && jump_it->at <= lo) ++jump_it;
    while (jump_it != jumps.end() && jump_it->at < seg.hi()) {
      split.push_back(seg.restricted(lo, jump_it->at));
      lo = jump_it->at;
      ++jump_it;
    }
    split.push_back(lo == seg.lo() ? seg : seg.restricted(lo, seg.hi()));
  }

  auto data = std::make_shared<Data>();
  data->a = a;
  data->b = b;
  data->anchor = anchor;
  data->segments = std::move(split);
  data->jumps = std::move(jumps);
  data->his.reserve(data->segments.size());
  data->start_values.reserve(data->segments.size());
  double left = anchor;
  std::size_t ji = 0;
  for (const Segment& seg : data->segments) {
    double start = left;
    if (ji < data->jumps.size() && data->jumps[ji].at == seg.lo()) {
      start += data->jumps[ji].delta;
      ++ji;
    }
    data->start_values.push_back(start);
    data->his.push_back(seg.hi());
    left = start + seg.increment(seg.hi());
  }
  data_ = std::move(data);
}

Derivator Derivator::identity(double a, double b) {
  return Derivator(a, b, a, {Segment(a, b, LinearProfile{1.0})});
}

Derivator Derivator::constant(double a, double b, double value) {
  return Derivator(a, b, value, {Segment(a, b, ConstantProfile{})});
}

double Derivator::a() const noexcept { return data_->a; }
double Derivator::b() const noexcept { return data_->b; }
double Derivator::anchor() const noexcept { return data_->anchor; }
std::span<const Segment> Derivator::segments() const noexcept { return data_->segments; }
std::span<const Jump> Derivator::jumps() const noexcept { return data_->jumps; }

std::size_t Derivator::segment_index(double t) const {
  if (!(t >= data_->a && t <= data_->b))
    throw DomainError("point " + std::to_string(t) + " outside derivator interval " +
                      describe(data_->a, data_->b));
  if (t == data_->a) return 0;
  const auto it = std::lower_bound(data_->his.begin(), data_->his.end(), t);
  return static_cast<std::size_t>(it - data_->his.begin());
}

double Derivator::eval(double t) const {
  const std::size_t i = segment_index(t);
  if (t == data_->a) return data_->anchor;
  return data_->start_values[i] + data_->segments[i].increment(t);
}

double Derivator::eval_right(double t) const { return eval(t) + jump_at(t); }

double Derivator::jump_at(double t) const noexcept {
  const auto& js = data_->jumps;
  const auto it =
      std::lower_bound(js.begin(), js.end(), t, [](const Jump& j, double x) { return j.at < x; });
  return (it != js.end() && it->at == t) ? it->delta : 0.0;
}

bool Derivator::is_jump(double t) const noexcept { return jump_at(t) != 0.0; }

double Derivator::variation(double lo, double hi, VariationKind kind) const {
  if (!(lo >= data_->a && hi <= data_->b))
    throw DomainError("variation interval " + describe(lo, hi) + " outside derivator interval");
  if (lo > hi) throw DomainError("variation interval has lo > hi");
  auto take = [kind](double inc) {
    switch (kind) {
      case VariationKind::total: return std::abs(inc);
      case VariationKind::positive: return std::max(inc, 0.0);
      case VariationKind::negative: return std::max(-inc, 0.0);
    }
    return 0.0;
  };
  double sum = 0.0;
  if (lo == hi) return sum;
  for (const Segment& seg : data_->segments) {
    if (seg.hi() <= lo) continue;
    if (seg.lo() >= hi) break;
    const double u = std::max(lo, seg.lo());
    const double v = std::min(hi, seg.hi());
    if (u < v && !seg.is_constant()) sum += take(seg.increment(v) - seg.increment(u));
  }
  for (const Jump& j : data_->jumps) {
    if (j.at >= hi) break;
    if (j.at >= lo) sum += take(j.delta);
  }
  return sum;
}

StructuralSets Derivator::structural_sets() const {
  StructuralSets out;
  for (const Jump& j : data_->jumps) (j.delta > 0.0 ? out.d_plus : out.d_minus).push_back(j.at);
  const auto& segs = data_->segments;
  std::vector<bool> interior_to_c(segs.size() + 1, false);
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const Segment& seg = segs[i];
    const OpenInterval piece{seg.lo(), seg.hi()};
    switch (seg.direction()) {
      case Direction::nondecreasing: out.lambda_plus.push_back(piece); break;
      case Direction::nonincreasing: out.lambda_minus.push_back(piece); break;
      case Direction::constant:
        if (i > 0 && segs[i - 1].is_constant() && !is_jump(seg.lo())) {
          out.constant.back().hi = seg.hi();
          interior_to_c[i] = true;
        } else {
          out.constant.push_back(piece);
        }
        break;
    }
  }
  for (std::size_t i = 0; i < segs.size(); ++i)
    if (!interior_to_c[i]) out.f_set.push_back(segs[i].lo());
  out.f_set.push_back(data_->b);
  return out;
}

bool Derivator::is_derivative_point(double t) const noexcept {
  if (!(t >= data_->a && t <= data_->b)) return false;
  if (is_jump(t)) return true;
  const auto& segs = data_->segments;
  const std::size_t i = t == data_->a
                            ? 0
                            : static_cast<std::size_t>(
                                  std::lower_bound(data_->his.begin(), data_->his.end(), t) -
                                  data_->his.begin());
  const Segment& seg = segs[i];
  if (t == seg.lo() || t == seg.hi()) return false;
  return !seg.is_constant();
}

std::vector<double> Derivator::breakpoints() const {
  std::vector<double> out;
  out.reserve(data_->segments.size() + 1);
  for (const Segment& seg : data_->segments) out.push_back(seg.lo());
  out.push_back(data_->b);
  return out;
}

std::vector<double> segment_grid(const Derivator& g, std::size_t points_per_segment) {
  return segment_grid(g, points_per_segment, g.a(), g.b());
}

std::vector<double> segment_grid(const Derivator& g, std::size_t points_per_segment, double lo,
                                 double hi) {
  if (points_per_segment < 2) throw std::invalid_argument("need at least 2 points per segment");
  if (!(lo >= g.a() && hi <= g.b() && lo < hi))
    throw DomainError("grid span outside derivator interval");
  std::vector<double> breaks{lo};
  for (double p : g.breakpoints())
    if (p > lo && p < hi) breaks.push_back(p);
  breaks.push_back(hi);
  return refine_breakpoints(breaks, points_per_segment - 1);
}

}  // namespace stieltjes
