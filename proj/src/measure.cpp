#include "stieltjes/measure.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "stieltjes/errors.hpp"

namespace stieltjes {

Integrand Integrand::constant(double value) {
  return Integrand([value](double) { return value; }, Kind::piecewise_poly);
}

Integrand Integrand::polynomial(std::vector<double> coefficients) {
  return Integrand(
      [c = std::move(coefficients)](double t) {
        double acc = 0.0;
        for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * t + *it;
        return acc;
      },
      Kind::piecewise_poly);
}

Integrand Integrand::tabulated(std::vector<std::pair<double, double>> points) {
  if (points.empty()) throw std::invalid_argument("tabulated integrand needs samples");
  for (std::size_t i = 1; i < points.size(); ++i)
    if (!(points[i].first > points[i - 1].first))
      throw std::invalid_argument("tabulated integrand abscissae must increase strictly");
  return Integrand(
      [p = std::move(points)](double t) {
        if (t <= p.front().first) return p.front().second;
        if (t >= p.back().first) return p.back().second;
        auto it = std::lower_bound(p.begin(), p.end(), t,
                                   [](const auto& q, double x) { return q.first < x; });
        const auto& [t1, v1] = *it;
        const auto& [t0, v0] = *std::prev(it);
        return v0 + (v1 - v0) * ((t - t0) / (t1 - t0));
      },
      Kind::tabulated);
}

std::string to_string(Signature s) {
  switch (s) {
    case Signature::signed_measure: return "signed";
    case Signature::positive_part: return "positive";
    case Signature::negative_part: return "negative";
    case Signature::total_variation: return "total";
  }
  return "unknown";
}

double StieltjesMeasure::atom_weight(double delta) const noexcept {
  switch (signature_) {
    case Signature::signed_measure: return delta;
    case Signature::positive_part: return std::max(delta, 0.0);
    case Signature::negative_part: return std::max(-delta, 0.0);
    case Signature::total_variation: return std::abs(delta);
  }
  return 0.0;
}

double StieltjesMeasure::segment_sign(Direction d) const noexcept {
  if (d == Direction::constant) return 0.0;
  const bool up = d == Direction::nondecreasing;
  switch (signature_) {
    case Signature::signed_measure: return 1.0;
    case Signature::positive_part: return up ? 1.0 : 0.0;
    case Signature::negative_part: return up ? 0.0 : -1.0;
    case Signature::total_variation: return up ? 1.0 : -1.0;
  }
  return 0.0;
}

double StieltjesMeasure::interval(double lo, double hi, IntervalShape shape) const {
  if (shape != IntervalShape::closed_open)
    throw std::invalid_argument("only [lo, hi) intervals are supported");
  if (!(lo >= g_.a() && hi <= g_.b())) throw DomainError("interval outside derivator domain");
  if (lo > hi) throw DomainError("interval has lo > hi");
  if (lo == hi) return 0.0;
  switch (signature_) {
    case Signature::signed_measure: return g_.eval(hi) - g_.eval(lo);
    case Signature::positive_part: return g_.variation(lo, hi, VariationKind::positive);
    case Signature::negative_part: return g_.variation(lo, hi, VariationKind::negative);
    case Signature::total_variation: return g_.variation(lo, hi, VariationKind::total);
  }
  return 0.0;
}

double StieltjesMeasure::point(double t) const {
  if (!(t >= g_.a() && t < g_.b())) throw DomainError("point outside [a, b)");
  return atom_weight(g_.jump_at(t));
}

double StieltjesMeasure::integrate_continuous(const Integrand& f, double lo, double hi,
                                              const QuadratureOptions& options) const {
  if (!(lo >= g_.a() && hi <= g_.b())) throw DomainError("integration range outside domain");
  if (lo > hi) throw DomainError("integration range has lo > hi");
  double sum = 0.0;
  for (const Segment& seg : g_.segments()) {
    if (seg.hi() <= lo) continue;
    if (seg.lo() >= hi) break;
    const double sign = segment_sign(seg.direction());
    if (sign == 0.0) continue;
    const double u = std::max(lo, seg.lo());
    const double v = std::min(hi, seg.hi());
    if (u < v) sum += sign * seg.integrate(f.function(), u, v, options);
  }
  return sum;
}

double StieltjesMeasure::integrate_atoms(const Integrand& f, double lo, double hi) const {
  double sum = 0.0;
  for (const Jump& j : g_.jumps()) {
    if (j.at >= hi) break;
    if (j.at < lo) continue;
    const double w = atom_weight(j.delta);
    if (w != 0.0) sum += f(j.at) * w;
  }
  return sum;
}

double StieltjesMeasure::integrate(const Integrand& f, double lo, double hi,
                                   const QuadratureOptions& options) const {
  return integrate_continuous(f, lo, hi, options) + integrate_atoms(f, lo, hi);
}

HahnReport hahn_check(const StieltjesMeasure& m, std::span<const Range> intervals,
                      double tolerance) {
  const Derivator& g = m.derivator();
  const StructuralSets sets = g.structural_sets();
  const StieltjesMeasure pos(g, Signature::positive_part);
  const StieltjesMeasure neg(g, Signature::negative_part);

  // mu_g of (l, r) ∩ [lo, hi): the open pieces carry no atoms, so only the
  // continuous increment g(v) - g(u+) remains.
  auto signed_on = [&](const std::vector<OpenInterval>& pieces, double lo, double hi) {
    double sum = 0.0;
    for (const OpenInterval& piece : pieces) {
      const double u = std::max(piece.lo, lo);
      const double v = std::min(piece.hi, hi);
      if (u < v) sum += g.eval(v) - g.eval_right(u);
    }
    return sum;
  };
  auto atoms_on = [&](const std::vector<double>& points, double lo, double hi) {
    double sum = 0.0;
    for (double t : points)
      if (t >= lo && t < hi) sum += g.jump_at(t);
    return sum;
  };

  HahnReport report;
  for (const Range& e : intervals) {
    HahnRow row{e.lo, e.hi};
    const double plus = signed_on(sets.lambda_plus, e.lo, e.hi) + atoms_on(sets.d_plus, e.lo, e.hi);
    const double minus =
        -(signed_on(sets.lambda_minus, e.lo, e.hi) + atoms_on(sets.d_minus, e.lo, e.hi));
    row.positive_residual = std::abs(pos.interval(e.lo, e.hi) - plus);
    row.negative_residual = std::abs(neg.interval(e.lo, e.hi) - minus);
    row.pass = row.positive_residual < tolerance && row.negative_residual < tolerance;
    report.pass = report.pass && row.pass;
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace stieltjes
