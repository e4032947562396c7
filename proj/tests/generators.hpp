#pragma once

#include <algorithm>
#include <cstddef>
#include <random>
#include <utility>
#include <vector>

#include "stieltjes/derivator.hpp"

namespace gen {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int integer(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline double signed_magnitude(Rng& rng, double lo, double hi) {
  const double m = uniform(rng, lo, hi);
  return integer(rng, 0, 1) ? m : -m;
}

struct DerivatorOptions {
  int max_segments = 5;
  int max_jumps = 3;
  bool constant_segments = true;
  bool tabulated_segments = true;
  bool power_segments = true;
};

inline stieltjes::Profile random_profile(Rng& rng, const DerivatorOptions& opt, double lo,
                                         double hi) {
  using namespace stieltjes;
  for (;;) {
    switch (integer(rng, 0, 3)) {
      case 0:
        return LinearProfile{signed_magnitude(rng, 0.1, 3.0)};
      case 1:
        if (!opt.power_segments) break;
        return PowerProfile{uniform(rng, 0.4, 2.5), signed_magnitude(rng, 0.2, 2.0)};
      case 2:
        if (!opt.constant_segments) break;
        return ConstantProfile{};
      default: {
        if (!opt.tabulated_segments) break;
        const int knots = integer(rng, 1, 4);
        std::vector<double> xs;
        for (int i = 0; i < knots - 1; ++i) xs.push_back(uniform(rng, lo, hi));
        std::sort(xs.begin(), xs.end());
        xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
        xs.push_back(hi);
        const double sign = integer(rng, 0, 1) ? 1.0 : -1.0;
        TabulatedProfile p;
        double value = 0.0;
        for (double x : xs) {
          if (x <= lo) continue;
          value += sign * uniform(rng, 0.05, 1.0);
          p.points.emplace_back(x, value);
        }
        return p;
      }
    }
  }
}

/// Random finite derivator on a random interval. Jumps land on segment
/// boundaries or inside segments with equal probability.
inline stieltjes::Derivator derivator(Rng& rng, const DerivatorOptions& opt = {}) {
  using namespace stieltjes;
  const double a = uniform(rng, -1.0, 1.0);
  const double b = a + uniform(rng, 0.5, 2.0);
  const int pieces = integer(rng, 1, opt.max_segments);
  std::vector<double> cuts{a, b};
  for (int i = 1; i < pieces; ++i) cuts.push_back(uniform(rng, a, b));
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::vector<Segment> segments;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const Profile p = random_profile(rng, opt, cuts[i], cuts[i + 1]);
    std::optional<double> origin;
    if (std::holds_alternative<PowerProfile>(p) && integer(rng, 0, 1))
      origin = cuts[i] - uniform(rng, 0.0, 0.5);
    segments.emplace_back(cuts[i], cuts[i + 1], p, origin);
  }

  std::vector<Jump> jumps;
  const int n_jumps = integer(rng, 0, opt.max_jumps);
  for (int i = 0; i < n_jumps; ++i) {
    const double at = integer(rng, 0, 1) && cuts.size() > 2
                          ? cuts[static_cast<std::size_t>(integer(rng, 0, static_cast<int>(cuts.size()) - 2))]
                          : uniform(rng, a, b);
    const bool taken = std::any_of(jumps.begin(), jumps.end(), [&](const Jump& j) { return j.at == at; });
    if (!taken && at < b) jumps.push_back({at, signed_magnitude(rng, 0.1, 2.0)});
  }
  return Derivator(a, b, uniform(rng, -1.0, 1.0), std::move(segments), std::move(jumps));
}

/// Coefficients c_0..c_d of a random polynomial with degree at most max_degree.
inline std::vector<double> polynomial(Rng& rng, int max_degree = 3) {
  std::vector<double> c(static_cast<std::size_t>(integer(rng, 0, max_degree)) + 1);
  for (double& x : c) x = uniform(rng, -2.0, 2.0);
  return c;
}

inline double horner(const std::vector<double>& c, double t) {
  double v = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * t + *it;
  return v;
}

/// Random [lo, hi) inside [a, b], occasionally degenerate or touching the ends.
inline std::pair<double, double> subinterval(Rng& rng, double a, double b) {
  switch (integer(rng, 0, 9)) {
    case 0:
      return {a, b};
    case 1: {
      const double x = uniform(rng, a, b);
      return {x, x};
    }
    default: {
      double x = uniform(rng, a, b);
      double y = uniform(rng, a, b);
      if (x > y) std::swap(x, y);
      return {x, y};
    }
  }
}

}  // namespace gen
