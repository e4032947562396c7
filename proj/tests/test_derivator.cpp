#include <doctest.h>

#include <cmath>

#include "generators.hpp"
#include "oracles.hpp"
#include "stieltjes/derivator.hpp"
#include "stieltjes/errors.hpp"

using namespace stieltjes;

namespace {

Derivator tent() {
  return Derivator(0.0, 1.0, 0.0,
                   {Segment(0.0, 0.5, LinearProfile{1.0}), Segment(0.5, 1.0, LinearProfile{-1.0})});
}

Derivator identity_with_jump(double at, double delta) {
  return Derivator(0.0, 1.0, 0.0, {Segment(0.0, 1.0, LinearProfile{1.0})}, {{at, delta}});
}

bool close_rel(double x, double y, double rel) {
  return std::abs(x - y) <= rel * std::max({1.0, std::abs(x), std::abs(y)});
}

}  // namespace

TEST_CASE("evaluation is left-continuous with jumps applied to the right") {
  const Derivator id = Derivator::identity(0.0, 1.0);
  CHECK(id.eval(0.7) == 0.7);
  const Derivator g = identity_with_jump(0.5, 2.0);
  CHECK(g.eval(0.5) == 0.5);
  CHECK(g.eval(0.8) == doctest::Approx(2.8).epsilon(1e-15));
  CHECK(g.eval_right(0.5) == 2.5);
  CHECK(g.eval_right(0.3) == g.eval(0.3));
  CHECK(g.eval_right(1.0) == g.eval(1.0));
  CHECK(g.eval(0.0) == g.anchor());
  CHECK_THROWS_AS(g.eval(1.5), DomainError);
  CHECK_THROWS_AS(g.eval_right(-0.1), DomainError);
}

TEST_CASE("variation of the tent map and of a negative jump") {
  const Derivator t = tent();
  CHECK(t.variation(0, 1) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(t.variation(0, 1, VariationKind::positive) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(t.variation(0, 1, VariationKind::negative) == doctest::Approx(0.5).epsilon(1e-15));
  const auto sup = oracle::dyadic_supremum([&](double x) { return t.eval(x); }, 0, 1, 12);
  CHECK(std::abs(sup.total - 1.0) < 1e-12);
  CHECK(std::abs(sup.positive - 0.5) < 1e-12);

  const Derivator g = identity_with_jump(0.4, -3.0);
  CHECK(g.variation(0, 1, VariationKind::negative) == doctest::Approx(3.0).epsilon(1e-15));
  const auto sup2 = oracle::dyadic_supremum([&](double x) { return g.eval(x); }, 0, 1, 16);
  CHECK(std::abs(sup2.negative - 3.0) < 1e-4);

  const Derivator c = Derivator::constant(0, 1, 4.0);
  CHECK(c.variation(0, 1) == 0.0);
  CHECK(c.variation(0, 1, VariationKind::positive) == 0.0);
  CHECK(c.variation(0, 1, VariationKind::negative) == 0.0);
  CHECK_THROWS_AS(g.variation(0.6, 0.2), DomainError);
}

TEST_CASE("structural sets read off the construction") {
  const StructuralSets t = tent().structural_sets();
  REQUIRE(t.lambda_plus.size() == 1);
  CHECK(t.lambda_plus[0] == OpenInterval{0.0, 0.5});
  REQUIRE(t.lambda_minus.size() == 1);
  CHECK(t.lambda_minus[0] == OpenInterval{0.5, 1.0});
  CHECK(t.d_plus.empty());
  CHECK(t.d_minus.empty());
  CHECK(t.constant.empty());

  const StructuralSets j = identity_with_jump(0.5, 2.0).structural_sets();
  CHECK(j.d_plus == std::vector<double>{0.5});
  REQUIRE(j.lambda_plus.size() == 2);
  CHECK(j.lambda_plus[0] == OpenInterval{0.0, 0.5});
  CHECK(j.lambda_plus[1] == OpenInterval{0.5, 1.0});

  const StructuralSets c = Derivator::constant(0, 1, 1.0).structural_sets();
  REQUIRE(c.constant.size() == 1);
  CHECK(c.constant[0] == OpenInterval{0.0, 1.0});
  CHECK(c.lambda_plus.empty());
  CHECK(c.lambda_minus.empty());
}

TEST_CASE("adjacent constant segments merge unless a jump separates them") {
  const Derivator g(0, 3, 0,
                    {Segment(0, 1, ConstantProfile{}), Segment(1, 2, ConstantProfile{}),
                     Segment(2, 3, ConstantProfile{})},
                    {{2.0, 1.0}});
  const StructuralSets s = g.structural_sets();
  REQUIRE(s.constant.size() == 2);
  CHECK(s.constant[0] == OpenInterval{0, 2});
  CHECK(s.constant[1] == OpenInterval{2, 3});
  CHECK_FALSE(g.is_derivative_point(1.0));
  CHECK(g.is_derivative_point(2.0));
}

TEST_CASE("construction rejects malformed input") {
  CHECK_THROWS(Derivator(0, 1, 0, {Segment(0, 0.4, LinearProfile{1}), Segment(0.5, 1, LinearProfile{1})}));
  CHECK_THROWS(Derivator(0, 1, 0, {Segment(0, 1, LinearProfile{1})}, {{1.0, 1.0}}));
  CHECK_THROWS(Derivator(0, 1, 0, {Segment(0, 1, LinearProfile{1})}, {{0.5, 0.0}}));
  CHECK_THROWS(Derivator(0, 1, 0, {Segment(0, 1, LinearProfile{1})}, {{0.5, 1.0}, {0.5, 2.0}}));
  CHECK_THROWS(Segment(1, 0, LinearProfile{1}));
  CHECK_THROWS(Segment(0, 1, TabulatedProfile{{{0.5, 1.0}, {0.8, 0.5}, {1.0, 2.0}}}));
  CHECK_THROWS(Segment(0, 1, TabulatedProfile{{{0.5, 1.0}, {0.8, 2.0}}}));
}

TEST_CASE("interior jumps split segments without changing the curve") {
  const Derivator g(0, 2, 1.0, {Segment(0, 2, PowerProfile{0.5, 2.0})}, {{0.7, -0.25}});
  REQUIRE(g.segments().size() == 2);
  CHECK(g.segments()[1].origin() == 0.0);
  for (double t : {0.1, 0.5, 0.7, 1.0, 1.9, 2.0}) {
    const double expected = 1.0 + 2.0 * std::sqrt(t) + (t > 0.7 ? -0.25 : 0.0);
    CHECK(std::abs(g.eval(t) - expected) < 1e-14);
  }
}

TEST_CASE("tabulated profiles interpolate linearly through their knots") {
  const Segment s(0, 1, TabulatedProfile{{{0.25, 1.0}, {0.5, 1.5}, {1.0, 2.0}}});
  CHECK(s.increment(0.125) == doctest::Approx(0.5));
  CHECK(s.increment(0.375) == doctest::Approx(1.25));
  CHECK(s.increment(1.0) == doctest::Approx(2.0));
  CHECK(s.direction() == Direction::nondecreasing);
  CHECK(s.kinks() == std::vector<double>{0.25, 0.5});
}

TEST_CASE("property: Jordan split, additivity, jump exactness and left-continuity") {
  gen::Rng rng(20240611);
  for (int trial = 0; trial < 300; ++trial) {
    const Derivator g = gen::derivator(rng);
    const double a = g.a();
    const double b = g.b();
    for (int k = 0; k < 5; ++k) {
      double x = gen::uniform(rng, a, b);
      double z = gen::uniform(rng, a, b);
      if (x > z) std::swap(x, z);
      const double y = gen::uniform(rng, x, z);
      const double tot = g.variation(x, z);
      const double pos = g.variation(x, z, VariationKind::positive);
      const double neg = g.variation(x, z, VariationKind::negative);
      CHECK(close_rel(tot, pos + neg, 1e-12));
      for (VariationKind kind : {VariationKind::total, VariationKind::positive, VariationKind::negative})
        CHECK(close_rel(g.variation(x, z, kind), g.variation(x, y, kind) + g.variation(y, z, kind), 1e-12));
    }
    for (const Jump& j : g.jumps()) {
      CHECK(g.jump_at(j.at) == j.delta);
      const double scale = std::max(std::abs(g.eval(j.at)), std::abs(g.eval_right(j.at)));
      CHECK(std::abs(g.eval_right(j.at) - g.eval(j.at) - j.delta) <= 2 * 2.3e-16 * scale);
    }
    for (int k = 0; k < 5; ++k) {
      const double t = gen::uniform(rng, a, b);
      const double gap1 = std::abs(g.eval(std::max(a, t - 1e-6)) - g.eval(t));
      const double gap2 = std::abs(g.eval(std::max(a, t - 1e-10)) - g.eval(t));
      CHECK(gap2 <= gap1 + 1e-12);
      CHECK(gap2 < 1e-3);
    }
  }
}

TEST_CASE("property: variation agrees with the dyadic partition supremum") {
  gen::Rng rng(7);
  for (int trial = 0; trial < 40; ++trial) {
    const Derivator g = gen::derivator(rng);
    const auto sup = oracle::dyadic_supremum([&](double t) { return g.eval(t); }, g.a(), g.b(), 16);
    const double tot = g.variation(g.a(), g.b());
    // Partition sums never exceed the variation and close in as the mesh shrinks.
    CHECK(sup.total <= tot * (1 + 1e-12) + 1e-12);
    CHECK(tot - sup.total < 2e-3 * (1 + tot));
  }
}

TEST_CASE("property: monotone derivators have variation equal to their increment") {
  gen::Rng rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const double a = 0.0;
    const double b = 1.0 + gen::uniform(rng, 0, 1);
    const double cut = gen::uniform(rng, a + 0.1, b - 0.1);
    const Derivator g(a, b, 0.0,
                      {Segment(a, cut, LinearProfile{gen::uniform(rng, 0.1, 2)}),
                       Segment(cut, b, PowerProfile{gen::uniform(rng, 0.4, 2), gen::uniform(rng, 0.1, 2)})},
                      {{gen::uniform(rng, a, b), gen::uniform(rng, 0.1, 1)}});
    const double x = gen::uniform(rng, a, b);
    const double y = gen::uniform(rng, x, b);
    CHECK(close_rel(g.variation(x, y), g.eval(y) - g.eval(x), 1e-12));
  }
}

TEST_CASE("breakpoint refinement inserts equal cells between breakpoints") {
  const auto grid = refine_breakpoints({0.0, 1.0, 3.0}, 4);
  REQUIRE(grid.size() == 9);
  CHECK(grid[1] == 0.25);
  CHECK(grid[4] == 1.0);
  CHECK(grid[6] == 2.0);
  CHECK(grid.back() == 3.0);
}
