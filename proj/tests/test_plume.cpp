#include <doctest.h>

#include <array>
#include <cmath>

#include "oracles.hpp"
#include "stieltjes/errors.hpp"
#include "stieltjes/plume.hpp"

using namespace stieltjes;

namespace {

PlumeConfig config(double radius, std::size_t mesh = 1024) {
  PlumeConfig c;
  c.radius = radius;
  c.solve.mesh = mesh;
  return c;
}

}  // namespace

TEST_CASE("parameter arithmetic") {
  const PlumeParams p;
  CHECK(p.A() == doctest::Approx(0.1666).epsilon(1e-14));
  CHECK(p.B() == doctest::Approx(56.5056).epsilon(1e-14));
  CHECK(p.Lambda() == doctest::Approx(3.5136).epsilon(1e-14));
  CHECK(p.C() == doctest::Approx(1.0 / 3513.6).epsilon(1e-14));
  CHECK(std::abs(p.C() - 2.8461e-4) < 1e-8);
  CHECK_NOTHROW(p.validate());
  PlumeParams bad;
  bad.rho_b = 0.0;
  CHECK_THROWS(bad.validate());
}

TEST_CASE("system construction") {
  const AmbientDensity amb = AmbientDensity::two_layer(0, 1, 0.5, 1000, -5);
  const SystemSpec s = build_plume_system(PlumeParams{}, amb, 1.0, 4.0, 0.01);
  CHECK(s.dimension() == 3);
  CHECK(s.horizon == 1.0);
  const double x[3] = {1.0, 16.0, 0.01};
  const auto f = s.rhs(0.2, x);
  CHECK(f[0] == doctest::Approx(0.1666 * 2.0));
  CHECK(f[1] == doctest::Approx(56.5056 * 0.01));
  CHECK(f[2] == doctest::Approx(1.0 / 3513.6));
  CHECK(s.derivators[2].jump_at(0.5) == -5.0);
  CHECK_THROWS_AS(build_plume_system(PlumeParams{}, amb, 0.0, 4.0, 0.01), DomainError);
  CHECK_THROWS_AS(build_plume_system(PlumeParams{}, amb, 1.0, -1.0, 0.01), DomainError);
  CHECK_THROWS(AmbientDensity::linear(0, 1, 10, -20).validate());
}

TEST_CASE("constant ambient density leaves beta untouched") {
  const AmbientDensity amb = AmbientDensity::two_layer(0, 1, 0.5, 1000, 0.0);
  const PlumeRun r = run_plume(PlumeParams{}, amb, 1.0, 4.0, 0.01, config(3.9));
  for (double v : r.report.run.components[2].left_values()) CHECK(v == 0.01);
  CHECK(r.audit.pass);
  CHECK(r.audit.q_increasing);
}

TEST_CASE("two-layer ambient: beta moves only at the interface") {
  const PlumeParams p;
  const AmbientDensity amb = AmbientDensity::two_layer(0, 1, 0.5, 1000, -5);
  const PlumeRun r = run_plume(p, amb, 1.0, 4.0, 0.01, config(3.9));
  const Trajectory& q = r.report.run.components[0];
  const Trajectory& m = r.report.run.components[1];
  const Trajectory& beta = r.report.run.components[2];
  for (std::size_t k = 0; k < beta.grid().size(); ++k) {
    const double z = beta.grid()[k];
    if (z <= 0.5) CHECK(beta.left_values()[k] == 0.01);
    if (z > 0.5) CHECK(beta.left_values()[k] == beta.right_value(0.5));
  }
  const double expected = p.C() * q.value(0.5) * -5.0;
  CHECK(std::abs(beta.right_value(0.5) - beta.value(0.5) - expected) <= 4 * 2.3e-16 * 0.01);
  CHECK(q.right_value(0.5) == q.value(0.5));
  CHECK(m.right_value(0.5) == m.value(0.5));

  REQUIRE(r.audit.jumps.size() == 1);
  const PlumeJumpRow& row = r.audit.jumps[0];
  CHECK(row.at == 0.5);
  CHECK(row.delta_rho == -5.0);
  CHECK(row.expected_jump == doctest::Approx(expected).epsilon(1e-15));
  CHECK(row.pass);
  CHECK(r.audit.pass);
  CHECK(r.audit.q_increasing);
}

TEST_CASE("linear stratification matches the classical system") {
  const PlumeParams p;
  const double slope = -5.0;
  const AmbientDensity amb = AmbientDensity::linear(0, 1, 1000, slope);
  const PlumeRun r = run_plume(p, amb, 1.0, 4.0, 0.01, config(3.9, 4096));
  CHECK(r.audit.pass);

  auto classical = [&](double, const std::array<double, 3>& y) {
    return std::array<double, 3>{p.A() * std::pow(y[1], 0.25), p.B() * y[0] * y[2], p.C() * y[0] * slope};
  };
  double worst = 0.0;
  const auto& solution = r.report.extrapolated;
  std::array<double, 3> y{1.0, 4.0, 0.01};
  double z = 0.0;
  for (double t : solution[0].grid()) {
    y = oracle::rk4<3>(classical, y, z, t, 4);
    z = t;
    for (std::size_t j = 0; j < 3; ++j) worst = std::max(worst, std::abs(solution[j].value(t) - y[j]));
  }
  CHECK(worst < 1e-4);
}

TEST_CASE("leaving the positivity ball halts the run") {
  const AmbientDensity amb = AmbientDensity::two_layer(0, 1, 0.5, 1000, -5);
  const PlumeRun r = run_plume(PlumeParams{}, amb, 1.0, 4.0, 0.01, config(0.05));
  CHECK(r.report.run.halted);
  CHECK_FALSE(r.audit.warnings.empty());
  CHECK_THROWS_AS(run_plume(PlumeParams{}, amb, 1.0, 4.0, 0.01, config(4.0)), std::invalid_argument);
}

TEST_CASE("profile back-computation") {
  const AmbientDensity amb = AmbientDensity::two_layer(0, 1, 0.5, 1000, -5);
  const PlumeRun r = run_plume(PlumeParams{}, amb, 1.0, 4.0, 0.01, config(3.9, 64));
  const auto rows = plume_profile(r.report.run.components);
  CHECK(rows.size() == r.report.run.components[0].grid().size() + 1);
  int right_rows = 0;
  for (const PlumeRow& row : rows) {
    right_rows += row.side == 'R';
    CHECK(row.b * row.b * row.w == doctest::Approx(row.q).epsilon(1e-13));
    CHECK(std::pow(row.b * row.w, 4) == doctest::Approx(row.m).epsilon(1e-13));
    CHECK(row.b * row.b * row.w * row.theta == doctest::Approx(row.beta).epsilon(1e-13));
  }
  CHECK(right_rows == 1);
}
