#include "stieltjes/plume.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "stieltjes/errors.hpp"

namespace stieltjes {
namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void PlumeParams::validate() const {
  if (!(alpha > 0.0) || !(lambda > 0.0) || !(gravity > 0.0) || !(rho_b > 0.0))
    throw std::invalid_argument("plume parameters must be positive");
}

AmbientDensity AmbientDensity::two_layer(double z0, double z1, double L, double rho_below,
                                         double delta_rho) {
  if (!(L > z0 && L < z1)) throw std::invalid_argument("interface height must lie inside (z0, z1)");
  std::vector<Segment> segments{Segment(z0, z1, ConstantProfile{})};
  std::vector<Jump> jumps;
  if (delta_rho != 0.0) jumps.push_back({L, delta_rho});
  AmbientDensity amb{Derivator(z0, z1, rho_below, std::move(segments), std::move(jumps)),
                     "two-layer: rho = " + fmt(rho_below) + " below z = " + fmt(L) +
                         ", jump " + fmt(delta_rho) + " above"};
  amb.validate();
  return amb;
}

AmbientDensity AmbientDensity::linear(double z0, double z1, double rho0, double slope) {
  std::vector<Segment> segments{
      Segment(z0, z1, slope == 0.0 ? Profile{ConstantProfile{}} : Profile{LinearProfile{slope}})};
  AmbientDensity amb{Derivator(z0, z1, rho0, std::move(segments)),
                     "linear: rho = " + fmt(rho0) + " + " + fmt(slope) + " (z - " + fmt(z0) + ")"};
  amb.validate();
  return amb;
}

void AmbientDensity::validate() const {
  // Segments are monotone, so extremes sit at breakpoints or their right limits.
  for (double z : rho.breakpoints())
    if (!(rho.eval(z) > 0.0) || !(rho.eval_right(z) > 0.0))
      throw std::invalid_argument("ambient density must stay positive");
}

SystemSpec build_plume_system(const PlumeParams& p, const AmbientDensity& amb, double q0,
                              double m0, double beta0) {
  p.validate();
  amb.validate();
  if (!(q0 > 0.0) || !(m0 > 0.0) || !(beta0 > 0.0))
    throw DomainError("plume initial fluxes must be positive");
  const double a = amb.rho.a();
  const double b = amb.rho.b();
  const double A = p.A();
  const double B = p.B();
  const double C = p.C();
  SystemSpec spec;
  spec.derivators = {Derivator::identity(a, b), Derivator::identity(a, b), amb.rho};
  spec.rhs = [A, B, C](double, std::span<const double> x) {
    return std::vector<double>{A * std::pow(x[1], 0.25), B * x[0] * x[2], C * x[0]};
  };
  spec.initial = {q0, m0, beta0};
  spec.horizon = b - a;
  return spec;
}

PlumeRun run_plume(const PlumeParams& p, const AmbientDensity& amb, double q0, double m0,
                   double beta0, PlumeConfig config) {
  const SystemSpec spec = build_plume_system(p, amb, q0, m0, beta0);
  if (!(config.radius > 0.0) || !(config.radius < m0))
    throw std::invalid_argument("plume radius must lie in (0, m0)");
  config.solve.step.safety_radius = config.radius;
  config.solve.step.halt_outside_ball = true;

  PlumeRun out{solve(spec, config.solve), {}};
  PlumeAudit& audit = out.audit;
  const SolverRun& run = out.report.run;
  if (run.halted)
    audit.warnings.push_back("positivity: state left the ball of radius " + fmt(config.radius) +
                             " < m0 at z = " + fmt(*run.left_ball_at) +
                             "; run stopped before m^(1/4) could lose Lipschitz character");

  const Trajectory& q = run.components[0];
  const Trajectory& m = run.components[1];
  const Trajectory& beta = run.components[2];
  const double C = p.C();
  const double eps = std::numeric_limits<double>::epsilon();
  for (const Jump& j : amb.rho.jumps()) {
    if (j.at >= beta.back_time()) continue;
    PlumeJumpRow row;
    row.at = j.at;
    row.delta_rho = j.delta;
    row.q_left = q.value(j.at);
    row.q_right = q.right_value(j.at);
    row.m_left = m.value(j.at);
    row.m_right = m.right_value(j.at);
    const double beta_left = beta.value(j.at);
    const double beta_right = beta.right_value(j.at);
    row.beta_jump = beta_right - beta_left;
    const double increment = C * row.q_left * j.delta;
    row.expected_jump = increment;
    const double scale = std::max({std::abs(beta_left), std::abs(beta_right), std::abs(increment)});
    row.pass = row.q_left == row.q_right && row.m_left == row.m_right &&
               std::abs(row.beta_jump - increment) <= 4.0 * eps * scale;
    audit.pass = audit.pass && row.pass;
    audit.jumps.push_back(row);
  }
  const auto qv = q.left_values();
  for (std::size_t k = 1; k < qv.size(); ++k)
    if (!(qv[k] > qv[k - 1])) audit.q_increasing = false;
  audit.pass = audit.pass && audit.q_increasing;
  return out;
}

std::vector<PlumeRow> plume_profile(const std::vector<Trajectory>& state) {
  if (state.size() != 3) throw std::invalid_argument("plume profile needs (q, m, beta)");
  const auto grid = state[0].grid();
  std::vector<PlumeRow> rows;
  auto make = [](double z, char side, double q, double m, double beta) {
    PlumeRow r{z, side, q, m, beta, 0.0, 0.0, 0.0};
    r.b = q * std::pow(m, -0.25);
    r.w = std::sqrt(m) / q;
    r.theta = beta / q;
    return r;
  };
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double ql = state[0].left_values()[k];
    const double ml = state[1].left_values()[k];
    const double bl = state[2].left_values()[k];
    rows.push_back(make(grid[k], 'L', ql, ml, bl));
    const double qr = state[0].right_values()[k];
    const double mr = state[1].right_values()[k];
    const double br = state[2].right_values()[k];
    if (qr != ql || mr != ml || br != bl || state[2].governing().is_jump(grid[k]))
      if (k + 1 < grid.size()) rows.push_back(make(grid[k], 'R', qr, mr, br));
  }
  return rows;
}

}  // namespace stieltjes
