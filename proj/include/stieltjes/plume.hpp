#pragma once

#include <string>
#include <vector>

#include "stieltjes/derivator.hpp"
#include "stieltjes/solver.hpp"

namespace stieltjes {

/// Entrainment model parameters. The defaults are illustrative values in the
/// usual range for laboratory plumes, not measured data.
struct PlumeParams {
  double alpha = 0.0833;
  double lambda = 1.2;
  double gravity = 9.81;
  double rho_b = 1000.0;

  double Lambda() const { return lambda * lambda * (1.0 + lambda * lambda); }
  double A() const { return 2.0 * alpha; }
  double B() const { return 4.0 * gravity * lambda * lambda; }
  double C() const { return 1.0 / (Lambda() * rho_b); }
  void validate() const;
};

struct AmbientDensity {
  Derivator rho;
  std::string description;

  /// rho_below on [z0, L], rho_below + delta_rho above L.
  static AmbientDensity two_layer(double z0, double z1, double L, double rho_below,
                                  double delta_rho);
  /// rho(z) = rho0 + slope * (z - z0).
  static AmbientDensity linear(double z0, double z1, double rho0, double slope);
  /// Throws std::invalid_argument unless rho stays positive.
  void validate() const;
};

/// State (q, m, beta) with derivators (identity, identity, rho) and right-hand
/// side (A m^(1/4), B q beta, C q) over the whole height interval.
SystemSpec build_plume_system(const PlumeParams& p, const AmbientDensity& amb, double q0,
                              double m0, double beta0);

struct PlumeConfig {
  SolveConfig solve;
  /// Safety radius around the initial state; must be below m0.
  double radius = 0.0;
};

struct PlumeJumpRow {
  double at = 0.0;
  double delta_rho = 0.0;
  double q_left = 0.0;
  double q_right = 0.0;
  double m_left = 0.0;
  double m_right = 0.0;
  double beta_jump = 0.0;
  /// C q(L) delta_rho
  double expected_jump = 0.0;
  bool pass = false;
};

struct PlumeAudit {
  std::vector<PlumeJumpRow> jumps;
  bool q_increasing = true;
  bool pass = true;
  std::vector<std::string> warnings;
};

struct PlumeRun {
  SolutionReport report;
  PlumeAudit audit;
};

PlumeRun run_plume(const PlumeParams& p, const AmbientDensity& amb, double q0, double m0,
                   double beta0, PlumeConfig config);

/// One output row; jump times appear twice, left value first.
struct PlumeRow {
  double z = 0.0;
  char side = 'L';
  double q = 0.0;
  double m = 0.0;
  double beta = 0.0;
  /// Width, velocity and density anomaly recovered from q = b^2 w,
  /// m = b^4 w^4, beta = b^2 w theta.
  double b = 0.0;
  double w = 0.0;
  double theta = 0.0;
};

std::vector<PlumeRow> plume_profile(const std::vector<Trajectory>& state);

}  // namespace stieltjes
