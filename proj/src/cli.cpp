#include "stieltjes/cli.hpp"

#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "stieltjes/errors.hpp"
#include "stieltjes/gcalc.hpp"
#include "stieltjes/gexp.hpp"
#include "stieltjes/io.hpp"
#include "stieltjes/plume.hpp"
#include "stieltjes/solver.hpp"

namespace stieltjes {
namespace {

using io::json;

/// Raised after outputs are written when the run itself did not succeed.
struct NumericalFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Emitter {
  std::ostream& out;
  std::string path;

  void write(const std::string& content) const {
    if (path.empty())
      out << content;
    else
      io::write_atomic(path, content);
  }
  void write(const json& j) const { write(j.dump(2) + "\n"); }
};

struct FunctionSource {
  std::string file;
  std::optional<double> constant;

  void add(CLI::App* app, const std::string& name, const std::string& what) {
    app->add_option("--" + name, file, what + " (JSON file)");
    app->add_option("--constant", constant, what + " as a constant");
  }
  Integrand resolve(const std::string& name) const {
    if (!file.empty() && constant) throw io::SpecError("--" + name, "give a file or --constant, not both");
    if (constant) return Integrand::constant(*constant);
    if (file.empty()) throw io::SpecError("--" + name, "a function is required (file or --constant)");
    return io::parse_integrand(io::read_json_file(file), file);
  }
};

Signature parse_signature(const std::string& s) {
  if (s == "signed") return Signature::signed_measure;
  if (s == "positive") return Signature::positive_part;
  if (s == "negative") return Signature::negative_part;
  return Signature::total_variation;
}

json audit_json(const std::vector<JumpAuditRow>& rows) {
  json out = json::array();
  for (const JumpAuditRow& r : rows)
    out.push_back({{"component", r.component + 1},
                   {"t", r.at},
                   {"left", r.left},
                   {"right", r.right},
                   {"rhs", r.rhs},
                   {"delta", r.delta},
                   {"residual", r.residual},
                   {"pass", r.pass}});
  return out;
}

json report_json(const SolutionReport& r) {
  json out;
  out["horizon"] = r.horizon;
  out["error_estimate"] = std::isnan(r.error_estimate) ? json(nullptr) : json(r.error_estimate);
  out["converged"] = r.converged;
  out["iterations"] = r.run.iterations;
  out["last_change"] = r.run.last_change;
  out["halted"] = r.run.halted;
  out["jump_audit"] = audit_json(r.run.jump_audit);
  out["simultaneous_jumps"] = r.run.simultaneous_jumps;
  out["warnings"] = r.warnings;
  return out;
}

std::string plume_csv(const std::vector<PlumeRow>& rows) {
  std::ostringstream out;
  out << "z,side,q,m,beta,b,w,theta\n";
  for (const PlumeRow& r : rows) {
    out << io::format_double(r.z) << ',' << r.side;
    for (double v : {r.q, r.m, r.beta, r.b, r.w, r.theta}) out << ',' << io::format_double(v);
    out << '\n';
  }
  return out.str();
}

json error_json(const std::string& kind, const std::string& message) {
  return {{"error", kind}, {"message", message}};
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Stieltjes differential equations toolkit"};
  app.require_subcommand(1, 1);
  app.fallthrough();
  std::string output;
  app.add_option("-o,--output", output, "write the result here instead of standard output");

  // decompose
  std::string input;
  auto* decompose = app.add_subcommand("decompose", "structural sets and variations of a derivator");
  decompose->add_option("derivator", input, "derivator JSON")->required();

  // integrate
  FunctionSource integrand;
  std::optional<double> lo;
  std::optional<double> hi;
  std::string signature = "signed";
  auto* integrate = app.add_subcommand("integrate", "integral of a function over [lo, hi)");
  integrate->add_option("derivator", input, "derivator JSON")->required();
  integrand.add(integrate, "integrand", "integrand");
  integrate->add_option("--lo", lo, "lower end (default a)");
  integrate->add_option("--hi", hi, "upper end (default b)");
  integrate->add_option("--signature", signature, "measure to use")
      ->check(CLI::IsMember({"signed", "positive", "negative", "total"}));

  // derive
  FunctionSource function;
  std::vector<double> points;
  auto* derive = app.add_subcommand("derive", "g-derivative of a function at given points");
  derive->add_option("derivator", input, "derivator JSON")->required();
  function.add(derive, "function", "function to differentiate");
  derive->add_option("--at", points, "evaluation points")->required();

  // ftc-check
  FunctionSource density;
  std::size_t grid_hint = 256;
  double threshold = 1e-6;
  auto* ftc = app.add_subcommand("ftc-check", "differentiate a primitive and integrate it back");
  ftc->add_option("derivator", input, "derivator JSON")->required();
  density.add(ftc, "integrand", "density v of the primitive");
  ftc->add_option("--grid-hint", grid_hint, "grid points per segment")->check(CLI::Range(2, 1 << 20));
  ftc->add_option("--threshold", threshold, "pass threshold")->check(CLI::PositiveNumber);

  // exp
  FunctionSource coefficient;
  std::string format = "csv";
  auto* exp = app.add_subcommand("exp", "g-exponential of a coefficient");
  exp->add_option("derivator", input, "derivator JSON")->required();
  coefficient.add(exp, "coefficient", "coefficient c");
  exp->add_option("--grid-hint", grid_hint, "grid points per segment")->check(CLI::Range(2, 1 << 20));
  exp->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

  // solve
  std::size_t mesh = 1024;
  bool picard = false;
  double tol = 1e-12;
  std::size_t max_iter = 100;
  bool extrapolated = false;
  std::string report_path;
  auto* solve_cmd = app.add_subcommand("solve", "solve a system of Stieltjes differential equations");
  solve_cmd->add_option("system", input, "system JSON")->required();
  solve_cmd->add_option("--mesh", mesh, "cells per breakpoint gap")->check(CLI::Range(1, 1 << 24));
  solve_cmd->add_flag("--picard", picard, "refine by Picard iteration");
  solve_cmd->add_option("--tol", tol, "Picard stopping tolerance")->check(CLI::PositiveNumber);
  solve_cmd->add_option("--max-iter", max_iter, "Picard iteration cap")->check(CLI::Range(1, 1 << 20));
  solve_cmd->add_flag("--extrapolated", extrapolated, "emit the mesh-doubling extrapolation");
  solve_cmd->add_option("--report", report_path, "also write the JSON report here");
  solve_cmd->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

  // plume
  std::string config_path;
  std::string ambient_path;
  PlumeParams params;
  std::optional<double> q0;
  std::optional<double> m0;
  std::optional<double> beta0;
  std::optional<double> radius;
  auto* plume = app.add_subcommand("plume", "plume through a stratified ambient");
  plume->add_option("--config", config_path, "plume JSON (params, ambient, initial, radius)");
  plume->add_option("--ambient", ambient_path, "ambient density derivator JSON");
  plume->add_option("--alpha", params.alpha, "entrainment coefficient");
  plume->add_option("--lambda", params.lambda, "mixing coefficient");
  plume->add_option("--gravity", params.gravity, "gravitational acceleration");
  plume->add_option("--rho-b", params.rho_b, "reference density");
  plume->add_option("--q0", q0, "initial volume flux");
  plume->add_option("--m0", m0, "initial momentum flux");
  plume->add_option("--beta0", beta0, "initial buoyancy flux");
  plume->add_option("--radius", radius, "safety radius, below m0");
  plume->add_option("--mesh", mesh, "cells per breakpoint gap")->check(CLI::Range(1, 1 << 24));
  plume->add_flag("--picard", picard, "refine by Picard iteration");
  plume->add_option("--report", report_path, "also write the JSON report here");
  plume->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << error_json("validation", e.what()).dump() << "\n";
    return 1;
  }

  const Emitter emit{out, output};
  try {
    if (decompose->parsed()) {
      emit.write(io::decompose_json(io::parse_derivator(io::read_json_file(input), input)));
    } else if (integrate->parsed()) {
      const Derivator g = io::parse_derivator(io::read_json_file(input), input);
      const Integrand f = integrand.resolve("integrand");
      const StieltjesMeasure mu(g, parse_signature(signature));
      const double a = lo.value_or(g.a());
      const double b = hi.value_or(g.b());
      json j;
      j["signature"] = to_string(mu.signature());
      j["lo"] = a;
      j["hi"] = b;
      j["value"] = mu.integrate(f, a, b);
      j["continuous"] = mu.integrate_continuous(f, a, b);
      j["atoms"] = mu.integrate_atoms(f, a, b);
      emit.write(j);
    } else if (derive->parsed()) {
      const Derivator g = io::parse_derivator(io::read_json_file(input), input);
      const Integrand f = function.resolve("function");
      json rows = json::array();
      for (double t : points) {
        try {
          rows.push_back({{"t", t}, {"value", g_derivative(g, f.function(), t)}});
        } catch (const UndefinedPointError& e) {
          rows.push_back({{"t", t}, {"value", nullptr}, {"reason", e.what()}});
        }
      }
      emit.write(json{{"points", rows}});
    } else if (ftc->parsed()) {
      const Derivator g = io::parse_derivator(io::read_json_file(input), input);
      const Integrand v = density.resolve("integrand");
      const Trajectory h = primitive(StieltjesMeasure(g, Signature::signed_measure), v, grid_hint);
      const FtcReport r = ftc_roundtrip(h, threshold);
      emit.write(json{{"max_deviation", r.max_deviation},
                      {"threshold", r.threshold},
                      {"pass", r.pass},
                      {"points_checked", r.points_checked},
                      {"cells_skipped", r.cells_skipped},
                      {"unsettled_quotients", r.unsettled_quotients}});
    } else if (exp->parsed()) {
      const Derivator g = io::parse_derivator(io::read_json_file(input), input);
      const LinearCoefficient lc(coefficient.resolve("coefficient"), g);
      const GExponential e = build_g_exponential(lc, grid_hint);
      if (format == "json") {
        const LinearSolutionReport check = verify_linear_solution(lc, grid_hint);
        json j;
        j["regime"] = to_string(lc.regime());
        j["t_minus"] = lc.t_minus();
        j["t_zero"] = lc.t_zero();
        j["extinction_time"] = lc.extinction_time() ? json(*lc.extinction_time()) : json(nullptr);
        j["conditioning_warnings"] = lc.conditioning_warnings();
        j["final_value"] = e.values.left_values().back();
        j["verification"] = {{"max_residual", check.max_residual},
                             {"pass", check.pass},
                             {"jump_identity_exact", check.jump_identity_exact}};
        emit.write(j);
      } else {
        std::ostringstream csv;
        csv << "t,side,e,sign,regime\n";
        const auto grid = e.values.grid();
        const char* regime = to_string(lc.regime());
        auto sign = [](double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); };
        for (std::size_t k = 0; k < grid.size(); ++k) {
          const double l = e.values.left_values()[k];
          csv << io::format_double(grid[k]) << ",L," << io::format_double(l) << ',' << sign(l)
              << ',' << regime << '\n';
          if (g.is_jump(grid[k]) && k + 1 < grid.size()) {
            const double r = e.values.right_values()[k];
            csv << io::format_double(grid[k]) << ",R," << io::format_double(r) << ',' << sign(r)
                << ',' << regime << '\n';
          }
        }
        emit.write(csv.str());
      }
    } else if (solve_cmd->parsed()) {
      const io::ParsedSystem sys = io::parse_system(io::read_json_file(input), input);
      SolveConfig config;
      config.mesh = mesh;
      config.picard = picard;
      config.tol = tol;
      config.max_iter = max_iter;
      config.bound = sys.bound;
      config.step.safety_radius = sys.safety_radius;
      const SolutionReport r = solve(sys.spec, config);
      const json summary = report_json(r);
      if (format == "json") {
        emit.write(summary);
      } else {
        std::vector<std::string> names;
        for (std::size_t j = 0; j < sys.spec.dimension(); ++j) names.push_back("x_" + std::to_string(j + 1));
        emit.write(io::trajectories_csv(extrapolated ? r.extrapolated : r.run.components, names));
      }
      if (!report_path.empty()) io::write_atomic(report_path, summary.dump(2) + "\n");
      if (!r.converged) throw NumericalFailure("Picard iteration did not converge; partial results written");
    } else if (plume->parsed()) {
      json cfg = config_path.empty() ? json::object() : io::read_json_file(config_path);
      const std::string base = config_path.empty() ? "$" : config_path;
      if (!cfg.is_object()) throw io::SpecError(base, "expected an object");
      if (cfg.contains("params")) {
        const PlumeParams from_file = io::parse_plume_params(cfg.at("params"), base + ".params");
        if (plume->count("--alpha") == 0) params.alpha = from_file.alpha;
        if (plume->count("--lambda") == 0) params.lambda = from_file.lambda;
        if (plume->count("--gravity") == 0) params.gravity = from_file.gravity;
        if (plume->count("--rho-b") == 0) params.rho_b = from_file.rho_b;
      }
      std::optional<AmbientDensity> amb;
      if (!ambient_path.empty())
        amb = AmbientDensity{io::parse_derivator(io::read_json_file(ambient_path), ambient_path),
                             ambient_path};
      else if (cfg.contains("ambient"))
        amb = AmbientDensity{io::parse_derivator(cfg.at("ambient"), base + ".ambient"), "config"};
      else
        throw io::SpecError("--ambient", "an ambient density derivator is required");
      auto pick = [&](std::optional<double> flag, const char* key) {
        if (flag) return *flag;
        const std::string path = base + ".initial." + key;
        if (!cfg.contains("initial") || !cfg.at("initial").contains(key))
          throw io::SpecError(path, "missing required value (or pass the matching flag)");
        const json& v = cfg.at("initial").at(key);
        if (!v.is_number()) throw io::SpecError(path, "expected a number");
        return v.get<double>();
      };
      const double q = pick(q0, "q");
      const double m = pick(m0, "m");
      const double beta = pick(beta0, "beta");
      PlumeConfig pc;
      pc.solve.mesh = mesh;
      pc.solve.picard = picard;
      if (radius) {
        pc.radius = *radius;
      } else if (cfg.contains("radius") && cfg.at("radius").is_number()) {
        pc.radius = cfg.at("radius").get<double>();
      } else {
        pc.radius = 0.5 * m;
      }
      const PlumeRun run = run_plume(params, *amb, q, m, beta, pc);
      json summary = report_json(run.report);
      json rows = json::array();
      for (const PlumeJumpRow& r : run.audit.jumps)
        rows.push_back({{"z", r.at},
                        {"delta_rho", r.delta_rho},
                        {"q_left", r.q_left},
                        {"q_right", r.q_right},
                        {"m_left", r.m_left},
                        {"m_right", r.m_right},
                        {"beta_jump", r.beta_jump},
                        {"expected_jump", r.expected_jump},
                        {"pass", r.pass}});
      summary["plume_audit"] = {{"jumps", rows},
                                {"q_increasing", run.audit.q_increasing},
                                {"pass", run.audit.pass},
                                {"warnings", run.audit.warnings}};
      summary["parameters"] = {{"alpha", params.alpha},   {"lambda", params.lambda},
                               {"gravity", params.gravity}, {"rho_b", params.rho_b},
                               {"Lambda", params.Lambda()}, {"A", params.A()},
                               {"B", params.B()},           {"C", params.C()}};
      if (format == "json")
        emit.write(summary);
      else
        emit.write(plume_csv(plume_profile(run.report.run.components)));
      if (!report_path.empty()) io::write_atomic(report_path, summary.dump(2) + "\n");
      if (!run.report.converged) throw NumericalFailure("Picard iteration did not converge; partial results written");
    }
  } catch (const io::SpecError& e) {
    json j = error_json("validation", e.what());
    j["path"] = e.path();
    err << j.dump() << "\n";
    return 1;
  } catch (const DegenerateCoefficientError& e) {
    err << error_json("numerical", e.what()).dump() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    err << error_json("validation", e.what()).dump() << "\n";
    return 1;
  } catch (const std::domain_error& e) {
    err << error_json("validation", e.what()).dump() << "\n";
    return 1;
  } catch (const NumericalFailure& e) {
    json j = error_json("numerical", e.what());
    j["partial"] = true;
    err << j.dump() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << error_json("numerical", e.what()).dump() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace stieltjes
