#include "stieltjes/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <type_traits>

namespace stieltjes::io {
namespace {

std::string at_key(const std::string& path, const std::string& key) { return path + "." + key; }
std::string at_index(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

void require_object(const json& j, const std::string& path) {
  if (!j.is_object()) throw SpecError(path, "expected an object");
}

const json& field(const json& j, const std::string& key, const std::string& path) {
  require_object(j, path);
  const auto it = j.find(key);
  if (it == j.end()) throw SpecError(at_key(path, key), "missing required field");
  return *it;
}

double as_number(const json& j, const std::string& path) {
  if (!j.is_number()) throw SpecError(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw SpecError(path, "expected a finite number");
  return v;
}

double number(const json& j, const std::string& key, const std::string& path) {
  return as_number(field(j, key, path), at_key(path, key));
}

std::optional<double> optional_number(const json& j, const std::string& key,
                                      const std::string& path) {
  if (!j.contains(key)) return std::nullopt;
  return as_number(j.at(key), at_key(path, key));
}

std::string string_field(const json& j, const std::string& key, const std::string& path) {
  const json& v = field(j, key, path);
  if (!v.is_string()) throw SpecError(at_key(path, key), "expected a string");
  return v.get<std::string>();
}

const json& array_field(const json& j, const std::string& key, const std::string& path) {
  const json& v = field(j, key, path);
  if (!v.is_array()) throw SpecError(at_key(path, key), "expected an array");
  return v;
}

std::vector<double> number_array(const json& j, const std::string& path) {
  if (!j.is_array()) throw SpecError(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as_number(j[i], at_index(path, i)));
  return out;
}

std::vector<std::pair<double, double>> point_array(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) throw SpecError(path, "expected a non-empty array of [t, value]");
  std::vector<std::pair<double, double>> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string p = at_index(path, i);
    if (!j[i].is_array() || j[i].size() != 2) throw SpecError(p, "expected [t, value]");
    out.emplace_back(as_number(j[i][0], at_index(p, 0)), as_number(j[i][1], at_index(p, 1)));
  }
  return out;
}

std::pair<double, double> interval_field(const json& j, const std::string& path) {
  const std::string p = at_key(path, "interval");
  const std::vector<double> v = number_array(field(j, "interval", path), p);
  if (v.size() != 2) throw SpecError(p, "expected [a, b]");
  if (!(v[0] < v[1])) throw SpecError(p, "expected a < b");
  return {v[0], v[1]};
}

Segment parse_segment(const json& j, const std::string& path) {
  const double lo = number(j, "lo", path);
  const double hi = number(j, "hi", path);
  const std::string ppath = at_key(path, "profile");
  const json& prof = field(j, "profile", path);
  const std::string kind = string_field(prof, "kind", ppath);
  const std::optional<double> origin = optional_number(prof, "origin", ppath);
  try {
    if (kind == "linear") return Segment(lo, hi, LinearProfile{number(prof, "slope", ppath)}, origin);
    if (kind == "power")
      return Segment(lo, hi,
                     PowerProfile{number(prof, "exponent", ppath),
                                  optional_number(prof, "scale", ppath).value_or(1.0)},
                     origin);
    if (kind == "constant") return Segment(lo, hi, ConstantProfile{}, origin);
    if (kind == "tabulated")
      return Segment(
          lo, hi,
          TabulatedProfile{point_array(field(prof, "points", ppath), at_key(ppath, "points"))},
          origin);
  } catch (const SpecError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw SpecError(path, e.what());
  }
  throw SpecError(at_key(ppath, "kind"),
                  "unknown profile '" + kind + "' (expected linear, power, constant, tabulated)");
}

json point_list(const std::vector<std::pair<double, double>>& pts) {
  json out = json::array();
  for (const auto& [t, v] : pts) out.push_back({t, v});
  return out;
}

json interval_list(const std::vector<OpenInterval>& xs) {
  json out = json::array();
  for (const OpenInterval& x : xs) out.push_back({x.lo, x.hi});
  return out;
}

Rhs linear_rhs(const json& params, std::size_t n, const std::string& path) {
  const json& rows = array_field(params, "matrix", path);
  if (rows.size() != n) throw SpecError(at_key(path, "matrix"), "expected " + std::to_string(n) + " rows");
  std::vector<std::vector<double>> matrix;
  for (std::size_t i = 0; i < n; ++i) {
    const std::string p = at_index(at_key(path, "matrix"), i);
    matrix.push_back(number_array(rows[i], p));
    if (matrix.back().size() != n) throw SpecError(p, "expected " + std::to_string(n) + " columns");
  }
  std::vector<double> offset(n, 0.0);
  if (params.contains("offset")) {
    offset = number_array(params.at("offset"), at_key(path, "offset"));
    if (offset.size() != n) throw SpecError(at_key(path, "offset"), "expected " + std::to_string(n) + " entries");
  }
  return [matrix, offset](double, std::span<const double> x) {
    std::vector<double> out(offset);
    for (std::size_t i = 0; i < out.size(); ++i)
      for (std::size_t k = 0; k < x.size(); ++k) out[i] += matrix[i][k] * x[k];
    return out;
  };
}

Rhs polynomial_rhs(const json& params, std::size_t n, const std::string& path) {
  const json& rows = array_field(params, "coefficients", path);
  if (rows.size() != n)
    throw SpecError(at_key(path, "coefficients"), "expected one coefficient list per component");
  std::vector<std::vector<double>> coeffs;
  for (std::size_t i = 0; i < n; ++i)
    coeffs.push_back(number_array(rows[i], at_index(at_key(path, "coefficients"), i)));
  return [coeffs](double, std::span<const double> x) {
    std::vector<double> out(coeffs.size(), 0.0);
    for (std::size_t j = 0; j < coeffs.size(); ++j)
      for (auto it = coeffs[j].rbegin(); it != coeffs[j].rend(); ++it) out[j] = out[j] * x[j] + *it;
    return out;
  };
}

Rhs tabulated_rhs(const json& params, std::size_t n, const std::string& path) {
  const json& tables = array_field(params, "tables", path);
  if (tables.size() != n) throw SpecError(at_key(path, "tables"), "expected one table per component");
  std::vector<Integrand> fs;
  for (std::size_t i = 0; i < n; ++i)
    fs.push_back(Integrand::tabulated(point_array(tables[i], at_index(at_key(path, "tables"), i))));
  return [fs](double t, std::span<const double>) {
    std::vector<double> out;
    for (const Integrand& f : fs) out.push_back(f(t));
    return out;
  };
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SpecError(path, "cannot open file");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw SpecError(path, std::string("invalid JSON: ") + e.what());
  }
}

void write_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw std::runtime_error("cannot move output into place at " + path);
  }
}

Derivator parse_derivator(const json& j, const std::string& path) {
  require_object(j, path);
  const auto [a, b] = interval_field(j, path);
  if (j.contains("kind")) {
    const std::string kind = string_field(j, "kind", path);
    if (kind == "identity") return Derivator::identity(a, b);
    if (kind == "constant") return Derivator::constant(a, b, number(j, "value", path));
    throw SpecError(at_key(path, "kind"), "unknown kind '" + kind + "' (expected identity, constant)");
  }
  const double anchor = optional_number(j, "anchor", path).value_or(0.0);
  const json& segs = array_field(j, "segments", path);
  std::vector<Segment> segments;
  for (std::size_t i = 0; i < segs.size(); ++i)
    segments.push_back(parse_segment(segs[i], at_index(at_key(path, "segments"), i)));
  std::vector<Jump> jumps;
  if (j.contains("jumps")) {
    const json& js = array_field(j, "jumps", path);
    for (std::size_t i = 0; i < js.size(); ++i) {
      const std::string p = at_index(at_key(path, "jumps"), i);
      jumps.push_back({number(js[i], "at", p), number(js[i], "delta", p)});
    }
  }
  try {
    return Derivator(a, b, anchor, std::move(segments), std::move(jumps));
  } catch (const std::invalid_argument& e) {
    throw SpecError(path, e.what());
  }
}

json derivator_to_json(const Derivator& g) {
  json out;
  out["interval"] = {g.a(), g.b()};
  out["anchor"] = g.anchor();
  json segs = json::array();
  for (const Segment& s : g.segments()) {
    json seg;
    json prof;
    seg["lo"] = s.lo();
    seg["hi"] = s.hi();
    std::visit(
        [&](const auto& p) {
          using P = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<P, LinearProfile>) {
            prof["kind"] = "linear";
            prof["slope"] = p.slope;
          } else if constexpr (std::is_same_v<P, PowerProfile>) {
            prof["kind"] = "power";
            prof["exponent"] = p.exponent;
            prof["scale"] = p.scale;
          } else if constexpr (std::is_same_v<P, ConstantProfile>) {
            prof["kind"] = "constant";
          } else {
            prof["kind"] = "tabulated";
            prof["points"] = point_list(p.points);
          }
        },
        s.profile());
    if (s.origin() != s.lo()) prof["origin"] = s.origin();
    seg["profile"] = std::move(prof);
    segs.push_back(std::move(seg));
  }
  out["segments"] = std::move(segs);
  json jumps = json::array();
  for (const Jump& j : g.jumps()) jumps.push_back({{"at", j.at}, {"delta", j.delta}});
  out["jumps"] = std::move(jumps);
  return out;
}

json decompose_json(const Derivator& g) {
  json out = derivator_to_json(g);
  const StructuralSets s = g.structural_sets();
  out["structure"] = {{"D_plus", s.d_plus},
                      {"D_minus", s.d_minus},
                      {"Lambda_plus", interval_list(s.lambda_plus)},
                      {"Lambda_minus", interval_list(s.lambda_minus)},
                      {"C", interval_list(s.constant)},
                      {"F", s.f_set}};
  out["variation"] = {{"total", g.variation(g.a(), g.b(), VariationKind::total)},
                      {"positive", g.variation(g.a(), g.b(), VariationKind::positive)},
                      {"negative", g.variation(g.a(), g.b(), VariationKind::negative)}};
  return out;
}

Integrand parse_integrand(const json& j, const std::string& path) {
  if (j.is_number()) return Integrand::constant(as_number(j, path));
  const std::string kind = string_field(j, "kind", path);
  if (kind == "constant") return Integrand::constant(number(j, "value", path));
  if (kind == "polynomial")
    return Integrand::polynomial(
        number_array(field(j, "coefficients", path), at_key(path, "coefficients")));
  if (kind == "tabulated")
    return Integrand::tabulated(point_array(field(j, "points", path), at_key(path, "points")));
  throw SpecError(at_key(path, "kind"),
                  "unknown integrand kind '" + kind + "' (expected constant, polynomial, tabulated)");
}

std::vector<std::string> rhs_catalog() { return {"linear", "polynomial", "plume", "tabulated"}; }

Rhs make_rhs(const json& j, std::size_t dimension, const std::string& path) {
  const std::string name = string_field(j, "name", path);
  const json params = j.contains("params") ? j.at("params") : json::object();
  const std::string ppath = at_key(path, "params");
  require_object(params, ppath);
  if (name == "linear") return linear_rhs(params, dimension, ppath);
  if (name == "polynomial") return polynomial_rhs(params, dimension, ppath);
  if (name == "tabulated") return tabulated_rhs(params, dimension, ppath);
  if (name == "plume") {
    if (dimension != 3) throw SpecError(path, "the plume rhs needs exactly 3 components");
    const PlumeParams p = parse_plume_params(params, ppath);
    const double A = p.A();
    const double B = p.B();
    const double C = p.C();
    return [A, B, C](double, std::span<const double> x) {
      return std::vector<double>{A * std::pow(x[1], 0.25), B * x[0] * x[2], C * x[0]};
    };
  }
  std::string names;
  for (const std::string& n : rhs_catalog()) names += (names.empty() ? "" : ", ") + n;
  throw SpecError(at_key(path, "name"), "unknown rhs '" + name + "'; available: " + names);
}

ParsedSystem parse_system(const json& j, const std::string& path) {
  require_object(j, path);
  ParsedSystem out;
  const json& ds = array_field(j, "derivators", path);
  if (ds.empty()) throw SpecError(at_key(path, "derivators"), "need at least one component");
  for (std::size_t i = 0; i < ds.size(); ++i)
    out.spec.derivators.push_back(parse_derivator(ds[i], at_index(at_key(path, "derivators"), i)));
  const std::size_t n = out.spec.derivators.size();
  out.spec.rhs = make_rhs(field(j, "rhs", path), n, at_key(path, "rhs"));
  out.spec.initial = number_array(field(j, "initial", path), at_key(path, "initial"));
  if (out.spec.initial.size() != n)
    throw SpecError(at_key(path, "initial"), "expected " + std::to_string(n) + " entries");
  const Derivator& g = out.spec.derivators.front();
  out.spec.horizon = optional_number(j, "horizon", path).value_or(g.b() - g.a());
  if (j.contains("bound")) {
    const std::string bpath = at_key(path, "bound");
    const json& b = j.at("bound");
    CaratheodoryBound bound;
    bound.radius = number(b, "radius", bpath);
    const json& hs = array_field(b, "dominators", bpath);
    for (std::size_t i = 0; i < hs.size(); ++i)
      bound.dominators.push_back(parse_integrand(hs[i], at_index(at_key(bpath, "dominators"), i)));
    if (bound.dominators.size() != n)
      throw SpecError(at_key(bpath, "dominators"), "expected one dominator per component");
    out.bound = std::move(bound);
  }
  out.safety_radius = optional_number(j, "safety_radius", path);
  try {
    out.spec.validate();
  } catch (const std::invalid_argument& e) {
    throw SpecError(path, e.what());
  }
  return out;
}

PlumeParams parse_plume_params(const json& j, const std::string& path) {
  require_object(j, path);
  PlumeParams p;
  p.alpha = optional_number(j, "alpha", path).value_or(p.alpha);
  p.lambda = optional_number(j, "lambda", path).value_or(p.lambda);
  p.gravity = optional_number(j, "gravity", path).value_or(p.gravity);
  p.rho_b = optional_number(j, "rho_b", path).value_or(p.rho_b);
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    throw SpecError(path, e.what());
  }
  return p;
}

std::string trajectories_csv(const std::vector<Trajectory>& components,
                             const std::vector<std::string>& names) {
  if (components.empty() || components.size() != names.size())
    throw std::invalid_argument("one column name per component is required");
  std::ostringstream out;
  out << "t,side";
  for (const std::string& n : names) out << ',' << n;
  out << '\n';
  const auto grid = components.front().grid();
  for (std::size_t k = 0; k < grid.size(); ++k) {
    bool jump = false;
    out << format_double(grid[k]) << ",L";
    for (const Trajectory& c : components) {
      out << ',' << format_double(c.left_values()[k]);
      jump = jump || c.governing().is_jump(grid[k]) || c.right_values()[k] != c.left_values()[k];
    }
    out << '\n';
    if (jump && k + 1 < grid.size()) {
      out << format_double(grid[k]) << ",R";
      for (const Trajectory& c : components) out << ',' << format_double(c.right_values()[k]);
      out << '\n';
    }
  }
  return out.str();
}

}  // namespace stieltjes::io
