#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "stieltjes/derivator.hpp"
#include "stieltjes/measure.hpp"
#include "stieltjes/plume.hpp"
#include "stieltjes/solver.hpp"
#include "stieltjes/trajectory.hpp"

namespace stieltjes::io {

using nlohmann::json;

/// Input that does not match the documented schema. `path` points at the
/// offending field, e.g. "$.segments[2].slope".
class SpecError : public std::invalid_argument {
 public:
  SpecError(std::string path, const std::string& message)
      : std::invalid_argument(path + ": " + message), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

/// %.17g
std::string format_double(double v);

json read_json_file(const std::string& path);
/// Writes to a sibling temporary file and renames it over `path`.
void write_atomic(const std::string& path, const std::string& content);

Derivator parse_derivator(const json& j, const std::string& path = "$");
json derivator_to_json(const Derivator& g);
/// derivator_to_json plus "structure" and "variation"; still a valid derivator spec.
json decompose_json(const Derivator& g);

Integrand parse_integrand(const json& j, const std::string& path = "$");

/// Names accepted in a system's "rhs.name".
std::vector<std::string> rhs_catalog();
Rhs make_rhs(const json& j, std::size_t dimension, const std::string& path = "$.rhs");

struct ParsedSystem {
  SystemSpec spec;
  std::optional<CaratheodoryBound> bound;
  std::optional<double> safety_radius;
};

ParsedSystem parse_system(const json& j, const std::string& path = "$");

PlumeParams parse_plume_params(const json& j, const std::string& path = "$.params");

/// Columns t, side, then one per name. Jump times get an L row and an R row.
std::string trajectories_csv(const std::vector<Trajectory>& components,
                             const std::vector<std::string>& names);

}  // namespace stieltjes::io
