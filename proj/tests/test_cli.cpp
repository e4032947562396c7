#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "stieltjes/cli.hpp"
#include "stieltjes/io.hpp"

using namespace stieltjes;
using io::json;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "stieltjes");
  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  Result r;
  r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string example(const std::string& name) { return std::string(EXAMPLES_DIR) + "/" + name; }

struct TempDir {
  fs::path path;
  TempDir() {
    std::random_device rd;
    path = fs::temp_directory_path() / ("stieltjes-cli-" + std::to_string(rd()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name, const std::string& content) const {
    const fs::path p = path / name;
    std::ofstream(p) << content;
    return p.string();
  }
  std::string at(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream cells_in(line);
    std::string cell;
    while (std::getline(cells_in, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST_CASE("decompose reports structure and variation") {
  const Result r = run({"decompose", example("tent.json")});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["variation"]["total"] == 1.0);
  CHECK(j["variation"]["positive"] == 0.5);
  CHECK(j["variation"]["negative"] == 0.5);
  CHECK(j["structure"]["Lambda_plus"] == json::array({json::array({0.0, 0.5})}));
  CHECK(j["structure"]["Lambda_minus"] == json::array({json::array({0.5, 1.0})}));
  CHECK(j["structure"]["D_plus"].empty());
  CHECK(j["structure"]["D_minus"].empty());
  CHECK(j["structure"]["C"].empty());
}

TEST_CASE("decompose output round-trips as a derivator spec") {
  for (const char* name : {"tent.json", "unit_jump.json", "mixed.json", "two_layer.json"}) {
    const Derivator original = io::parse_derivator(io::read_json_file(example(name)));
    const Result r = run({"decompose", example(name)});
    REQUIRE(r.code == 0);
    const Derivator again = io::parse_derivator(json::parse(r.out));
    for (int i = 0; i < 1000; ++i) {
      const double t = original.a() + (original.b() - original.a()) * i / 999.0;
      CHECK(again.eval(t) == original.eval(t));
      CHECK(again.eval_right(t) == original.eval_right(t));
    }
  }
}

TEST_CASE("integrate, derive and ftc-check") {
  const Result total = run({"integrate", example("tent.json"), "--constant", "1", "--signature", "total"});
  REQUIRE(total.code == 0);
  CHECK(json::parse(total.out)["value"] == doctest::Approx(1.0));
  const Result jump = run({"integrate", example("unit_jump.json"), "--constant", "2"});
  CHECK(json::parse(jump.out)["atoms"] == 2.0);
  CHECK(json::parse(jump.out)["value"] == doctest::Approx(4.0));

  const Result d = run({"derive", example("unit_jump.json"), "--constant", "3", "--at", "0.25", "0.5", "1"});
  REQUIRE(d.code == 0);
  const json points = json::parse(d.out)["points"];
  CHECK(points[0]["value"] == doctest::Approx(0.0));
  CHECK(points[1]["value"] == 0.0);
  CHECK(points[2]["value"].is_null());
  CHECK(points[2].contains("reason"));

  TempDir tmp;
  const std::string poly = tmp.file("v.json", R"({"kind": "polynomial", "coefficients": [1, 2]})");
  const Result f = run({"ftc-check", example("mixed.json"), "--integrand", poly, "--grid-hint", "32"});
  REQUIRE(f.code == 0);
  CHECK(json::parse(f.out)["pass"] == true);
}

TEST_CASE("exp emits the classical exponential") {
  const Result r = run({"exp", example("identity.json"), "--constant", "1"});
  REQUIRE(r.code == 0);
  const auto rows = csv_rows(r.out);
  CHECK(rows.front() == std::vector<std::string>{"t", "side", "e", "sign", "regime"});
  CHECK(rows.back()[0] == "1");
  CHECK(std::stod(rows.back()[2]) == doctest::Approx(2.718281828).epsilon(1e-9));

  const Result flip = run({"exp", example("unit_jump.json"), "--constant", "-2", "--format", "json"});
  const json j = json::parse(flip.out);
  CHECK(j["regime"] == "ec2");
  CHECK(j["t_minus"] == json::array({0.5}));
  CHECK(j["verification"]["pass"] == true);

  const Result jumps = run({"exp", example("unit_jump.json"), "--constant", "1"});
  int right_rows = 0;
  for (const auto& row : csv_rows(jumps.out)) right_rows += row.size() > 1 && row[1] == "R";
  CHECK(right_rows == 1);
}

TEST_CASE("solve with a zero right-hand side keeps every column constant") {
  const Result r = run({"solve", example("still.json"), "--mesh", "16"});
  REQUIRE(r.code == 0);
  const auto rows = csv_rows(r.out);
  CHECK(rows.front() == std::vector<std::string>{"t", "side", "x_1", "x_2"});
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i][2] == "1.5");
    CHECK(rows[i][3] == "-2");
  }
}

TEST_CASE("solve output is deterministic and written atomically") {
  TempDir tmp;
  const std::string a = tmp.at("a.csv");
  const std::string b = tmp.at("b.csv");
  const std::string report = tmp.at("report.json");
  REQUIRE(run({"-o", a, "solve", example("coupled.json"), "--mesh", "64", "--report", report}).code == 0);
  REQUIRE(run({"solve", example("coupled.json"), "--mesh", "64", "-o", b}).code == 0);
  CHECK(slurp(a) == slurp(b));
  CHECK(slurp(a).find('\r') == std::string::npos);
  for (const auto& entry : fs::directory_iterator(tmp.path)) CHECK(entry.path().extension() != ".tmp");
  const json j = json::parse(slurp(report));
  CHECK(j["jump_audit"].size() == 2);
  for (const json& row : j["jump_audit"]) CHECK(row["pass"] == true);

  const Result bounded = run({"solve", example("bounded.json"), "--format", "json"});
  CHECK(json::parse(bounded.out)["horizon"] == doctest::Approx(0.25));
}

TEST_CASE("extrapolated and Picard solves") {
  const Result r = run({"solve", example("growth.json"), "--picard", "--extrapolated"});
  REQUIRE(r.code == 0);
  const auto rows = csv_rows(r.out);
  CHECK(std::stod(rows.back()[2]) == doctest::Approx(2.718281828459045).epsilon(1e-8));

  const Result j = run({"solve", example("growth_jump.json"), "--mesh", "4096"});
  const auto jr = csv_rows(j.out);
  std::string left;
  std::string right;
  for (const auto& row : jr)
    if (row[0] == "0.5") (row[1] == "L" ? left : right) = row[2];
  CHECK(std::stod(right) == 2 * std::stod(left));
}

TEST_CASE("plume command") {
  const Result r = run({"plume", "--config", example("plume.json"), "--mesh", "128"});
  REQUIRE(r.code == 0);
  const auto rows = csv_rows(r.out);
  CHECK(rows.front() == std::vector<std::string>{"z", "side", "q", "m", "beta", "b", "w", "theta"});

  const Result j = run({"plume", "--config", example("plume.json"), "--format", "json", "--alpha", "0.1"});
  const json s = json::parse(j.out);
  CHECK(s["parameters"]["alpha"] == 0.1);
  CHECK(s["plume_audit"]["pass"] == true);
  CHECK(s["plume_audit"]["jumps"].size() == 1);

  const Result flags = run({"plume", "--ambient", example("two_layer.json"), "--q0", "1", "--m0", "4", "--beta0",
                            "0.01", "--format", "json"});
  CHECK(flags.code == 0);

  const Result missing = run({"plume", "--q0", "1", "--m0", "4", "--beta0", "0.01"});
  CHECK(missing.code == 1);
  CHECK(json::parse(missing.err)["path"] == "--ambient");
  const Result bad = run({"plume", "--config", example("plume.json"), "--m0", "-1"});
  CHECK(bad.code == 1);
}

TEST_CASE("validation errors exit with 1 and a JSON report") {
  TempDir tmp;
  const Result none = run({});
  CHECK(none.code == 1);
  CHECK(json::parse(none.err)["error"] == "validation");

  const Result missing = run({"decompose", tmp.at("nope.json")});
  CHECK(missing.code == 1);
  CHECK(json::parse(missing.err)["path"] == tmp.at("nope.json"));

  const Result broken = run({"decompose", tmp.file("broken.json", "{ not json")});
  CHECK(broken.code == 1);

  const std::string bad_kind = tmp.file("kind.json", R"({"interval": [0, 1], "anchor": 0,
    "segments": [{"lo": 0, "hi": 1, "profile": {"kind": "cubic"}}]})");
  const Result k = run({"decompose", bad_kind});
  CHECK(k.code == 1);
  CHECK(json::parse(k.err)["path"] == bad_kind + ".segments[0].profile.kind");

  const std::string unknown = tmp.file("rhs.json", R"({"derivators": [{"interval": [0, 1], "kind": "identity"}],
    "rhs": {"name": "lorenz"}, "initial": [0]})");
  const Result u = run({"solve", unknown});
  CHECK(u.code == 1);
  const std::string message = json::parse(u.err)["message"];
  for (const std::string& name : io::rhs_catalog()) CHECK(message.find(name) != std::string::npos);

  CHECK(run({"solve", example("growth.json"), "--mesh", "0"}).code == 1);
  CHECK(run({"solve", example("growth.json"), "--tol", "-1"}).code == 1);
  CHECK(run({"exp", example("identity.json"), "--constant", "1", "--coefficient", example("coefficient_poly.json")})
            .code == 1);
}

TEST_CASE("numerical failures exit with 2 after writing partial results") {
  TempDir tmp;
  const std::string out = tmp.at("partial.csv");
  const Result r = run({"solve", example("growth.json"), "--picard", "--max-iter", "2", "-o", out});
  CHECK(r.code == 2);
  const json e = json::parse(r.err);
  CHECK(e["error"] == "numerical");
  CHECK(e["partial"] == true);
  CHECK(fs::exists(out));

  const std::string nan_table = tmp.file("blowup.json", R"({"derivators": [{"interval": [0, 1], "kind": "identity"}],
    "rhs": {"name": "polynomial", "params": {"coefficients": [[0, 0, 1e300]]}}, "initial": [1e10]})");
  CHECK(run({"solve", nan_table, "--mesh", "8"}).code == 2);
}

TEST_CASE("help exits cleanly") {
  const Result r = run({"--help"});
  CHECK(r.code == 0);
  CHECK(r.out.find("plume") != std::string::npos);
}
