#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "illiq/errors.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json demo() {
  return json::parse(R"({
    "scenarios": {"inline": {"probabilities": [0.3333333333333333, 0.3333333333333333, 0.3333333333333334],
                             "assets": {"x": [80, 90, 100]}}},
    "impact": {"kind": "linear", "a": 0.5},
    "x0": {"base": 70, "slope": 0.2},
    "rho": {"kind": "worst_case"},
    "seed": 1,
    "y_grid": [0, 10]
  })");
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path tmp(const std::string& name) { return fs::temp_directory_path() / ("illiq_test_" + name); }

}  // namespace

TEST_CASE("beta table") {
  const auto out = tmp("beta.csv");
  CHECK(illiq::cli::run_command("beta", demo(), ".", out.string(), "csv") == 0);
  CHECK(slurp(out) == "y,beta,capital_block,capital_split,zero_convention\n0,-80,0,0,1\n10,-75,-30,-55,0\n");
}

TEST_CASE("json output") {
  const auto out = tmp("beta.json");
  CHECK(illiq::cli::run_command("beta", demo(), ".", out.string(), "json") == 0);
  auto doc = json::parse(slurp(out));
  CHECK(doc["columns"][1] == "beta");
  CHECK(doc["rows"][1]["beta"] == -75.0);
}

TEST_CASE("config errors name the field") {
  auto c = demo();
  c.erase("rho");
  try {
    illiq::cli::run_command("beta", c, ".", tmp("x").string(), "csv");
    FAIL("no throw");
  } catch (const illiq::ConfigError& e) {
    CHECK(std::string(e.what()).find("rho") != std::string::npos);
  }
  auto two = demo();
  two["scenarios"]["gbm"] = {{"n", 10}};
  CHECK_THROWS_AS(illiq::cli::run_command("beta", two, ".", "", "csv"), illiq::ConfigError);
  auto noseed = demo();
  noseed.erase("seed");
  CHECK_THROWS_AS(illiq::cli::run_command("axioms", noseed, ".", "", "csv"), illiq::ConfigError);
}

TEST_CASE("overrides") {
  auto c = demo();
  illiq::cli::apply_override(c, "impact.a=0.25");
  illiq::cli::apply_override(c, "rho.kind=avar");
  illiq::cli::apply_override(c, "rho.delta=0.5");
  illiq::cli::apply_override(c, "new.path.leaf=[1,2]");
  CHECK(c["impact"]["a"] == 0.25);
  CHECK(c["rho"]["kind"] == "avar");
  CHECK(c["new"]["path"]["leaf"][1] == 2);
  CHECK_THROWS_AS(illiq::cli::apply_override(c, "novalue"), illiq::ConfigError);
  CHECK_THROWS_AS(illiq::cli::apply_override(c, "seed.x=1"), illiq::ConfigError);
}

TEST_CASE("axioms exit codes") {
  CHECK(illiq::cli::run_command("axioms", demo(), ".", tmp("ax.json").string(), "json") == 0);
  auto bad = demo();
  bad["impact"]["a"] = -0.5;
  CHECK(illiq::cli::run_command("axioms", bad, ".", tmp("ax_bad.json").string(), "json") == 1);
  auto doc = json::parse(slurp(tmp("ax_bad.json")));
  CHECK(doc["impact_monotonicity"][0]["classification"] == "fail");

  auto var = demo();
  var["rho"] = {{"kind", "var"}, {"delta", 0.25}};
  var["scenarios"]["inline"] = {{"assets", {{"x", {80, 85, 90, 100}}}}};
  var["probability"] = "uniform";
  CHECK(illiq::cli::run_command("axioms", var, ".", tmp("ax_var.json").string(), "json") == 0);
  CHECK(slurp(tmp("ax_var.json")).find("expected-fail") != std::string::npos);
}

TEST_CASE("dual command") {
  auto c = demo();
  c["dual"] = {{"grid", {{"from", -50}, {"to", 50}, {"count", 201}}}, {"y", {1, 10}}, {"samples", 200}};
  const auto out = tmp("dual.csv");
  CHECK(illiq::cli::run_command("dual", c, ".", out.string(), "csv") == 0);
  CHECK(fs::exists(out.string() + ".conjugate.csv"));
  auto report = json::parse(slurp(out.string() + ".dual.json"));
  CHECK(report["max_abs_error"].get<double>() <= 1e-9);

  auto pl = c;
  pl["impact"] = {{"kind", "power_law"}, {"gamma", 1.0}, {"alpha", 0.5}};
  CHECK(illiq::cli::run_command("dual", pl, ".", tmp("dual_pl.csv").string(), "csv") == 1);
  auto pr = json::parse(slurp(tmp("dual_pl.csv").string() + ".dual.json"));
  CHECK(pr["non_convex_flag"] == true);
}

TEST_CASE("split-compare and portfolio") {
  auto c = demo();
  c["y_grid"] = {{"from", 1}, {"to", 100}, {"count", 100}};
  CHECK(illiq::cli::run_command("split-compare", c, ".", tmp("sc.csv").string(), "csv") == 0);

  auto p = json::parse(R"({
    "scenarios": {"inline": {"probabilities": [0.25, 0.25, 0.5], "assets": {"x1": [80, 90, 100], "x2": [50, 60, 40]}}},
    "rho": {"kind": "worst_case"},
    "portfolio": {"assets": [{"name": "x1", "impact": {"kind": "linear", "a": 0.5}},
                             {"name": "x2", "impact": {"kind": "linear", "a": 1.0}}],
                  "y": [10, 5]}
  })");
  const auto out = tmp("pf.csv");
  CHECK(illiq::cli::run_command("portfolio", p, ".", out.string(), "csv") == 0);
  const auto text = slurp(out);
  CHECK(text.find("sum_of_assets,,-110,") != std::string::npos);
  CHECK(text.find("portfolio,,-120,") != std::string::npos);
  p["portfolio"]["assets"][1]["name"] = "missing";
  CHECK_THROWS_AS(illiq::cli::run_command("portfolio", p, ".", "", "csv"), illiq::ConfigError);
}
