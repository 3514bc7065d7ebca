#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "fsflow/config.hpp"
#include "fsflow/errors.hpp"

using namespace fsflow;
using nlohmann::json;

namespace {

bool mentions(const ConfigError& e, const std::string& key) {
  for (const auto& v : e.violations())
    if (v.find(key) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST_CASE("minimal config takes the documented defaults") {
  const RunConfig c = config_from_json(json::object());
  CHECK(c.d == 2);
  CHECK(c.L == doctest::Approx(2 * std::numbers::pi));
  CHECK(c.b == 1.0);
  CHECK(c.mu == 1.0);
  CHECK(c.mu_prime == 1.0);
  CHECK(c.law.kind == "isothermal");
  CHECK(c.law.K == 1.0);
  CHECK(c.law.p_atm == 1.0);
  CHECK(c.law.g == 1.0);
  CHECK(c.energy == EnergyConfig{});
}

TEST_CASE("viscosity admissibility") {
  try {
    config_from_json(json{{"viscosity", {{"mu_prime", 0.0}}}});
    FAIL("expected a violation");
  } catch (const ConfigError& e) {
    CHECK(mentions(e, "viscosity.mu_prime"));
  }
  CHECK_NOTHROW(config_from_json(json{{"grid", {{"d", 3}, {"n_h", 8}, {"n_v", 9}}}, {"viscosity", {{"mu_prime", 0.0}}}}));
}

TEST_CASE("depth beyond the admissible bound") {
  // saturating law K = 2, scale 1, p_atm = 1: bound is finite
  const json j = {{"law", {{"kind", "saturating"}, {"K", 2.0}, {"rho_scale", 1.0}}}, {"grid", {{"b", 50.0}}}};
  CHECK_THROWS_AS(config_from_json(j), AdmissibilityError);
  json both = j;
  both["viscosity"] = {{"mu", -1.0}};
  CHECK_THROWS_AS(config_from_json(both), ConfigError);
}

TEST_CASE("every violation is reported with its key path") {
  const json j = {{"grid", {{"n_h", 12}, {"n_v", 3}, {"depth", 1.0}}},
                  {"viscosity", {{"mu", -1.0}}},
                  {"stepper", {{"dt", -1.0}, {"scheme", "rk4"}}},
                  {"colour", "blue"}};
  try {
    config_from_json(j);
    FAIL("expected violations");
  } catch (const ConfigError& e) {
    CHECK(e.violations().size() >= 6);
    CHECK(mentions(e, "grid.n_h"));
    CHECK(mentions(e, "grid.n_v"));
    CHECK(mentions(e, "grid.depth"));
    CHECK(mentions(e, "viscosity.mu"));
    CHECK(mentions(e, "stepper.dt"));
    CHECK(mentions(e, "stepper.scheme"));
    CHECK(mentions(e, "colour"));
  }
}

TEST_CASE("wrong value types are violations, not crashes") {
  CHECK_THROWS_AS(config_from_json(json{{"grid", {{"n_h", "many"}}}}), ConfigError);
  CHECK_THROWS_AS(config_from_json(json{{"t_end", json::array()}}), ConfigError);
  CHECK_THROWS_AS(config_from_json(json::array()), ConfigError);
}

TEST_CASE("serialization round trip") {
  const json j = {{"name", "rt"},
                  {"grid", {{"n_h", 16}, {"n_v", 17}, {"b", 0.5}}},
                  {"law", {{"kind", "gamma_law"}, {"gamma", 1.6}, {"K", 2.0}}},
                  {"viscosity", {{"mu", 0.3}, {"mu_prime", 0.7}}},
                  {"initial", {{"family", "shear"}, {"amplitude", 0.01}}},
                  {"stepper", {{"dt", 0.003}, {"scheme", "imex_bdf2"}, {"linear_only", true}}},
                  {"energy", {{"K_high", 3}, {"K_low", 2}, {"low_count_two", true}}},
                  {"t_end", 0.1 + 0.2},
                  {"seed", 77}};
  const RunConfig a = config_from_json(j);
  const RunConfig b = config_from_json(json::parse(to_json(a).dump()));
  CHECK(a == b);
  CHECK(to_json(a).dump() == to_json(b).dump());
}

TEST_CASE("overrides and files") {
  json j = json::object();
  apply_overrides(j, {"grid.n_h=64", "initial.family=q_bump", "stepper.scheme=\"imex_bdf2\"", "t_end=2.5"});
  const RunConfig c = config_from_json(j);
  CHECK(c.n_h == 64);
  CHECK(c.family == InitialFamily::q_bump);
  CHECK(c.stepper.scheme == Scheme::imex_bdf2);
  CHECK(c.t_end == 2.5);
  CHECK_THROWS_AS(apply_overrides(j, {"no_equals_sign"}), ConfigError);

  const auto path = std::filesystem::temp_directory_path() / "fsflow_config_test.json";
  std::ofstream(path) << R"({"name": "file", "grid": {"n_h": 16, "n_v": 17}})";
  const RunConfig f = parse_config(path.string(), {"viscosity.mu=2"});
  CHECK(f.name == "file");
  CHECK(f.mu == 2.0);
  std::ofstream(path) << "{ not json";
  CHECK_THROWS_AS(parse_config(path.string()), ConfigError);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(parse_config("/nonexistent/fsflow.json"), ConfigError);
}

TEST_CASE("model construction from a config") {
  RunConfig c = config_from_json(json{{"grid", {{"n_h", 16}, {"n_v", 17}}}});
  const Model m = make_model(c);
  CHECK(m.grid.modes() == 16);
  CHECK(m.eq.rho_bar(0) == doctest::Approx(1.0));
  CHECK(m.eq.rho_bar(16) == doctest::Approx(std::exp(1.0)).epsilon(1e-10));
}
