#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fsflow/runner.hpp"

using namespace fsflow;

namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

RunConfig small(const std::string& dir) {
  RunConfig c = config_from_json(nlohmann::json{{"grid", {{"n_h", 16}, {"n_v", 17}}},
                                                {"stepper", {{"dt", 1e-2}}},
                                                {"energy", {{"cadence", 5}}},
                                                {"t_end", 0.2}});
  c.output_dir = (fs::temp_directory_path() / dir).string();
  return c;
}

}  // namespace

TEST_CASE("zero amplitude gives an all-zero trajectory") {
  RunConfig c = small("fsflow_runner_zero");
  c.amplitude = 0.0;
  const RunResult r = run_scenario(c);
  CHECK(r.exit_code == kExitOk);
  REQUIRE(!r.reports.empty());
  for (const auto& e : r.reports) {
    CHECK(e.E_high == 0.0);
    CHECK(e.D_high == 0.0);
    CHECK(e.F_surf == 0.0);
    CHECK(e.E_low == 0.0);
    CHECK(e.D_low == 0.0);
    CHECK(e.identity_residual == 0.0);
  }
  CHECK(fs::exists(fs::path(c.output_dir) / "trajectory.csv"));
  CHECK(fs::exists(fs::path(c.output_dir) / "summary.json"));
  CHECK(fs::exists(fs::path(c.output_dir) / "final.ckpt"));
  fs::remove_all(c.output_dir);
}

TEST_CASE("empty time interval writes a single row") {
  RunConfig c = small("fsflow_runner_empty");
  c.t_end = 0.0;
  const RunResult r = run_scenario(c);
  CHECK(r.exit_code == kExitOk);
  CHECK(r.reports.size() == 1);
  const std::string csv = slurp(fs::path(c.output_dir) / "trajectory.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);
  CHECK(csv.rfind("t,E_high,D_high,F_surf,E_low,D_low,identity_residual,minJ,min_rho\n", 0) == 0);
  fs::remove_all(c.output_dir);
}

TEST_CASE("identical configs give identical bytes") {
  RunConfig a = small("fsflow_runner_det_a");
  RunConfig b = small("fsflow_runner_det_b");
  b.output_dir = a.output_dir + "_b";
  run_scenario(a);
  const std::string csv_a = slurp(fs::path(a.output_dir) / "trajectory.csv");
  const std::string sum_a = slurp(fs::path(a.output_dir) / "summary.json");
  const std::string ck_a = slurp(fs::path(a.output_dir) / "final.ckpt");
  run_scenario(a);
  CHECK(slurp(fs::path(a.output_dir) / "trajectory.csv") == csv_a);
  CHECK(slurp(fs::path(a.output_dir) / "summary.json") == sum_a);
  CHECK(slurp(fs::path(a.output_dir) / "final.ckpt") == ck_a);
  // the summary and checkpoint echo output_dir, the trajectory does not
  run_scenario(b);
  CHECK(slurp(fs::path(b.output_dir) / "trajectory.csv") == csv_a);
  fs::remove_all(a.output_dir);
  fs::remove_all(b.output_dir);
}

TEST_CASE("csv round trip keeps every digit") {
  RunConfig c = small("fsflow_runner_csv");
  const RunResult r = run_scenario(c);
  const auto back = read_csv((fs::path(c.output_dir) / "trajectory.csv").string());
  REQUIRE(back.size() == r.reports.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].t == r.reports[i].t);
    CHECK(back[i].E_high == r.reports[i].E_high);
    CHECK(back[i].identity_residual == r.reports[i].identity_residual);
    CHECK(back[i].min_rho == r.reports[i].min_rho);
  }
  fs::remove_all(c.output_dir);
}

TEST_CASE("oversized time step exits with the solver code") {
  RunConfig c = small("fsflow_runner_large_dt");
  c.n_h = 64;
  c.stepper.dt = 0.2;
  const RunResult r = run_scenario(c);
  CHECK(r.exit_code == kExitSolver);
  CHECK(r.termination == "step_rejected");
  CHECK(r.diagnostic.find("dt") != std::string::npos);
  CHECK(r.summary["termination"] == "step_rejected");
  fs::remove_all(c.output_dir);
}

TEST_CASE("resuming from the final checkpoint continues the run") {
  RunConfig c = small("fsflow_runner_resume");
  const RunResult first = run_scenario(c);
  const CheckpointData cp = read_checkpoint((fs::path(c.output_dir) / "final.ckpt").string(), make_grid(c));
  CHECK(cp.state.t == doctest::Approx(0.2));
  RunConfig longer = c;
  longer.t_end = 0.3;
  const RunResult second = run_scenario(longer, cp);
  CHECK(second.exit_code == kExitOk);
  CHECK(second.final_state.t == doctest::Approx(0.3));
  fs::remove_all(c.output_dir);
}

TEST_CASE("equilibrium check for the default law") {
  RunConfig c = small("unused");
  const EquilibriumCheck e = check_equilibrium(make_model(c));
  CHECK(e.hydrostatic_residual <= 1e-8);
  CHECK(e.isothermal_error <= 1e-12);
  CHECK(std::isinf(e.depth_bound));
}
