#include <CLI11.hpp>
#include <cstdio>
#include <iostream>
#include <numbers>

#include "fsflow/config.hpp"
#include "fsflow/errors.hpp"
#include "fsflow/runner.hpp"
#include "fsflow/verification.hpp"

using namespace fsflow;

namespace {

void print_config_error(const ConfigError& e) {
  if (e.violations().empty()) std::cerr << "config error: " << e.what() << '\n';
  for (const auto& v : e.violations()) std::cerr << "config error: " << v << '\n';
}

int guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    print_config_error(e);
    return kExitConfig;
  } catch (const AdmissibilityError& e) {
    std::cerr << "admissibility error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const SolverError& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return kExitSolver;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitSolver;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fsflow: compressible viscous free-surface simulator in flattening coordinates"};
  app.require_subcommand(1);
  std::string output_dir;
  std::vector<std::string> overrides;
  bool quiet = false;
  app.fallthrough();
  app.add_option("--output-dir", output_dir, "Directory for run artifacts (overrides output_dir)");
  app.add_option("--override", overrides, "Config assignment key.path=value (repeatable)")->allow_extra_args(false);
  app.add_flag("--quiet", quiet, "Suppress progress output");

  std::string config_path;
  auto* run_cmd = app.add_subcommand("run", "Run a scenario and write trajectory.csv, summary.json, final.ckpt");
  run_cmd->add_option("config", config_path, "Scenario JSON file")->required();
  std::string resume_path;
  run_cmd->add_option("--resume", resume_path, "Continue from a checkpoint written by an earlier run");

  auto* eq_cmd = app.add_subcommand("check-equilibrium", "Report hydrostatic residuals of the configured law");
  eq_cmd->add_option("config", config_path, "Scenario JSON file")->required();

  VerifyOptions vopts;
  auto* verify_cmd = app.add_subcommand("verify", "Run the acceptance property suites");
  verify_cmd->add_option("--presets", vopts.preset_dir, "Preset directory")->capture_default_str();
  verify_cmd->add_option("--only", vopts.only, "Criterion ids to run");
  verify_cmd->add_option("--seed", vopts.seed, "Seed for randomized checks")->capture_default_str();

  std::string csv_path;
  std::string column = "E_low";
  auto* fit_cmd = app.add_subcommand("fit", "Decay fit of a trajectory column");
  fit_cmd->add_option("trajectory", csv_path, "trajectory.csv")->required();
  fit_cmd->add_option("--column", column, "Column to fit")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  auto all_overrides = [&] {
    auto o = overrides;
    if (!output_dir.empty()) o.push_back("output_dir=\"" + output_dir + "\"");
    return o;
  };

  if (*run_cmd) {
    return guarded([&] {
      const RunConfig cfg = parse_config(config_path, all_overrides());
      std::optional<CheckpointData> resume;
      if (!resume_path.empty()) resume = read_checkpoint(resume_path, make_grid(cfg));
      if (!quiet) std::cerr << "running " << cfg.name << " to t = " << cfg.t_end << " with dt = " << cfg.stepper.dt << '\n';
      const RunResult res = run_scenario(cfg, resume);
      if (!quiet) {
        std::cout << "termination: " << res.termination << '\n';
        if (!res.diagnostic.empty()) std::cout << "diagnostic: " << res.diagnostic << '\n';
        std::cout << "steps: " << res.steps << ", samples: " << res.reports.size() << ", artifacts in " << cfg.output_dir
                  << '\n';
      }
      if (res.termination == "step_rejected") std::cerr << res.diagnostic << '\n';
      return res.exit_code;
    });
  }
  if (*eq_cmd) {
    return guarded([&] {
      const RunConfig cfg = parse_config(config_path, all_overrides());
      const EquilibriumCheck c = check_equilibrium(make_model(cfg));
      std::printf("hydrostatic_residual %.6e\n", c.hydrostatic_residual);
      if (c.isothermal_error == c.isothermal_error) std::printf("isothermal_error %.6e\n", c.isothermal_error);
      std::printf("depth_bound %.6e\n", c.depth_bound);
      return 0;
    });
  }
  if (*verify_cmd) {
    return guarded([&] {
      if (!output_dir.empty()) vopts.work_dir = output_dir;
      bool all = true;
      run_acceptance(vopts, [&](const CriterionResult& r) {
        all = all && r.pass;
        std::cout << format_result(r) << std::endl;
      });
      return all ? 0 : 1;
    });
  }
  if (*fit_cmd) {
    return guarded([&] {
      const auto reps = read_csv(csv_path);
      static const std::map<std::string, double EnergyReport::*> cols = {
          {"E_high", &EnergyReport::E_high}, {"D_high", &EnergyReport::D_high}, {"F_surf", &EnergyReport::F_surf},
          {"E_low", &EnergyReport::E_low},   {"D_low", &EnergyReport::D_low}};
      const auto it = cols.find(column);
      if (it == cols.end()) throw ConfigError("fit: unknown column " + column);
      const auto j = fit_json(reps, it->second);
      std::cout << (j.is_null() ? std::string("null") : j.dump(2)) << '\n';
      return j.is_null() ? kExitConfig : 0;
    });
  }
  return 0;
}
