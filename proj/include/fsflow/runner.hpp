#pragma once

#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "fsflow/checkpoint.hpp"
#include "fsflow/config.hpp"
#include "fsflow/energy.hpp"

namespace fsflow {

enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitBlowup = 2, kExitSolver = 3 };

struct RunResult {
  int exit_code = kExitOk;
  /// completed, blowup, nonfinite, step_rejected or solver_failure.
  std::string termination = "completed";
  std::string diagnostic;
  long steps = 0;
  std::vector<EnergyReport> reports;
  State final_state;
  nlohmann::ordered_json summary;
};

/// CSV with the columns t, E_high, D_high, F_surf, E_low, D_low,
/// identity_residual, minJ, min_rho; values printed with 17 significant digits.
std::string format_csv(const std::vector<EnergyReport>& reports);

/// Reads a CSV written by format_csv back into (t, column) series.
std::vector<EnergyReport> read_csv(const std::string& path);

/// Decay fit of one functional over the samples after the initial level, or
/// null when the series does not satisfy the fit preconditions.
nlohmann::ordered_json fit_json(const std::vector<EnergyReport>& reports, double EnergyReport::*field);

nlohmann::ordered_json make_summary(const RunConfig& cfg, const RunResult& result);

/// Runs the configured scenario (optionally continuing from a checkpoint) and
/// writes trajectory.csv, summary.json and final.ckpt into cfg.output_dir.
/// Model construction errors propagate; runtime failures are mapped to exit
/// codes in the result.
RunResult run_scenario(const RunConfig& cfg, const std::optional<CheckpointData>& resume = std::nullopt);

/// Max |d_y P(rho_bar) + g rho_bar| on the vertical nodes, and the max error
/// against exp(-y) when the law is isothermal with K = g = 1 (NaN otherwise).
struct EquilibriumCheck {
  double hydrostatic_residual = 0.0;
  double isothermal_error = 0.0;
  double depth_bound = 0.0;
};
EquilibriumCheck check_equilibrium(const Model& model);

}  // namespace fsflow
