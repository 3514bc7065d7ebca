#pragma once

#include <cstdint>
#include <json.hpp>
#include <numbers>
#include <string>
#include <vector>

#include "fsflow/dynamics.hpp"
#include "fsflow/energy.hpp"

namespace fsflow {

struct LawConfig {
  /// "isothermal", "gamma_law" or "saturating".
  std::string kind = "isothermal";
  double K = 1.0;
  double gamma = 1.4;
  double rho_scale = 1.0;
  double p_atm = 1.0;
  double g = 1.0;
  bool operator==(const LawConfig&) const = default;
};

struct RunConfig {
  std::string name = "run";
  int d = 2;
  double L = 2.0 * std::numbers::pi;
  int n_h = 32;
  int n_v = 33;
  double b = 1.0;
  LawConfig law;
  double mu = 1.0;
  double mu_prime = 1.0;
  InitialFamily family = InitialFamily::single_mode_eta;
  double amplitude = 1e-3;
  StepperConfig stepper;
  EnergyConfig energy;
  double t_end = 1.0;
  std::string output_dir = "out";
  std::uint64_t seed = 0;
  bool operator==(const RunConfig&) const = default;
};

/// Validates every key and returns the config, or throws ConfigError with
/// one message per violation (prefixed by its key path). A depth beyond the
/// admissible bound of the law is reported as AdmissibilityError when it is
/// the only violation.
RunConfig config_from_json(const nlohmann::json& j);
nlohmann::ordered_json to_json(const RunConfig& cfg);

/// Applies "dotted.key=value" assignments; values are parsed as JSON when
/// possible and taken as strings otherwise.
void apply_overrides(nlohmann::json& j, const std::vector<std::string>& overrides);

RunConfig parse_config(const std::string& path, const std::vector<std::string>& overrides = {});

PressureLaw make_law(const LawConfig& law);
Grid make_grid(const RunConfig& cfg);
Model make_model(const RunConfig& cfg);

}  // namespace fsflow
