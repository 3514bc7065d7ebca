#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "fsflow/model.hpp"

namespace fsflow {

/// Random smooth perturbation: horizontal modes |k| <= 3, quadratic vertical
/// profiles (velocity profiles carry a factor vanishing at the bottom), each
/// field scaled to sup-norm `amplitude`.
State random_small_state(const Grid& grid, std::mt19937_64& rng, double amplitude);
Rates random_rates(const Grid& grid, std::mt19937_64& rng, double amplitude);

/// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

struct VerifyOptions {
  /// Directory holding the preset JSON files.
  std::string preset_dir = "presets";
  /// Scratch directory for preset artifacts.
  std::string work_dir = "verify_out";
  std::uint64_t seed = 20240601;
  /// Criterion ids to run; empty runs all of 1..11.
  std::vector<int> only;
};

/// Runs the acceptance criteria in order, reporting each result through
/// `on_result` as soon as it is available.
std::vector<CriterionResult> run_acceptance(const VerifyOptions& opts,
                                            const std::function<void(const CriterionResult&)>& on_result = {});

/// "PASS  3  title  detail" line used by the CLI and the acceptance binary.
std::string format_result(const CriterionResult& r);

}  // namespace fsflow
