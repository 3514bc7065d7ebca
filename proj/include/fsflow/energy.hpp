#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "fsflow/dynamics.hpp"
#include "fsflow/geometry.hpp"
#include "fsflow/model.hpp"

namespace fsflow {

/// Derivative counts of the two functional families. The high family uses
/// orders 2K - 2j and the low family excludes undifferentiated q and eta
/// (minimal derivative count 1, or 2 with `low_count_two`).
struct EnergyConfig {
  int K_high = 2;
  int K_low = 1;
  int cadence = 10;
  bool low_count_two = false;
  bool operator==(const EnergyConfig&) const = default;
};

/// Throws ConfigError unless 1 <= K_low < K_high <= 4 and cadence >= 1.
void validate(const EnergyConfig& cfg);

/// Backward-difference first time derivatives (cur - prev) / (t_cur - t_prev).
Rates backward_rates(const State& prev, const State& cur);

/// Functionals evaluated at one time level; `dt1` holds first time
/// derivatives when history is available (j = 1 terms), otherwise only the
/// j = 0 terms enter.
double energy_high(const Grid& grid, const State& s, const Rates* dt1, const EnergyConfig& cfg);
double dissipation_high(const Grid& grid, const State& s, const Rates* dt1, const EnergyConfig& cfg);
double surface_F(const Grid& grid, const State& s, const EnergyConfig& cfg);
double energy_low(const Grid& grid, const State& s, const Rates* dt1, const EnergyConfig& cfg);
double dissipation_low(const Grid& grid, const State& s, const Rates* dt1, const EnergyConfig& cfg);

/// 1/2 [ int J (q^2 / h'(rho) + rho |u|^2) + int_Sigma rho* g eta^2 ].
double l2_energy(const Model& model, const State& s);

/// Terms of the basic L2 energy identity at the middle level of a window.
struct IdentityBalance {
  double energy_rate = 0.0;  ///< d/dt of l2_energy by differences
  double dissipation = 0.0;  ///< int J (mu/2 |D0_A u|^2 + mu' |div_A u|^2)
  double rhs = 0.0;          ///< cubic right-hand side
  double residual() const { return std::abs(energy_rate + dissipation - rhs); }
};

/// Centered differences when both neighbours exist, one-sided otherwise.
/// Throws DomainError when the window holds a single level.
IdentityBalance identity_balance(const Model& model, const State* prev, const State& cur, const State* next);
double identity_residual(const Model& model, const State* prev, const State& cur, const State* next);

struct EnergyReport {
  double t = 0.0;
  double E_high = 0.0;
  double D_high = 0.0;
  double F_surf = 0.0;
  double E_low = 0.0;
  double D_low = 0.0;
  double identity_residual = 0.0;
  double min_J = 1.0;
  double min_rho = 0.0;
  /// Viscous dissipation of the identity, kept for scale comparisons.
  double dissipation_l2 = 0.0;
};

EnergyReport evaluate_report(const Model& model, const EnergyConfig& cfg, const StepWindow& window);

/// Collects one report per monitored level.
class EnergyMonitor {
 public:
  EnergyMonitor(const Model& model, EnergyConfig cfg) : model_(model), cfg_(cfg) { validate(cfg_); }
  void operator()(const StepWindow& window) { reports_.push_back(evaluate_report(model_, cfg_, window)); }
  const std::vector<EnergyReport>& reports() const { return reports_; }

 private:
  const Model& model_;
  EnergyConfig cfg_;
  std::vector<EnergyReport> reports_;
};

struct DecayFit {
  double rate = 0.0;
  std::string model;  ///< "algebraic" or "exponential"
  /// Coefficient of determination of the selected fit.
  double goodness = 0.0;
  double algebraic_rate = 0.0;
  double exponential_rate = 0.0;
  double algebraic_sse = 0.0;
  double exponential_sse = 0.0;
};

/// Least-squares fits of log v against log(1+t) and against t; the model
/// with the smaller squared error in log v is selected. Requires >= 10
/// positive samples spanning a decade of (1+t); throws DomainError otherwise.
DecayFit decay_fit(const std::vector<double>& t, const std::vector<double>& v);

/// Running supremum over samples of E_high + int D_high + F/(1+t)
/// + int F/(1+r)^2 + (1+t) E_low + int (1+r) D_low, integrals by the
/// trapezoidal rule over the samples.
std::vector<double> time_weighted_aggregate(const std::vector<EnergyReport>& reports);

}  // namespace fsflow
