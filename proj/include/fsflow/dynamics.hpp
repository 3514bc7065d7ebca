#pragma once

#include <Eigen/Dense>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include "fsflow/geometry.hpp"
#include "fsflow/model.hpp"

namespace fsflow {

enum class InitialFamily { single_mode_eta, q_bump, shear };

/// single_mode_eta: eta = A cos(2 pi x / L), q = u = 0.
/// q_bump: q = A cos(2 pi x / L) (1 + y/b)^2, u = eta = 0.
/// shear: u_1 = A cos(2 pi x / L) sin(pi (y+b) / (2b)) (y+b)/b, rest 0.
/// Throws DomainError for a negative amplitude.
State initialize_state(const Grid& grid, InitialFamily family, double amplitude);

std::string to_string(InitialFamily family);
InitialFamily initial_family_from_string(const std::string& name);

/// Constant-coefficient tendencies (-h'(rho_bar) div(rho_bar u),
/// -grad q + rho_bar^{-1} div S u, u_d on Sigma). The dynamic condition is
/// not part of the tendency; the implicit solve imposes it as the surface row.
Rates linear_operator_apply(const Model& model, const State& state);

enum class Scheme { imex_euler, imex_bdf2 };

std::string to_string(Scheme scheme);
Scheme scheme_from_string(const std::string& name);

struct StepperConfig {
  double dt = 1e-3;
  Scheme scheme = Scheme::imex_euler;
  double cfl_safety = 0.9;
  /// Freeze every G term to zero (linear-regime studies).
  bool linear_only = false;
  bool operator==(const StepperConfig&) const = default;
};

/// Explicit right-hand sides of the perturbed linear form at one time level.
struct ExplicitTerms {
  Field G1;
  VectorField G2;
  SurfaceField G3;
  SurfaceVector G4;
};

/// Everything a restart needs besides the current state.
struct StepperHistory {
  std::optional<State> previous;
  std::optional<ExplicitTerms> previous_terms;
};

/// IMEX integrator: the constant-coefficient block (q-coupling, viscous
/// momentum, dynamic and no-slip boundary rows, kinematic row) is implicit and
/// solved per retained horizontal mode by a cached dense LU; geometry coupling
/// and the G remainders are explicit. BDF2 starts with one Euler step.
class Stepper {
 public:
  Stepper(const Model& model, StepperConfig config);

  const StepperConfig& config() const { return config_; }
  const Model& model() const { return *model_; }

  /// Largest admissible dt for `state` before the safety factor.
  double stable_dt(const State& state) const;

  /// Advance by one step. Throws StepRejectedError when dt exceeds
  /// cfl_safety * stable_dt, GeometryError / StateBlowupError on blow-up.
  State step(const State& state);

  const StepperHistory& history() const { return history_; }
  void set_history(StepperHistory history) { history_ = std::move(history); }
  void reset_history() { history_ = {}; }

 private:
  struct ModeFactor {
    Eigen::Index col;
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu;
  };
  const std::vector<ModeFactor>& factors(double a);
  ExplicitTerms explicit_terms(const State& state, const Geometry& geom) const;

  std::shared_ptr<const Model> model_;
  StepperConfig config_;
  StepperHistory history_;
  double laplacian_radius_ = 0.0;
  std::map<double, std::vector<ModeFactor>> cache_;
};

/// Three consecutive time levels around a monitored step; `prev` and `next`
/// are null at the ends of a run.
struct StepWindow {
  const State* prev = nullptr;
  const State& cur;
  const State* next = nullptr;
  double dt = 0.0;
  long step = 0;
};

using Monitor = std::function<void(const StepWindow&)>;

struct Trajectory {
  State final_state;
  long steps = 0;
  /// "completed", "blowup" (geometry or density flag) or "nonfinite".
  std::string termination = "completed";
  std::string diagnostic;
};

/// Repeated steps until t_end; `monitor` sees every `cadence`-th level and
/// the final one. Blow-up terminates early with a diagnostic record; step
/// rejection propagates.
Trajectory run(Stepper& stepper, const State& initial, double t_end, int cadence, const Monitor& monitor);

}  // namespace fsflow
