#pragma once

#include "fsflow/equilibrium.hpp"
#include "fsflow/grid.hpp"

namespace fsflow {

/// Viscosity admissibility: mu > 0, and mu' > 0 in 2D or mu' >= 0 in 3D.
/// Throws ConfigError.
void validate_viscosities(int d, double mu, double mu_prime);

/// Everything that stays fixed along a run: grid, pressure law, viscosities
/// and the tabulated hydrostatic equilibrium on the vertical nodes.
struct Model {
  Grid grid;
  PressureLaw law;
  double mu = 1.0;
  double mu_prime = 1.0;
  EquilibriumProfile eq;

  /// Second Lame coefficient (d-2)/d mu + mu'.
  double lame() const { return (grid.dim() - 2.0) / grid.dim() * mu + mu_prime; }
  double rho_star() const { return eq.rho_star; }
  double g() const { return law.g; }
};

Model make_model(const Grid& grid, const PressureLaw& law, double mu, double mu_prime);

/// Perturbation unknowns (q, u, eta) at one time instant.
struct State {
  Field q;
  VectorField u;
  SurfaceField eta;
  double t = 0.0;
};

State zero_state(const Grid& grid);

/// Time derivatives accompanying a state (manufactured, or from history).
struct Rates {
  Field dq_dt;
  VectorField du_dt;
  SurfaceField deta_dt;
};

Rates zero_rates(const Grid& grid);

}  // namespace fsflow
