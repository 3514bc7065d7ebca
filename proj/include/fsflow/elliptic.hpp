#pragma once

#include "fsflow/grid.hpp"

namespace fsflow {

/// -mu Lap u - ((d-2)/d mu + mu') grad div u = f in Omega,
/// -S u e_d = psi on Sigma, u = 0 on Sigma_b.
struct LameProblem {
  VectorField f;
  SurfaceVector psi;
  double mu = 1.0;
  double mu_prime = 1.0;
};

struct LameSolution {
  VectorField u;
  /// A posteriori residuals relative to the magnitude of the balanced terms.
  double interior_residual = 0.0;
  double surface_residual = 0.0;
  double bottom_residual = 0.0;
};

/// Per-mode dense LU with boundary rows replacing collocation rows. Throws
/// SolverError (carrying the flattened mode index) for a singular block or a
/// residual above 1e-9, ConfigError for inadmissible viscosities.
LameSolution solve_lame(const Grid& grid, const LameProblem& problem);

/// -mu Lap u + grad p = f, div u = h in Omega, u = psi on Sigma, u = phi_b on Sigma_b.
struct StokesProblem {
  VectorField f;
  Field h;
  SurfaceVector psi;
  SurfaceVector phi_b;
  double mu = 1.0;
  double mu_prime = 1.0;
};

struct StokesSolution {
  VectorField u;
  /// Pressure; the horizontal mean mode is fixed by zero vertical mean.
  Field p;
  VectorField grad_p;
  double momentum_residual = 0.0;
  double divergence_residual = 0.0;
  double boundary_residual = 0.0;
};

/// Per-mode saddle-point solve with continuity collocated at interior nodes
/// and the pressure two degrees below the velocity. Throws CompatibilityError when the mean of h
/// does not match the boundary flux within 1e-10, SolverError on failed
/// certification.
StokesSolution solve_stokes(const Grid& grid, const StokesProblem& problem);

}  // namespace fsflow
