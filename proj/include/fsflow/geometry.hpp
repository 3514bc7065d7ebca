#pragma once

#include <vector>

#include "fsflow/grid.hpp"

namespace fsflow {

using MatrixField = std::vector<std::vector<Field>>;

/// Flattening-map snapshot for a surface function eta.
///
/// Phi(x) = (x_h, x_d + phi), phi = (1 + x_d / b) * P eta, J = 1 + d_d phi and
/// A = (grad Phi^{-1})^T, which has an identity upper-left block, zeros in
/// the last row left of the diagonal, and last column (-d_i phi / J, 1 / J).
struct Geometry {
  Field eta_bar;
  Field phi;
  VectorField grad_phi;
  Field J;
  MatrixField A;
  SurfaceVector N;  ///< (-D eta, 1) on Sigma
  double min_J = 1.0;
  double max_J = 1.0;
  bool degenerate = false;
};

inline constexpr double kDegenerateJacobian = 0.05;

/// Per-mode Poisson extension f_hat(k) exp(|kappa| x_d).
Field poisson_extend(const Grid& grid, const SurfaceField& eta);
/// (1 + x_d / b) * P s; the linear map eta -> phi (also used for d_t phi).
Field lift_surface(const Grid& grid, const SurfaceField& s);

/// Throws GeometryError when min J <= 0.05 unless `allow_degenerate`.
Geometry build_geometry(const Grid& grid, const SurfaceField& eta, bool allow_degenerate = false);
Geometry flat_geometry(const Grid& grid);

/// (grad_A f)_i = A_ij d_j f.
VectorField grad_A(const Grid& grid, const Geometry& geom, const Field& f);
/// div_A v = A_ij d_j v_i.
Field div_A(const Grid& grid, const Geometry& geom, const VectorField& v);
/// G[l][k] = (grad_A u_l)_k = A_km d_m u_l.
MatrixField grad_A_vector(const Grid& grid, const Geometry& geom, const VectorField& u);
/// Trace-free symmetric part D0_A u = grad_A u + (grad_A u)^T - (2/d) div_A u I.
MatrixField deviatoric_A(const Grid& grid, const Geometry& geom, const VectorField& u);
/// S_A u = mu D0_A u + mu' div_A u I. Throws ConfigError for inadmissible viscosities.
MatrixField stress_SA(const Grid& grid, const Geometry& geom, const VectorField& u, double mu, double mu_prime);
/// (div_A S)_i = A_lk d_k S_il.
VectorField div_A_matrix(const Grid& grid, const Geometry& geom, const MatrixField& S);

/// integral of J (mu/2 |D0_A u|^2 + mu' |div_A u|^2), the viscous dissipation.
double viscous_dissipation(const Grid& grid, const Geometry& geom, const VectorField& u, double mu, double mu_prime);

}  // namespace fsflow
