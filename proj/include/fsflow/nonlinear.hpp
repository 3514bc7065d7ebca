#pragma once

#include "fsflow/geometry.hpp"
#include "fsflow/model.hpp"

namespace fsflow {

/// rho = h^{-1}(h(rho_bar) + q - g phi). Throws StateBlowupError when the
/// argument leaves the enthalpy range or min rho <= rho* / 4.
Field density_from_q(const Model& model, const Field& q, const Geometry& geom);

/// (q - g phi)^2 * int_0^1 (h^{-1})''(h(rho_bar) + s (q - g phi)) (1 - s) ds,
/// by 16-point Gauss-Legendre quadrature.
Field remainder_h_inverse(const Model& model, const Field& q, const Geometry& geom);

/// (q - g eta)^2 * int_0^1 (P o h^{-1})''(s (q - g eta)) (1 - s) ds on Sigma.
SurfaceField remainder_P_h_inverse(const PressureLaw& law, const SurfaceField& q_trace, const SurfaceField& eta);

/// Inputs shared by the remainder evaluations: the state, its geometry, the
/// reconstructed density and the time derivatives entering the transport
/// operator (d_t phi is the lift of d_t eta).
struct RemainderInputs {
  const State& state;
  const Geometry& geom;
  const Field& rho;
  const Field& dphi_dt;
  const VectorField& du_dt;
};

Field eval_G1(const Model& model, const RemainderInputs& in);
VectorField eval_G2(const Model& model, const RemainderInputs& in);
SurfaceField eval_G3(const Grid& grid, const State& state);
SurfaceVector eval_G4(const Model& model, const State& state, const Geometry& geom);

/// Individual momentum remainders (G^{2,1} .. G^{2,4}), exposed for per-term tests.
std::vector<VectorField> eval_G2_terms(const Model& model, const RemainderInputs& in);

struct NonlinearBundle {
  Field G1;
  VectorField G2;
  SurfaceField G3;
  SurfaceVector G4;
  Field rho;
  Field Q_diag;
  /// max |first form - second form| of the transport diagnostic.
  double Q_discrepancy = 0.0;
};

/// All remainders at once. `rates.deta_dt` drives d_t phi, `rates.du_dt`
/// enters G^{2,4} and `rates.dq_dt` the diagnostic Q. With `filtered` the
/// outputs are truncated by the 2/3 rule.
NonlinearBundle evaluate_nonlinear(const Model& model, const State& state, const Geometry& geom, const Rates& rates,
                                   bool filtered = true);

/// Q = d_t q - J^{-1} d_t phi d_d q + u . grad_A q (first form) and
/// -h'(rho_bar) div(rho_bar u) + G^{1,2} (second form). Returns the second
/// form; the discrepancy is written to `discrepancy` when given.
Field diagnostic_Q(const Model& model, const RemainderInputs& in, const Field& dq_dt, double* discrepancy = nullptr);

/// Residuals of the four equations of a system evaluated on a state with
/// given time derivatives. Volume residuals are fields, the kinematic one a
/// surface field, the dynamic one a d-vector on Sigma.
struct EquationResiduals {
  Field mass;
  VectorField momentum;
  SurfaceField kinematic;
  SurfaceVector dynamic;
};

/// Constant-coefficient left-hand sides minus right-hand sides of the
/// perturbed linear form, with G set to zero.
EquationResiduals linear_residuals(const Model& model, const State& state, const Rates& rates);
/// Linear residuals minus the G remainders (the split form).
EquationResiduals split_residuals(const Model& model, const State& state, const Rates& rates);
/// The full nonlinear system in flattened coordinates, evaluated directly
/// from the covariant operators.
EquationResiduals full_residuals(const Model& model, const State& state, const Rates& rates);

/// Projects the full dynamic residual R onto (R . tau^i, R . N / |N|^2), the
/// components that the split form balances.
SurfaceVector project_dynamic(const Grid& grid, const SurfaceVector& full, const SurfaceField& eta);

}  // namespace fsflow
