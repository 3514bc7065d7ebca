#pragma once

// Per-horizontal-mode blocks of the constant-coefficient operators. After a
// horizontal Fourier transform, d_i (i < d-1) acts as multiplication by
// i kappa_i and d_d as the Chebyshev matrix D on the column of vertical values.

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "fsflow/grid.hpp"

namespace fsflow::detail {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

struct ModeDerivatives {
  int d = 2;
  Eigen::Index n = 0;
  std::vector<CMatrix> dk;  ///< d matrices, one per direction
  CMatrix lap;              ///< D^2 - |kappa|^2
};

inline ModeDerivatives mode_derivatives(const Grid& grid, Eigen::Index col) {
  ModeDerivatives m;
  m.d = grid.dim();
  m.n = grid.vertical_size();
  const CMatrix I = CMatrix::Identity(m.n, m.n);
  for (int i = 0; i < m.d - 1; ++i) m.dk.push_back(cplx(0.0, grid.wavenumber(i, col)) * I);
  m.dk.push_back(grid.vertical_diff().cast<cplx>());
  m.lap = grid.vertical_diff2().cast<cplx>() - grid.wavenumber_sq()(col) * I;
  return m;
}

/// Block (i, j) of -mu Lap u - lam grad div u.
inline CMatrix lame_block(const ModeDerivatives& m, int i, int j, double mu, double lam) {
  CMatrix out = -lam * m.dk[i] * m.dk[j];
  if (i == j) out -= mu * m.lap;
  return out;
}

/// Row (component i, block j) of -S u e_d at the surface node, with
/// S u = mu (grad u + grad u^T) + (mu' - 2 mu / d) div u I.
inline Eigen::RowVectorXcd surface_stress_row(const ModeDerivatives& m, int i, int j, double mu, double mu_prime) {
  const int v = m.d - 1;
  Eigen::RowVectorXcd out = Eigen::RowVectorXcd::Zero(m.n);
  if (i < v) {
    if (j == v) out -= mu * m.dk[i].row(0);
    if (j == i) out -= mu * m.dk[v].row(0);
  } else {
    const double bulk = mu_prime - 2.0 * mu / m.d;
    out -= bulk * m.dk[j].row(0);
    if (j == v) out -= 2.0 * mu * m.dk[v].row(0);
  }
  return out;
}

/// Gather column `col` of a list of spectral fields into one stacked vector.
inline CVector stack_column(const std::vector<SpectralField>& fields, Eigen::Index col) {
  const Eigen::Index n = fields.empty() ? 0 : fields[0].rows();
  CVector out(n * Eigen::Index(fields.size()));
  for (std::size_t f = 0; f < fields.size(); ++f) out.segment(Eigen::Index(f) * n, n) = fields[f].col(col);
  return out;
}

}  // namespace fsflow::detail
