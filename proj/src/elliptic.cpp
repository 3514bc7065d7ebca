#include "fsflow/elliptic.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "fsflow/errors.hpp"
#include "fsflow/model.hpp"
#include "mode_operators.hpp"

namespace fsflow {

namespace {

using detail::CMatrix;
using detail::CVector;
using detail::cplx;

constexpr double kCertify = 1e-9;

void check_sizes(const Grid& grid, const VectorField& f, const SurfaceVector& psi) {
  const auto d = std::size_t(grid.dim());
  bool ok = f.size() == d && psi.size() == d;
  for (const auto& c : f) ok = ok && c.rows() == grid.vertical_size() && c.cols() == grid.surface_size();
  for (const auto& c : psi) ok = ok && c.size() == grid.surface_size();
  if (!ok) throw ConfigError("elliptic: field sizes do not match the grid");
}

std::vector<SpectralField> forward_all(const Grid& grid, const VectorField& f) {
  std::vector<SpectralField> out;
  for (const auto& c : f) out.push_back(grid.forward(c));
  return out;
}

std::vector<SpectralSurface> forward_all(const Grid& grid, const SurfaceVector& f) {
  std::vector<SpectralSurface> out;
  for (const auto& c : f) out.push_back(grid.forward(c));
  return out;
}

double norm_sum(const VectorField& f) {
  double s = 0.0;
  for (const auto& c : f) s += c.norm();
  return s;
}

double norm_sum(const SurfaceVector& f) {
  double s = 0.0;
  for (const auto& c : f) s += c.norm();
  return s;
}

Field interior_rows(const Field& f) { return f.middleRows(1, f.rows() - 2); }

void certify(double residual, const char* what) {
  if (!(residual <= kCertify)) {
    std::ostringstream os;
    os << "elliptic: " << what << " residual " << residual << " exceeds " << kCertify;
    throw SolverError(os.str(), -1);
  }
}

double relative(double r, double scale) { return scale > 0 ? r / scale : r; }

}  // namespace

LameSolution solve_lame(const Grid& grid, const LameProblem& pb) {
  validate_viscosities(grid.dim(), pb.mu, pb.mu_prime);
  check_sizes(grid, pb.f, pb.psi);
  const int d = grid.dim();
  const Eigen::Index n = grid.vertical_size();
  const double lam = (d - 2.0) / d * pb.mu + pb.mu_prime;

  const auto f_hat = forward_all(grid, pb.f);
  const auto psi_hat = forward_all(grid, pb.psi);
  std::vector<SpectralField> u_hat(d, SpectralField::Zero(n, grid.surface_size()));

  for (Eigen::Index col = 0; col < grid.surface_size(); ++col) {
    const auto m = detail::mode_derivatives(grid, col);
    CMatrix M = CMatrix::Zero(d * n, d * n);
    CVector rhs = CVector::Zero(d * n);
    for (int i = 0; i < d; ++i) {
      const Eigen::Index r0 = i * n;
      for (int j = 0; j < d; ++j) {
        M.block(r0 + 1, j * n, n - 2, n) = detail::lame_block(m, i, j, pb.mu, lam).middleRows(1, n - 2);
        M.block(r0, j * n, 1, n) = detail::surface_stress_row(m, i, j, pb.mu, pb.mu_prime);
      }
      M(r0 + n - 1, r0 + n - 1) = 1.0;
      rhs.segment(r0 + 1, n - 2) = f_hat[i].col(col).segment(1, n - 2);
      rhs(r0) = psi_hat[i](col);
    }
    Eigen::PartialPivLU<CMatrix> lu(M);
    if (!(lu.rcond() > 1e-15)) {
      std::ostringstream os;
      os << "solve_lame: singular block for mode " << col;
      throw SolverError(os.str(), long(col));
    }
    const CVector x = lu.solve(rhs);
    for (int i = 0; i < d; ++i) u_hat[i].col(col) = x.segment(i * n, n);
  }

  LameSolution sol;
  for (int i = 0; i < d; ++i) sol.u.push_back(grid.inverse(u_hat[i]));

  // A posteriori residuals in physical space.
  Field div = Field::Zero(n, grid.surface_size());
  for (int k = 0; k < d; ++k) div += derivative(grid, sol.u[k], k);
  double r_int = 0.0, s_int = norm_sum(pb.f);
  for (int i = 0; i < d; ++i) {
    Field lap = Field::Zero(n, grid.surface_size());
    for (int k = 0; k < d; ++k) lap += derivative(grid, derivative(grid, sol.u[i], k), k);
    const Field grad_div = derivative(grid, div, i);
    r_int += interior_rows(-pb.mu * lap - lam * grad_div - pb.f[i]).norm();
    s_int += interior_rows(pb.mu * lap).norm() + interior_rows(lam * grad_div).norm();
  }
  const int v = d - 1;
  double r_top = 0.0, s_top = norm_sum(pb.psi);
  for (int i = 0; i < d; ++i) {
    SurfaceField traction;
    if (i < v)
      traction = -pb.mu * surface_trace(derivative(grid, sol.u[i], v) + derivative(grid, sol.u[v], i));
    else
      traction = -surface_trace(2.0 * pb.mu * derivative(grid, sol.u[v], v) + (pb.mu_prime - 2.0 * pb.mu / d) * div);
    r_top += (traction - pb.psi[i]).norm();
    s_top += traction.norm();
  }
  double r_bot = 0.0;
  for (int i = 0; i < d; ++i) r_bot += bottom_trace(sol.u[i]).norm();

  sol.interior_residual = relative(r_int, s_int);
  sol.surface_residual = relative(r_top, s_top);
  sol.bottom_residual = relative(r_bot, norm_sum(sol.u));
  certify(sol.interior_residual, "Lame interior");
  certify(sol.surface_residual, "Lame surface stress");
  certify(sol.bottom_residual, "Lame no-slip");
  return sol;
}

StokesSolution solve_stokes(const Grid& grid, const StokesProblem& pb) {
  validate_viscosities(grid.dim(), pb.mu, pb.mu_prime);
  check_sizes(grid, pb.f, pb.psi);
  check_sizes(grid, pb.f, pb.phi_b);
  if (pb.h.rows() != grid.vertical_size() || pb.h.cols() != grid.surface_size())
    throw ConfigError("elliptic: divergence data size does not match the grid");
  const int d = grid.dim();
  const int v = d - 1;
  const Eigen::Index n = grid.vertical_size();

  const auto f_hat = forward_all(grid, pb.f);
  const auto psi_hat = forward_all(grid, pb.psi);
  const auto phi_hat = forward_all(grid, pb.phi_b);
  const SpectralField h_hat = grid.forward(pb.h);

  // Divergence theorem on the horizontal mean.
  {
    const double data_scale = norm_sum(pb.f) + pb.h.norm() + norm_sum(pb.psi) + norm_sum(pb.phi_b);
    const cplx flux = psi_hat[v](0) - phi_hat[v](0);
    const cplx mean_h = grid.vertical_weights().cast<cplx>().dot(h_hat.col(0));
    const double mismatch = std::abs(mean_h - flux);
    if (mismatch > 1e-10 * std::max(1.0, data_scale / std::sqrt(double(grid.surface_size())))) {
      std::ostringstream os;
      os << "solve_stokes: incompatible data, integral of div u = " << mean_h.real()
         << " but boundary flux = " << flux.real();
      throw CompatibilityError(os.str(), mismatch);
    }
  }

  std::vector<SpectralField> u_hat(d, SpectralField::Zero(n, grid.surface_size()));
  SpectralField p_hat = SpectralField::Zero(n, grid.surface_size());
  const Eigen::Index size = (d + 1) * n;
  const Eigen::VectorXd mean_w = grid.vertical_weights() / grid.depth();
  // Chebyshev coefficient functionals of the two highest degrees on the
  // Gauss-Lobatto nodes (row 0 is x = 1).
  const Eigen::Index N = n - 1;
  Eigen::RowVectorXd top(n), next(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double cbar = (j == 0 || j == N) ? 2.0 : 1.0;
    top(j) = std::cos(double(N * j) * std::numbers::pi / N) / cbar;
    next(j) = std::cos(double((N - 1) * j) * std::numbers::pi / N) / cbar;
  }

  for (Eigen::Index col = 0; col < grid.surface_size(); ++col) {
    const auto m = detail::mode_derivatives(grid, col);
    const bool zero_mode = grid.wavenumber_sq()(col) == 0.0;
    CMatrix M = CMatrix::Zero(size, size);
    CVector rhs = CVector::Zero(size);
    const Eigen::Index pc = d * n;
    for (int i = 0; i < d; ++i) {
      const Eigen::Index r0 = i * n;
      M.block(r0 + 1, r0, n - 2, n) = (-pb.mu * m.lap).middleRows(1, n - 2);
      M.block(r0 + 1, pc, n - 2, n) = m.dk[i].middleRows(1, n - 2);
      M(r0, r0) = 1.0;
      M(r0 + n - 1, r0 + n - 1) = 1.0;
      rhs.segment(r0 + 1, n - 2) = f_hat[i].col(col).segment(1, n - 2);
      rhs(r0) = psi_hat[i](col);
      rhs(r0 + n - 1) = phi_hat[i](col);
      M.block(pc + 1, i * n, n - 2, n) = m.dk[i].middleRows(1, n - 2);
    }
    rhs.segment(pc + 1, n - 2) = h_hat.col(col).segment(1, n - 2);
    if (zero_mode) {
      // Interior collocation of d_d u_d = h is rank deficient against both
      // Dirichlet rows for the mean mode; continuity at the bottom node takes
      // the place of the bottom velocity row, which then holds up to the
      // compatibility mismatch.
      const Eigen::Index rb = v * n + n - 1;
      M.row(rb).setZero();
      M.block(rb, v * n, 1, n) = m.dk[v].row(n - 1);
      rhs(rb) = h_hat(n - 1, col);
    }
    // Pressure of degree <= n-3, or degree <= n-2 with zero mean for the
    // horizontal mean mode, which removes the spurious pressure modes.
    M.block(pc, pc, 1, n) = top.cast<cplx>();
    if (zero_mode)
      M.block(pc + n - 1, pc, 1, n) = mean_w.transpose().cast<cplx>();
    else
      M.block(pc + n - 1, pc, 1, n) = next.cast<cplx>();

    Eigen::PartialPivLU<CMatrix> lu(M);
    if (!(lu.rcond() > 1e-15)) {
      std::ostringstream os;
      os << "solve_stokes: singular block for mode " << col;
      throw SolverError(os.str(), long(col));
    }
    const CVector x = lu.solve(rhs);
    for (int i = 0; i < d; ++i) u_hat[i].col(col) = x.segment(i * n, n);
    p_hat.col(col) = x.segment(pc, n);
  }

  StokesSolution sol;
  for (int i = 0; i < d; ++i) sol.u.push_back(grid.inverse(u_hat[i]));
  sol.p = grid.inverse(p_hat);
  for (int i = 0; i < d; ++i) sol.grad_p.push_back(derivative(grid, sol.p, i));

  double r_mom = 0.0, s_mom = norm_sum(pb.f);
  Field div = Field::Zero(n, grid.surface_size());
  for (int i = 0; i < d; ++i) {
    Field lap = Field::Zero(n, grid.surface_size());
    for (int k = 0; k < d; ++k) lap += derivative(grid, derivative(grid, sol.u[i], k), k);
    r_mom += interior_rows(-pb.mu * lap + sol.grad_p[i] - pb.f[i]).norm();
    s_mom += interior_rows(pb.mu * lap).norm() + interior_rows(sol.grad_p[i]).norm();
    div += derivative(grid, sol.u[i], i);
  }
  double r_bc = 0.0, s_bc = norm_sum(pb.psi) + norm_sum(pb.phi_b) + norm_sum(sol.u);
  for (int i = 0; i < d; ++i) {
    r_bc += (surface_trace(sol.u[i]) - pb.psi[i]).norm() + (bottom_trace(sol.u[i]) - pb.phi_b[i]).norm();
    s_bc += surface_trace(sol.u[i]).norm() + bottom_trace(sol.u[i]).norm();
  }
  sol.momentum_residual = relative(r_mom, s_mom);
  sol.divergence_residual =
      relative(interior_rows(div - pb.h).norm(), interior_rows(div).norm() + interior_rows(pb.h).norm() + norm_sum(sol.u) / grid.depth());
  sol.boundary_residual = relative(r_bc, s_bc);
  certify(sol.momentum_residual, "Stokes momentum");
  certify(sol.divergence_residual, "Stokes divergence");
  certify(sol.boundary_residual, "Stokes boundary");
  return sol;
}

}  // namespace fsflow
