#include "fsflow/geometry.hpp"

#include <cmath>
#include <sstream>

#include "fsflow/errors.hpp"
#include "fsflow/model.hpp"

namespace fsflow {

namespace {

using cplx = std::complex<double>;

// Spectral extension c(k) exp(|kappa| y) and its vertical derivative |kappa| c exp(|kappa| y).
void extend_spectral(const Grid& grid, const SurfaceField& eta, Field* value, Field* dvalue) {
  const SpectralSurface c = grid.forward(eta);
  const Eigen::VectorXd& y = grid.vertical_nodes();
  const Eigen::ArrayXd kabs = grid.wavenumber_sq().sqrt();
  SpectralField ext(grid.vertical_size(), grid.surface_size());
  SpectralField dext(grid.vertical_size(), grid.surface_size());
  for (Eigen::Index col = 0; col < ext.cols(); ++col) {
    const Eigen::ArrayXd decay = (kabs(col) * y.array()).exp();
    ext.col(col) = c(col) * decay.matrix().cast<cplx>();
    dext.col(col) = (kabs(col) * c(col)) * decay.matrix().cast<cplx>();
  }
  if (value) *value = grid.inverse(ext);
  if (dvalue) *dvalue = grid.inverse(dext);
}

Eigen::ArrayXd lift_factor(const Grid& grid) { return 1.0 + grid.vertical_nodes().array() / grid.depth(); }

}  // namespace

Field poisson_extend(const Grid& grid, const SurfaceField& eta) {
  Field out;
  extend_spectral(grid, eta, &out, nullptr);
  return out;
}

Field lift_surface(const Grid& grid, const SurfaceField& s) {
  Field ext = poisson_extend(grid, s);
  ext.array().colwise() *= lift_factor(grid);
  return ext;
}

Geometry build_geometry(const Grid& grid, const SurfaceField& eta, bool allow_degenerate) {
  const int d = grid.dim();
  const int v = d - 1;
  Geometry geom;
  Field deta_bar;
  extend_spectral(grid, eta, &geom.eta_bar, &deta_bar);

  const Eigen::ArrayXd lift = lift_factor(grid);
  geom.phi = geom.eta_bar;
  geom.phi.array().colwise() *= lift;

  geom.grad_phi.resize(d);
  for (int i = 0; i < v; ++i) geom.grad_phi[i] = horizontal_derivative(grid, geom.phi, i, 1);
  Field dphi = deta_bar;
  dphi.array().colwise() *= lift;
  dphi += geom.eta_bar / grid.depth();
  geom.grad_phi[v] = dphi;

  geom.J = dphi.array() + 1.0;
  geom.min_J = geom.J.minCoeff();
  geom.max_J = geom.J.maxCoeff();
  geom.degenerate = geom.min_J <= kDegenerateJacobian;
  if (geom.degenerate && !allow_degenerate) {
    std::ostringstream os;
    os << "geometry: flattening map degenerate, min J = " << geom.min_J;
    throw GeometryError(os.str(), geom.min_J);
  }

  const Field zero = Field::Zero(grid.vertical_size(), grid.surface_size());
  const Field one = Field::Ones(grid.vertical_size(), grid.surface_size());
  const Field inv_J = geom.J.cwiseInverse();
  geom.A.assign(d, std::vector<Field>(d, zero));
  for (int i = 0; i < v; ++i) {
    geom.A[i][i] = one;
    geom.A[i][v] = -geom.grad_phi[i].cwiseProduct(inv_J);
  }
  geom.A[v][v] = inv_J;

  geom.N.resize(d);
  for (int i = 0; i < v; ++i) geom.N[i] = -horizontal_derivative(grid, eta, i, 1);
  geom.N[v] = SurfaceField::Ones(grid.surface_size());
  return geom;
}

Geometry flat_geometry(const Grid& grid) { return build_geometry(grid, SurfaceField::Zero(grid.surface_size())); }

VectorField grad_A(const Grid& grid, const Geometry& geom, const Field& f) {
  const int d = grid.dim();
  const int v = d - 1;
  VectorField df(d);
  for (int j = 0; j < d; ++j) df[j] = derivative(grid, f, j);
  VectorField out(d);
  for (int i = 0; i < v; ++i) out[i] = df[i] + geom.A[i][v].cwiseProduct(df[v]);
  out[v] = geom.A[v][v].cwiseProduct(df[v]);
  return out;
}

MatrixField grad_A_vector(const Grid& grid, const Geometry& geom, const VectorField& u) {
  MatrixField G(u.size());
  for (std::size_t l = 0; l < u.size(); ++l) G[l] = grad_A(grid, geom, u[l]);
  return G;
}

Field div_A(const Grid& grid, const Geometry& geom, const VectorField& u) {
  const MatrixField G = grad_A_vector(grid, geom, u);
  Field out = G[0][0];
  for (std::size_t i = 1; i < u.size(); ++i) out += G[i][i];
  return out;
}

MatrixField deviatoric_A(const Grid& grid, const Geometry& geom, const VectorField& u) {
  const int d = grid.dim();
  const MatrixField G = grad_A_vector(grid, geom, u);
  Field div = G[0][0];
  for (int i = 1; i < d; ++i) div += G[i][i];
  MatrixField D(d, std::vector<Field>(d));
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      D[i][j] = G[i][j] + G[j][i];
      if (i == j) D[i][j] -= (2.0 / d) * div;
    }
  return D;
}

MatrixField stress_SA(const Grid& grid, const Geometry& geom, const VectorField& u, double mu, double mu_prime) {
  validate_viscosities(grid.dim(), mu, mu_prime);
  const int d = grid.dim();
  MatrixField S = deviatoric_A(grid, geom, u);
  const Field div = div_A(grid, geom, u);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      S[i][j] *= mu;
      if (i == j) S[i][j] += mu_prime * div;
    }
  return S;
}

VectorField div_A_matrix(const Grid& grid, const Geometry& geom, const MatrixField& S) {
  const int d = grid.dim();
  VectorField out(d, Field::Zero(grid.vertical_size(), grid.surface_size()));
  for (int i = 0; i < d; ++i)
    for (int l = 0; l < d; ++l) out[i] += grad_A(grid, geom, S[i][l])[l];
  return out;
}

double viscous_dissipation(const Grid& grid, const Geometry& geom, const VectorField& u, double mu, double mu_prime) {
  validate_viscosities(grid.dim(), mu, mu_prime);
  const int d = grid.dim();
  const MatrixField D = deviatoric_A(grid, geom, u);
  const Field div = div_A(grid, geom, u);
  Field density = mu_prime * div.cwiseAbs2();
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) density += 0.5 * mu * D[i][j].cwiseAbs2();
  return integrate_volume(grid, geom.J.cwiseProduct(density));
}

}  // namespace fsflow
