#include "fsflow/nonlinear.hpp"

#include <cmath>
#include <sstream>

#include "fsflow/errors.hpp"
#include "fsflow/quadrature.hpp"

namespace fsflow {

namespace {

const std::pair<Eigen::VectorXd, Eigen::VectorXd>& gl16() {
  static const auto rule = gauss_legendre_unit<double>(16);
  return rule;
}

Field zeros(const Grid& grid) { return Field::Zero(grid.vertical_size(), grid.surface_size()); }

// h(rho_bar) at every node; equals -g y_d by construction of the profile.
Field equilibrium_enthalpy(const Model& model) {
  return broadcast_profile(model.grid, (-model.g() * model.grid.vertical_nodes()).eval());
}

Field profile(const Model& model, const Eigen::VectorXd& values) { return broadcast_profile(model.grid, values); }

// d[l][k] = d_k u_l.
std::vector<VectorField> gradients(const Grid& grid, const VectorField& u) {
  const int d = grid.dim();
  std::vector<VectorField> out(u.size(), VectorField(d));
  for (std::size_t l = 0; l < u.size(); ++l)
    for (int k = 0; k < d; ++k) out[l][k] = derivative(grid, u[l], k);
  return out;
}

// h[l][k][m] = d_k d_m u_l from first derivatives.
std::vector<std::vector<VectorField>> hessians(const Grid& grid, const std::vector<VectorField>& du) {
  const int d = grid.dim();
  std::vector<std::vector<VectorField>> out(du.size(), std::vector<VectorField>(d, VectorField(d)));
  for (std::size_t l = 0; l < du.size(); ++l)
    for (int k = 0; k < d; ++k)
      for (int m = k; m < d; ++m) {
        out[l][k][m] = derivative(grid, du[l][k], m);
        if (m != k) out[l][m][k] = out[l][k][m];
      }
  return out;
}

double delta(int a, int b) { return a == b ? 1.0 : 0.0; }

void check_range(const Model& model, double w, Eigen::Index r, Eigen::Index c) {
  if (!std::isfinite(w) || w < enthalpy_floor(model.law)) {
    std::ostringstream os;
    os << "density reconstruction: enthalpy argument " << w << " out of range at node (" << r << ", " << c << ")";
    throw StateBlowupError(os.str(), 0.0);
  }
}

}  // namespace

Field density_from_q(const Model& model, const Field& q, const Geometry& geom) {
  const Field w = equilibrium_enthalpy(model) + q - model.g() * geom.phi;
  Field rho(w.rows(), w.cols());
  for (Eigen::Index c = 0; c < w.cols(); ++c)
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      check_range(model, w(r, c), r, c);
      rho(r, c) = enthalpy_inverse(model.law, w(r, c));
    }
  const double min_rho = rho.minCoeff();
  if (!(min_rho > 0.25 * model.rho_star())) {
    std::ostringstream os;
    os << "density reconstruction: min rho = " << min_rho << " <= rho*/4 = " << 0.25 * model.rho_star();
    throw StateBlowupError(os.str(), min_rho);
  }
  return rho;
}

Field remainder_h_inverse(const Model& model, const Field& q, const Geometry& geom) {
  const auto& [s, ws] = gl16();
  const Field base = equilibrium_enthalpy(model);
  const Field w = q - model.g() * geom.phi;
  Field out(w.rows(), w.cols());
  for (Eigen::Index c = 0; c < w.cols(); ++c)
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      const double wi = w(r, c);
      check_range(model, base(r, c) + wi, r, c);
      double acc = 0.0;
      for (Eigen::Index k = 0; k < s.size(); ++k)
        acc += ws(k) * enthalpy_inverse_d2(model.law, base(r, c) + s(k) * wi) * (1.0 - s(k));
      out(r, c) = wi * wi * acc;
    }
  return out;
}

SurfaceField remainder_P_h_inverse(const PressureLaw& law, const SurfaceField& q_trace, const SurfaceField& eta) {
  const auto& [s, ws] = gl16();
  const SurfaceField w = q_trace - law.g * eta;
  const double floor = enthalpy_floor(law);
  SurfaceField out(w.size());
  for (Eigen::Index c = 0; c < w.size(); ++c) {
    const double wi = w(c);
    if (!std::isfinite(wi) || wi < floor) {
      std::ostringstream os;
      os << "surface pressure remainder: argument " << wi << " out of the enthalpy range";
      throw StateBlowupError(os.str(), 0.0);
    }
    // (P o h^{-1})' = h^{-1}, so the second derivative is (h^{-1})'.
    double acc = 0.0;
    for (Eigen::Index k = 0; k < s.size(); ++k) acc += ws(k) * enthalpy_inverse_d1(law, s(k) * wi) * (1.0 - s(k));
    out(c) = wi * wi * acc;
  }
  return out;
}

Field eval_G1(const Model& model, const RemainderInputs& in) {
  const Grid& grid = model.grid;
  const int d = grid.dim();
  const int v = d - 1;
  const Geometry& A = in.geom;
  const VectorField& u = in.state.u;
  const Field rho_bar = profile(model, model.eq.rho_bar);
  const Field hp_bar = profile(model, model.eq.h_prime_bar);
  const Field Pp_bar = profile(model, model.eq.P_prime_bar);
  Field Pp_rho(in.rho.rows(), in.rho.cols());
  for (Eigen::Index i = 0; i < in.rho.size(); ++i) Pp_rho(i) = model.law.dpressure(in.rho(i));

  VectorField dq(d);
  for (int k = 0; k < d; ++k) dq[k] = derivative(grid, in.state.q, k);
  const std::vector<VectorField> du = gradients(grid, u);

  // G^{1,1} = J^{-1} d_t phi d_d q - u_l A_lk d_k q
  Field out = in.dphi_dt.cwiseProduct(dq[v]).cwiseQuotient(A.J);
  for (int l = 0; l < d; ++l)
    for (int k = 0; k < d; ++k) out -= u[l].cwiseProduct(A.A[l][k]).cwiseProduct(dq[k]);

  // G^{1,2} = g u_l A_lk d_k phi - h'(rho_bar)(A_lk - delta_lk) d_k(rho_bar u_l)
  //           - (P'(rho) - P'(rho_bar)) A_lk d_k u_l
  const Field dP = Pp_rho - Pp_bar;
  for (int l = 0; l < d; ++l) {
    const Field rho_u = rho_bar.cwiseProduct(u[l]);
    for (int k = 0; k < d; ++k) {
      out += model.g() * u[l].cwiseProduct(A.A[l][k]).cwiseProduct(A.grad_phi[k]);
      const Field A_minus_I = A.A[l][k].array() - delta(l, k);
      out -= hp_bar.cwiseProduct(A_minus_I).cwiseProduct(derivative(grid, rho_u, k));
      out -= dP.cwiseProduct(A.A[l][k]).cwiseProduct(du[l][k]);
    }
  }
  return out;
}

std::vector<VectorField> eval_G2_terms(const Model& model, const RemainderInputs& in) {
  const Grid& grid = model.grid;
  const int d = grid.dim();
  const int v = d - 1;
  const auto& A = in.geom.A;
  const VectorField& u = in.state.u;
  const double mu = model.mu;
  const double lam = model.lame();
  const Field rho_bar = profile(model, model.eq.rho_bar);
  const Field drho = in.rho - rho_bar;

  VectorField dq(d);
  for (int k = 0; k < d; ++k) dq[k] = derivative(grid, in.state.q, k);
  const std::vector<VectorField> du = gradients(grid, u);
  const auto d2u = hessians(grid, du);
  // dA[l][k] = d_k A_{l,v}; the other columns of A are constant.
  std::vector<VectorField> dA(d, VectorField(d));
  for (int l = 0; l < d; ++l)
    for (int k = 0; k < d; ++k) dA[l][k] = derivative(grid, A[l][v], k);

  std::vector<VectorField> terms(4, VectorField(d, zeros(grid)));
  for (int i = 0; i < d; ++i) {
    Field& t1 = terms[0][i];
    Field& t2 = terms[1][i];
    Field& t3 = terms[2][i];
    Field& t4 = terms[3][i];
    for (int l = 0; l < d; ++l) {
      const Field A_minus_I = A[i][l].array() - delta(i, l);
      t1 -= rho_bar.cwiseProduct(A_minus_I).cwiseProduct(dq[l]);
      t1 -= drho.cwiseProduct(A[i][l]).cwiseProduct(dq[l]);
    }
    for (int l = 0; l < d; ++l)
      for (int k = 0; k < d; ++k)
        for (int m = 0; m < d; ++m) {
          const Field c1 = A[l][k].cwiseProduct(A[l][m]).array() - delta(l, k) * delta(l, m);
          t2 += mu * c1.cwiseProduct(d2u[i][k][m]);
          const Field c2 = A[i][k].cwiseProduct(A[l][m]).array() - delta(i, k) * delta(l, m);
          t2 += lam * c2.cwiseProduct(d2u[l][k][m]);
        }
    for (int l = 0; l < d; ++l)
      for (int k = 0; k < d; ++k) {
        t3 += mu * A[l][k].cwiseProduct(dA[l][k]).cwiseProduct(du[i][v]);
        t3 += lam * A[i][k].cwiseProduct(dA[l][k]).cwiseProduct(du[l][v]);
      }
    t4 -= drho.cwiseProduct(in.du_dt[i]);
    Field transport = -in.dphi_dt.cwiseProduct(du[i][v]).cwiseQuotient(in.geom.J);
    for (int l = 0; l < d; ++l)
      for (int k = 0; k < d; ++k) transport += u[l].cwiseProduct(A[l][k]).cwiseProduct(du[i][k]);
    t4 -= in.rho.cwiseProduct(transport);
  }
  return terms;
}

VectorField eval_G2(const Model& model, const RemainderInputs& in) {
  const auto terms = eval_G2_terms(model, in);
  VectorField out = terms[0];
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += terms[1][i] + terms[2][i] + terms[3][i];
  return out;
}

SurfaceField eval_G3(const Grid& grid, const State& state) {
  SurfaceField out = SurfaceField::Zero(grid.surface_size());
  for (int i = 0; i < grid.horizontal_dims(); ++i)
    out -= surface_trace(state.u[i]).cwiseProduct(horizontal_derivative(grid, state.eta, i, 1));
  return out;
}

SurfaceVector eval_G4(const Model& model, const State& state, const Geometry& geom) {
  const Grid& grid = model.grid;
  const int d = grid.dim();
  const int v = d - 1;
  const double mu = model.mu;
  const auto& N = geom.N;

  // Surface traces of d_m u_l and of A.
  std::vector<SurfaceVector> du(d, SurfaceVector(d));
  for (int l = 0; l < d; ++l)
    for (int m = 0; m < d; ++m) du[l][m] = surface_trace(derivative(grid, state.u[l], m));
  std::vector<SurfaceVector> A(d, SurfaceVector(d));
  for (int k = 0; k < d; ++k)
    for (int m = 0; m < d; ++m) A[k][m] = surface_trace(geom.A[k][m]);
  SurfaceVector Deta(v);
  for (int i = 0; i < v; ++i) Deta[i] = horizontal_derivative(grid, state.eta, i, 1);

  // E[k][l] = (A_km - delta_km) d_m u_l + (A_lm - delta_lm) d_m u_k
  std::vector<SurfaceVector> E(d, SurfaceVector(d, SurfaceField::Zero(grid.surface_size())));
  for (int k = 0; k < d; ++k)
    for (int l = 0; l < d; ++l)
      for (int m = 0; m < d; ++m) {
        E[k][l] += (A[k][m].array() - delta(k, m)).matrix().cwiseProduct(du[l][m]);
        E[k][l] += (A[l][m].array() - delta(l, m)).matrix().cwiseProduct(du[k][m]);
      }

  SurfaceField N2 = SurfaceField::Zero(grid.surface_size());
  for (int k = 0; k < d; ++k) N2 += N[k].cwiseAbs2();
  const SurfaceField inv_N2 = N2.cwiseInverse();

  SurfaceVector out(d, SurfaceField::Zero(grid.surface_size()));
  for (int i = 0; i < v; ++i) {
    SurfaceField& g = out[i];
    for (int j = 0; j < v; ++j) {
      g -= mu * Deta[j].cwiseProduct(du[j][i]);
      g -= mu * Deta[j].cwiseProduct(du[i][j]);
    }
    for (int k = 0; k < d; ++k) g += mu * Deta[i].cwiseProduct(N[k]).cwiseProduct(du[v][k] + du[k][v]);
    for (int k = 0; k < d; ++k) {
      // tau^i = e_i + d_i eta e_d
      SurfaceField tau = SurfaceField::Zero(grid.surface_size());
      if (k == i) tau.setOnes();
      if (k == v) tau = Deta[i];
      for (int l = 0; l < d; ++l) g += mu * E[k][l].cwiseProduct(N[l]).cwiseProduct(tau);
    }
  }

  SurfaceField& gd = out[v];
  for (int k = 0; k < d; ++k)
    for (int l = 0; l < d; ++l) {
      gd += mu * E[k][l].cwiseProduct(N[l]).cwiseProduct(N[k]).cwiseProduct(inv_N2);
      const SurfaceField sym = du[l][k] + du[k][l];
      gd += mu * sym.cwiseProduct(N[k]).cwiseProduct(N[l]).cwiseProduct((inv_N2.array() - 1.0).matrix());
      if (!(k == v && l == v)) gd += mu * sym.cwiseProduct(N[k]).cwiseProduct(N[l]);
    }
  for (int l = 0; l < d; ++l)
    for (int m = 0; m < d; ++m)
      gd += (model.mu_prime - 2.0 * mu / d) * (A[l][m].array() - delta(l, m)).matrix().cwiseProduct(du[l][m]);
  gd -= remainder_P_h_inverse(model.law, surface_trace(state.q), state.eta);
  return out;
}

Field diagnostic_Q(const Model& model, const RemainderInputs& in, const Field& dq_dt, double* discrepancy) {
  const Grid& grid = model.grid;
  const int d = grid.dim();
  const int v = d - 1;
  VectorField dq(d);
  for (int k = 0; k < d; ++k) dq[k] = derivative(grid, in.state.q, k);
  Field first = dq_dt - in.dphi_dt.cwiseProduct(dq[v]).cwiseQuotient(in.geom.J);
  for (int l = 0; l < d; ++l)
    for (int k = 0; k < d; ++k) first += in.state.u[l].cwiseProduct(in.geom.A[l][k]).cwiseProduct(dq[k]);

  // G^{1,2} = G^1 - G^{1,1}
  Field g11 = in.dphi_dt.cwiseProduct(dq[v]).cwiseQuotient(in.geom.J);
  for (int l = 0; l < d; ++l)
    for (int k = 0; k < d; ++k) g11 -= in.state.u[l].cwiseProduct(in.geom.A[l][k]).cwiseProduct(dq[k]);
  const Field g12 = eval_G1(model, in) - g11;
  const Field rho_bar = profile(model, model.eq.rho_bar);
  Field div_rho_u = zeros(grid);
  for (int k = 0; k < d; ++k) div_rho_u += derivative(grid, rho_bar.cwiseProduct(in.state.u[k]), k);
  const Field second = -profile(model, model.eq.h_prime_bar).cwiseProduct(div_rho_u) + g12;
  if (discrepancy) *discrepancy = (first - second).cwiseAbs().maxCoeff();
  return second;
}

NonlinearBundle evaluate_nonlinear(const Model& model, const State& state, const Geometry& geom, const Rates& rates,
                                   bool filtered) {
  const Grid& grid = model.grid;
  NonlinearBundle b;
  b.rho = density_from_q(model, state.q, geom);
  const Field dphi_dt = lift_surface(grid, rates.deta_dt);
  const RemainderInputs in{state, geom, b.rho, dphi_dt, rates.du_dt};
  b.G1 = eval_G1(model, in);
  b.G2 = eval_G2(model, in);
  b.G3 = eval_G3(grid, state);
  b.G4 = eval_G4(model, state, geom);
  b.Q_diag = diagnostic_Q(model, in, rates.dq_dt, &b.Q_discrepancy);
  if (filtered) {
    b.G1 = dealias(grid, b.G1);
    for (auto& f : b.G2) f = dealias(grid, f);
    b.G3 = dealias(grid, b.G3);
    for (auto& f : b.G4) f = dealias(grid, f);
  }
  return b;
}

EquationResiduals linear_residuals(const Model& model, const State& state, const Rates& rates) {
  const Grid& grid = model.grid;
  const int d = grid.dim();
  const int v = d - 1;
  const double mu = model.mu;
  const double lam = model.lame();
  const Field rho_bar = profile(model, model.eq.rho_bar);
  const std::vector<VectorField> du = gradients(grid, state.u);
  Field div = zeros(grid);
  for (int k = 0; k < d; ++k) div += du[k][k];

  EquationResiduals r;
  Field div_rho_u = zeros(grid);
  for (int k = 0; k < d; ++k) div_rho_u += derivative(grid, rho_bar.cwiseProduct(state.u[k]), k);
  r.mass = rates.dq_dt + profile(model, model.eq.h_prime_bar).cwiseProduct(div_rho_u);

  r.momentum.resize(d);
  for (int i = 0; i < d; ++i) {
    Field lap = zeros(grid);
    for (int k = 0; k < d; ++k) lap += derivative(grid, du[i][k], k);
    r.momentum[i] = rho_bar.cwiseProduct(rates.du_dt[i] + derivative(grid, state.q, i)) - mu * lap -
                    lam * derivative(grid, div, i);
  }

  r.kinematic = rates.deta_dt - surface_trace(state.u[v]);

  r.dynamic.resize(d);
  for (int i = 0; i < v; ++i) r.dynamic[i] = -mu * surface_trace(du[i][v] + du[v][i]);
  const double rs = model.rho_star();
  r.dynamic[v] = rs * surface_trace(state.q) -
                 surface_trace(2.0 * mu * du[v][v] + (model.mu_prime - 2.0 * mu / d) * div) -
                 rs * model.g() * state.eta;
  return r;
}

EquationResiduals split_residuals(const Model& model, const State& state, const Rates& rates) {
  const Geometry geom = build_geometry(model.grid, state.eta);
  const NonlinearBundle b = evaluate_nonlinear(model, state, geom, rates, false);
  EquationResiduals r = linear_residuals(model, state, rates);
  r.mass -= b.G1;
  for (std::size_t i = 0; i < r.momentum.size(); ++i) r.momentum[i] -= b.G2[i];
  r.kinematic -= b.G3;
  for (std::size_t i = 0; i < r.dynamic.size(); ++i) r.dynamic[i] -= b.G4[i];
  return r;
}

EquationResiduals full_residuals(const Model& model, const State& state, const Rates& rates) {
  const Grid& grid = model.grid;
  const int d = grid.dim();
  const int v = d - 1;
  const Geometry geom = build_geometry(grid, state.eta);
  const Field rho = density_from_q(model, state.q, geom);
  const Field dphi_dt = lift_surface(grid, rates.deta_dt);
  const Field transport_speed = dphi_dt.cwiseQuotient(geom.J);

  EquationResiduals r;
  VectorField rho_u(d);
  for (int k = 0; k < d; ++k) rho_u[k] = rho.cwiseProduct(state.u[k]);
  Field h_prime(rho.rows(), rho.cols());
  for (Eigen::Index i = 0; i < rho.size(); ++i) h_prime(i) = enthalpy_derivative(model.law, rho(i));
  r.mass = rates.dq_dt - transport_speed.cwiseProduct(derivative(grid, state.q, v)) +
           h_prime.cwiseProduct(div_A(grid, geom, rho_u));

  const MatrixField grad_u = grad_A_vector(grid, geom, state.u);
  const VectorField grad_q = grad_A(grid, geom, state.q);
  const VectorField div_S = div_A_matrix(grid, geom, stress_SA(grid, geom, state.u, model.mu, model.mu_prime));
  r.momentum.resize(d);
  for (int i = 0; i < d; ++i) {
    Field material = rates.du_dt[i] - transport_speed.cwiseProduct(derivative(grid, state.u[i], v));
    for (int l = 0; l < d; ++l) material += state.u[l].cwiseProduct(grad_u[i][l]);
    r.momentum[i] = rho.cwiseProduct(material + grad_q[i]) - div_S[i];
  }

  SurfaceField u_dot_N = SurfaceField::Zero(grid.surface_size());
  for (int k = 0; k < d; ++k) u_dot_N += surface_trace(state.u[k]).cwiseProduct(geom.N[k]);
  r.kinematic = rates.deta_dt - u_dot_N;

  const MatrixField S = stress_SA(grid, geom, state.u, model.mu, model.mu_prime);
  const double rs = model.rho_star();
  const SurfaceField R = remainder_P_h_inverse(model.law, surface_trace(state.q), state.eta);
  const SurfaceField normal_load = rs * surface_trace(state.q) - rs * model.g() * state.eta + R;
  r.dynamic.assign(d, SurfaceField::Zero(grid.surface_size()));
  for (int i = 0; i < d; ++i) {
    r.dynamic[i] = normal_load.cwiseProduct(geom.N[i]);
    for (int l = 0; l < d; ++l) r.dynamic[i] -= surface_trace(S[i][l]).cwiseProduct(geom.N[l]);
  }
  return r;
}

SurfaceVector project_dynamic(const Grid& grid, const SurfaceVector& full, const SurfaceField& eta) {
  const int d = grid.dim();
  const int v = d - 1;
  SurfaceVector out(d);
  SurfaceField N2 = SurfaceField::Ones(grid.surface_size());
  SurfaceField normal = full[v];
  for (int i = 0; i < v; ++i) {
    const SurfaceField di = horizontal_derivative(grid, eta, i, 1);
    out[i] = full[i] + di.cwiseProduct(full[v]);
    N2 += di.cwiseAbs2();
    normal -= di.cwiseProduct(full[i]);
  }
  out[v] = normal.cwiseQuotient(N2);
  return out;
}

}  // namespace fsflow
