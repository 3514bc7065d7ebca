#include "fsflow/dynamics.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "fsflow/errors.hpp"
#include "fsflow/nonlinear.hpp"
#include "mode_operators.hpp"

namespace fsflow {

namespace {

using detail::CMatrix;
using detail::CVector;
using detail::cplx;

constexpr double kInf = std::numeric_limits<double>::infinity();

Field zeros(const Grid& grid) { return Field::Zero(grid.vertical_size(), grid.surface_size()); }

bool all_finite(const State& s) {
  bool ok = s.q.allFinite() && s.eta.allFinite();
  for (const auto& c : s.u) ok = ok && c.allFinite();
  return ok;
}

}  // namespace

State initialize_state(const Grid& grid, InitialFamily family, double amplitude) {
  if (!(amplitude >= 0)) throw DomainError("initialize_state: amplitude must be nonnegative");
  State s = zero_state(grid);
  const double k = 2.0 * std::numbers::pi / grid.period();
  const double b = grid.depth();
  const Eigen::VectorXd& y = grid.vertical_nodes();
  for (Eigen::Index c = 0; c < grid.surface_size(); ++c) {
    const double wave = amplitude * std::cos(k * grid.coordinate(0, c));
    switch (family) {
      case InitialFamily::single_mode_eta: s.eta(c) = wave; break;
      case InitialFamily::q_bump:
        s.q.col(c) = wave * (1.0 + y.array() / b).square();
        break;
      case InitialFamily::shear:
        s.u[0].col(c) = wave * (std::numbers::pi * (y.array() + b) / (2.0 * b)).sin() * (y.array() + b) / b;
        break;
    }
  }
  for (auto& c : s.u) c.row(c.rows() - 1).setZero();
  return s;
}

std::string to_string(InitialFamily family) {
  switch (family) {
    case InitialFamily::single_mode_eta: return "single_mode_eta";
    case InitialFamily::q_bump: return "q_bump";
    case InitialFamily::shear: return "shear";
  }
  return "";
}

InitialFamily initial_family_from_string(const std::string& name) {
  if (name == "single_mode_eta") return InitialFamily::single_mode_eta;
  if (name == "q_bump") return InitialFamily::q_bump;
  if (name == "shear") return InitialFamily::shear;
  throw ConfigError("initial.family: unknown family '" + name + "' (single_mode_eta, q_bump, shear)");
}

std::string to_string(Scheme scheme) { return scheme == Scheme::imex_euler ? "imex_euler" : "imex_bdf2"; }

Scheme scheme_from_string(const std::string& name) {
  if (name == "imex_euler") return Scheme::imex_euler;
  if (name == "imex_bdf2") return Scheme::imex_bdf2;
  throw ConfigError("stepper.scheme: unknown scheme '" + name + "' (imex_euler, imex_bdf2)");
}

Rates linear_operator_apply(const Model& model, const State& state) {
  const Grid& grid = model.grid;
  const int d = grid.dim();
  const int v = d - 1;
  const Field rho_bar = broadcast_profile(grid, model.eq.rho_bar);
  Rates r = zero_rates(grid);
  Field div_rho_u = zeros(grid), div = zeros(grid);
  for (int k = 0; k < d; ++k) {
    div_rho_u += derivative(grid, rho_bar.cwiseProduct(state.u[k]), k);
    div += derivative(grid, state.u[k], k);
  }
  r.dq_dt = -broadcast_profile(grid, model.eq.h_prime_bar).cwiseProduct(div_rho_u);
  for (int i = 0; i < d; ++i) {
    Field lap = zeros(grid);
    for (int k = 0; k < d; ++k) lap += derivative(grid, derivative(grid, state.u[i], k), k);
    const Field div_S = model.mu * lap + model.lame() * derivative(grid, div, i);
    r.du_dt[i] = -derivative(grid, state.q, i) + div_S.cwiseQuotient(rho_bar);
  }
  r.deta_dt = surface_trace(state.u[v]);
  return r;
}

Stepper::Stepper(const Model& model, StepperConfig config)
    : model_(std::make_shared<const Model>(model)), config_(config) {
  if (!(config_.dt > 0)) throw ConfigError("stepper.dt: must be positive");
  if (!(config_.cfl_safety > 0 && config_.cfl_safety <= 1)) throw ConfigError("stepper.cfl_safety: must lie in (0, 1]");
  const Grid& grid = model_->grid;
  const Eigen::Index n = grid.vertical_size();
  const Eigen::MatrixXd inner = grid.vertical_diff2().block(1, 1, n - 2, n - 2);
  const double vertical = inner.eigenvalues().cwiseAbs().maxCoeff();
  double horizontal = 0.0;
  for (Eigen::Index col : grid.retained_columns()) horizontal = std::max(horizontal, grid.wavenumber_sq()(col));
  laplacian_radius_ = vertical + horizontal;
}

double Stepper::stable_dt(const State& state) const {
  if (config_.linear_only) return kInf;
  const Model& m = *model_;
  const Grid& grid = m.grid;
  const int d = grid.dim();
  const Geometry geom = build_geometry(grid, state.eta, true);

  SurfaceField u_dot_N = SurfaceField::Zero(grid.surface_size());
  double speed = 0.0;
  for (int k = 0; k < d; ++k) {
    u_dot_N += surface_trace(state.u[k]).cwiseProduct(geom.N[k]);
    speed = std::max(speed, state.u[k].cwiseAbs().maxCoeff());
  }
  const Field dphi_dt = lift_surface(grid, u_dot_N);
  speed = std::max(speed, dphi_dt.cwiseQuotient(geom.J).cwiseAbs().maxCoeff());

  const Eigen::VectorXd& y = grid.vertical_nodes();
  double dx = grid.period() / grid.modes();
  for (Eigen::Index j = 0; j + 1 < y.size(); ++j) dx = std::min(dx, y(j) - y(j + 1));
  const double dt_adv = speed > 0 ? dx / speed : kInf;

  double metric = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) metric = std::max(metric, (geom.A[i][j].array() - (i == j ? 1.0 : 0.0)).abs().maxCoeff());
  const double rho_min = m.eq.rho_bar.minCoeff();
  const double dt_exp =
      metric > 0 ? 2.0 * rho_min / ((m.mu + std::abs(m.lame())) * metric * laplacian_radius_) : kInf;
  return std::min(dt_adv, dt_exp);
}

ExplicitTerms Stepper::explicit_terms(const State& state, const Geometry& geom) const {
  const Model& m = *model_;
  const Grid& grid = m.grid;
  const int d = grid.dim();
  ExplicitTerms e;
  if (config_.linear_only) {
    e.G1 = zeros(grid);
    e.G2.assign(d, zeros(grid));
    e.G3 = SurfaceField::Zero(grid.surface_size());
    e.G4.assign(d, SurfaceField::Zero(grid.surface_size()));
    return e;
  }
  SurfaceField u_dot_N = SurfaceField::Zero(grid.surface_size());
  for (int k = 0; k < d; ++k) u_dot_N += surface_trace(state.u[k]).cwiseProduct(geom.N[k]);
  const Field dphi_dt = lift_surface(grid, u_dot_N);
  VectorField du_dt(d, zeros(grid));
  if (history_.previous)
    for (int i = 0; i < d; ++i) du_dt[i] = (state.u[i] - history_.previous->u[i]) / config_.dt;
  const Field rho = density_from_q(m, state.q, geom);
  const RemainderInputs in{state, geom, rho, dphi_dt, du_dt};
  e.G1 = dealias(grid, eval_G1(m, in));
  e.G2 = eval_G2(m, in);
  for (auto& f : e.G2) f = dealias(grid, f);
  e.G3 = dealias(grid, eval_G3(grid, state));
  e.G4 = eval_G4(m, state, geom);
  for (auto& f : e.G4) f = dealias(grid, f);
  return e;
}

const std::vector<Stepper::ModeFactor>& Stepper::factors(double a) {
  auto it = cache_.find(a);
  if (it != cache_.end()) return it->second;

  const Model& m = *model_;
  const Grid& grid = m.grid;
  const int d = grid.dim();
  const int v = d - 1;
  const Eigen::Index n = grid.vertical_size();
  const Eigen::Index size = (d + 1) * n + 1;
  const Eigen::Index eta = (d + 1) * n;
  const Eigen::VectorXcd rho_bar = m.eq.rho_bar.cast<cplx>();
  const Eigen::VectorXcd hp_bar = m.eq.h_prime_bar.cast<cplx>();
  const double rs = m.rho_star();

  std::vector<ModeFactor> out;
  for (Eigen::Index col : grid.retained_columns()) {
    const auto md = detail::mode_derivatives(grid, col);
    CMatrix M = CMatrix::Zero(size, size);
    // mass: a q + h'(rho_bar) div(rho_bar u)
    M.block(0, 0, n, n).diagonal().setConstant(a);
    for (int j = 0; j < d; ++j)
      M.block(0, (1 + j) * n, n, n) = hp_bar.asDiagonal() * md.dk[j] * rho_bar.asDiagonal();
    for (int i = 0; i < d; ++i) {
      const Eigen::Index r0 = (1 + i) * n;
      // momentum: a rho_bar u_i + rho_bar d_i q - mu Lap u_i - lam d_i div u
      const CMatrix grad_q = rho_bar.asDiagonal() * md.dk[i];
      M.block(r0 + 1, 0, n - 2, n) = grad_q.middleRows(1, n - 2);
      for (int j = 0; j < d; ++j) {
        CMatrix blk = detail::lame_block(md, i, j, m.mu, m.lame());
        if (i == j) blk.diagonal() += a * rho_bar;
        M.block(r0 + 1, (1 + j) * n, n - 2, n) = blk.middleRows(1, n - 2);
        // dynamic condition: (rho* q I - S u) e_d - rho* g eta e_d
        M.block(r0, (1 + j) * n, 1, n) = detail::surface_stress_row(md, i, j, m.mu, m.mu_prime);
      }
      if (i == v) {
        M(r0, 0) = rs;
        M(r0, eta) = -rs * m.g();
      }
      M(r0 + n - 1, r0 + n - 1) = 1.0;
    }
    // kinematic: a eta - u_d(0)
    M(eta, eta) = a;
    M(eta, (1 + v) * n) = -1.0;

    Eigen::PartialPivLU<CMatrix> lu(M);
    if (!(lu.rcond() > 1e-15)) {
      std::ostringstream os;
      os << "stepper: singular implicit block for mode " << col;
      throw SolverError(os.str(), long(col));
    }
    out.push_back({col, std::move(lu)});
  }
  return cache_.emplace(a, std::move(out)).first->second;
}

State Stepper::step(const State& s) {
  const Model& m = *model_;
  const Grid& grid = m.grid;
  const int d = grid.dim();
  const Eigen::Index n = grid.vertical_size();
  const double dt = config_.dt;

  const Geometry geom = build_geometry(grid, s.eta);
  const double limit = stable_dt(s);
  if (dt > config_.cfl_safety * limit) {
    std::ostringstream os;
    os << "step rejected: dt = " << dt << " exceeds cfl_safety * dt_cfl = " << config_.cfl_safety * limit;
    throw StepRejectedError(os.str(), config_.cfl_safety * limit);
  }

  const ExplicitTerms E = explicit_terms(s, geom);
  const bool bdf = config_.scheme == Scheme::imex_bdf2 && history_.previous && history_.previous_terms;
  const Field rho_bar = broadcast_profile(grid, m.eq.rho_bar);

  double a;
  Field rq;
  VectorField ru(d);
  SurfaceField reta;
  SurfaceVector rg4(d);
  if (bdf) {
    const State& p = *history_.previous;
    const ExplicitTerms& Ep = *history_.previous_terms;
    a = 1.5 / dt;
    rq = (4.0 * s.q - p.q) / (2.0 * dt) + 2.0 * E.G1 - Ep.G1;
    for (int i = 0; i < d; ++i)
      ru[i] = rho_bar.cwiseProduct(4.0 * s.u[i] - p.u[i]) / (2.0 * dt) + 2.0 * E.G2[i] - Ep.G2[i];
    reta = (4.0 * s.eta - p.eta) / (2.0 * dt) + 2.0 * E.G3 - Ep.G3;
    for (int i = 0; i < d; ++i) rg4[i] = 2.0 * E.G4[i] - Ep.G4[i];
  } else {
    a = 1.0 / dt;
    rq = s.q / dt + E.G1;
    for (int i = 0; i < d; ++i) ru[i] = rho_bar.cwiseProduct(s.u[i]) / dt + E.G2[i];
    reta = s.eta / dt + E.G3;
    rg4 = E.G4;
  }

  const SpectralField rq_hat = grid.forward(rq);
  std::vector<SpectralField> ru_hat;
  std::vector<SpectralSurface> rg4_hat;
  for (int i = 0; i < d; ++i) {
    ru_hat.push_back(grid.forward(ru[i]));
    rg4_hat.push_back(grid.forward(rg4[i]));
  }
  const SpectralSurface reta_hat = grid.forward(reta);

  SpectralField q_hat = SpectralField::Zero(n, grid.surface_size());
  std::vector<SpectralField> u_hat(d, SpectralField::Zero(n, grid.surface_size()));
  SpectralSurface eta_hat = SpectralSurface::Zero(grid.surface_size());
  const Eigen::Index size = (d + 1) * n + 1;
  CVector rhs(size);
  for (const ModeFactor& f : factors(a)) {
    const Eigen::Index col = f.col;
    rhs.setZero();
    rhs.segment(0, n) = rq_hat.col(col);
    for (int i = 0; i < d; ++i) {
      const Eigen::Index r0 = (1 + i) * n;
      rhs.segment(r0 + 1, n - 2) = ru_hat[i].col(col).segment(1, n - 2);
      rhs(r0) = rg4_hat[i](col);
    }
    rhs(size - 1) = reta_hat(col);
    const CVector x = f.lu.solve(rhs);
    q_hat.col(col) = x.segment(0, n);
    for (int i = 0; i < d; ++i) u_hat[i].col(col) = x.segment((1 + i) * n, n);
    eta_hat(col) = x(size - 1);
  }

  State next;
  next.t = s.t + dt;
  next.q = grid.inverse(q_hat);
  for (int i = 0; i < d; ++i) {
    next.u.push_back(grid.inverse(u_hat[i]));
    next.u.back().row(n - 1).setZero();
  }
  next.eta = grid.inverse(eta_hat);

  history_.previous = s;
  history_.previous_terms = E;
  return next;
}

Trajectory run(Stepper& stepper, const State& initial, double t_end, int cadence, const Monitor& monitor) {
  if (!(t_end >= initial.t)) throw ConfigError("run: t_end must not precede the initial time");
  if (cadence < 1) throw ConfigError("energy.cadence: must be >= 1");
  const double dt = stepper.config().dt;
  const long total = long(std::ceil((t_end - initial.t) / dt - 1e-9));

  Trajectory traj;
  std::optional<State> prev;
  State cur = initial;
  for (long k = 0; k < total; ++k) {
    State next;
    try {
      next = stepper.step(cur);
    } catch (const GeometryError& e) {
      traj.termination = "blowup";
      traj.diagnostic = e.what();
      break;
    } catch (const StateBlowupError& e) {
      traj.termination = "blowup";
      traj.diagnostic = e.what();
      break;
    }
    if (!all_finite(next)) {
      traj.termination = "nonfinite";
      traj.diagnostic = "non-finite values in the state at t = " + std::to_string(next.t);
      break;
    }
    if (monitor && k % cadence == 0) monitor(StepWindow{prev ? &*prev : nullptr, cur, &next, dt, k});
    prev = std::move(cur);
    cur = std::move(next);
    ++traj.steps;
  }
  if (monitor) monitor(StepWindow{prev ? &*prev : nullptr, cur, nullptr, dt, traj.steps});
  traj.final_state = cur;
  return traj;
}

}  // namespace fsflow
