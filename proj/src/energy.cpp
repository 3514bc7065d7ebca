#include "fsflow/energy.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "fsflow/errors.hpp"
#include "fsflow/nonlinear.hpp"

namespace fsflow {

namespace {

double vol(const Grid& grid, const Field& f, int k) { return sobolev_norm_volume_sq(grid, f, k); }
double surf(const Grid& grid, const SurfaceField& f, double s) { return sobolev_norm_surface_sq(grid, f, s); }

double vol(const Grid& grid, const VectorField& v, int k) {
  double s = 0.0;
  for (const auto& c : v) s += vol(grid, c, k);
  return s;
}

int horizontal(const Grid& grid) { return grid.horizontal_dims(); }

/// sum_i |d_i eta|_s^2 over horizontal directions.
double surface_gradient(const Grid& grid, const SurfaceField& eta, double s) {
  double out = 0.0;
  for (int i = 0; i < horizontal(grid); ++i) out += surf(grid, horizontal_derivative(grid, eta, i), s);
  return out;
}

/// sum_{i,j} |d_i d_j eta|_s^2 over horizontal directions.
double surface_hessian(const Grid& grid, const SurfaceField& eta, double s) {
  double out = 0.0;
  for (int i = 0; i < horizontal(grid); ++i) {
    const SurfaceField di = horizontal_derivative(grid, eta, i);
    for (int j = 0; j < horizontal(grid); ++j) out += surf(grid, horizontal_derivative(grid, di, j), s);
  }
  return out;
}

double volume_gradient(const Grid& grid, const Field& f, int k) {
  double out = 0.0;
  for (int i = 0; i < grid.dim(); ++i) out += vol(grid, derivative(grid, f, i), k);
  return out;
}

/// sum_{i,j horizontal} ||d_i d_j f||_k^2.
double horizontal_hessian(const Grid& grid, const Field& f, int k) {
  double out = 0.0;
  for (int i = 0; i < horizontal(grid); ++i) {
    const Field di = horizontal_derivative(grid, f, i);
    for (int j = 0; j < horizontal(grid); ++j) out += vol(grid, horizontal_derivative(grid, di, j), k);
  }
  return out;
}

/// sum_{i horizontal} ||d_i f||_k^2.
double horizontal_gradient(const Grid& grid, const Field& f, int k) {
  double out = 0.0;
  for (int i = 0; i < horizontal(grid); ++i) out += vol(grid, horizontal_derivative(grid, f, i), k);
  return out;
}

Field inverse_h_prime(const PressureLaw& law, const Field& rho) {
  return rho.unaryExpr([&](double r) { return 1.0 / enthalpy_derivative(law, r); });
}

struct LevelData {
  Geometry geom;
  Field rho;
  Field w;  // 1 / h'(rho)
};

LevelData level_data(const Model& model, const State& s) {
  LevelData out{build_geometry(model.grid, s.eta, true), {}, {}};
  out.rho = density_from_q(model, s.q, out.geom);
  out.w = inverse_h_prime(model.law, out.rho);
  return out;
}

double l2_energy_with(const Model& model, const State& s, const LevelData& lv) {
  const Grid& grid = model.grid;
  Field integrand = lv.w.cwiseProduct(s.q.cwiseAbs2());
  for (const auto& c : s.u) integrand += lv.rho.cwiseProduct(c.cwiseAbs2());
  const double volume = integrate_volume(grid, lv.geom.J.cwiseProduct(integrand));
  const double surface = integrate_surface(grid, model.rho_star() * model.g() * s.eta.cwiseAbs2());
  return 0.5 * (volume + surface);
}

}  // namespace

void validate(const EnergyConfig& cfg) {
  std::vector<std::string> v;
  if (!(1 <= cfg.K_low && cfg.K_low < cfg.K_high && cfg.K_high <= 4))
    v.push_back("energy: derivative counts must satisfy 1 <= K_low < K_high <= 4");
  if (cfg.cadence < 1) v.push_back("energy.cadence: must be >= 1");
  if (!v.empty()) throw ConfigError(v);
}

Rates backward_rates(const State& prev, const State& cur) {
  const double h = cur.t - prev.t;
  if (!(h > 0.0)) throw DomainError("backward_rates: time levels must increase");
  Rates r;
  r.dq_dt = (cur.q - prev.q) / h;
  for (std::size_t i = 0; i < cur.u.size(); ++i) r.du_dt.push_back((cur.u[i] - prev.u[i]) / h);
  r.deta_dt = (cur.eta - prev.eta) / h;
  return r;
}

double energy_high(const Grid& grid, const State& s, const Rates* dt1, const EnergyConfig& cfg) {
  const int k = 2 * cfg.K_high;
  double e = vol(grid, s.u, k) + vol(grid, s.q, k) + surf(grid, s.eta, k);
  if (dt1) e += vol(grid, dt1->du_dt, k - 2) + vol(grid, dt1->dq_dt, k - 2) + surf(grid, dt1->deta_dt, k - 2);
  return e;
}

double dissipation_high(const Grid& grid, const State& s, const Rates* dt1, const EnergyConfig& cfg) {
  const int k = 2 * cfg.K_high;
  const int v = grid.dim() - 1;
  const Geometry geom = build_geometry(grid, s.eta, true);
  double d = vol(grid, s.u[v], k + 1);
  for (int i = 0; i < v; ++i) {
    d += vol(grid, s.u[i], k);
    d += vol(grid, grad_A(grid, geom, s.u[i]), k);
  }
  d += volume_gradient(grid, s.q, k - 1);
  d += surface_gradient(grid, s.eta, k - 1.5);
  if (dt1) d += vol(grid, dt1->du_dt, k - 1) + vol(grid, dt1->dq_dt, k - 1) + surf(grid, dt1->deta_dt, k - 1);
  return d;
}

double surface_F(const Grid& grid, const State& s, const EnergyConfig& cfg) {
  return surf(grid, s.eta, 2 * cfg.K_high + 0.5);
}

double energy_low(const Grid& grid, const State& s, const Rates* dt1, const EnergyConfig& cfg) {
  const int k = 2 * cfg.K_low;
  double e = 0.0;
  if (cfg.low_count_two) {
    for (const auto& c : s.u) e += volume_gradient(grid, c, k - 1);
    e += horizontal_hessian(grid, s.q, k - 2) + horizontal_gradient(grid, derivative(grid, s.q, grid.dim() - 1), k - 2);
    e += surface_hessian(grid, s.eta, k - 2);
  } else {
    e += vol(grid, s.u, k) + volume_gradient(grid, s.q, k - 1) + surface_gradient(grid, s.eta, k - 1);
  }
  if (dt1) e += vol(grid, dt1->du_dt, k - 2) + vol(grid, dt1->dq_dt, k - 2) + surf(grid, dt1->deta_dt, k - 2);
  return e;
}

double dissipation_low(const Grid& grid, const State& s, const Rates* dt1, const EnergyConfig& cfg) {
  const int k = 2 * cfg.K_low;
  const int v = grid.dim() - 1;
  const int extra = cfg.low_count_two ? 1 : 0;
  double d = 0.0;
  for (int i = 0; i < v; ++i) {
    const Field ui = extra ? Field(horizontal_derivative(grid, s.u[i], 0)) : s.u[i];
    d += horizontal_gradient(grid, ui, k);
    d += surf(grid, surface_trace(derivative(grid, ui, v)), k - 0.5);
  }
  d += extra ? horizontal_gradient(grid, s.u[v], k) : vol(grid, s.u[v], k + 1);
  const Field dq = derivative(grid, s.q, v);
  d += horizontal_hessian(grid, s.q, k - 2) + vol(grid, dq, k - 1);
  d += surface_hessian(grid, s.eta, k - 2.5);
  if (dt1) d += vol(grid, dt1->du_dt, k - 1) + vol(grid, dt1->dq_dt, k) + surf(grid, dt1->deta_dt, k + 0.5);
  return d;
}

double l2_energy(const Model& model, const State& s) { return l2_energy_with(model, s, level_data(model, s)); }

IdentityBalance identity_balance(const Model& model, const State* prev, const State& cur, const State* next) {
  if (!prev && !next) throw DomainError("identity_residual: at least two time levels are required");
  const Grid& grid = model.grid;
  const State& a = prev ? *prev : cur;
  const State& b = next ? *next : cur;
  const double h = b.t - a.t;
  if (!(h > 0.0)) throw DomainError("identity_residual: time levels must increase");

  const LevelData la = level_data(model, a);
  const LevelData lc = level_data(model, cur);
  const LevelData lb = level_data(model, b);

  IdentityBalance out;
  out.energy_rate = (l2_energy_with(model, b, lb) - l2_energy_with(model, a, la)) / h;
  out.dissipation = viscous_dissipation(grid, lc.geom, cur.u, model.mu, model.mu_prime);

  // d_t^A (1/h'(rho)) = d_t w - J^{-1} d_t phi d_d w.
  const SurfaceField deta = (b.eta - a.eta) / h;
  const Field dphi = lift_surface(grid, deta);
  const Field dw = (lb.w - la.w) / h;
  const Field transport = dw - lc.geom.J.cwiseInverse().cwiseProduct(dphi).cwiseProduct(derivative(grid, lc.w, grid.dim() - 1));
  const double volume = 0.5 * integrate_volume(grid, lc.geom.J.cwiseProduct(transport).cwiseProduct(cur.q.cwiseAbs2()));

  const SurfaceField q_s = surface_trace(cur.q);
  const SurfaceField w_s = surface_trace(lc.w);
  const SurfaceField R_P = remainder_P_h_inverse(model.law, q_s, cur.eta);
  const SurfaceField R_h = surface_trace(remainder_h_inverse(model, cur.q, lc.geom));
  const double inv_h_star = 1.0 / enthalpy_derivative(model.law, model.rho_star());
  const SurfaceField bracket = (0.5 * w_s.cwiseProduct(q_s.cwiseAbs2()) + R_P -
                                (inv_h_star * (q_s - model.g() * cur.eta) + R_h).cwiseProduct(q_s));
  out.rhs = volume + integrate_surface(grid, bracket.cwiseProduct(deta));
  return out;
}

double identity_residual(const Model& model, const State* prev, const State& cur, const State* next) {
  return identity_balance(model, prev, cur, next).residual();
}

EnergyReport evaluate_report(const Model& model, const EnergyConfig& cfg, const StepWindow& w) {
  const Grid& grid = model.grid;
  const State& s = w.cur;
  EnergyReport r;
  r.t = s.t;
  std::optional<Rates> rates;
  if (w.prev) rates = backward_rates(*w.prev, s);
  const Rates* dt1 = rates ? &*rates : nullptr;
  r.E_high = energy_high(grid, s, dt1, cfg);
  r.D_high = dissipation_high(grid, s, dt1, cfg);
  r.F_surf = surface_F(grid, s, cfg);
  r.E_low = energy_low(grid, s, dt1, cfg);
  r.D_low = dissipation_low(grid, s, dt1, cfg);
  const Geometry geom = build_geometry(grid, s.eta, true);
  r.min_J = geom.min_J;
  r.min_rho = density_from_q(model, s.q, geom).minCoeff();
  if (w.prev || w.next) {
    const IdentityBalance bal = identity_balance(model, w.prev, s, w.next);
    r.identity_residual = bal.residual();
    r.dissipation_l2 = bal.dissipation;
  } else {
    r.dissipation_l2 = viscous_dissipation(grid, geom, s.u, model.mu, model.mu_prime);
  }
  return r;
}

DecayFit decay_fit(const std::vector<double>& t, const std::vector<double>& v) {
  if (t.size() != v.size()) throw DomainError("decay_fit: series lengths differ");
  if (t.size() < 10) throw DomainError("decay_fit: at least 10 samples are required");
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!(v[i] > 0.0) || !std::isfinite(v[i])) throw DomainError("decay_fit: values must be positive and finite");
    if (!(t[i] >= 0.0)) throw DomainError("decay_fit: times must be nonnegative");
  }
  const auto [tmin, tmax] = std::minmax_element(t.begin(), t.end());
  if ((1.0 + *tmax) < 10.0 * (1.0 + *tmin) * (1.0 - 1e-12))
    throw DomainError("decay_fit: samples must span a decade of (1+t)");

  const Eigen::Index n = Eigen::Index(t.size());
  Eigen::VectorXd y(n), xa(n), xe(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    y(i) = std::log(v[i]);
    xa(i) = std::log1p(t[i]);
    xe(i) = t[i];
  }
  const double y_mean = y.mean();
  const double sst = (y.array() - y_mean).square().sum();
  auto fit = [&](const Eigen::VectorXd& x, double& sse) {
    const double xm = x.mean();
    const Eigen::ArrayXd dx = x.array() - xm;
    const double slope = (dx * (y.array() - y_mean)).sum() / dx.square().sum();
    const double icpt = y_mean - slope * xm;
    sse = (y.array() - icpt - slope * x.array()).square().sum();
    return slope;
  };
  DecayFit out;
  out.algebraic_rate = fit(xa, out.algebraic_sse);
  out.exponential_rate = fit(xe, out.exponential_sse);
  const bool algebraic = out.algebraic_sse <= out.exponential_sse;
  out.model = algebraic ? "algebraic" : "exponential";
  out.rate = algebraic ? out.algebraic_rate : out.exponential_rate;
  const double sse = algebraic ? out.algebraic_sse : out.exponential_sse;
  out.goodness = sst > 0.0 ? 1.0 - sse / sst : 1.0;
  return out;
}

std::vector<double> time_weighted_aggregate(const std::vector<EnergyReport>& reports) {
  std::vector<double> out;
  out.reserve(reports.size());
  double int_D = 0.0, int_F = 0.0, int_Dl = 0.0, sup = 0.0;
  for (std::size_t n = 0; n < reports.size(); ++n) {
    const EnergyReport& r = reports[n];
    if (n > 0) {
      const EnergyReport& p = reports[n - 1];
      const double h = r.t - p.t;
      int_D += 0.5 * h * (p.D_high + r.D_high);
      int_F += 0.5 * h * (p.F_surf / std::pow(1.0 + p.t, 2) + r.F_surf / std::pow(1.0 + r.t, 2));
      int_Dl += 0.5 * h * ((1.0 + p.t) * p.D_low + (1.0 + r.t) * r.D_low);
    }
    const double value = r.E_high + int_D + r.F_surf / (1.0 + r.t) + int_F + (1.0 + r.t) * r.E_low + int_Dl;
    sup = n == 0 ? value : std::max(sup, value);
    out.push_back(sup);
  }
  return out;
}

}  // namespace fsflow
