#include "fsflow/equilibrium.hpp"

#include <cmath>
#include <sstream>

#include "fsflow/errors.hpp"
#include "fsflow/quadrature.hpp"

namespace fsflow {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Solve P(rho) = p for a user law by bracketing and bisection.
double invert_pressure(const PressureLaw& law, double p) {
  double lo = 1e-300, hi = 1.0;
  if (law.user_P(lo) >= p) throw ConfigError("law: p_atm is not in P(R+) (P(0+) >= p_atm)");
  int expand = 0;
  while (law.user_P(hi) < p) {
    hi *= 2.0;
    if (++expand > 1100 || !std::isfinite(hi)) throw ConfigError("law: p_atm is not in P(R+) (P bounded below p_atm)");
  }
  for (int it = 0; it < 400; ++it) {
    const double mid = (lo > 0 && hi / lo > 4.0) ? std::sqrt(lo * hi) : 0.5 * (lo + hi);
    if (law.user_P(mid) < p)
      lo = mid;
    else
      hi = mid;
    if (hi - lo <= 1e-15 * hi) break;
  }
  return 0.5 * (lo + hi);
}

// integral of P'(s)/s over [a, b] via s = exp(t).
double user_enthalpy_integral(const PressureLaw& law, double a, double b) {
  const auto integrand = [&law](double t) { return law.user_dP(std::exp(t)); };
  return integrate_adaptive<double>(integrand, std::log(a), std::log(b), 1e-15);
}

}  // namespace

PressureLaw PressureLaw::isothermal(double K, double p_atm, double g) {
  PressureLaw law;
  law.kind = Kind::isothermal;
  law.K = K;
  law.p_atm = p_atm;
  law.g = g;
  return law;
}

PressureLaw PressureLaw::gamma_law(double K, double gamma, double p_atm, double g) {
  PressureLaw law;
  law.kind = Kind::gamma_law;
  law.K = K;
  law.gamma = gamma;
  law.p_atm = p_atm;
  law.g = g;
  return law;
}

PressureLaw PressureLaw::user(std::function<double(double)> P, std::function<double(double)> dP,
                              std::function<double(double)> d2P, double p_atm, double g, std::string label) {
  PressureLaw law;
  law.kind = Kind::user;
  law.user_P = std::move(P);
  law.user_dP = std::move(dP);
  law.user_d2P = std::move(d2P);
  law.p_atm = p_atm;
  law.g = g;
  law.user_label = std::move(label);
  law.user_rho_star = invert_pressure(law, p_atm);
  return law;
}

PressureLaw PressureLaw::saturating(double K, double rho_scale, double p_atm, double g) {
  auto law = user([K, rho_scale](double r) { return K * (1.0 - std::exp(-r / rho_scale)); },
                  [K, rho_scale](double r) { return K / rho_scale * std::exp(-r / rho_scale); },
                  [K, rho_scale](double r) { return -K / (rho_scale * rho_scale) * std::exp(-r / rho_scale); }, p_atm,
                  g, "saturating");
  law.K = K;
  law.rho_scale = rho_scale;
  return law;
}

double PressureLaw::pressure(double rho) const {
  switch (kind) {
    case Kind::isothermal: return K * rho;
    case Kind::gamma_law: return K * std::pow(rho, gamma);
    case Kind::user: return user_P(rho);
  }
  return 0.0;
}

double PressureLaw::dpressure(double rho) const {
  switch (kind) {
    case Kind::isothermal: return K;
    case Kind::gamma_law: return K * gamma * std::pow(rho, gamma - 1.0);
    case Kind::user: return user_dP(rho);
  }
  return 0.0;
}

double PressureLaw::d2pressure(double rho) const {
  switch (kind) {
    case Kind::isothermal: return 0.0;
    case Kind::gamma_law: return K * gamma * (gamma - 1.0) * std::pow(rho, gamma - 2.0);
    case Kind::user: return user_d2P(rho);
  }
  return 0.0;
}

double PressureLaw::reference_density() const {
  switch (kind) {
    case Kind::isothermal: return p_atm / K;
    case Kind::gamma_law: return std::pow(p_atm / K, 1.0 / gamma);
    case Kind::user: return user_rho_star > 0 ? user_rho_star : invert_pressure(*this, p_atm);
  }
  return 0.0;
}

void PressureLaw::validate() const {
  std::vector<std::string> v;
  if (!(p_atm > 0)) v.push_back("law.p_atm: must be positive");
  if (!(g > 0)) v.push_back("law.g: gravitational acceleration must be positive");
  if (kind != Kind::user && !(K > 0)) v.push_back("law.K: must be positive");
  if (kind == Kind::gamma_law && !(gamma > 1)) v.push_back("law.gamma: exponent must exceed 1");
  if (kind == Kind::user && (!user_P || !user_dP || !user_d2P)) v.push_back("law: user law requires P, P', P''");
  if (!(rho_floor_fraction > 0 && rho_floor_fraction < 1)) v.push_back("law.rho_floor_fraction: must lie in (0,1)");
  if (!v.empty()) throw ConfigError(v);
  if (kind == Kind::user) {
    const double rs = reference_density();
    if (!(dpressure(rs) > 0)) throw ConfigError("law: P must be strictly increasing at rho*");
  }
}

double enthalpy(const PressureLaw& law, double z) {
  if (!(z > 0)) throw DomainError("enthalpy: density must be positive");
  switch (law.kind) {
    case PressureLaw::Kind::isothermal: return law.K * std::log(z / law.reference_density());
    case PressureLaw::Kind::gamma_law: {
      const double rs = law.reference_density();
      return law.K * law.gamma / (law.gamma - 1.0) * (std::pow(z, law.gamma - 1.0) - std::pow(rs, law.gamma - 1.0));
    }
    case PressureLaw::Kind::user: return user_enthalpy_integral(law, law.reference_density(), z);
  }
  return 0.0;
}

double enthalpy_derivative(const PressureLaw& law, double z) {
  if (!(z > 0)) throw DomainError("enthalpy_derivative: density must be positive");
  return law.dpressure(z) / z;
}

double enthalpy_floor(const PressureLaw& law) {
  return enthalpy(law, law.rho_floor_fraction * law.reference_density());
}

double enthalpy_inverse(const PressureLaw& law, double w) {
  if (!std::isfinite(w)) throw DomainError("enthalpy_inverse: non-finite argument");
  const double rs = law.reference_density();
  const double floor = enthalpy_floor(law);
  if (w < floor) {
    std::ostringstream os;
    os << "enthalpy_inverse: value " << w << " below the enthalpy range floor " << floor;
    throw DomainError(os.str());
  }
  switch (law.kind) {
    case PressureLaw::Kind::isothermal: return rs * std::exp(w / law.K);
    case PressureLaw::Kind::gamma_law: {
      const double gm1 = law.gamma - 1.0;
      const double base = std::pow(rs, gm1) + w * gm1 / (law.K * law.gamma);
      return std::pow(base, 1.0 / gm1);
    }
    case PressureLaw::Kind::user: break;
  }

  // Safeguarded Newton with a bisection bracket [lo, hi], h(lo) <= w <= h(hi).
  double lo = law.rho_floor_fraction * rs, hi = rs;
  double h_hi = 0.0;
  int expand = 0;
  while (h_hi < w) {
    lo = hi;
    hi *= 2.0;
    h_hi = enthalpy(law, hi);
    if (++expand > 200 || hi > law.user_cutoff * 1e3) throw DomainError("enthalpy_inverse: value above the enthalpy range");
  }
  const double tol = 1e-12 * std::max(1.0, std::abs(w));
  double z = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const double r = enthalpy(law, z) - w;
    if (std::abs(r) <= tol) return z;
    if (r > 0)
      hi = z;
    else
      lo = z;
    double next = z - r / enthalpy_derivative(law, z);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    z = next;
  }
  return z;
}

double enthalpy_inverse_d1(const PressureLaw& law, double w) {
  const double rho = enthalpy_inverse(law, w);
  return rho / law.dpressure(rho);
}

double enthalpy_inverse_d2(const PressureLaw& law, double w) {
  const double rho = enthalpy_inverse(law, w);
  const double dp = law.dpressure(rho);
  return rho / dp * (dp - rho * law.d2pressure(rho)) / (dp * dp);
}

double admissible_depth_bound(const PressureLaw& law) {
  switch (law.kind) {
    // h(z) -> infinity as z -> infinity for both built-in laws.
    case PressureLaw::Kind::isothermal:
    case PressureLaw::Kind::gamma_law: return kInf;
    case PressureLaw::Kind::user: break;
  }
  const double rs = law.reference_density();
  const double cutoff = law.user_cutoff;
  const double full = user_enthalpy_integral(law, rs, cutoff);
  const double tenth = user_enthalpy_integral(law, rs, cutoff / 10.0);
  if (full - tenth > 1e-9 * std::max(1.0, std::abs(full))) return kInf;
  return full / law.g;
}

EquilibriumProfile solve_equilibrium(const PressureLaw& law, double b, const Eigen::VectorXd& nodes) {
  const double bound = admissible_depth_bound(law);
  if (!(b > 0) || !(b < bound)) {
    std::ostringstream os;
    os << "equilibrium: depth b=" << b << " violates 0 < b < (1/g) int_{rho*}^inf P'(s)/s ds = " << bound;
    throw AdmissibilityError(os.str(), bound);
  }
  EquilibriumProfile eq;
  eq.b = b;
  eq.rho_star = law.reference_density();
  const auto n = nodes.size();
  eq.rho_bar.resize(n);
  eq.h_prime_bar.resize(n);
  eq.P_prime_bar.resize(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double rho = enthalpy_inverse(law, -law.g * nodes(j));
    eq.rho_bar(j) = rho;
    eq.P_prime_bar(j) = law.dpressure(rho);
    eq.h_prime_bar(j) = eq.P_prime_bar(j) / rho;
  }
  return eq;
}

}  // namespace fsflow
