#pragma once

#include <Eigen/Dense>
#include <functional>
#include <limits>
#include <string>

namespace fsflow {

/// Barotropic pressure law P(rho) with atmospheric pressure and gravity.
///
/// The two built-in kinds (P = K rho and P = K rho^gamma) have closed-form
/// enthalpy and inverse. A user law supplies P, P' and P'' as callables; its
/// enthalpy is integrated numerically and inverted by safeguarded Newton. The
/// user callables are assumed positive, strictly increasing and C^2; this is
/// documented, not verified.
struct PressureLaw {
  enum class Kind { isothermal, gamma_law, user };

  Kind kind = Kind::isothermal;
  double K = 1.0;
  double gamma = 1.4;
  /// Density scale of the saturating law (user kind only).
  double rho_scale = 1.0;
  double p_atm = 1.0;
  double g = 1.0;
  /// Density floor defining the lower end of the enthalpy range, as a
  /// fraction of rho*.
  double rho_floor_fraction = 1e-6;

  std::function<double(double)> user_P;
  std::function<double(double)> user_dP;
  std::function<double(double)> user_d2P;
  /// Upper limit for the numeric divergence test of the admissible depth.
  double user_cutoff = 1e8;
  /// Label carried into configs and checkpoints for user laws.
  std::string user_label;
  /// Cached P^{-1}(p_atm) for user laws (set by the factory).
  double user_rho_star = 0.0;

  static PressureLaw isothermal(double K, double p_atm, double g);
  static PressureLaw gamma_law(double K, double gamma, double p_atm, double g);
  static PressureLaw user(std::function<double(double)> P, std::function<double(double)> dP,
                          std::function<double(double)> d2P, double p_atm, double g, std::string label = "user");
  /// P(rho) = K (1 - exp(-rho / rho_scale)); a bounded law with finite admissible depth.
  static PressureLaw saturating(double K, double rho_scale, double p_atm, double g);

  double pressure(double rho) const;
  double dpressure(double rho) const;
  double d2pressure(double rho) const;
  /// rho* = P^{-1}(p_atm).
  double reference_density() const;
  /// Check positivity/monotonicity invariants; throws ConfigError.
  void validate() const;
};

/// h(z) = integral from rho* to z of P'(s)/s ds. Throws DomainError for z <= 0.
double enthalpy(const PressureLaw& law, double z);
/// h'(z) = P'(z)/z.
double enthalpy_derivative(const PressureLaw& law, double z);
/// Inverse of the enthalpy. Throws DomainError when w is below h(rho_floor).
double enthalpy_inverse(const PressureLaw& law, double w);
/// (h^{-1})'(w) = rho / P'(rho) with rho = h^{-1}(w).
double enthalpy_inverse_d1(const PressureLaw& law, double w);
/// (h^{-1})''(w).
double enthalpy_inverse_d2(const PressureLaw& law, double w);
/// Lower end of the enthalpy range, h(rho_floor).
double enthalpy_floor(const PressureLaw& law);

/// (1/g) * integral of P'(s)/s from rho* to infinity; +inf when it diverges.
double admissible_depth_bound(const PressureLaw& law);

/// Hydrostatic profile tabulated on a set of vertical coordinates y_d in [-b, 0].
struct EquilibriumProfile {
  Eigen::VectorXd rho_bar;
  Eigen::VectorXd h_prime_bar;  ///< h'(rho_bar) = P'(rho_bar) / rho_bar
  Eigen::VectorXd P_prime_bar;  ///< P'(rho_bar)
  double b = 1.0;
  double rho_star = 1.0;
};

/// rho_bar(y) = h^{-1}(-g y). Throws AdmissibilityError when b exceeds the bound.
EquilibriumProfile solve_equilibrium(const PressureLaw& law, double b, const Eigen::VectorXd& nodes);

}  // namespace fsflow
