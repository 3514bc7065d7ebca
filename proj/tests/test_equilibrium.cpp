#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "fsflow/chebyshev.hpp"
#include "fsflow/equilibrium.hpp"
#include "fsflow/errors.hpp"
#include "fsflow/quadrature.hpp"

using namespace fsflow;

namespace {

double enthalpy_oracle(const PressureLaw& law, double z) {
  const double rs = law.reference_density();
  return integrate_adaptive<double>([&](double s) { return law.dpressure(s) / s; }, rs, z);
}

}  // namespace

TEST_CASE("enthalpy vanishes at the reference density") {
  for (const auto& law : {PressureLaw::isothermal(1, 1, 1), PressureLaw::gamma_law(1, 2, 1, 1),
                          PressureLaw::saturating(2, 1, 1, 1)})
    CHECK(enthalpy(law, law.reference_density()) == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("enthalpy closed forms agree with quadrature") {
  const auto iso = PressureLaw::isothermal(1, 1, 1);
  CHECK(enthalpy(iso, std::exp(1.0)) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(enthalpy_oracle(iso, std::exp(1.0)) == doctest::Approx(1.0).epsilon(1e-12));

  const auto gam = PressureLaw::gamma_law(1, 2, 1, 1);
  CHECK(enthalpy(gam, 2.0) == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(enthalpy_oracle(gam, 2.0) == doctest::Approx(2.0).epsilon(1e-12));

  const auto sat = PressureLaw::saturating(3, 1.5, 1, 1);
  for (double z : {0.8, 1.3, 4.0}) CHECK(enthalpy(sat, z) == doctest::Approx(enthalpy_oracle(sat, z)).epsilon(1e-10));
}

TEST_CASE("enthalpy inverse") {
  const auto iso = PressureLaw::isothermal(1, 1, 1);
  CHECK(enthalpy_inverse(iso, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(enthalpy_inverse(iso, 0.5) == doctest::Approx(1.6487212707001282).epsilon(1e-14));

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(0.5, 5.0);
  for (const auto& law : {iso, PressureLaw::gamma_law(1, 2, 1, 1), PressureLaw::gamma_law(2, 1.4, 1, 1),
                          PressureLaw::saturating(3, 1.5, 1, 1)}) {
    CHECK(enthalpy_inverse(law, 0.0) == doctest::Approx(law.reference_density()).epsilon(1e-14));
    for (int i = 0; i < 100; ++i) {
      const double z = U(rng);
      if (law.kind == PressureLaw::Kind::user && z > 4.0) continue;
      CHECK(std::abs(enthalpy_inverse(law, enthalpy(law, z)) - z) <= 1e-10);
    }
  }
}

TEST_CASE("derivatives of the inverse enthalpy") {
  const auto gam = PressureLaw::gamma_law(1, 1.4, 1, 1);
  const double h = 1e-4;
  for (double w : {-0.3, 0.0, 0.4}) {
    const double fd1 = (enthalpy_inverse(gam, w + h) - enthalpy_inverse(gam, w - h)) / (2 * h);
    const double fd2 = (enthalpy_inverse_d1(gam, w + h) - enthalpy_inverse_d1(gam, w - h)) / (2 * h);
    CHECK(enthalpy_inverse_d1(gam, w) == doctest::Approx(fd1).epsilon(1e-7));
    CHECK(enthalpy_inverse_d2(gam, w) == doctest::Approx(fd2).epsilon(1e-7));
    // (h^{-1})' = rho / P'(rho)
    const double rho = enthalpy_inverse(gam, w);
    CHECK(enthalpy_inverse_d1(gam, w) == doctest::Approx(rho / gam.dpressure(rho)).epsilon(1e-13));
  }
}

TEST_CASE("admissible depth bound") {
  const double inf = std::numeric_limits<double>::infinity();
  CHECK(admissible_depth_bound(PressureLaw::isothermal(1, 1, 1)) == inf);
  CHECK(admissible_depth_bound(PressureLaw::gamma_law(1, 2, 1, 1)) == inf);
  CHECK(admissible_depth_bound(PressureLaw::isothermal(1, 1, 2)) == inf);

  // Saturating law: (1/g) int_{rho*}^inf (K/s) e^{-r/s} / r dr, finite.
  const auto sat = PressureLaw::saturating(2, 1, 1, 1);
  const double B = admissible_depth_bound(sat);
  REQUIRE(std::isfinite(B));
  const double rs = sat.reference_density();
  const double oracle = integrate_adaptive<double>([&](double r) { return sat.dpressure(r) / r; }, rs, 200.0);
  CHECK(B == doctest::Approx(oracle).epsilon(1e-8));
  const auto sat_g2 = PressureLaw::saturating(2, 1, 1, 2);
  CHECK(admissible_depth_bound(sat_g2) == doctest::Approx(B / 2).epsilon(1e-10));

  const Eigen::VectorXd y = Eigen::VectorXd::LinSpaced(9, 0.0, -2 * B);
  CHECK_THROWS_AS(solve_equilibrium(sat, 2 * B, y), AdmissibilityError);
}

TEST_CASE("isothermal equilibrium is exponential") {
  const auto law = PressureLaw::isothermal(1, 1, 1);
  const Eigen::VectorXd x = chebyshev_lobatto_nodes<double>(64);
  const Eigen::VectorXd y = 0.5 * (x.array() - 1.0);
  const auto eq = solve_equilibrium(law, 1.0, y);
  CHECK(eq.rho_star == doctest::Approx(1.0));
  CHECK(eq.rho_bar(0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(eq.rho_bar(y.size() - 1) == doctest::Approx(std::exp(1.0)).epsilon(1e-14));
  CHECK((eq.rho_bar.array() - (-y.array()).exp()).abs().maxCoeff() <= 1e-10);
}

TEST_CASE("equilibrium is decreasing and hydrostatic for every law") {
  const Eigen::VectorXd x = chebyshev_lobatto_nodes<double>(33);
  const Eigen::VectorXd y = 0.5 * (x.array() - 1.0);
  const Eigen::MatrixXd D = 2.0 * chebyshev_diff_matrix<double>(33);
  for (const auto& law : {PressureLaw::isothermal(2, 1, 1), PressureLaw::gamma_law(1, 1.4, 1, 1),
                          PressureLaw::saturating(3, 1, 1, 0.5)}) {
    const auto eq = solve_equilibrium(law, 1.0, y);
    CHECK(eq.rho_bar(0) == doctest::Approx(law.reference_density()).epsilon(1e-14));
    for (Eigen::Index i = 1; i < y.size(); ++i) CHECK(eq.rho_bar(i) > eq.rho_bar(i - 1));
    Eigen::VectorXd p(y.size());
    for (Eigen::Index i = 0; i < y.size(); ++i) p(i) = law.pressure(eq.rho_bar(i));
    const Eigen::VectorXd res = D * p + law.g * eq.rho_bar;
    CHECK(res.cwiseAbs().maxCoeff() <= 1e-8);
    for (Eigen::Index i = 0; i < y.size(); ++i)
      CHECK(enthalpy(law, eq.rho_bar(i)) == doctest::Approx(-law.g * y(i)).epsilon(1e-12));
  }
}

TEST_CASE("law validation") {
  CHECK_THROWS_AS(PressureLaw::isothermal(-1, 1, 1).validate(), ConfigError);
  CHECK_THROWS_AS(PressureLaw::gamma_law(1, 0.5, 1, 1).validate(), ConfigError);
  CHECK_NOTHROW(PressureLaw::gamma_law(1, 1.4, 1, 1).validate());
}
