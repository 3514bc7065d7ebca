#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fsflow/nonlinear.hpp"
#include "fsflow/verification.hpp"

using namespace fsflow;

namespace {

constexpr double kPi = std::numbers::pi;

Model default_model(int n_h = 16, int n_v = 17) {
  return make_model(Grid::make(2, 2 * kPi, n_h, n_v, 1.0), PressureLaw::isothermal(1, 1, 1), 1.0, 1.0);
}

double max_abs(const Field& f) { return f.cwiseAbs().maxCoeff(); }
double max_abs(const SurfaceField& f) { return f.cwiseAbs().maxCoeff(); }
double max_abs(const VectorField& v) {
  double m = 0;
  for (const auto& f : v) m = std::max(m, max_abs(f));
  return m;
}
double max_abs(const SurfaceVector& v) {
  double m = 0;
  for (const auto& f : v) m = std::max(m, max_abs(f));
  return m;
}

}  // namespace

TEST_CASE("equilibrium annihilates every remainder") {
  const Model m = default_model();
  const State s = zero_state(m.grid);
  const Geometry geom = build_geometry(m.grid, s.eta);
  const NonlinearBundle nb = evaluate_nonlinear(m, s, geom, zero_rates(m.grid));
  CHECK(max_abs(nb.G1) <= 1e-14);
  CHECK(max_abs(nb.G2) <= 1e-14);
  CHECK(max_abs(nb.G3) <= 1e-14);
  CHECK(max_abs(nb.G4) <= 1e-14);
  CHECK(max_abs(nb.Q_diag) <= 1e-14);
  for (Eigen::Index r = 0; r < m.grid.vertical_size(); ++r)
    CHECK(nb.rho(r, 0) == doctest::Approx(m.eq.rho_bar(r)).epsilon(1e-14));
  CHECK(max_abs(remainder_h_inverse(m, s.q, geom)) <= 1e-14);
}

TEST_CASE("density reconstruction") {
  const Model m = default_model();
  std::mt19937_64 rng(7);
  const State s = random_small_state(m.grid, rng, 1e-2);
  const Geometry geom = build_geometry(m.grid, s.eta);
  const Field rho = density_from_q(m, s.q, geom);
  // isothermal with K = g = 1: rho = rho_bar e^{q - g phi}
  double worst = 0.0;
  for (Eigen::Index c = 0; c < m.grid.surface_size(); ++c)
    for (Eigen::Index r = 0; r < m.grid.vertical_size(); ++r)
      worst = std::max(worst, std::abs(rho(r, c) - m.eq.rho_bar(r) * std::exp(s.q(r, c) - geom.phi(r, c))));
  CHECK(worst <= 1e-13);
  for (Eigen::Index c = 0; c < m.grid.surface_size(); ++c)
    CHECK(rho(0, c) == doctest::Approx(enthalpy_inverse(m.law, s.q(0, c) - s.eta(c))).epsilon(1e-13));

  const Field R = remainder_h_inverse(m, s.q, geom);
  const Field arg = s.q - m.g() * geom.phi;
  double taylor = 0.0;
  for (Eigen::Index c = 0; c < m.grid.surface_size(); ++c)
    for (Eigen::Index r = 0; r < m.grid.vertical_size(); ++r)
      taylor = std::max(taylor, std::abs(rho(r, c) - m.eq.rho_bar(r) - arg(r, c) / m.eq.h_prime_bar(r) - R(r, c)));
  CHECK(taylor <= 1e-10);
}

TEST_CASE("surface pressure remainder") {
  const PressureLaw law = PressureLaw::isothermal(1, 1, 1);
  const SurfaceField eta = SurfaceField::Zero(8);
  CHECK(remainder_P_h_inverse(law, SurfaceField::Constant(8, 0.1), eta)(3) ==
        doctest::Approx(std::exp(0.1) - 1.1).epsilon(1e-12));
  CHECK(remainder_P_h_inverse(law, SurfaceField::Constant(8, 0.1), eta)(3) == doctest::Approx(5.1709e-3).epsilon(1e-4));
  CHECK(max_abs(remainder_P_h_inverse(law, SurfaceField::Constant(8, 0.3), SurfaceField::Constant(8, 0.3))) == 0.0);

  const PressureLaw gl = PressureLaw::gamma_law(1, 1.4, 1, 1);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> U(-0.05, 0.05);
  SurfaceField q(16), e(16);
  for (int i = 0; i < 16; ++i) q(i) = U(rng), e(i) = U(rng);
  const SurfaceField R = remainder_P_h_inverse(gl, q, e);
  const double rs = gl.reference_density();
  for (int i = 0; i < 16; ++i) {
    const double w = q(i) - gl.g * e(i);
    CHECK(std::abs(gl.pressure(enthalpy_inverse(gl, w)) - gl.p_atm - rs * w - R(i)) <= 1e-10);
  }
}

TEST_CASE("remainders vanish with u = 0 and eta = 0") {
  const Model m = default_model();
  std::mt19937_64 rng(13);
  State s = random_small_state(m.grid, rng, 1e-2);
  for (auto& c : s.u) c.setZero();
  s.eta.setZero();
  const Geometry geom = build_geometry(m.grid, s.eta);
  Rates r = zero_rates(m.grid);
  r.dq_dt = random_rates(m.grid, rng, 1e-2).dq_dt;
  const NonlinearBundle nb = evaluate_nonlinear(m, s, geom, r);
  CHECK(max_abs(nb.G1) <= 1e-14);
  CHECK(max_abs(nb.G3) <= 1e-14);
  CHECK(max_abs(nb.G4[0]) <= 1e-14);
  const SurfaceField Rp = dealias(m.grid, SurfaceField(-remainder_P_h_inverse(m.law, surface_trace(s.q), s.eta)));
  CHECK(max_abs(SurfaceField(nb.G4[1] - Rp)) <= 1e-14);
  // the transport form reduces to d_t q, the divergence form to zero
  CHECK(max_abs(nb.Q_diag) <= 1e-14);
  CHECK(nb.Q_discrepancy == doctest::Approx(max_abs(r.dq_dt)).epsilon(1e-14));
}

TEST_CASE("flat geometry with equilibrium density leaves only transport in the momentum remainder") {
  const Model m = default_model(16, 17);
  const Grid& g = m.grid;
  State s = zero_state(g);
  for (Eigen::Index c = 0; c < g.surface_size(); ++c)
    for (Eigen::Index r = 0; r < g.vertical_size(); ++r) {
      const double x = g.coordinate(0, c), y = g.vertical_nodes()(r);
      s.u[0](r, c) = 1e-2 * std::sin(x) * (y + 1);
      s.u[1](r, c) = 1e-2 * std::cos(x) * (y + 1) * y;
    }
  const Geometry geom = build_geometry(g, s.eta);
  const Field rho = density_from_q(m, s.q, geom);
  const Rates r = zero_rates(g);
  const Field dphi = lift_surface(g, r.deta_dt);
  const RemainderInputs in{s, geom, rho, dphi, r.du_dt};
  const auto terms = eval_G2_terms(m, in);
  for (std::size_t t = 0; t + 1 < terms.size(); ++t) CHECK(max_abs(terms[t]) <= 1e-15);
  const Field rb = broadcast_profile(g, m.eq.rho_bar);
  for (int i = 0; i < 2; ++i) {
    Field expected = Field::Zero(g.vertical_size(), g.surface_size());
    for (int l = 0; l < 2; ++l) expected -= rb.cwiseProduct(s.u[l].cwiseProduct(derivative(g, s.u[i], l)));
    CHECK(max_abs(Field(dealias(g, terms.back()[i]) - dealias(g, expected))) <= 1e-13);
  }
}

TEST_CASE("kinematic remainder of a single mode") {
  const Grid g = Grid::make(2, 2 * kPi, 32, 9, 1.0);
  State s = zero_state(g);
  s.u[0].setOnes();
  for (Eigen::Index c = 0; c < 32; ++c) s.eta(c) = std::sin(g.coordinate(0, c));
  const SurfaceField G3 = eval_G3(g, s);
  for (Eigen::Index c = 0; c < 32; ++c) CHECK(std::abs(G3(c) + std::cos(g.coordinate(0, c))) <= 1e-13);
  s.eta.setConstant(0.4);
  CHECK(max_abs(eval_G3(g, s)) <= 1e-15);
}

TEST_CASE("split form reproduces the full system") {
  for (const PressureLaw& law : {PressureLaw::isothermal(1, 1, 1), PressureLaw::gamma_law(2, 1.4, 1, 1)}) {
    const Model m = make_model(Grid::make(2, 2 * kPi, 32, 33, 1.0), law, 1.0, 0.5);
    std::mt19937_64 rng(21);
    for (int t = 0; t < 5; ++t) {
      const State s = random_small_state(m.grid, rng, 1e-2);
      const Rates r = random_rates(m.grid, rng, 1e-2);
      const EquationResiduals split = split_residuals(m, s, r);
      const EquationResiduals full = full_residuals(m, s, r);
      CHECK(max_abs(Field(dealias(m.grid, Field(split.mass - full.mass)))) <= 1e-8);
      for (int i = 0; i < 2; ++i)
        CHECK(max_abs(Field(dealias(m.grid, Field(split.momentum[i] - full.momentum[i])))) <= 1e-8);
      CHECK(max_abs(SurfaceField(dealias(m.grid, SurfaceField(split.kinematic - full.kinematic)))) <= 1e-8);
      const SurfaceVector proj = project_dynamic(m.grid, full.dynamic, s.eta);
      for (int i = 0; i < 2; ++i)
        CHECK(max_abs(SurfaceField(dealias(m.grid, SurfaceField(split.dynamic[i] - proj[i])))) <= 1e-8);
    }
  }
}

TEST_CASE("remainders are quadratically small") {
  const Model m = default_model(32, 17);
  std::vector<double> eps{1e-2, 1e-3, 1e-4}, n1, n2, n4;
  for (double e : eps) {
    std::mt19937_64 rng(33);
    const State s = random_small_state(m.grid, rng, e);
    const Rates r = random_rates(m.grid, rng, e);
    const Geometry geom = build_geometry(m.grid, s.eta);
    const NonlinearBundle nb = evaluate_nonlinear(m, s, geom, r);
    n1.push_back(nb.G1.norm());
    n2.push_back(nb.G2[0].norm() + nb.G2[1].norm());
    n4.push_back(nb.G4[0].norm() + nb.G4[1].norm());
  }
  CHECK(loglog_slope(eps, n1) >= 1.9);
  CHECK(loglog_slope(eps, n2) >= 1.9);
  CHECK(loglog_slope(eps, n4) >= 1.9);
}

TEST_CASE("two forms of the transport diagnostic agree") {
  const Model m = default_model(32, 33);
  std::mt19937_64 rng(41);
  const State s = random_small_state(m.grid, rng, 1e-2);
  Rates r = random_rates(m.grid, rng, 1e-2);
  const Geometry geom = build_geometry(m.grid, s.eta);
  const Field rho = density_from_q(m, s.q, geom);
  const Field dphi = lift_surface(m.grid, r.deta_dt);
  const RemainderInputs in{s, geom, rho, dphi, r.du_dt};
  // choose d_t q so that the full mass equation holds exactly
  const EquationResiduals full = full_residuals(m, s, r);
  r.dq_dt -= full.mass;
  double disc = -1.0;
  diagnostic_Q(m, in, r.dq_dt, &disc);
  CHECK(disc >= 0.0);
  CHECK(disc <= 1e-8);
}
