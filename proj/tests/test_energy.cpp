#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fsflow/energy.hpp"
#include "fsflow/errors.hpp"
#include "fsflow/verification.hpp"

using namespace fsflow;

namespace {

constexpr double kPi = std::numbers::pi;

Model small_model() {
  return make_model(Grid::make(2, 2 * kPi, 16, 17, 1.0), PressureLaw::isothermal(1, 1, 1), 1.0, 1.0);
}

State scaled(const State& s, double l) {
  State o = s;
  o.q *= l;
  for (auto& c : o.u) c *= l;
  o.eta *= l;
  return o;
}

Rates scaled(const Rates& r, double l) {
  Rates o = r;
  o.dq_dt *= l;
  for (auto& c : o.du_dt) c *= l;
  o.deta_dt *= l;
  return o;
}

}  // namespace

TEST_CASE("functionals vanish at equilibrium") {
  const Model m = small_model();
  const State s = zero_state(m.grid);
  const Rates r = zero_rates(m.grid);
  const EnergyConfig cfg;
  CHECK(energy_high(m.grid, s, &r, cfg) == 0.0);
  CHECK(dissipation_high(m.grid, s, &r, cfg) == 0.0);
  CHECK(surface_F(m.grid, s, cfg) == 0.0);
  CHECK(energy_low(m.grid, s, &r, cfg) == 0.0);
  CHECK(dissipation_low(m.grid, s, &r, cfg) == 0.0);
  CHECK(l2_energy(m, s) == 0.0);
  State next = s;
  next.t = 0.1;
  CHECK(identity_residual(m, nullptr, s, &next) == 0.0);
}

TEST_CASE("quadratic homogeneity") {
  const Model m = small_model();
  std::mt19937_64 rng(3);
  const State s = random_small_state(m.grid, rng, 1e-3);
  const Rates r = random_rates(m.grid, rng, 1e-3);
  for (const EnergyConfig cfg : {EnergyConfig{}, EnergyConfig{3, 2, 10, true}}) {
    for (double l : {2.0, 0.5}) {
      const State sl = scaled(s, l);
      const Rates rl = scaled(r, l);
      CHECK(energy_high(m.grid, sl, &rl, cfg) == doctest::Approx(l * l * energy_high(m.grid, s, &r, cfg)).epsilon(1e-12));
      CHECK(dissipation_high(m.grid, sl, &rl, cfg) ==
            doctest::Approx(l * l * dissipation_high(m.grid, s, &r, cfg)).epsilon(1e-3));
      CHECK(surface_F(m.grid, sl, cfg) == doctest::Approx(l * l * surface_F(m.grid, s, cfg)).epsilon(1e-12));
      CHECK(energy_low(m.grid, sl, &rl, cfg) == doctest::Approx(l * l * energy_low(m.grid, s, &r, cfg)).epsilon(1e-12));
      CHECK(dissipation_low(m.grid, sl, &rl, cfg) == doctest::Approx(l * l * dissipation_low(m.grid, s, &r, cfg)).epsilon(1e-12));
    }
  }
}

TEST_CASE("single surface mode values follow the surface norm") {
  const Grid g = Grid::make(2, 2 * kPi, 16, 17, 1.0);
  const double A = 1e-3;
  State s = zero_state(g);
  for (Eigen::Index c = 0; c < 16; ++c) s.eta(c) = A * std::cos(g.coordinate(0, c));
  const EnergyConfig cfg;
  CHECK(energy_high(g, s, nullptr, cfg) == doctest::Approx(sobolev_norm_surface_sq(g, s.eta, 4)).epsilon(1e-13));
  CHECK(energy_high(g, s, nullptr, cfg) == doctest::Approx(A * A * kPi * 16.0).epsilon(1e-12));
  CHECK(surface_F(g, s, cfg) == doctest::Approx(A * A * kPi * std::pow(2.0, 4.5)).epsilon(1e-12));
  CHECK(surface_F(g, s, cfg) >= sobolev_norm_surface_sq(g, s.eta, 0));
}

TEST_CASE("dropping the time-derivative terms never increases a functional") {
  const Model m = small_model();
  std::mt19937_64 rng(4);
  const State s = random_small_state(m.grid, rng, 1e-3);
  const Rates r = random_rates(m.grid, rng, 1e-3);
  const EnergyConfig cfg;
  CHECK(energy_high(m.grid, s, nullptr, cfg) <= energy_high(m.grid, s, &r, cfg));
  CHECK(dissipation_high(m.grid, s, nullptr, cfg) <= dissipation_high(m.grid, s, &r, cfg));
  CHECK(energy_low(m.grid, s, nullptr, cfg) <= energy_low(m.grid, s, &r, cfg));
  CHECK(dissipation_low(m.grid, s, nullptr, cfg) <= dissipation_low(m.grid, s, &r, cfg));
}

TEST_CASE("low-order structure") {
  const Model m = small_model();
  const EnergyConfig cfg;
  State s = zero_state(m.grid);
  s.eta.setConstant(1e-3);
  CHECK(energy_low(m.grid, s, nullptr, cfg) <= 1e-30);
  s.q.setConstant(1e-3);
  CHECK(energy_low(m.grid, s, nullptr, cfg) <= 1e-24);
  CHECK(energy_high(m.grid, s, nullptr, cfg) > 0.0);

  std::mt19937_64 rng(6);
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    const State r = random_small_state(m.grid, rng, 1e-3);
    worst = std::max(worst, energy_low(m.grid, r, nullptr, cfg) / energy_high(m.grid, r, nullptr, cfg));
  }
  CHECK(worst <= 1.0);
}

TEST_CASE("dissipation with zero velocity keeps only q and eta groups") {
  const Model m = small_model();
  std::mt19937_64 rng(8);
  State s = random_small_state(m.grid, rng, 1e-3);
  for (auto& c : s.u) c.setZero();
  const EnergyConfig cfg;
  const double expected = sobolev_norm_volume_sq(m.grid, derivative(m.grid, s.q, 0), 3) +
                          sobolev_norm_volume_sq(m.grid, derivative(m.grid, s.q, 1), 3) +
                          sobolev_norm_surface_sq(m.grid, horizontal_derivative(m.grid, s.eta, 0), 2.5);
  CHECK(dissipation_high(m.grid, s, nullptr, cfg) == doctest::Approx(expected).epsilon(1e-13));
}

TEST_CASE("identity balance terms") {
  const Model m = small_model();
  std::mt19937_64 rng(10);
  State a = random_small_state(m.grid, rng, 1e-4);
  State b = a;
  b.t = 0.01;
  b.eta *= 0.99;
  const IdentityBalance bal = identity_balance(m, nullptr, a, &b);
  CHECK(bal.dissipation >= 0.0);
  CHECK(std::isfinite(bal.residual()));
  CHECK_THROWS_AS(identity_balance(m, nullptr, a, nullptr), DomainError);
}

TEST_CASE("decay fits of synthetic series") {
  std::vector<double> t, alg, ex, flat;
  for (int i = 0; i <= 40; ++i) {
    const double ti = 0.5 * i;
    t.push_back(ti);
    alg.push_back(3.0 / (1.0 + ti));
    ex.push_back(2.0 * std::exp(-ti));
    flat.push_back(5.0);
  }
  const DecayFit a = decay_fit(t, alg);
  CHECK(a.model == "algebraic");
  CHECK(a.rate == doctest::Approx(-1.0).epsilon(0.01));
  const DecayFit e = decay_fit(t, ex);
  CHECK(e.model == "exponential");
  CHECK(e.rate == doctest::Approx(-1.0).epsilon(0.01));
  CHECK(std::abs(decay_fit(t, flat).rate) <= 1e-12);
  CHECK_THROWS_AS(decay_fit({0, 1, 2}, {1, 1, 1}), DomainError);
}

TEST_CASE("time-weighted aggregate is non-decreasing") {
  std::vector<EnergyReport> reports;
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> U(0, 1);
  for (int i = 0; i < 50; ++i) {
    EnergyReport r;
    r.t = 0.1 * i;
    r.E_high = U(rng);
    r.D_high = U(rng);
    r.F_surf = U(rng);
    r.E_low = U(rng) * std::exp(-r.t);
    r.D_low = U(rng);
    reports.push_back(r);
  }
  const std::vector<double> g = time_weighted_aggregate(reports);
  REQUIRE(g.size() == reports.size());
  for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] >= g[i - 1]);
}

TEST_CASE("configuration bounds") {
  CHECK_NOTHROW(validate(EnergyConfig{}));
  CHECK_THROWS_AS(validate(EnergyConfig{2, 2, 10, false}), ConfigError);
  CHECK_THROWS_AS(validate(EnergyConfig{5, 1, 10, false}), ConfigError);
  CHECK_THROWS_AS(validate(EnergyConfig{2, 1, 0, false}), ConfigError);
}
