#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fsflow/errors.hpp"
#include "fsflow/grid.hpp"

using namespace fsflow;

namespace {

constexpr double kPi = std::numbers::pi;

template <class F>
Field tabulate(const Grid& g, F f) {
  Field out(g.vertical_size(), g.surface_size());
  for (Eigen::Index c = 0; c < g.surface_size(); ++c)
    for (Eigen::Index r = 0; r < g.vertical_size(); ++r) out(r, c) = f(g.coordinate(0, c), g.vertical_nodes()(r));
  return out;
}

Field random_bandlimited(const Grid& g, std::mt19937_64& rng) {
  std::normal_distribution<double> N(0, 1);
  Field f = Field::Zero(g.vertical_size(), g.surface_size());
  for (int k = 0; k <= 4; ++k) {
    const double a = N(rng), b = N(rng), c0 = N(rng), c1 = N(rng), c2 = N(rng);
    f += tabulate(g, [&](double x, double y) { return (a * std::cos(k * x) + b * std::sin(k * x)) * (c0 + c1 * y + c2 * y * y); });
  }
  return f;
}

}  // namespace

TEST_CASE("grid construction") {
  const Grid g = Grid::make(2, 2 * kPi, 16, 17, 1.0);
  CHECK(g.vertical_nodes()(0) == 0.0);
  CHECK(g.vertical_nodes()(16) == doctest::Approx(-1.0).epsilon(1e-15));
  const Grid g3 = Grid::make(3, 2 * kPi, 8, 9, 0.5);
  CHECK(g3.vertical_nodes()(8) == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(g3.surface_size() == 64);
  CHECK_THROWS_AS(Grid::make(2, 2 * kPi, 6, 17, 1.0), ConfigError);
  CHECK_THROWS_AS(Grid::make(2, 2 * kPi, 12, 17, 1.0), ConfigError);
  CHECK_THROWS_AS(Grid::make(2, 2 * kPi, 16, 8, 1.0), ConfigError);
  CHECK_THROWS_AS(Grid::make(4, 2 * kPi, 16, 17, 1.0), ConfigError);
  CHECK_THROWS_AS(Grid::make(2, -1.0, 16, 17, 1.0), ConfigError);
}

TEST_CASE("transforms round trip and the retained set follows the 2/3 rule") {
  const Grid g = Grid::make(2, 2 * kPi, 32, 9, 1.0);
  std::mt19937_64 rng(1);
  const Field f = random_bandlimited(g, rng);
  CHECK((g.inverse(g.forward(f)) - f).cwiseAbs().maxCoeff() <= 1e-13);
  for (Eigen::Index c = 0; c < g.surface_size(); ++c)
    CHECK(g.retained()[c] == (std::abs(g.mode_index(0, c)) <= 32 / 3));
  const SpectralField c = g.forward(tabulate(g, [](double x, double) { return std::cos(3 * x); }));
  CHECK(std::abs(c(0, 3) - 0.5) <= 1e-15);
}

TEST_CASE("horizontal derivatives") {
  const double L = 4.0;
  const Grid g = Grid::make(2, L, 16, 9, 1.0);
  const double w = 2 * kPi / L;
  const Field f = tabulate(g, [&](double x, double) { return std::cos(w * x); });
  const Field df = tabulate(g, [&](double x, double) { return -w * std::sin(w * x); });
  CHECK((horizontal_derivative(g, f, 0) - df).cwiseAbs().maxCoeff() <= 1e-13);
  CHECK(horizontal_derivative(g, Field(Field::Constant(9, 16, 3.0)), 0).cwiseAbs().maxCoeff() <= 1e-14);
  std::mt19937_64 rng(2);
  const Field r = random_bandlimited(Grid::make(2, 2 * kPi, 16, 9, 1.0), rng);
  const Grid g2 = Grid::make(2, 2 * kPi, 16, 9, 1.0);
  const Field twice = horizontal_derivative(g2, horizontal_derivative(g2, r, 0), 0);
  CHECK((horizontal_derivative(g2, r, 0, 2) - twice).cwiseAbs().maxCoeff() <= 1e-12 * r.norm());
}

TEST_CASE("vertical derivatives") {
  const Grid g = Grid::make(2, 2 * kPi, 8, 17, 1.0);
  const Field y2 = tabulate(g, [](double, double y) { return y * y; });
  const Field dy2 = tabulate(g, [](double, double y) { return 2 * y; });
  CHECK((vertical_derivative(g, y2) - dy2).cwiseAbs().maxCoeff() <= 1e-10);
  const Grid g33 = Grid::make(2, 2 * kPi, 8, 33, 1.0);
  const Field e = tabulate(g33, [](double, double y) { return std::exp(y); });
  CHECK((vertical_derivative(g33, e) - e).cwiseAbs().maxCoeff() <= 1e-9);
  CHECK(vertical_derivative(g33, Field(Field::Constant(33, 8, 2.0))).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("spectral accuracy of first derivatives") {
  auto error = [](int n) {
    const Grid g = Grid::make(2, 2 * kPi, n, n + 1, 1.0);
    const Field f = tabulate(g, [](double x, double y) { return std::exp(std::sin(x)) * std::cos(y); });
    const Field fx = tabulate(g, [](double x, double y) { return std::cos(x) * std::exp(std::sin(x)) * std::cos(y); });
    const Field fy = tabulate(g, [](double x, double y) { return -std::exp(std::sin(x)) * std::sin(y); });
    return std::max((derivative(g, f, 0) - fx).cwiseAbs().maxCoeff(), (derivative(g, f, 1) - fy).cwiseAbs().maxCoeff());
  };
  const double e8 = error(8), e16 = error(16);
  CHECK(e16 <= 0.1 * e8);
  CHECK(error(32) <= 1e-11);
}

TEST_CASE("volume and surface norms") {
  const Grid g = Grid::make(2, 2 * kPi, 16, 17, 1.0);
  CHECK(sobolev_norm_volume(g, Field(Field::Zero(17, 16)), 2) == 0.0);
  CHECK(sobolev_norm_volume_sq(g, constant_field(g, 1.0), 0) == doctest::Approx(2 * kPi).epsilon(1e-13));

  std::mt19937_64 rng(3);
  for (int i = 0; i < 50; ++i) {
    const Field f = random_bandlimited(g, rng);
    CHECK(sobolev_norm_volume(g, f, 0) <= sobolev_norm_volume(g, f, 1));
    CHECK(sobolev_norm_volume(g, f, 1) <= sobolev_norm_volume(g, f, 2));
    if (i < 5) {
      const double quad = integrate_volume(g, f.cwiseAbs2());
      CHECK(sobolev_norm_volume_sq(g, f, 0) == doctest::Approx(quad).epsilon(1e-10));
    }
  }

  const Field cosx = tabulate(g, [](double x, double) { return std::cos(x); });
  const SurfaceField s = surface_trace(cosx);
  CHECK(sobolev_norm_surface_sq(g, SurfaceField(SurfaceField::Zero(16)), 1.0) == 0.0);
  CHECK(sobolev_norm_surface_sq(g, s, 0.0) == doctest::Approx(kPi).epsilon(1e-13));
  CHECK(sobolev_norm_surface_sq(g, s, 0.5) / sobolev_norm_surface_sq(g, s, 0.0) == doctest::Approx(std::sqrt(2.0)));
  CHECK(integrate_surface(g, s.cwiseAbs2()) == doctest::Approx(kPi).epsilon(1e-13));
}

TEST_CASE("sobolev volume norm equals a brute-force derivative sum") {
  const Grid g = Grid::make(2, 2 * kPi, 16, 17, 1.0);
  const Field f = tabulate(g, [](double x, double y) { return std::cos(2 * x) * std::exp(y); });
  // ||f||_2^2 = sum over (a, c) with a + c <= 2 of ||d_x^a d_y^c f||_0^2.
  double brute = 0.0;
  for (int a = 0; a <= 2; ++a)
    for (int c = 0; a + c <= 2; ++c)
      brute += integrate_volume(g, vertical_derivative(g, horizontal_derivative(g, f, 0, a), c).cwiseAbs2());
  CHECK(sobolev_norm_volume_sq(g, f, 2) == doctest::Approx(brute).epsilon(1e-10));
}

TEST_CASE("anisotropic norm") {
  const Grid g = Grid::make(2, 2 * kPi, 16, 17, 1.0);
  const Field f = tabulate(g, [](double x, double y) { return std::cos(x) * y; });
  CHECK(anisotropic_norm(g, f, 2, 0) == doctest::Approx(sobolev_norm_volume(g, f, 2)));
  CHECK(anisotropic_norm(g, Field(Field::Zero(17, 16)), 1, 2) == 0.0);
  // Horizontal multi-indices alpha = 0, 1, 2 in 2D.
  double brute = 0.0;
  for (int a = 0; a <= 2; ++a) brute += sobolev_norm_volume(g, horizontal_derivative(g, f, 0, a), 1);
  CHECK(anisotropic_norm(g, f, 1, 2) == doctest::Approx(brute).epsilon(1e-13));
}

TEST_CASE("dealiasing removes modes beyond n_h/3") {
  const Grid g = Grid::make(2, 2 * kPi, 16, 9, 1.0);
  const Field f = tabulate(g, [](double x, double) { return std::cos(x) + std::cos(7 * x); });
  const Field kept = tabulate(g, [](double x, double) { return std::cos(x); });
  CHECK((dealias(g, f) - kept).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("interpolation homogeneity under relabelling") {
  const Grid g = Grid::make(2, 2 * kPi, 64, 9, 1.0);
  std::mt19937_64 rng(11);
  std::normal_distribution<double> N(0, 1);
  SurfaceField f = SurfaceField::Zero(64), f2 = SurfaceField::Zero(64);
  for (int k = 1; k <= 7; ++k) {
    const double a = N(rng), b = N(rng);
    for (int c = 0; c < 64; ++c) {
      const double x = g.coordinate(0, c);
      f(c) += a * std::cos(k * x) + b * std::sin(k * x);
      f2(c) += a * std::cos(2 * k * x) + b * std::sin(2 * k * x);
    }
  }
  const int q = 1, s = 2;
  const double theta = double(s) / (q + s);
  auto ratio = [&](const SurfaceField& h) {
    return horizontal_seminorm_sq(g, h, q) /
           (std::pow(horizontal_seminorm_sq(g, h, 0), theta) * std::pow(horizontal_seminorm_sq(g, h, q + s), 1 - theta));
  };
  CHECK(ratio(f2) == doctest::Approx(ratio(f)).epsilon(1e-12));
  CHECK(horizontal_seminorm_sq(g, f2, q) == doctest::Approx(4.0 * horizontal_seminorm_sq(g, f, q)).epsilon(1e-12));
}
