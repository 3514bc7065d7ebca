#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <utility>

namespace fsflow {

/// Gauss-Legendre nodes and weights on [0, 1].
template <typename Scalar>
std::pair<Eigen::Matrix<Scalar, Eigen::Dynamic, 1>, Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>
gauss_legendre_unit(int n) {
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  Vec nodes(n), weights(n);
  const Scalar pi = std::numbers::pi_v<Scalar>;
  for (int i = 0; i < n; ++i) {
    Scalar x = std::cos(pi * (Scalar(i) + Scalar(0.75)) / (Scalar(n) + Scalar(0.5)));
    Scalar dp = 0;
    for (int it = 0; it < 100; ++it) {
      Scalar p0 = 1, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const Scalar p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1);
      const Scalar dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < Scalar(1e-16)) break;
    }
    // Recompute derivative at the converged root.
    Scalar p0 = 1, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const Scalar p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1);
    nodes(i) = (Scalar(1) - x) / 2;
    weights(i) = Scalar(1) / ((1 - x * x) * dp * dp);
  }
  return {nodes, weights};
}

namespace detail {

template <typename Scalar, typename F>
std::pair<Scalar, Scalar> gk15(const F& f, Scalar a, Scalar b) {
  static constexpr double xk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                                   0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                                   0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                                   0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
  static constexpr double wk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                                   0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                                   0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                                   0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
  static constexpr double wg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                   0.381830050505118944950369775488975, 0.417959183673469387755102040816327};
  const Scalar c = (a + b) / 2, h = (b - a) / 2;
  const Scalar fc = f(c);
  Scalar kron = fc * Scalar(wk[7]);
  Scalar gauss = fc * Scalar(wg[3]);
  for (int j = 0; j < 7; ++j) {
    const Scalar dx = h * Scalar(xk[j]);
    const Scalar s = f(c - dx) + f(c + dx);
    kron += Scalar(wk[j]) * s;
    if (j % 2 == 1) gauss += Scalar(wg[j / 2]) * s;
  }
  return {kron * h, std::abs((kron - gauss) * h)};
}

template <typename Scalar, typename F>
Scalar adaptive_gk(const F& f, Scalar a, Scalar b, Scalar tol, int depth) {
  auto [value, err] = gk15<Scalar>(f, a, b);
  if (err <= tol || depth <= 0) return value;
  const Scalar m = (a + b) / 2;
  return adaptive_gk<Scalar>(f, a, m, tol / 2, depth - 1) + adaptive_gk<Scalar>(f, m, b, tol / 2, depth - 1);
}

}  // namespace detail

/// Adaptive Gauss-Kronrod (7/15) quadrature of f over [a, b].
template <typename Scalar, typename F>
Scalar integrate_adaptive(const F& f, Scalar a, Scalar b, Scalar abs_tol = Scalar(1e-14), int max_depth = 40) {
  if (a == b) return Scalar(0);
  if (b < a) return -integrate_adaptive<Scalar>(f, b, a, abs_tol, max_depth);
  return detail::adaptive_gk<Scalar>(f, a, b, abs_tol, max_depth);
}

}  // namespace fsflow
