#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

namespace fsflow {

/// Chebyshev-Gauss-Lobatto nodes cos(pi j / n), j = 0..n, ordered from +1 to -1.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> chebyshev_lobatto_nodes(int n) {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> t(n + 1);
  const Scalar pi = std::numbers::pi_v<Scalar>;
  for (int j = 0; j <= n; ++j) t(j) = std::sin(pi * Scalar(n - 2 * j) / Scalar(2 * n));
  return t;
}

/// Collocation first-derivative matrix on the Lobatto nodes (standard form with
/// the negative-sum trick on the diagonal).
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> chebyshev_diff_matrix(int n) {
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const auto t = chebyshev_lobatto_nodes<Scalar>(n);
  Mat D = Mat::Zero(n + 1, n + 1);
  auto c = [n](int j) { return Scalar((j == 0 || j == n) ? 2 : 1) * ((j % 2) ? Scalar(-1) : Scalar(1)); };
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j)
      if (i != j) D(i, j) = c(i) / c(j) / (t(i) - t(j));
  for (int i = 0; i <= n; ++i) D(i, i) = -D.row(i).sum();
  return D;
}

/// Clenshaw-Curtis weights on [-1, 1] for the Lobatto nodes.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> clenshaw_curtis_weights(int n) {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> w = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(n + 1);
  const Scalar pi = std::numbers::pi_v<Scalar>;
  for (int j = 0; j <= n; ++j) {
    const Scalar theta = pi * Scalar(j) / Scalar(n);
    Scalar s = 0;
    const int kmax = n / 2;
    for (int k = 1; k <= kmax; ++k) {
      const Scalar bk = (2 * k == n) ? Scalar(1) : Scalar(2);
      s += bk / Scalar(4 * k * k - 1) * std::cos(2 * k * theta);
    }
    const Scalar cj = (j == 0 || j == n) ? Scalar(1) : Scalar(2);
    w(j) = cj / Scalar(n) * (Scalar(1) - s);
  }
  return w;
}

}  // namespace fsflow
