#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace fsflow {

/// Volume field: rows are vertical nodes (row 0 is the surface y_d = 0, the
/// last row the bottom y_d = -b); columns are horizontal collocation points,
/// flattened as i_1 + n_h * i_2 in 3D.
using Field = Eigen::MatrixXd;
using SpectralField = Eigen::MatrixXcd;
/// Surface field on the horizontal collocation points.
using SurfaceField = Eigen::RowVectorXd;
using SpectralSurface = Eigen::RowVectorXcd;
/// Vector-valued fields hold one component per coordinate direction (d entries).
using VectorField = std::vector<Field>;
using SurfaceVector = std::vector<SurfaceField>;

/// Periodic horizontal Fourier x vertical Chebyshev-Gauss-Lobatto grid on
/// [0, L)^{d-1} x [-b, 0]. Immutable after construction.
class Grid {
 public:
  /// Throws ConfigError unless d in {2,3}, n_h >= 8 is a power of two,
  /// n_v >= 9, L > 0 and b > 0.
  static Grid make(int d, double L, int n_h, int n_v, double b);

  int dim() const { return d_; }
  int horizontal_dims() const { return d_ - 1; }
  double period() const { return L_; }
  int modes() const { return n_h_; }
  int vertical_size() const { return n_v_; }
  double depth() const { return b_; }
  Eigen::Index surface_size() const { return n_pts_; }

  const Eigen::VectorXd& vertical_nodes() const { return y_; }
  const Eigen::MatrixXd& vertical_diff() const { return D_; }
  const Eigen::MatrixXd& vertical_diff2() const { return D2_; }
  /// Clenshaw-Curtis weights on [-b, 0].
  const Eigen::VectorXd& vertical_weights() const { return w_; }
  /// Uniform horizontal cell area (L / n_h)^{d-1}.
  double horizontal_cell() const { return cell_; }

  /// Physical wavenumber 2 pi k / L of flattened mode `col` in direction `dir`.
  /// The Nyquist mode reports 0.
  double wavenumber(int dir, Eigen::Index col) const { return kappa_[dir](col); }
  const Eigen::ArrayXd& wavenumbers(int dir) const { return kappa_[dir]; }
  /// |kappa|^2 per flattened mode.
  const Eigen::ArrayXd& wavenumber_sq() const { return kappa_sq_; }
  /// Integer mode index of column `col` in direction `dir` (in [-n_h/2, n_h/2)).
  int mode_index(int dir, Eigen::Index col) const;
  /// 2/3-rule mask: true when every |k_i| <= n_h / 3.
  const std::vector<bool>& retained() const { return retained_; }
  /// Column indices of the retained modes, in ascending order.
  const std::vector<Eigen::Index>& retained_columns() const { return retained_cols_; }
  /// Horizontal coordinate of collocation point `col` in direction `dir`.
  double coordinate(int dir, Eigen::Index col) const;

  /// Horizontal transforms. Coefficients are normalized so that
  /// f(x) = sum_k c_k exp(i kappa . x).
  SpectralField forward(const Field& f) const;
  Field inverse(const SpectralField& c) const;
  SpectralSurface forward(const SurfaceField& f) const;
  SurfaceField inverse(const SpectralSurface& c) const;

 private:
  Grid() = default;
  void transform_rows(Eigen::MatrixXcd& data, bool inverse) const;

  int d_ = 2;
  double L_ = 0.0;
  int n_h_ = 0;
  int n_v_ = 0;
  double b_ = 0.0;
  Eigen::Index n_pts_ = 0;
  double cell_ = 0.0;
  Eigen::VectorXd y_, w_;
  Eigen::MatrixXd D_, D2_;
  std::vector<Eigen::ArrayXd> kappa_;
  Eigen::ArrayXd kappa_sq_;
  std::vector<bool> retained_;
  std::vector<Eigen::Index> retained_cols_;
};

// Differential operators -----------------------------------------------------

/// Exact spectral derivative (d/dx_dir)^order of the truncated series.
Field horizontal_derivative(const Grid& grid, const Field& f, int dir, int order = 1);
SurfaceField horizontal_derivative(const Grid& grid, const SurfaceField& f, int dir, int order = 1);
/// Chebyshev collocation derivative (d/dy_d)^order, order <= 4.
Field vertical_derivative(const Grid& grid, const Field& f, int order = 1);
/// Derivative along any of the d coordinate directions (dir = d-1 is vertical).
Field derivative(const Grid& grid, const Field& f, int dir);

/// 2/3-rule truncation of the horizontal spectrum.
Field dealias(const Grid& grid, const Field& f);
SurfaceField dealias(const Grid& grid, const SurfaceField& f);

/// Surface trace (row 0) and bottom trace.
inline SurfaceField surface_trace(const Field& f) { return f.row(0); }
inline SurfaceField bottom_trace(const Field& f) { return f.row(f.rows() - 1); }

/// Broadcast a vertical profile to every horizontal point.
Field broadcast_profile(const Grid& grid, const Eigen::VectorXd& profile);
Field constant_field(const Grid& grid, double value);

// Quadrature and norms -------------------------------------------------------

/// Physical-space quadrature: integral of f over Omega.
double integrate_volume(const Grid& grid, const Field& f);
/// Integral of f over one period cell of Sigma.
double integrate_surface(const Grid& grid, const SurfaceField& f);

/// ||f||_k^2 = sum_{|alpha| <= k} ||d^alpha f||^2_{L^2(Omega)}, evaluated by
/// horizontal Parseval and Clenshaw-Curtis quadrature in the vertical.
double sobolev_norm_volume_sq(const Grid& grid, const Field& f, int k);
double sobolev_norm_volume(const Grid& grid, const Field& f, int k);
/// |f|_s^2 = sum_xi (1 + |kappa|^2)^s |f_hat|^2 (times the cell measure).
double sobolev_norm_surface_sq(const Grid& grid, const SurfaceField& f, double s);
double sobolev_norm_surface(const Grid& grid, const SurfaceField& f, double s);
/// ||f||_{k,l} = sum over horizontal multi-indices |alpha| <= l of ||d^alpha f||_k.
double anisotropic_norm(const Grid& grid, const Field& f, int k, int l);

/// Homogeneous horizontal seminorms sum |kappa|^{2q} |f_hat|^2, used by the
/// interpolation scaling checks.
double horizontal_seminorm_sq(const Grid& grid, const SurfaceField& f, int q);
double horizontal_seminorm_sq(const Grid& grid, const Field& f, int q);

}  // namespace fsflow
