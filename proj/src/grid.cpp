#include "fsflow/grid.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <numbers>
#include <sstream>

#include "fsflow/chebyshev.hpp"
#include "fsflow/errors.hpp"

namespace fsflow {

namespace {

using cplx = std::complex<double>;

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

// Sum over horizontal multi-indices |beta| <= r of prod kappa_i^{2 beta_i}.
Eigen::ArrayXd multiindex_multiplier(const Grid& grid, int r) {
  const Eigen::Index n = grid.surface_size();
  Eigen::ArrayXd out = Eigen::ArrayXd::Zero(n);
  if (r < 0) return out;
  if (grid.horizontal_dims() == 1) {
    const Eigen::ArrayXd k2 = grid.wavenumbers(0).square();
    Eigen::ArrayXd term = Eigen::ArrayXd::Ones(n);
    for (int b = 0; b <= r; ++b) {
      out += term;
      term *= k2;
    }
    return out;
  }
  const Eigen::ArrayXd k1 = grid.wavenumbers(0).square();
  const Eigen::ArrayXd k2 = grid.wavenumbers(1).square();
  Eigen::ArrayXd t1 = Eigen::ArrayXd::Ones(n);
  for (int b1 = 0; b1 <= r; ++b1) {
    Eigen::ArrayXd t2 = t1;
    for (int b2 = 0; b1 + b2 <= r; ++b2) {
      out += t2;
      t2 *= k2;
    }
    t1 *= k1;
  }
  return out;
}

Eigen::MatrixXcd apply_real(const Eigen::MatrixXd& M, const Eigen::MatrixXcd& c) {
  Eigen::MatrixXcd out(M.rows(), c.cols());
  out.real() = M * c.real();
  out.imag() = M * c.imag();
  return out;
}

}  // namespace

Grid Grid::make(int d, double L, int n_h, int n_v, double b) {
  std::vector<std::string> v;
  if (d != 2 && d != 3) v.push_back("grid.d: dimension must be 2 or 3");
  if (!(L > 0)) v.push_back("grid.L: horizontal period must be positive");
  if (n_h < 8 || !is_power_of_two(n_h)) v.push_back("grid.n_h: must be a power of two >= 8");
  if (n_v < 9) v.push_back("grid.n_v: must be >= 9");
  if (!(b > 0)) v.push_back("grid.b: depth must be positive");
  if (!v.empty()) throw ConfigError(v);

  Grid g;
  g.d_ = d;
  g.L_ = L;
  g.n_h_ = n_h;
  g.n_v_ = n_v;
  g.b_ = b;
  g.n_pts_ = (d == 2) ? n_h : Eigen::Index(n_h) * n_h;
  g.cell_ = std::pow(L / n_h, d - 1);

  const int N = n_v - 1;
  const Eigen::VectorXd t = chebyshev_lobatto_nodes<double>(N);
  g.y_ = 0.5 * b * (t.array() - 1.0).matrix();
  g.y_(0) = 0.0;
  g.y_(N) = -b;
  g.D_ = (2.0 / b) * chebyshev_diff_matrix<double>(N);
  g.D2_ = g.D_ * g.D_;
  g.w_ = 0.5 * b * clenshaw_curtis_weights<double>(N);

  g.kappa_.assign(d - 1, Eigen::ArrayXd::Zero(g.n_pts_));
  g.retained_.assign(g.n_pts_, true);
  const double base = 2.0 * std::numbers::pi / L;
  for (Eigen::Index col = 0; col < g.n_pts_; ++col) {
    bool keep = true;
    for (int dir = 0; dir < d - 1; ++dir) {
      const int k = g.mode_index(dir, col);
      g.kappa_[dir](col) = (2 * k == -n_h) ? 0.0 : base * k;
      if (std::abs(k) > n_h / 3) keep = false;
    }
    g.retained_[col] = keep;
    if (keep) g.retained_cols_.push_back(col);
  }
  g.kappa_sq_ = Eigen::ArrayXd::Zero(g.n_pts_);
  for (int dir = 0; dir < d - 1; ++dir) g.kappa_sq_ += g.kappa_[dir].square();
  return g;
}

int Grid::mode_index(int dir, Eigen::Index col) const {
  const Eigen::Index i = (dir == 0) ? col % n_h_ : col / n_h_;
  return (i < n_h_ / 2) ? int(i) : int(i) - n_h_;
}

double Grid::coordinate(int dir, Eigen::Index col) const {
  const Eigen::Index i = (dir == 0) ? col % n_h_ : col / n_h_;
  return L_ * double(i) / n_h_;
}

void Grid::transform_rows(Eigen::MatrixXcd& data, bool inverse) const {
  Eigen::FFT<double> fft;
  std::vector<cplx> in(n_pts_), out(n_pts_), tmp_in(n_h_), tmp_out(n_h_);
  for (Eigen::Index r = 0; r < data.rows(); ++r) {
    for (Eigen::Index c = 0; c < n_pts_; ++c) in[c] = data(r, c);
    if (d_ == 2) {
      if (inverse)
        fft.inv(out.data(), in.data(), n_h_);
      else
        fft.fwd(out.data(), in.data(), n_h_);
    } else {
      // along direction 0 (contiguous blocks)
      for (int i2 = 0; i2 < n_h_; ++i2) {
        if (inverse)
          fft.inv(out.data() + i2 * n_h_, in.data() + i2 * n_h_, n_h_);
        else
          fft.fwd(out.data() + i2 * n_h_, in.data() + i2 * n_h_, n_h_);
      }
      // along direction 1 (stride n_h)
      for (int i1 = 0; i1 < n_h_; ++i1) {
        for (int i2 = 0; i2 < n_h_; ++i2) tmp_in[i2] = out[i1 + i2 * n_h_];
        if (inverse)
          fft.inv(tmp_out.data(), tmp_in.data(), n_h_);
        else
          fft.fwd(tmp_out.data(), tmp_in.data(), n_h_);
        for (int i2 = 0; i2 < n_h_; ++i2) out[i1 + i2 * n_h_] = tmp_out[i2];
      }
    }
    for (Eigen::Index c = 0; c < n_pts_; ++c) data(r, c) = out[c];
  }
}

SpectralField Grid::forward(const Field& f) const {
  Eigen::MatrixXcd data = f.cast<cplx>();
  transform_rows(data, false);
  return data / double(n_pts_);
}

Field Grid::inverse(const SpectralField& c) const {
  Eigen::MatrixXcd data = c * double(n_pts_);
  transform_rows(data, true);
  return data.real();
}

SpectralSurface Grid::forward(const SurfaceField& f) const {
  Eigen::MatrixXcd data = f.cast<cplx>();
  transform_rows(data, false);
  return data.row(0) / double(n_pts_);
}

SurfaceField Grid::inverse(const SpectralSurface& c) const {
  Eigen::MatrixXcd data = c * double(n_pts_);
  transform_rows(data, true);
  return data.row(0).real();
}

namespace {

template <typename Spec>
void multiply_derivative(const Grid& grid, Spec& c, int dir, int order) {
  const auto& k = grid.wavenumbers(dir);
  for (Eigen::Index col = 0; col < c.cols(); ++col) c.col(col) *= std::pow(cplx(0.0, k(col)), order);
}

}  // namespace

Field horizontal_derivative(const Grid& grid, const Field& f, int dir, int order) {
  if (order == 0) return f;
  SpectralField c = grid.forward(f);
  multiply_derivative(grid, c, dir, order);
  return grid.inverse(c);
}

SurfaceField horizontal_derivative(const Grid& grid, const SurfaceField& f, int dir, int order) {
  if (order == 0) return f;
  SpectralSurface c = grid.forward(f);
  multiply_derivative(grid, c, dir, order);
  return grid.inverse(c);
}

Field vertical_derivative(const Grid& grid, const Field& f, int order) {
  Field out = f;
  for (int i = 0; i < order; ++i) out = grid.vertical_diff() * out;
  return out;
}

Field derivative(const Grid& grid, const Field& f, int dir) {
  return (dir == grid.dim() - 1) ? vertical_derivative(grid, f, 1) : horizontal_derivative(grid, f, dir, 1);
}

Field dealias(const Grid& grid, const Field& f) {
  SpectralField c = grid.forward(f);
  for (Eigen::Index col = 0; col < c.cols(); ++col)
    if (!grid.retained()[col]) c.col(col).setZero();
  return grid.inverse(c);
}

SurfaceField dealias(const Grid& grid, const SurfaceField& f) {
  SpectralSurface c = grid.forward(f);
  for (Eigen::Index col = 0; col < c.cols(); ++col)
    if (!grid.retained()[col]) c(col) = 0.0;
  return grid.inverse(c);
}

Field broadcast_profile(const Grid& grid, const Eigen::VectorXd& profile) {
  return profile.replicate(1, grid.surface_size());
}

Field constant_field(const Grid& grid, double value) {
  return Field::Constant(grid.vertical_size(), grid.surface_size(), value);
}

double integrate_volume(const Grid& grid, const Field& f) {
  return grid.horizontal_cell() * grid.vertical_weights().dot(f.rowwise().sum());
}

double integrate_surface(const Grid& grid, const SurfaceField& f) { return grid.horizontal_cell() * f.sum(); }

double sobolev_norm_volume_sq(const Grid& grid, const Field& f, int k) {
  if (k < 0) throw DomainError("sobolev_norm_volume: order must be nonnegative");
  const double measure = std::pow(grid.period(), grid.horizontal_dims());
  Eigen::MatrixXcd c = grid.forward(f);
  double total = 0.0;
  for (int m = 0; m <= k; ++m) {
    if (m > 0) c = apply_real(grid.vertical_diff(), c);
    const Eigen::ArrayXd mult = multiindex_multiplier(grid, k - m);
    const Eigen::VectorXd col_energy = c.cwiseAbs2().transpose() * grid.vertical_weights();
    total += (col_energy.array() * mult).sum();
  }
  return measure * total;
}

double sobolev_norm_volume(const Grid& grid, const Field& f, int k) {
  return std::sqrt(sobolev_norm_volume_sq(grid, f, k));
}

double sobolev_norm_surface_sq(const Grid& grid, const SurfaceField& f, double s) {
  const double measure = std::pow(grid.period(), grid.horizontal_dims());
  const SpectralSurface c = grid.forward(f);
  const Eigen::ArrayXd mult = (1.0 + grid.wavenumber_sq()).pow(s);
  return measure * (c.cwiseAbs2().transpose().array() * mult).sum();
}

double sobolev_norm_surface(const Grid& grid, const SurfaceField& f, double s) {
  return std::sqrt(sobolev_norm_surface_sq(grid, f, s));
}

double anisotropic_norm(const Grid& grid, const Field& f, int k, int l) {
  double total = 0.0;
  if (grid.horizontal_dims() == 1) {
    Field g = f;
    for (int a = 0; a <= l; ++a) {
      total += sobolev_norm_volume(grid, g, k);
      g = horizontal_derivative(grid, g, 0, 1);
    }
    return total;
  }
  for (int a1 = 0; a1 <= l; ++a1) {
    const Field g1 = horizontal_derivative(grid, f, 0, a1);
    for (int a2 = 0; a1 + a2 <= l; ++a2) total += sobolev_norm_volume(grid, horizontal_derivative(grid, g1, 1, a2), k);
  }
  return total;
}

double horizontal_seminorm_sq(const Grid& grid, const SurfaceField& f, int q) {
  const double measure = std::pow(grid.period(), grid.horizontal_dims());
  const SpectralSurface c = grid.forward(f);
  return measure * (c.cwiseAbs2().transpose().array() * grid.wavenumber_sq().pow(q)).sum();
}

double horizontal_seminorm_sq(const Grid& grid, const Field& f, int q) {
  const double measure = std::pow(grid.period(), grid.horizontal_dims());
  const SpectralField c = grid.forward(f);
  const Eigen::VectorXd col_energy = c.cwiseAbs2().transpose() * grid.vertical_weights();
  return measure * (col_energy.array() * grid.wavenumber_sq().pow(q)).sum();
}

}  // namespace fsflow
