#include "fsflow/model.hpp"

#include "fsflow/errors.hpp"

namespace fsflow {

void validate_viscosities(int d, double mu, double mu_prime) {
  std::vector<std::string> v;
  if (!(mu > 0)) v.push_back("viscosity.mu: shear viscosity must be positive (mu > 0)");
  if (d == 2 && !(mu_prime > 0)) v.push_back("viscosity.mu_prime: must be positive in 2D (mu' > 0 if d = 2)");
  if (d == 3 && !(mu_prime >= 0)) v.push_back("viscosity.mu_prime: must be nonnegative in 3D (mu' >= 0 if d = 3)");
  if (!v.empty()) throw ConfigError(v);
}

Model make_model(const Grid& grid, const PressureLaw& law, double mu, double mu_prime) {
  validate_viscosities(grid.dim(), mu, mu_prime);
  law.validate();
  Model m{grid, law, mu, mu_prime, solve_equilibrium(law, grid.depth(), grid.vertical_nodes())};
  return m;
}

State zero_state(const Grid& grid) {
  State s;
  s.q = constant_field(grid, 0.0);
  s.u.assign(grid.dim(), constant_field(grid, 0.0));
  s.eta = SurfaceField::Zero(grid.surface_size());
  return s;
}

Rates zero_rates(const Grid& grid) {
  Rates r;
  r.dq_dt = constant_field(grid, 0.0);
  r.du_dt.assign(grid.dim(), constant_field(grid, 0.0));
  r.deta_dt = SurfaceField::Zero(grid.surface_size());
  return r;
}

}  // namespace fsflow
