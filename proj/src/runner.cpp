#include "fsflow/runner.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "fsflow/errors.hpp"

namespace fsflow {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw ConfigError("cannot write " + path.string());
  os << text;
}

nlohmann::ordered_json report_json(const EnergyReport& r) {
  return {{"t", r.t},
          {"E_high", r.E_high},
          {"D_high", r.D_high},
          {"F_surf", r.F_surf},
          {"E_low", r.E_low},
          {"D_low", r.D_low},
          {"identity_residual", r.identity_residual},
          {"min_J", r.min_J},
          {"min_rho", r.min_rho}};
}

}  // namespace

std::string format_csv(const std::vector<EnergyReport>& reports) {
  std::string out = "t,E_high,D_high,F_surf,E_low,D_low,identity_residual,minJ,min_rho\n";
  for (const auto& r : reports) {
    out += fmt(r.t) + ',' + fmt(r.E_high) + ',' + fmt(r.D_high) + ',' + fmt(r.F_surf) + ',' + fmt(r.E_low) + ',' +
           fmt(r.D_low) + ',' + fmt(r.identity_residual) + ',' + fmt(r.min_J) + ',' + fmt(r.min_rho) + '\n';
  }
  return out;
}

std::vector<EnergyReport> read_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError(path + ": cannot open trajectory file");
  std::string line;
  std::getline(is, line);
  if (line.rfind("t,E_high,D_high,F_surf,E_low,D_low", 0) != 0) throw ConfigError(path + ": unexpected CSV header");
  std::vector<EnergyReport> out;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<double> v;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) v.push_back(std::strtod(cell.c_str(), nullptr));
    if (v.size() != 9) throw ConfigError(path + ": malformed row '" + line + "'");
    EnergyReport r;
    r.t = v[0];
    r.E_high = v[1];
    r.D_high = v[2];
    r.F_surf = v[3];
    r.E_low = v[4];
    r.D_low = v[5];
    r.identity_residual = v[6];
    r.min_J = v[7];
    r.min_rho = v[8];
    out.push_back(r);
  }
  return out;
}

nlohmann::ordered_json fit_json(const std::vector<EnergyReport>& reports, double EnergyReport::*field) {
  std::vector<double> t, v;
  for (std::size_t i = 1; i < reports.size(); ++i) {
    t.push_back(reports[i].t);
    v.push_back(reports[i].*field);
  }
  try {
    const DecayFit f = decay_fit(t, v);
    return {{"model", f.model},
            {"rate", f.rate},
            {"goodness", f.goodness},
            {"algebraic_rate", f.algebraic_rate},
            {"exponential_rate", f.exponential_rate}};
  } catch (const DomainError&) {
    return nullptr;
  }
}

nlohmann::ordered_json make_summary(const RunConfig& cfg, const RunResult& res) {
  nlohmann::ordered_json s;
  s["name"] = cfg.name;
  s["termination"] = res.termination;
  s["exit_code"] = res.exit_code;
  s["diagnostic"] = res.diagnostic;
  s["steps"] = res.steps;
  s["t_final"] = res.final_state.t;
  s["samples"] = res.reports.size();

  double max_res = 0.0, max_diss = 0.0, min_J = 1.0, min_rho = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < res.reports.size(); ++i) {
    const auto& r = res.reports[i];
    if (i > 0) max_res = std::max(max_res, r.identity_residual);
    max_diss = std::max(max_diss, r.dissipation_l2);
    min_J = std::min(min_J, r.min_J);
    min_rho = std::min(min_rho, r.min_rho);
  }
  s["identity"] = {{"max_residual", max_res},
                   {"max_dissipation", max_diss},
                   {"relative", max_diss > 0 ? max_res / max_diss : 0.0}};
  s["min_J"] = min_J;
  s["min_rho"] = res.reports.empty() ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(min_rho);
  s["initial"] = res.reports.empty() ? nlohmann::ordered_json(nullptr) : report_json(res.reports.front());
  s["final"] = res.reports.empty() ? nlohmann::ordered_json(nullptr) : report_json(res.reports.back());
  s["decay_fits"] = {{"E_low", fit_json(res.reports, &EnergyReport::E_low)},
                     {"E_high", fit_json(res.reports, &EnergyReport::E_high)}};

  const auto G = time_weighted_aggregate(res.reports);
  double f_ratio = 0.0;
  if (!res.reports.empty()) {
    const double bound = 2.0 * res.reports.front().F_surf + res.reports.front().E_high;
    for (const auto& r : res.reports) {
      const double scaled = r.F_surf / (1.0 + r.t);
      f_ratio = std::max(f_ratio, bound > 0 ? scaled / bound : (scaled > 0 ? std::numeric_limits<double>::infinity() : 0.0));
    }
  }
  s["aggregate"] = {{"final", G.empty() ? 0.0 : G.back()}, {"F_over_bound_max", f_ratio}};
  s["config"] = to_json(cfg);
  return s;
}

RunResult run_scenario(const RunConfig& cfg, const std::optional<CheckpointData>& resume) {
  const Model model = make_model(cfg);
  const Grid& grid = model.grid;
  State initial = resume ? resume->state : initialize_state(grid, cfg.family, cfg.amplitude);

  Stepper stepper(model, cfg.stepper);
  if (resume) stepper.set_history(resume->history);
  EnergyMonitor monitor(model, cfg.energy);

  RunResult res;
  res.final_state = initial;
  try {
    const Trajectory traj = run(stepper, initial, cfg.t_end, cfg.energy.cadence, std::ref(monitor));
    res.steps = traj.steps;
    res.final_state = traj.final_state;
    res.termination = traj.termination;
    res.diagnostic = traj.diagnostic;
    if (traj.termination != "completed") res.exit_code = kExitBlowup;
  } catch (const StepRejectedError& e) {
    res.termination = "step_rejected";
    std::ostringstream os;
    os << e.what() << " (suggested dt <= " << fmt(e.suggested_dt()) << ")";
    res.diagnostic = os.str();
    res.exit_code = kExitSolver;
  } catch (const SolverError& e) {
    res.termination = "solver_failure";
    res.diagnostic = e.what();
    res.exit_code = kExitSolver;
  }
  res.reports = monitor.reports();
  res.summary = make_summary(cfg, res);

  const std::filesystem::path dir(cfg.output_dir);
  std::filesystem::create_directories(dir);
  write_file(dir / "trajectory.csv", format_csv(res.reports));
  write_file(dir / "summary.json", res.summary.dump(2) + "\n");
  write_checkpoint((dir / "final.ckpt").string(), grid, to_json(cfg), res.final_state, stepper.history());
  return res;
}

EquilibriumCheck check_equilibrium(const Model& model) {
  const auto& eq = model.eq;
  const Eigen::VectorXd& y = model.grid.vertical_nodes();
  Eigen::VectorXd p(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) p(i) = model.law.pressure(eq.rho_bar(i));
  const Eigen::VectorXd res = model.grid.vertical_diff() * p + model.g() * eq.rho_bar;

  EquilibriumCheck out;
  out.hydrostatic_residual = res.cwiseAbs().maxCoeff();
  const auto& law = model.law;
  if (law.kind == PressureLaw::Kind::isothermal && law.K == 1.0 && law.g == 1.0 && law.p_atm == 1.0)
    out.isothermal_error = (eq.rho_bar.array() - (-y.array()).exp()).abs().maxCoeff();
  else
    out.isothermal_error = std::numeric_limits<double>::quiet_NaN();
  out.depth_bound = admissible_depth_bound(law);
  return out;
}

}  // namespace fsflow
