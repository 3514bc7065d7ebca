#include "fsflow/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "fsflow/errors.hpp"

namespace fsflow {

namespace {

using nlohmann::json;

class Reader {
 public:
  std::vector<std::string> errors;

  /// Returns the object at `key` of `parent` (or null when absent) after
  /// checking its type and rejecting keys outside `allowed`.
  const json* section(const json& parent, const std::string& key, const std::string& path,
                      const std::set<std::string>& allowed) {
    auto it = parent.find(key);
    if (it == parent.end()) return nullptr;
    if (!it->is_object()) {
      errors.push_back(path + ": expected an object");
      return nullptr;
    }
    reject_unknown(*it, path, allowed);
    return &*it;
  }

  void reject_unknown(const json& obj, const std::string& path, const std::set<std::string>& allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
      if (!allowed.count(it.key())) errors.push_back(join(path, it.key()) + ": unknown key");
  }

  void number(const json* obj, const char* key, const std::string& path, double& out) {
    const json* v = find(obj, key);
    if (!v) return;
    if (v->is_number()) out = v->get<double>();
    else errors.push_back(join(path, key) + ": expected a number");
  }

  void integer(const json* obj, const char* key, const std::string& path, int& out) {
    const json* v = find(obj, key);
    if (!v) return;
    if (v->is_number_integer()) out = v->get<int>();
    else errors.push_back(join(path, key) + ": expected an integer");
  }

  void unsigned_integer(const json* obj, const char* key, const std::string& path, std::uint64_t& out) {
    const json* v = find(obj, key);
    if (!v) return;
    if (v->is_number_unsigned()) out = v->get<std::uint64_t>();
    else if (v->is_number_integer() && v->get<std::int64_t>() >= 0) out = std::uint64_t(v->get<std::int64_t>());
    else errors.push_back(join(path, key) + ": expected a nonnegative integer");
  }

  void boolean(const json* obj, const char* key, const std::string& path, bool& out) {
    const json* v = find(obj, key);
    if (!v) return;
    if (v->is_boolean()) out = v->get<bool>();
    else errors.push_back(join(path, key) + ": expected true or false");
  }

  void string(const json* obj, const char* key, const std::string& path, std::string& out) {
    const json* v = find(obj, key);
    if (!v) return;
    if (v->is_string()) out = v->get<std::string>();
    else errors.push_back(join(path, key) + ": expected a string");
  }

  static std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

 private:
  static const json* find(const json* obj, const char* key) {
    if (!obj) return nullptr;
    auto it = obj->find(key);
    return it == obj->end() ? nullptr : &*it;
  }
};

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

PressureLaw make_law(const LawConfig& law) {
  if (law.kind == "isothermal") return PressureLaw::isothermal(law.K, law.p_atm, law.g);
  if (law.kind == "gamma_law") return PressureLaw::gamma_law(law.K, law.gamma, law.p_atm, law.g);
  if (law.kind == "saturating") return PressureLaw::saturating(law.K, law.rho_scale, law.p_atm, law.g);
  throw ConfigError("law.kind: unknown pressure law '" + law.kind + "'");
}

Grid make_grid(const RunConfig& cfg) { return Grid::make(cfg.d, cfg.L, cfg.n_h, cfg.n_v, cfg.b); }

Model make_model(const RunConfig& cfg) { return make_model(make_grid(cfg), make_law(cfg.law), cfg.mu, cfg.mu_prime); }

RunConfig config_from_json(const json& j) {
  Reader r;
  RunConfig c;
  if (!j.is_object()) throw ConfigError("config: top level must be an object");
  r.reject_unknown(j, "", {"name", "grid", "law", "viscosity", "initial", "stepper", "energy", "t_end", "output_dir", "seed"});
  r.string(&j, "name", "", c.name);
  r.number(&j, "t_end", "", c.t_end);
  r.string(&j, "output_dir", "", c.output_dir);
  r.unsigned_integer(&j, "seed", "", c.seed);

  const json* grid = r.section(j, "grid", "grid", {"d", "L", "n_h", "n_v", "b"});
  r.integer(grid, "d", "grid", c.d);
  r.number(grid, "L", "grid", c.L);
  r.integer(grid, "n_h", "grid", c.n_h);
  r.integer(grid, "n_v", "grid", c.n_v);
  r.number(grid, "b", "grid", c.b);

  const json* law = r.section(j, "law", "law", {"kind", "K", "gamma", "rho_scale", "p_atm", "g"});
  r.string(law, "kind", "law", c.law.kind);
  r.number(law, "K", "law", c.law.K);
  r.number(law, "gamma", "law", c.law.gamma);
  r.number(law, "rho_scale", "law", c.law.rho_scale);
  r.number(law, "p_atm", "law", c.law.p_atm);
  r.number(law, "g", "law", c.law.g);

  const json* visc = r.section(j, "viscosity", "viscosity", {"mu", "mu_prime"});
  r.number(visc, "mu", "viscosity", c.mu);
  r.number(visc, "mu_prime", "viscosity", c.mu_prime);

  const json* init = r.section(j, "initial", "initial", {"family", "amplitude"});
  std::string family = to_string(c.family);
  r.string(init, "family", "initial", family);
  r.number(init, "amplitude", "initial", c.amplitude);

  const json* st = r.section(j, "stepper", "stepper", {"dt", "scheme", "cfl_safety", "linear_only"});
  std::string scheme = to_string(c.stepper.scheme);
  r.number(st, "dt", "stepper", c.stepper.dt);
  r.string(st, "scheme", "stepper", scheme);
  r.number(st, "cfl_safety", "stepper", c.stepper.cfl_safety);
  r.boolean(st, "linear_only", "stepper", c.stepper.linear_only);

  const json* en = r.section(j, "energy", "energy", {"K_high", "K_low", "cadence", "low_count_two"});
  r.integer(en, "K_high", "energy", c.energy.K_high);
  r.integer(en, "K_low", "energy", c.energy.K_low);
  r.integer(en, "cadence", "energy", c.energy.cadence);
  r.boolean(en, "low_count_two", "energy", c.energy.low_count_two);

  auto& e = r.errors;
  if (c.d != 2 && c.d != 3) e.push_back("grid.d: must be 2 or 3");
  if (!(c.L > 0) || !std::isfinite(c.L)) e.push_back("grid.L: must be positive");
  if (c.n_h < 8 || !power_of_two(c.n_h)) e.push_back("grid.n_h: must be a power of two >= 8");
  if (c.n_v < 9) e.push_back("grid.n_v: must be >= 9");
  if (!(c.b > 0) || !std::isfinite(c.b)) e.push_back("grid.b: must be positive");

  bool law_ok = true;
  auto law_fail = [&](const std::string& m) {
    e.push_back(m);
    law_ok = false;
  };
  if (c.law.kind != "isothermal" && c.law.kind != "gamma_law" && c.law.kind != "saturating")
    law_fail("law.kind: must be isothermal, gamma_law or saturating");
  if (!(c.law.K > 0)) law_fail("law.K: must be positive");
  if (!(c.law.p_atm > 0)) law_fail("law.p_atm: must be positive");
  if (!(c.law.g > 0)) law_fail("law.g: must be positive");
  if (c.law.kind == "gamma_law" && !(c.law.gamma > 1)) law_fail("law.gamma: must exceed 1");
  if (c.law.kind == "saturating") {
    if (!(c.law.rho_scale > 0)) law_fail("law.rho_scale: must be positive");
    if (!(c.law.p_atm < c.law.K)) law_fail("law.p_atm: must lie below the saturation pressure K");
  }

  if (!(c.mu > 0)) e.push_back("viscosity.mu: must be positive (mu > 0)");
  if (c.d == 2 && !(c.mu_prime > 0)) e.push_back("viscosity.mu_prime: must be positive when d = 2 (mu' > 0)");
  if (c.d == 3 && !(c.mu_prime >= 0)) e.push_back("viscosity.mu_prime: must be nonnegative when d = 3 (mu' >= 0)");

  try {
    c.family = initial_family_from_string(family);
  } catch (const ConfigError&) {
    e.push_back("initial.family: must be single_mode_eta, q_bump or shear");
  }
  if (!(c.amplitude >= 0) || !std::isfinite(c.amplitude)) e.push_back("initial.amplitude: must be nonnegative");

  try {
    c.stepper.scheme = scheme_from_string(scheme);
  } catch (const ConfigError&) {
    e.push_back("stepper.scheme: must be imex_euler or imex_bdf2");
  }
  if (!(c.stepper.dt > 0) || !std::isfinite(c.stepper.dt)) e.push_back("stepper.dt: must be positive");
  if (!(c.stepper.cfl_safety > 0 && c.stepper.cfl_safety <= 1)) e.push_back("stepper.cfl_safety: must lie in (0, 1]");

  if (!(1 <= c.energy.K_low && c.energy.K_low < c.energy.K_high && c.energy.K_high <= 4))
    e.push_back("energy.K_low, energy.K_high: must satisfy 1 <= K_low < K_high <= 4");
  if (c.energy.cadence < 1) e.push_back("energy.cadence: must be >= 1");
  if (!(c.t_end >= 0) || !std::isfinite(c.t_end)) e.push_back("t_end: must be nonnegative");
  if (c.output_dir.empty()) e.push_back("output_dir: must not be empty");

  // Depth admissibility of the law.
  if (law_ok && c.b > 0) {
    const double bound = admissible_depth_bound(make_law(c.law));
    if (!(c.b < bound)) {
      std::ostringstream os;
      os << "grid.b: depth " << c.b << " violates the admissibility condition 0 < b < (1/g) int_{rho*}^inf P'(s)/s ds = "
         << bound;
      if (e.empty()) throw AdmissibilityError(os.str(), bound);
      e.push_back(os.str());
    }
  }
  if (!e.empty()) throw ConfigError(e);
  return c;
}

nlohmann::ordered_json to_json(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["name"] = c.name;
  j["grid"] = {{"d", c.d}, {"L", c.L}, {"n_h", c.n_h}, {"n_v", c.n_v}, {"b", c.b}};
  j["law"] = {{"kind", c.law.kind}, {"K", c.law.K},     {"gamma", c.law.gamma}, {"rho_scale", c.law.rho_scale},
              {"p_atm", c.law.p_atm}, {"g", c.law.g}};
  j["viscosity"] = {{"mu", c.mu}, {"mu_prime", c.mu_prime}};
  j["initial"] = {{"family", to_string(c.family)}, {"amplitude", c.amplitude}};
  j["stepper"] = {{"dt", c.stepper.dt},
                  {"scheme", to_string(c.stepper.scheme)},
                  {"cfl_safety", c.stepper.cfl_safety},
                  {"linear_only", c.stepper.linear_only}};
  j["energy"] = {{"K_high", c.energy.K_high},
                 {"K_low", c.energy.K_low},
                 {"cadence", c.energy.cadence},
                 {"low_count_two", c.energy.low_count_two}};
  j["t_end"] = c.t_end;
  j["output_dir"] = c.output_dir;
  j["seed"] = c.seed;
  return j;
}

void apply_overrides(json& j, const std::vector<std::string>& overrides) {
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + o + "': expected key=value");
    const std::string key = o.substr(0, eq);
    const std::string text = o.substr(eq + 1);
    json value;
    try {
      value = json::parse(text);
    } catch (const json::exception&) {
      value = text;
    }
    json* node = &j;
    std::stringstream ss(key);
    std::string part;
    std::vector<std::string> parts;
    while (std::getline(ss, part, '.')) parts.push_back(part);
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
      if (!node->is_object()) throw ConfigError("override '" + o + "': " + parts[i] + " is not an object");
      node = &(*node)[parts[i]];
      if (node->is_null()) *node = json::object();
    }
    if (!node->is_object()) throw ConfigError("override '" + o + "': parent is not an object");
    (*node)[parts.back()] = value;
  }
}

RunConfig parse_config(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream is(path);
  if (!is) throw ConfigError(path + ": cannot open configuration file");
  json j;
  try {
    j = json::parse(is);
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  apply_overrides(j, overrides);
  return config_from_json(j);
}

}  // namespace fsflow
