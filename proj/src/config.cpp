#include "fdsme/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "fdsme/errors.hpp"

namespace fdsme {

using nlohmann::json;

namespace {

const std::set<std::string> kCheckNames = {"moment_identity", "balance_identity",
                                           "energy_identity", "inequalities",
                                           "positive_gradient", "conservation", "bound"};

class Reader {
public:
  std::vector<std::string> errors;

  void fail(const std::string& msg) { errors.push_back(msg); }

  const json* section(const json& root, const char* name, std::initializer_list<const char*> keys) {
    if (!root.contains(name)) return nullptr;
    const json& s = root.at(name);
    if (!s.is_object()) {
      fail(std::string(name) + ": expected an object");
      return nullptr;
    }
    known(s, name, keys);
    return &s;
  }

  void known(const json& obj, const std::string& where, std::initializer_list<const char*> keys) {
    for (const auto& [k, v] : obj.items()) {
      if (std::none_of(keys.begin(), keys.end(), [&](const char* n) { return k == n; }))
        fail(where + "." + k + ": unknown key");
    }
  }

  double number(const json* obj, const std::string& where, const char* key, double def) {
    if (!obj || !obj->contains(key)) return def;
    const json& v = obj->at(key);
    if (!v.is_number() || !std::isfinite(v.get<double>())) {
      fail(where + "." + key + ": expected a finite number");
      return def;
    }
    return v.get<double>();
  }

  std::uint64_t count(const json* obj, const std::string& where, const char* key,
                      std::uint64_t def) {
    if (!obj || !obj->contains(key)) return def;
    const json& v = obj->at(key);
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0)) {
      fail(where + "." + key + ": expected a nonnegative integer");
      return def;
    }
    return v.get<std::uint64_t>();
  }

  std::string text(const json* obj, const std::string& where, const char* key,
                   const std::string& def) {
    if (!obj || !obj->contains(key)) return def;
    const json& v = obj->at(key);
    if (!v.is_string()) {
      fail(where + "." + key + ": expected a string");
      return def;
    }
    return v.get<std::string>();
  }

  bool flag(const json* obj, const std::string& where, const char* key, bool def) {
    if (!obj || !obj->contains(key)) return def;
    const json& v = obj->at(key);
    if (!v.is_boolean()) {
      fail(where + "." + key + ": expected true or false");
      return def;
    }
    return v.get<bool>();
  }
};

}  // namespace

RunConfig parse_config(const json& root, const std::filesystem::path& base_dir) {
  if (!root.is_object()) throw ConfigError("config: top level must be an object");
  RunConfig cfg;
  cfg.base_dir = base_dir;
  Reader r;
  r.known(root, "config", {"model", "grid", "scheme", "initial", "time", "ensemble", "sweep",
                           "outputs", "checks"});

  // model
  const json* model = r.section(root, "model", {"kind", "nu", "h"});
  if (!model) r.fail("model: section is required");
  try {
    cfg.kind = parse_model_kind(r.text(model, "model", "kind", "llg_fluc_diss"));
  } catch (const ConfigError& e) {
    r.fail(std::string("model.kind: ") + e.what());
  }
  cfg.nu = r.number(model, "model", "nu", cfg.nu);
  if (!(cfg.nu >= 0.0 && cfg.nu <= 1.0)) r.fail("model.nu: must lie in [0, 1]");
  const json* h = nullptr;
  if (model && model->contains("h")) {
    h = &model->at("h");
    if (!h->is_object()) {
      r.fail("model.h: expected an object");
      h = nullptr;
    } else {
      r.known(*h, "model.h", {"family", "c", "alpha", "k", "path"});
    }
  }
  cfg.h.family = r.text(h, "model.h", "family", cfg.h.family);
  cfg.h.c = r.number(h, "model.h", "c", cfg.h.c);
  cfg.h.alpha = r.number(h, "model.h", "alpha", cfg.h.alpha);
  cfg.h.k = static_cast<int>(r.count(h, "model.h", "k", 1));
  cfg.h.path = r.text(h, "model.h", "path", "");
  if (cfg.h.family == "cosine") {
    if (cfg.h.k < 1) r.fail("model.h.k: must be a positive integer");
  } else if (cfg.h.family == "tabulated") {
    if (cfg.h.path.empty()) {
      r.fail("model.h.path: required for the tabulated family");
    } else if (!std::filesystem::exists(base_dir / cfg.h.path)) {
      r.fail("model.h.path: file " + (base_dir / cfg.h.path).string() + " does not exist");
    }
  } else if (cfg.h.family != "constant") {
    r.fail("model.h.family: expected constant, cosine or tabulated");
  }

  // grid
  const json* grid = r.section(root, "grid", {"length", "n"});
  cfg.length = r.number(grid, "grid", "length", 0.0);
  cfg.n = r.count(grid, "grid", "n", cfg.n);
  if (cfg.n < 3) r.fail("grid.n: need at least 3 nodes");
  if (cfg.h.family == "cosine") {
    const double expected = 2.0 * std::numbers::pi * std::max(cfg.h.k, 1);
    if (cfg.length == 0.0) cfg.length = expected;
    if (std::abs(cfg.length - expected) > 1e-9 * expected)
      r.fail("grid.length: the cosine family needs length 2 pi k");
  }
  if (!(cfg.length > 0.0)) r.fail("grid.length: must be positive");

  // scheme
  const json* scheme = r.section(root, "scheme", {"kind", "dt", "fp_tol", "fp_max_iter"});
  try {
    cfg.scheme.kind = parse_scheme_kind(r.text(scheme, "scheme", "kind", "strang_rotation"));
  } catch (const ConfigError& e) {
    r.fail(std::string("scheme.kind: ") + e.what());
  }
  if (scheme && scheme->contains("dt") && scheme->at("dt").is_string()) {
    if (scheme->at("dt").get<std::string>() == "auto")
      cfg.dt_auto = true;
    else
      r.fail("scheme.dt: expected a number or \"auto\"");
  } else {
    cfg.scheme.dt = r.number(scheme, "scheme", "dt", cfg.scheme.dt);
  }
  if (cfg.dt_auto && cfg.n >= 3 && cfg.length > 0.0)
    cfg.scheme.dt = default_dt(Grid1D(cfg.length, cfg.n));
  cfg.scheme.fp_tol = r.number(scheme, "scheme", "fp_tol", cfg.scheme.fp_tol);
  cfg.scheme.fp_max_iter = static_cast<int>(r.count(scheme, "scheme", "fp_max_iter", 50));
  if (!(cfg.scheme.dt > 0.0)) r.fail("scheme.dt: must be positive");
  if (!(cfg.scheme.fp_tol > 0.0 && cfg.scheme.fp_tol < 1e-6))
    r.fail("scheme.fp_tol: must lie in (0, 1e-6)");
  if (cfg.scheme.fp_max_iter < 1) r.fail("scheme.fp_max_iter: must be at least 1");

  // initial
  const json* init = r.section(root, "initial", {"kind", "q", "amplitude"});
  const std::string ikind = r.text(init, "initial", "kind", "constant");
  if (ikind == "constant") {
    Vec3 q(0.0, 0.0, 1.0);
    if (init && init->contains("q")) {
      const json& qj = init->at("q");
      if (!qj.is_array() || qj.size() != 3 ||
          !std::all_of(qj.begin(), qj.end(), [](const json& x) { return x.is_number(); })) {
        r.fail("initial.q: expected an array of 3 numbers");
      } else {
        q = Vec3(qj[0].get<double>(), qj[1].get<double>(), qj[2].get<double>());
      }
    }
    if (!(std::abs(q.norm() - 1.0) <= 1e-9)) r.fail("initial.q: must be a unit vector");
    cfg.initial = InitialConstant{q};
  } else if (ikind == "great_circle") {
    cfg.initial = InitialGreatCircle{r.number(init, "initial", "amplitude", 0.5)};
  } else {
    r.fail("initial.kind: expected constant or great_circle");
  }

  // time
  const json* time = r.section(root, "time", {"t_burn_in", "t_total", "sample_stride"});
  if (time && time->contains("t_burn_in") && time->at("t_burn_in").is_string()) {
    if (time->at("t_burn_in").get<std::string>() == "auto")
      cfg.burn_in_auto = true;
    else
      r.fail("time.t_burn_in: expected a number or \"auto\"");
  } else {
    cfg.t_burn_in = r.number(time, "time", "t_burn_in", 0.0);
  }
  cfg.t_total = r.number(time, "time", "t_total", cfg.t_total);
  cfg.sample_stride = r.count(time, "time", "sample_stride", 1);
  if (!(cfg.t_burn_in >= 0.0)) r.fail("time.t_burn_in: must be >= 0");
  if (!(cfg.t_total > cfg.t_burn_in)) r.fail("time.t_total: must exceed t_burn_in");
  if (cfg.sample_stride < 1) r.fail("time.sample_stride: must be at least 1");

  // ensemble
  const json* ens = r.section(root, "ensemble", {"n_trajectories", "master_seed"});
  cfg.n_trajectories = r.count(ens, "ensemble", "n_trajectories", 1);
  cfg.master_seed = r.count(ens, "ensemble", "master_seed", 1);
  if (cfg.n_trajectories < 1) r.fail("ensemble.n_trajectories: must be at least 1");

  // sweep
  if (const json* sweep = r.section(root, "sweep", {"nu"})) {
    if (!sweep->contains("nu") || !sweep->at("nu").is_array()) {
      r.fail("sweep.nu: expected a list of viscosities");
    } else {
      for (const auto& v : sweep->at("nu")) {
        if (!v.is_number()) {
          r.fail("sweep.nu: entries must be numbers");
          continue;
        }
        cfg.sweep_nu.push_back(v.get<double>());
      }
      if (cfg.sweep_nu.empty()) r.fail("sweep.nu: list is empty");
      for (std::size_t i = 0; i < cfg.sweep_nu.size(); ++i) {
        if (!(cfg.sweep_nu[i] >= 0.0 && cfg.sweep_nu[i] <= 1.0))
          r.fail("sweep.nu[" + std::to_string(i) + "]: must lie in [0, 1]");
        if (i > 0 && !(cfg.sweep_nu[i] < cfg.sweep_nu[i - 1]))
          r.fail("sweep.nu: must be strictly decreasing");
      }
    }
  }

  // outputs
  const json* out = r.section(root, "outputs", {"dir", "snapshots", "snapshot_stride"});
  cfg.out_dir = r.text(out, "outputs", "dir", "out");
  cfg.snapshots = r.flag(out, "outputs", "snapshots", false);
  cfg.snapshot_stride = r.count(out, "outputs", "snapshot_stride", 1);
  if (cfg.snapshot_stride < 1) r.fail("outputs.snapshot_stride: must be at least 1");

  // checks
  const json* checks = r.section(
      root, "checks",
      {"enabled", "n_sigma", "c_disc", "inconclusive_ratio", "positive_floor",
       "positive_trajectories", "energy_s", "energy_t", "conservation_tol", "c_p"});
  if (checks && checks->contains("enabled")) {
    const json& e = checks->at("enabled");
    if (!e.is_array()) {
      r.fail("checks.enabled: expected a list of names");
    } else {
      for (const auto& name : e) {
        if (!name.is_string() || !kCheckNames.count(name.get<std::string>())) {
          r.fail("checks.enabled: unknown check " + name.dump());
          continue;
        }
        cfg.checks.enabled.push_back(name.get<std::string>());
      }
    }
  }
  auto& c = cfg.checks;
  c.tol.n_sigma = r.number(checks, "checks", "n_sigma", c.tol.n_sigma);
  c.tol.c_disc = r.number(checks, "checks", "c_disc", c.tol.c_disc);
  c.tol.inconclusive_ratio = r.number(checks, "checks", "inconclusive_ratio", c.tol.inconclusive_ratio);
  c.positive_floor = r.number(checks, "checks", "positive_floor", c.positive_floor);
  c.positive_trajectories = r.count(checks, "checks", "positive_trajectories", c.positive_trajectories);
  c.energy_s = r.number(checks, "checks", "energy_s", c.energy_s);
  c.energy_t = r.number(checks, "checks", "energy_t", c.energy_t);
  c.conservation_tol = r.number(checks, "checks", "conservation_tol", c.conservation_tol);
  c.c_p = r.number(checks, "checks", "c_p", c.c_p);
  if (!(c.tol.n_sigma > 0.0)) r.fail("checks.n_sigma: must be positive");
  if (!(c.tol.c_disc >= 0.0)) r.fail("checks.c_disc: must be >= 0");
  if (!(c.tol.inconclusive_ratio > 0.0)) r.fail("checks.inconclusive_ratio: must be positive");
  if (!(c.positive_floor > 0.0)) r.fail("checks.positive_floor: must be positive");
  if (c.positive_trajectories < 1) r.fail("checks.positive_trajectories: must be at least 1");
  if (!(c.energy_s >= 0.0)) r.fail("checks.energy_s: must be >= 0");
  if (c.energy_t >= 0.0 && !(c.energy_t > c.energy_s)) r.fail("checks.energy_t: must exceed energy_s");
  if (c.energy_t > cfg.t_total) r.fail("checks.energy_t: lies beyond time.t_total");
  if (!(c.conservation_tol > 0.0)) r.fail("checks.conservation_tol: must be positive");
  if (!(c.c_p > 0.0)) r.fail("checks.c_p: must be positive");

  if (!r.errors.empty()) {
    std::ostringstream msg;
    msg << "invalid configuration (" << r.errors.size() << " problem"
        << (r.errors.size() == 1 ? "" : "s") << "):";
    for (const auto& e : r.errors) msg << "\n  " << e;
    throw ConfigError(msg.str());
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  json j;
  try {
    j = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file " + path.string() + ": " + e.what());
  }
  return parse_config(j, path.parent_path());
}

Grid1D RunConfig::grid() const { return Grid1D(length, n); }

NoiseIntensity RunConfig::noise(const Grid1D& g) const {
  if (h.family == "constant") return NoiseIntensity::constant(g, h.c);
  if (h.family == "cosine") return NoiseIntensity::cosine(g, h.alpha, h.k);
  return NoiseIntensity::from_csv(g, base_dir / h.path);
}

ModelSpec RunConfig::model(double nu_value) const {
  return ModelSpec(kind, nu_value, noise(grid()));
}

bool RunConfig::check_enabled(const std::string& name) const {
  return checks.enabled.empty() ||
         std::find(checks.enabled.begin(), checks.enabled.end(), name) != checks.enabled.end();
}

json to_json(const RunConfig& cfg) {
  json h = {{"family", cfg.h.family}};
  if (cfg.h.family == "constant") h["c"] = cfg.h.c;
  if (cfg.h.family == "cosine") {
    h["alpha"] = cfg.h.alpha;
    h["k"] = cfg.h.k;
  }
  if (cfg.h.family == "tabulated") h["path"] = cfg.h.path.generic_string();
  json init;
  if (const auto* c = std::get_if<InitialConstant>(&cfg.initial)) {
    init = {{"kind", "constant"}, {"q", {c->q.x(), c->q.y(), c->q.z()}}};
  } else {
    init = {{"kind", "great_circle"},
            {"amplitude", std::get<InitialGreatCircle>(cfg.initial).amplitude}};
  }
  json j = {
      {"model", {{"kind", std::string(to_string(cfg.kind))}, {"nu", cfg.nu}, {"h", h}}},
      {"grid", {{"length", cfg.length}, {"n", cfg.n}}},
      {"scheme",
       {{"kind", std::string(to_string(cfg.scheme.kind))},
        {"dt", cfg.scheme.dt},
        {"fp_tol", cfg.scheme.fp_tol},
        {"fp_max_iter", cfg.scheme.fp_max_iter}}},
      {"initial", init},
      {"time",
       {{"t_burn_in", cfg.burn_in_auto ? json("auto") : json(cfg.t_burn_in)},
        {"t_total", cfg.t_total},
        {"sample_stride", cfg.sample_stride}}},
      {"ensemble", {{"n_trajectories", cfg.n_trajectories}, {"master_seed", cfg.master_seed}}},
      {"outputs", {{"snapshots", cfg.snapshots}, {"snapshot_stride", cfg.snapshot_stride}}},
      {"checks",
       {{"enabled", cfg.checks.enabled},
        {"n_sigma", cfg.checks.tol.n_sigma},
        {"c_disc", cfg.checks.tol.c_disc},
        {"inconclusive_ratio", cfg.checks.tol.inconclusive_ratio},
        {"positive_floor", cfg.checks.positive_floor},
        {"positive_trajectories", cfg.checks.positive_trajectories},
        {"energy_s", cfg.checks.energy_s},
        {"energy_t", cfg.checks.energy_t},
        {"conservation_tol", cfg.checks.conservation_tol},
        {"c_p", cfg.checks.c_p}}},
  };
  if (!cfg.sweep_nu.empty()) j["sweep"] = {{"nu", cfg.sweep_nu}};
  return j;
}

std::uint64_t config_digest(const RunConfig& cfg) {
  const std::string s = to_json(cfg).dump();
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (unsigned char ch : s) {
    hash ^= ch;
    hash *= 0x100000001b3ull;
  }
  return hash;
}

std::string digest_hex(std::uint64_t digest) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(digest));
  return buf;
}

}  // namespace fdsme
