#include "fdsme/runner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "fdsme/errors.hpp"
#include "fdsme/lower_bound.hpp"
#include "fdsme/transforms.hpp"
#include "fdsme/verify.hpp"

namespace fdsme {

using nlohmann::ordered_json;

int exit_status(std::span<const CheckResult> checks, bool strict) {
  for (const auto& c : checks) {
    if (c.verdict == Verdict::fail) return kExitCheckFailed;
    if (strict && c.verdict == Verdict::inconclusive) return kExitCheckFailed;
  }
  return kExitOk;
}

namespace {

ordered_json num(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

std::string header_line(const RunConfig& cfg) {
  return std::string("# ") + kVersion + " config_digest=" + digest_hex(config_digest(cfg)) + "\n";
}

CheckResult not_applicable(const std::string& name, const std::string& why) {
  CheckResult c;
  c.name = name;
  c.target = c.estimate = c.std_error = std::nan("");
  c.verdict = Verdict::not_applicable;
  c.note = why;
  return c;
}

CheckResult inconclusive(const std::string& name, const std::string& why) {
  CheckResult c = not_applicable(name, why);
  c.verdict = Verdict::inconclusive;
  return c;
}

// Largest relative change of the conserved quantities over every record.
CheckResult conservation_check(std::span<const TrajectoryRecords> recs, bool rigid_noise,
                               double tol) {
  double worst_grad = 0.0, worst_avg = 0.0;
  for (const auto& tr : recs) {
    if (tr.empty()) continue;
    const double g0 = tr.front().grad_l2_sq;
    const Vec3 a0 = tr.front().avg;
    const double gs = g0 > 0.0 ? g0 : 1.0;
    const double as = a0.norm() > 0.0 ? a0.norm() : 1.0;
    for (const auto& r : tr) {
      worst_grad = std::max(worst_grad, std::abs(r.grad_l2_sq - g0) / gs);
      const double da = rigid_noise ? std::abs(r.avg.norm() - a0.norm())
                                    : (r.avg - a0).cwiseAbs().maxCoeff();
      worst_avg = std::max(worst_avg, da / as);
    }
  }
  CheckResult c;
  c.name = "conservation";
  c.target = 0.0;
  c.estimate = std::max(worst_grad, worst_avg);
  c.std_error = 0.0;
  c.allowance = tol;
  c.verdict = c.estimate <= tol ? Verdict::pass : Verdict::fail;
  std::ostringstream note;
  note << "max relative drift: grad_l2_sq " << format_number(worst_grad) << ", "
       << (rigid_noise ? "|avg| " : "avg ") << format_number(worst_avg);
  c.note = note.str();
  return c;
}

}  // namespace

std::string verdicts_to_json(std::span<const CheckResult> checks, const RunConfig* cfg,
                             const std::string& run_id, double nu) {
  ordered_json j;
  j["version"] = kVersion;
  if (cfg) j["config_digest"] = digest_hex(config_digest(*cfg));
  j["run_id"] = run_id;
  j["nu"] = num(nu);
  ordered_json list = ordered_json::array();
  for (const auto& c : checks) {
    ordered_json e;
    e["check_name"] = c.name;
    e["target"] = num(c.target);
    e["estimate"] = num(c.estimate);
    e["stderr"] = num(c.std_error);
    e["allowance"] = num(c.allowance);
    e["verdict"] = std::string(to_string(c.verdict));
    if (!c.note.empty()) e["note"] = c.note;
    list.push_back(std::move(e));
  }
  j["checks"] = std::move(list);
  return j.dump(2) + "\n";
}

RunArtifacts run_experiment(const RunConfig& cfg, double nu, const std::string& run_id,
                            std::ostream* log) {
  const Grid1D grid = cfg.grid();
  const ModelSpec spec = cfg.model(nu);
  const NoiseIntensity& h = spec.h;
  EnsembleJob job{spec,
                  cfg.scheme,
                  make_initial(cfg.initial, grid),
                  cfg.master_seed,
                  cfg.n_trajectories,
                  cfg.t_total,
                  cfg.sample_stride,
                  cfg.threads,
                  cfg.snapshots ? std::size_t{1} : std::size_t{0},
                  cfg.snapshot_stride};
  if (log)
    *log << "[" << run_id << "] " << cfg.n_trajectories << " trajectories, model "
         << to_string(spec.kind) << ", nu " << nu << ", dt " << cfg.scheme.dt << ", T "
         << cfg.t_total << "\n";

  RunArtifacts a;
  a.ensemble = run_ensemble(job);
  const auto& recs = a.ensemble.records;
  const std::string header = header_line(cfg);

  std::size_t k_min = recs.front().size();
  for (const auto& tr : recs) k_min = std::min(k_min, tr.size());
  std::vector<StatsRow> rows;
  rows.reserve(k_min);
  for (std::size_t k = 0; k < k_min; ++k)
    rows.push_back({run_id, nu, recs.front()[k].t, cross_section(recs, k)});
  {
    std::ostringstream s;
    s << header;
    write_stats_csv(s, rows);
    a.stats_csv = s.str();
  }

  const bool fd = spec.kind == ModelKind::llg_fluc_diss;
  const bool stationary_model = fd && nu > 0.0;
  const bool grad_h = h_moments(h).grad_l2_sq > 0.0;
  auto wanted = [&](const std::string& name, bool applicable) {
    if (cfg.checks.enabled.empty()) return applicable ? 1 : 0;
    if (!cfg.check_enabled(name)) return 0;
    return applicable ? 1 : -1;
  };
  const Tolerance& tol = cfg.checks.tol;
  auto& checks = a.checks;

  // Stationary estimate and the checks built on it.
  const int w_moment = wanted("moment_identity", stationary_model);
  const int w_balance = wanted("balance_identity", stationary_model);
  const int w_ineq = wanted("inequalities", stationary_model);
  const int w_pos = wanted("positive_gradient", stationary_model);
  const int w_bound = wanted("bound", stationary_model && grad_h);
  const bool need_stationary = w_moment > 0 || w_balance > 0 || w_ineq > 0;
  const bool need_burn = need_stationary || w_pos > 0 || w_bound > 0;
  if (need_burn) {
    a.burn_in = cfg.t_burn_in;
    if (cfg.burn_in_auto) {
      try {
        a.burn_in = 5.0 * mixing_proxy(recs);
      } catch (const EstimationError& e) {
        a.burn_in = 0.5 * cfg.t_total;
        if (log) *log << "  burn-in proxy unavailable (" << e.what() << "); using T/2\n";
      }
      if (log) *log << "  burn-in " << a.burn_in << " (5 x mixing proxy)\n";
    }
  }
  std::string stationary_error;
  if (need_stationary) {
    try {
      a.stationary = stationary_estimate(recs, a.burn_in);
      std::ostringstream s;
      s << header;
      const StatsRow row{run_id, nu, a.burn_in, *a.stationary};
      write_stats_csv(s, std::span<const StatsRow>(&row, 1));
      a.stationary_csv = s.str();
    } catch (const EstimationError& e) {
      stationary_error = e.what();
    }
  }
  const std::string na_stationary = "needs llg_fluc_diss with nu > 0";
  if (w_moment != 0) {
    if (w_moment < 0) checks.push_back(not_applicable("moment_identity", na_stationary));
    else if (!a.stationary) checks.push_back(inconclusive("moment_identity", stationary_error));
    else checks.push_back(check_moment_identity(*a.stationary, h, tol));
  }
  if (w_balance != 0) {
    if (w_balance < 0) checks.push_back(not_applicable("balance_identity", na_stationary));
    else if (!a.stationary) checks.push_back(inconclusive("balance_identity", stationary_error));
    else checks.push_back(check_balance_identity(*a.stationary, h, tol));
  }
  if (w_ineq != 0) {
    if (w_ineq < 0) {
      checks.push_back(not_applicable("inequalities", na_stationary));
    } else if (!a.stationary) {
      checks.push_back(inconclusive("inequalities", stationary_error));
    } else {
      for (auto& c : check_inequalities(*a.stationary, h, tol)) checks.push_back(std::move(c));
    }
  }
  if (w_pos != 0) {
    if (w_pos < 0) {
      checks.push_back(not_applicable("positive_gradient", na_stationary));
    } else {
      const std::size_t m = std::min(cfg.checks.positive_trajectories, recs.size());
      checks.push_back(check_positive_gradient(std::span(recs).first(m), h,
                                               cfg.checks.positive_floor, a.burn_in));
    }
  }

  if (const int w = wanted("energy_identity", fd && cfg.n_trajectories >= 2); w != 0) {
    if (w < 0) {
      checks.push_back(not_applicable("energy_identity", "needs llg_fluc_diss and 2+ trajectories"));
    } else {
      const double t_end = cfg.checks.energy_t < 0.0 ? cfg.t_total : cfg.checks.energy_t;
      try {
        checks.push_back(check_energy_identity(recs, cfg.checks.energy_s, t_end, nu, h, tol));
      } catch (const EstimationError& e) {
        checks.push_back(inconclusive("energy_identity", e.what()));
      }
    }
  }

  const bool pure_sme = spec.kind == ModelKind::sme || (fd && nu == 0.0);
  const bool ssme = spec.kind == ModelKind::ssme;
  if (const int w = wanted("conservation", pure_sme || ssme); w != 0) {
    if (w < 0) checks.push_back(not_applicable("conservation", "needs sme, nu = 0 or ssme"));
    else checks.push_back(conservation_check(recs, ssme, cfg.checks.conservation_tol));
  }

  if (w_bound != 0) {
    if (w_bound < 0) {
      checks.push_back(not_applicable("bound", "needs llg_fluc_diss, nu > 0 and h' != 0"));
    } else {
      const BoundResult b = lower_bound_general({h_moments(h), cfg.checks.c_p, grid.length()});
      std::vector<double> mins;
      for (const auto& tr : recs) mins.push_back(min_gradient(tr, a.burn_in));
      const BoundCrossCheck x = cross_validate_bound(mins, b.lambda, cfg.checks.positive_floor);
      CheckResult c;
      c.name = "bound";
      c.target = b.lambda;
      c.estimate = x.fraction;
      c.std_error = std::nan("");
      c.verdict = Verdict::reported;
      c.note = x.message;
      for (const auto& w2 : b.warnings) c.note += "; " + w2;
      checks.push_back(c);
    }
  }

  if (spec.kind == ModelKind::spherical_bm && std::holds_alternative<InitialConstant>(cfg.initial)) {
    const Vec3 q = std::get<InitialConstant>(cfg.initial).q.normalized();
    Accumulator acc;
    for (const auto& tr : recs) {
      const double v = tr.back().avg.dot(q);
      acc.add_batch(std::span<const double>(&v, 1));
    }
    const double t_end = recs.front().back().t;
    CheckResult c;
    c.name = "sbm_mean";
    c.target = std::exp(-t_end);
    c.estimate = acc.mean();
    c.std_error = acc.std_error();
    c.allowance = 0.0;
    c.verdict = decide(c.estimate, c.target, c.std_error, 0.0, tol);
    c.note = "E[y_T . y_0] against exp(-T)";
    checks.push_back(c);
  }

  a.verdicts_json = verdicts_to_json(checks, &cfg, run_id, nu);

  if (!a.ensemble.snapshots.empty()) {
    std::ostringstream s, c;
    s << header << "t,x,u1,u2,u3\n";
    std::vector<CurveSnapshot> curves;
    for (const auto& snap : a.ensemble.snapshots.front()) {
      for (std::size_t i = 0; i < snap.u.size(); ++i) {
        const Vec3& v = snap.u[i];
        s << format_number(snap.t) << ',' << format_number(grid.x(i)) << ','
          << format_number(v.x()) << ',' << format_number(v.y()) << ',' << format_number(v.z())
          << '\n';
      }
      curves.push_back({snap.t, bcf_transform(snap.u)});
    }
    c << header;
    write_curve_csv(c, curves);
    a.snapshots_csv = s.str();
    a.curves_csv = c.str();
  }
  return a;
}

void write_artifacts(const RunArtifacts& a, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto put = [&](const char* name, const std::string& text) {
    if (text.empty()) return;
    std::ofstream f(dir / name, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + (dir / name).string());
    f << text;
  };
  put("stats.csv", a.stats_csv);
  put("stationary.csv", a.stationary_csv);
  put("verdicts.json", a.verdicts_json);
  put("snapshots.csv", a.snapshots_csv);
  put("curves.csv", a.curves_csv);
}

std::string sweep_summary_csv(const RunConfig& cfg, std::span<const SweepRow> rows) {
  std::ostringstream s;
  s << header_line(cfg);
  s << "nu,cross_lap_l2_sq_mean,cross_lap_l2_sq_stderr,grad_l2_sq_mean,grad_l2_sq_stderr,"
       "lap_l2_sq_mean,lap_l2_sq_stderr,moment_identity,balance_identity,flags\n";
  for (const auto& r : rows) {
    auto verdict_of = [&](const char* name) -> std::string {
      for (const auto& c : r.checks)
        if (c.name == name) return std::string(to_string(c.verdict));
      return "-";
    };
    s << format_number(r.nu);
    for (Obs o : {Obs::cross_lap_l2_sq, Obs::grad_l2_sq, Obs::lap_l2_sq})
      s << ',' << format_number(r.stats.mean(o)) << ',' << format_number(r.stats.std_error(o));
    s << ',' << verdict_of("moment_identity") << ',' << verdict_of("balance_identity") << ','
      << (r.flags.empty() ? "-" : r.flags) << '\n';
  }
  return s.str();
}

RunConfig resolve_config(const CliOptions& opt) {
  if (opt.config.empty()) throw ConfigError("--config is required for this command");
  RunConfig cfg = load_config(opt.config);
  if (opt.seed) cfg.master_seed = *opt.seed;
  if (opt.threads) cfg.threads = std::max(1u, *opt.threads);
  if (opt.out) cfg.out_dir = *opt.out;
  return cfg;
}

namespace {
void print_checks(std::ostream& out, std::span<const CheckResult> checks) {
  for (const auto& c : checks) {
    out << "  " << to_string(c.verdict) << "  " << c.name << "  estimate " << format_number(c.estimate)
        << "  target " << format_number(c.target) << "  stderr " << format_number(c.std_error)
        << "  allowance " << format_number(c.allowance);
    if (!c.note.empty()) out << "  (" << c.note << ")";
    out << "\n";
  }
}
}  // namespace

int command_run(const CliOptions& opt, std::ostream& out) {
  const RunConfig cfg = resolve_config(opt);
  const RunArtifacts a = run_experiment(cfg, cfg.nu, "run", &out);
  write_artifacts(a, cfg.out_dir);
  print_checks(out, a.checks);
  out << "artifacts written to " << cfg.out_dir.string() << "\n";
  return exit_status(a.checks, opt.strict);
}

int command_sweep(const CliOptions& opt, std::ostream& out) {
  const RunConfig cfg = resolve_config(opt);
  if (cfg.sweep_nu.empty()) throw ConfigError("sweep: the config has no sweep.nu list");
  std::vector<SweepRow> rows;
  std::vector<CheckResult> all;
  for (double nu : cfg.sweep_nu) {
    const std::string id = "nu_" + format_number(nu);
    RunArtifacts a = run_experiment(cfg, nu, id, &out);
    write_artifacts(a, cfg.out_dir / id);
    print_checks(out, a.checks);
    SweepRow row;
    row.nu = nu;
    if (a.stationary) row.stats = *a.stationary;
    row.checks = a.checks;
    for (const auto& c : a.checks)
      if (c.name == "cross_lap_bound" && c.verdict == Verdict::fail) row.flags += "bound_violation;";
    if (!rows.empty() && a.stationary) {
      const double first = rows.front().stats.mean(Obs::lap_l2_sq);
      if (std::isfinite(first) && a.stationary->mean(Obs::lap_l2_sq) > 2.0 * first)
        row.flags += "lap_growth;";
    }
    all.insert(all.end(), a.checks.begin(), a.checks.end());
    rows.push_back(std::move(row));
  }
  std::filesystem::create_directories(cfg.out_dir);
  std::ofstream(cfg.out_dir / "summary.csv", std::ios::binary) << sweep_summary_csv(cfg, rows);
  out << "summary written to " << (cfg.out_dir / "summary.csv").string() << "\n";
  return exit_status(all, opt.strict);
}

int command_verify(const CliOptions& opt, std::ostream& out) {
  std::vector<std::string> suites;
  if (opt.suite.empty() || opt.suite == "all") {
    suites = suite_names();
  } else {
    const auto names = suite_names();
    if (std::find(names.begin(), names.end(), opt.suite) == names.end())
      throw ConfigError("verify: unknown suite '" + opt.suite + "'");
    suites = {opt.suite};
  }
  const std::uint64_t seed = opt.seed.value_or(1);
  const unsigned threads = opt.threads.value_or(1);
  std::vector<CheckResult> all;
  for (const auto& s : suites) {
    out << "suite " << s << "\n";
    const auto checks = run_suite(s, seed, threads);
    print_checks(out, checks);
    all.insert(all.end(), checks.begin(), checks.end());
  }
  if (opt.out) {
    std::filesystem::create_directories(*opt.out);
    std::ofstream(*opt.out / "verdicts.json", std::ios::binary)
        << verdicts_to_json(all, nullptr, "verify", std::nan(""));
  }
  return exit_status(all, opt.strict);
}

int command_bound(const CliOptions& opt, std::ostream& out) {
  BoundResult b;
  if (!opt.config.empty()) {
    const RunConfig cfg = resolve_config(opt);
    const Grid1D grid = cfg.grid();
    const HMoments m = h_moments(cfg.noise(grid));
    out << "h moments: <h> " << format_number(m.mean) << ", <h^2> " << format_number(m.mean_sq)
        << ", <|h|> " << format_number(m.mean_abs) << ", ||h||_inf " << format_number(m.sup)
        << ", ||h'||^2 " << format_number(m.grad_l2_sq) << ", |D| " << format_number(grid.length())
        << ", C_p " << format_number(cfg.checks.c_p) << "\n";
    b = lower_bound_general({m, cfg.checks.c_p, grid.length()});
  } else {
    out << "cosine family: alpha " << format_number(opt.alpha) << ", k " << opt.k
        << " (normalized: <h> 0, <h^2> = <h'^2> 1/2, <|h|>^2 4/pi^2, C_p 1)\n";
    b = lower_bound_cosine(opt.alpha, opt.k);
  }
  const double bis = bound_root_bisection(b.A, b.B, b.R);
  out << "A " << format_number(b.A) << "  B " << format_number(b.B) << "  R " << format_number(b.R)
      << "\n";
  out << "lambda* (closed form) " << format_number(b.lambda) << "\n";
  out << "lambda* (bisection)   " << format_number(bis) << "  |diff| "
      << format_number(std::abs(bis - b.lambda)) << "\n";
  for (const auto& w : b.warnings) out << "warning: " << w << "\n";
  if (opt.config.empty() && opt.alpha == 0.1) {
    out << "published value for alpha = 0.1: " << kPublishedCosineBound << "; computed "
        << format_number(b.lambda) << "; difference " << format_number(b.lambda - kPublishedCosineBound)
        << " (not reconciled)\n";
  }
  return kExitOk;
}

int command_transform(const CliOptions& opt, std::ostream& out) {
  RunConfig cfg = resolve_config(opt);
  cfg.n_trajectories = 1;
  const Grid1D grid = cfg.grid();
  const ModelSpec spec = cfg.model(cfg.nu);
  EnsembleJob job{spec, cfg.scheme, make_initial(cfg.initial, grid), cfg.master_seed, 1,
                  cfg.t_total, cfg.sample_stride, 1, 1, cfg.snapshot_stride};
  const EnsembleResult r = run_ensemble(job);
  std::vector<CurveSnapshot> curves;
  double arclength = 0.0;
  for (const auto& s : r.snapshots.front()) {
    curves.push_back({s.t, bcf_transform(s.u)});
    arclength = std::max(arclength, arclength_residual(curves.back().curve));
  }
  const HashimotoField hf = hashimoto(r.snapshots.front().back().u);
  std::filesystem::create_directories(cfg.out_dir);
  const std::string header = header_line(cfg);
  {
    std::ofstream f(cfg.out_dir / "curves.csv", std::ios::binary);
    f << header;
    write_curve_csv(f, curves);
  }
  {
    std::ofstream f(cfg.out_dir / "hashimoto.csv", std::ios::binary);
    f << header;
    write_hashimoto_csv(f, hf);
  }
  out << "snapshots " << curves.size() << ", max arclength residual " << format_number(arclength)
      << "\n";
  const bool pure_sme =
      spec.kind == ModelKind::sme || (spec.kind == ModelKind::llg_fluc_diss && spec.nu == 0.0);
  if (curves.size() >= 2) {
    const BcfResidual res = bcf_residual(curves);
    out << "bcf residual " << format_number(res.residual) << " (without translation "
        << format_number(res.raw_residual) << ")"
        << (pure_sme ? "" : "; trajectory is not an SME solution, value is diagnostic") << "\n";
  }
  for (const auto& w : hf.warnings) out << "warning: " << w << "\n";
  out << "curves.csv and hashimoto.csv written to " << cfg.out_dir.string() << "\n";
  return kExitOk;
}

}  // namespace fdsme
