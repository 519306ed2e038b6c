#include "fdsme/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "fdsme/config.hpp"
#include "fdsme/errors.hpp"
#include "fdsme/lower_bound.hpp"
#include "fdsme/runner.hpp"
#include "fdsme/transforms.hpp"

namespace fdsme {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

CheckResult threshold(std::string name, double estimate, double target, bool ok,
                      std::string note = {}) {
  CheckResult c;
  c.name = std::move(name);
  c.estimate = estimate;
  c.target = target;
  c.verdict = ok ? Verdict::pass : Verdict::fail;
  c.note = std::move(note);
  return c;
}

std::string join(const std::vector<double>& v) {
  std::ostringstream s;
  for (std::size_t i = 0; i < v.size(); ++i) s << (i ? " " : "") << format_number(v[i]);
  return s.str();
}

CheckResult order_check(const std::string& name, const std::vector<double>& errors, double lo,
                        double hi = 1e300) {
  const auto orders = observed_orders(errors);
  const double worst = *std::min_element(orders.begin(), orders.end());
  const bool ok = std::all_of(orders.begin(), orders.end(),
                              [&](double p) { return p >= lo && p <= hi; });
  return threshold(name, worst, lo, ok, "errors " + join(errors) + "; orders " + join(orders));
}

// Integrates a single deterministic trajectory and returns the final field.
SphereField run_single(const ModelSpec& spec, SphereField u0, double dt, double t_end,
                       std::uint64_t seed = 1) {
  SchemeConfig sc;
  sc.dt = dt;
  TrajectoryState st(std::move(u0), spec, sc, Substream(seed, 0));
  integrate(st, t_end, nullptr, 1);
  return st.u;
}

SphereField run_single_state(const ModelSpec& spec, const SphereField& u0,
                             const SchemeConfig& sc, std::uint64_t seed, std::size_t index,
                             double t_end) {
  TrajectoryState st(u0, spec, sc, derive_substream(seed, index));
  integrate(st, t_end, nullptr, 1);
  return st.u;
}

double field_distance(const SphereField& a, const SphereField& b) {
  VectorField d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return std::sqrt(norm_l2_sq(a.grid(), d));
}

}  // namespace

std::vector<double> observed_orders(const std::vector<double>& errors) {
  std::vector<double> p;
  for (std::size_t i = 0; i + 1 < errors.size(); ++i) p.push_back(std::log2(errors[i] / errors[i + 1]));
  return p;
}

std::vector<std::string> suite_names() {
  return {"identities", "conservation", "stationary", "sbm", "bound", "transforms"};
}

std::vector<CheckResult> run_suite(const std::string& name, std::uint64_t seed, unsigned threads) {
  if (name == "identities") return suite_identities();
  if (name == "conservation") return suite_conservation(seed);
  if (name == "stationary") return suite_stationary(seed, threads);
  if (name == "sbm") return suite_sbm(seed, threads);
  if (name == "bound") return suite_bound();
  if (name == "transforms") return suite_transforms();
  throw ConfigError("unknown suite '" + name + "'");
}

std::vector<CheckResult> suite_identities() {
  std::vector<double> tang, fund, damp;
  double unit_129 = 0.0, raw_129 = 0.0;
  for (std::size_t n : {65u, 129u, 257u}) {
    const Grid1D grid(kTwoPi, n);
    const SphereField u = make_initial(InitialGreatCircle{0.5}, grid);
    tang.push_back(tangency_residual(u));
    fund.push_back(std::abs(fundamental_identity_residual(u)));
    damp.push_back(damping_identity_residual(u));
    if (n == 129) {
      unit_129 = damp.back();
      VectorField raw(u.values().begin(), u.values().end());
      for (std::size_t i = 0; i < n; ++i) raw[i] *= 1.0 + 0.2 * std::cos(grid.x(i));
      raw_129 = damping_identity_residual(grid, raw);
    }
  }
  std::vector<CheckResult> out;
  out.push_back(order_check("tangency_order", tang, 1.8));
  out.push_back(order_check("fundamental_identity_order", fund, 1.8));
  out.push_back(order_check("damping_identity_order", damp, 1.8));
  out.push_back(threshold("damping_negative_control", raw_129 / unit_129, 10.0,
                          raw_129 >= 10.0 * unit_129,
                          "non-unit residual / unit residual at n = 129"));
  return out;
}

std::vector<CheckResult> suite_conservation(std::uint64_t seed) {
  std::vector<CheckResult> out;
  const Grid1D grid(kTwoPi, 129);
  const ModelSpec sme(ModelKind::sme, 0.0, NoiseIntensity::constant(grid, 0.0));
  const SphereField u0 = make_initial(InitialGreatCircle{0.5}, grid);
  const Vec3 q = Vec3(1.0, 2.0, 2.0) / 3.0;
  auto dist_q = [&](const SphereField& u) {
    VectorField d(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) d[i] = u[i] - q;
    return norm_l2_sq(grid, d);
  };
  const SphereField u1 = run_single(sme, u0, 1e-4, 1.0, seed);
  const double g0 = dirichlet_energy(grid, u0.values()), g1 = dirichlet_energy(grid, u1.values());
  const Vec3 a0 = space_average(grid, u0.values()), a1 = space_average(grid, u1.values());
  const double rel_g = std::abs(g1 - g0) / g0;
  double rel_a = 0.0;
  for (int c = 0; c < 3; ++c)
    if (std::abs(a0[c]) > 1e-12) rel_a = std::max(rel_a, std::abs(a1[c] - a0[c]) / std::abs(a0[c]));
  const double rel_q = std::abs(dist_q(u1) - dist_q(u0)) / dist_q(u0);
  out.push_back(threshold("sme_grad_drift", rel_g, 1e-6, rel_g <= 1e-6));
  out.push_back(threshold("sme_avg_drift", rel_a, 1e-6, rel_a <= 1e-6, "nonzero components"));
  out.push_back(threshold("sme_dist_q_drift", rel_q, 1e-6, rel_q <= 1e-6));

  const SphereField c4 = run_single(sme, u0, 4e-4, 1.0, seed);
  const SphereField c2 = run_single(sme, u0, 2e-4, 1.0, seed);
  out.push_back(order_check("sme_dt_order", {field_distance(c4, c2), field_distance(c2, u1)}, 1.8, 2.2));

  // Rigid noise: one rotation for the whole field.
  const ModelSpec ssme(ModelKind::ssme, 0.0, NoiseIntensity::constant(grid, 0.0));
  SchemeConfig sc;
  sc.dt = 1e-3;
  TrajectoryState st(u0, ssme, sc, Substream(seed, 0));
  double worst_g = 0.0, worst_a = 0.0;
  double g = dirichlet_energy(grid, st.u.values());
  double a = space_average(grid, st.u.values()).norm();
  for (int k = 0; k < 10000; ++k) {
    noise_substep(st, std::sqrt(sc.dt) * st.rng.next_normal3());
    const double g2 = dirichlet_energy(grid, st.u.values());
    const double a2 = space_average(grid, st.u.values()).norm();
    worst_g = std::max(worst_g, std::abs(g2 - g) / g);
    worst_a = std::max(worst_a, std::abs(a2 - a) / a);
    g = g2;
    a = a2;
  }
  out.push_back(threshold("ssme_grad_per_step", worst_g, 1e-13, worst_g <= 1e-13));
  out.push_back(threshold("ssme_avg_norm_per_step", worst_a, 1e-13, worst_a <= 1e-13));
  return out;
}

std::vector<CheckResult> suite_stationary(std::uint64_t seed, unsigned threads) {
  RunConfig cfg;
  cfg.kind = ModelKind::llg_fluc_diss;
  cfg.nu = 0.5;
  cfg.h.family = "cosine";
  cfg.h.alpha = 0.1;
  cfg.length = kTwoPi;
  cfg.n = 64;
  cfg.scheme.dt = 2e-4;
  cfg.initial = InitialConstant{Vec3(0.0, 0.0, 1.0)};
  cfg.t_burn_in = 5.0;
  cfg.t_total = 20.0;
  cfg.sample_stride = 250;
  cfg.n_trajectories = 16;
  cfg.master_seed = seed;
  cfg.threads = threads;
  cfg.checks.energy_s = 0.0;
  cfg.checks.energy_t = 1.0;
  return run_experiment(cfg, cfg.nu, "verify").checks;
}

std::vector<CheckResult> suite_sbm(std::uint64_t seed, unsigned threads, std::size_t m) {
  std::vector<CheckResult> out;
  const Grid1D grid(1.0, 3);
  const ModelSpec spec(ModelKind::spherical_bm, 0.0, NoiseIntensity::constant(grid, 0.0));
  const Vec3 y0(0.0, 0.0, 1.0);
  const SphereField u0(grid, VectorField(3, y0));
  Accumulator mean[2];
  for (int s = 0; s < 2; ++s) {
    SchemeConfig sc;
    sc.dt = 1e-3;
    sc.kind = s == 0 ? SchemeKind::strang_rotation : SchemeKind::euler_ito_projected;
    std::vector<double> v(m);
    parallel_for(m, threads, [&](std::size_t i) {
      v[i] = run_single_state(spec, u0, sc, seed, i, 1.0)[0].dot(y0);
    });
    for (double x : v) mean[s].add_batch(std::span<const double>(&x, 1));
  }
  const double target = std::exp(-1.0);
  for (int s = 0; s < 2; ++s) {
    CheckResult c;
    c.name = s == 0 ? "sbm_mean_strang" : "sbm_mean_euler";
    c.target = target;
    c.estimate = mean[s].mean();
    c.std_error = mean[s].std_error();
    c.verdict = decide(c.estimate, target, c.std_error, 0.0, {});
    out.push_back(c);
  }
  {
    CheckResult c;
    c.name = "sbm_schemes_agree";
    c.target = 0.0;
    c.estimate = mean[0].mean() - mean[1].mean();
    c.std_error = std::hypot(mean[0].std_error(), mean[1].std_error());
    c.verdict = decide(c.estimate, 0.0, c.std_error, 0.0, {});
    out.push_back(c);
  }
  // Isotropy at t = 5.
  SchemeConfig sc;
  sc.dt = 1e-3;
  std::vector<Vec3> ys(m);
  parallel_for(m, threads, [&](std::size_t i) {
    ys[i] = run_single_state(spec, u0, sc, seed + 1, i, 5.0)[0];
  });
  for (int a = 0; a < 3; ++a) {
    for (int b = a; b < 3; ++b) {
      Accumulator acc;
      for (const auto& y : ys) {
        const double v = y[a] * y[b];
        acc.add_batch(std::span<const double>(&v, 1));
      }
      CheckResult c;
      c.name = "sbm_second_moment_" + std::to_string(a + 1) + std::to_string(b + 1);
      c.target = a == b ? 1.0 / 3.0 : 0.0;
      c.estimate = acc.mean();
      c.std_error = acc.std_error();
      c.verdict = decide(c.estimate, c.target, c.std_error, 0.0, {});
      out.push_back(c);
    }
  }
  return out;
}

std::vector<CheckResult> suite_bound() {
  std::vector<CheckResult> out;
  const BoundResult b = lower_bound_cosine(0.1, 1);
  out.push_back(threshold("cosine_bound_range", b.lambda, 0.2283,
                          b.lambda >= 0.2278 && b.lambda <= 0.2288, "accepted range [0.2278, 0.2288]"));
  const double bis = bound_root_bisection(b.A, b.B, b.R);
  out.push_back(threshold("bisection_agreement", std::abs(bis - b.lambda), 1e-10,
                          std::abs(bis - b.lambda) <= 1e-10));
  const Grid1D grid(kTwoPi, 2049);
  const BoundResult g = lower_bound_general({h_moments(NoiseIntensity::cosine(grid, 0.1, 1)), 1.0, kTwoPi});
  CheckResult rep;
  rep.name = "published_comparison";
  rep.target = kPublishedCosineBound;
  rep.estimate = b.lambda;
  rep.verdict = Verdict::reported;
  rep.note = "published 0.2298 vs computed " + format_number(b.lambda) +
             "; general form with quadrature moments gives " + format_number(g.lambda);
  out.push_back(rep);
  return out;
}

std::vector<CheckResult> suite_transforms() {
  std::vector<CheckResult> out;
  {
    const Grid1D grid(kTwoPi, 257);
    const SphereField u = make_initial(InitialGreatCircle{1.3}, grid);
    const double r = arclength_residual(bcf_transform(u));
    out.push_back(threshold("arclength_exact", r, 1e-14, r <= 1e-14));
  }
  std::vector<double> errs;
  for (std::size_t n : {33u, 65u, 129u}) {
    const Grid1D grid(kTwoPi, n);
    const ModelSpec sme(ModelKind::sme, 0.0, NoiseIntensity::constant(grid, 0.0));
    // dt tied to dx^2: the semi-discrete residual vanishes, so what is left
    // is the O(dt^2) time error.
    SchemeConfig sc;
    sc.dt = 0.2 * grid.dx() * grid.dx();
    TrajectoryState st(make_initial(InitialGreatCircle{1.5}, grid), sme, sc, Substream(1, 0));
    std::vector<CurveSnapshot> snaps;
    integrate(st, 0.5, [&](const TrajectoryState& s) { snaps.push_back({s.t, bcf_transform(s.u)}); }, 1);
    errs.push_back(bcf_residual(snaps).residual);
  }
  out.push_back(order_check("bcf_residual_order", errs, 1.8));
  {
    const Grid1D grid(kTwoPi, 257);
    VectorField v(grid.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = Vec3(std::cos(grid.x(i)), std::sin(grid.x(i)), 0.0);
    const HashimotoField f = hashimoto(SphereField(grid, std::move(v)));
    double ek = 0.0, et = 0.0, eq = 0.0;
    for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
      ek = std::max(ek, std::abs(f.k[i] - 1.0));
      et = std::max(et, std::abs(f.tau[i]));
      eq = std::max(eq, std::abs(f.q[i] - std::complex<double>(1.0, 0.0)));
    }
    const double e = std::max({ek, et, eq});
    out.push_back(threshold("hashimoto_circle", e, 5e-3, e <= 5e-3,
                            "max interior error of k, tau, q"));
  }
  return out;
}

}  // namespace fdsme
