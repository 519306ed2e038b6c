#include "fdsme/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>

#include "fdsme/errors.hpp"

namespace fdsme {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool at_or_after(double t, double t0) { return t >= t0 - 1e-9 * std::max(1.0, std::abs(t0)); }
bool at_or_before(double t, double t0) { return t <= t0 + 1e-9 * std::max(1.0, std::abs(t0)); }
}  // namespace

ObservableRecord observe(const SphereField& u, const NoiseIntensity& h, double t) {
  const Grid1D& grid = u.grid();
  check_size(grid, h.h().size(), "observe");
  const std::size_t n = u.size();
  const auto v = u.values();
  const double inv_dx2 = 1.0 / (grid.dx() * grid.dx());
  const double inv_2dx = 0.5 / grid.dx();
  const ScalarField e = gradient_density(grid, v);
  const auto hv = h.h();

  ObservableRecord r;
  r.t = t;
  Vec3 avg = Vec3::Zero(), hu = Vec3::Zero(), h2u = Vec3::Zero(), ue = Vec3::Zero();
  double d1_l4 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = grid.weight(i);
    const Vec3 lap = laplacian_at(v, i, inv_dx2);
    const Vec3 d1 = (i == 0 || i + 1 == n) ? Vec3::Zero() : Vec3(inv_2dx * (v[i + 1] - v[i - 1]));
    const double d1sq = d1.squaredNorm();
    r.lap_l2_sq += w * lap.squaredNorm();
    r.cross_lap_l2_sq += w * v[i].cross(lap).squaredNorm();
    r.grad_l4_4 += w * e[i] * e[i];
    d1_l4 += w * d1sq * d1sq;
    avg += w * v[i];
    hu += (w * hv[i]) * v[i];
    h2u += (w * hv[i] * hv[i]) * v[i];
    ue += (w * e[i]) * v[i];
  }
  const double inv_len = 1.0 / grid.length();
  avg *= inv_len;
  hu *= inv_len;
  h2u *= inv_len;
  ue *= inv_len;
  r.grad_l2_sq = dirichlet_energy(grid, v);
  r.avg = avg;
  r.avg_hu_sq = hu.squaredNorm();
  r.avg_h2u_dot_avg = h2u.dot(avg);
  r.avg_ugrad2_dot_avg = ue.dot(avg);
  r.fund_residual = r.lap_l2_sq - r.cross_lap_l2_sq - d1_l4;
  return r;
}

std::string_view obs_name(Obs o) {
  switch (o) {
    case Obs::grad_l2_sq: return "grad_l2_sq";
    case Obs::grad_l4_4: return "grad_l4_4";
    case Obs::lap_l2_sq: return "lap_l2_sq";
    case Obs::cross_lap_l2_sq: return "cross_lap_l2_sq";
    case Obs::avg_x: return "avg_x";
    case Obs::avg_y: return "avg_y";
    case Obs::avg_z: return "avg_z";
    case Obs::avg_norm: return "avg_norm";
    case Obs::avg_hu_sq: return "avg_hu_sq";
    case Obs::avg_h2u_dot_avg: return "avg_h2u_dot_avg";
    case Obs::avg_ugrad2_dot_avg: return "avg_ugrad2_dot_avg";
    case Obs::fund_residual: return "fund_residual";
    case Obs::balance: return "balance";
  }
  return "?";
}

double obs_value(const ObservableRecord& r, Obs o) {
  switch (o) {
    case Obs::grad_l2_sq: return r.grad_l2_sq;
    case Obs::grad_l4_4: return r.grad_l4_4;
    case Obs::lap_l2_sq: return r.lap_l2_sq;
    case Obs::cross_lap_l2_sq: return r.cross_lap_l2_sq;
    case Obs::avg_x: return r.avg.x();
    case Obs::avg_y: return r.avg.y();
    case Obs::avg_z: return r.avg.z();
    case Obs::avg_norm: return r.avg.norm();
    case Obs::avg_hu_sq: return r.avg_hu_sq;
    case Obs::avg_h2u_dot_avg: return r.avg_h2u_dot_avg;
    case Obs::avg_ugrad2_dot_avg: return r.avg_ugrad2_dot_avg;
    case Obs::fund_residual: return r.fund_residual;
    case Obs::balance: return r.avg_ugrad2_dot_avg - r.avg_h2u_dot_avg + r.avg_hu_sq;
  }
  return kNaN;
}

void Accumulator::add_batch(std::span<const double> samples) {
  if (samples.empty()) return;
  double s = 0.0;
  for (double x : samples) s += x;
  count_ += samples.size();
  sum_ += s;
  const double bm = s / static_cast<double>(samples.size());
  ++batches_;
  const double delta = bm - bmean_;
  bmean_ += delta / static_cast<double>(batches_);
  bm2_ += delta * (bm - bmean_);
}

void Accumulator::merge(const Accumulator& o) {
  if (o.batches_ == 0) return;
  if (batches_ == 0) {
    *this = o;
    return;
  }
  const double na = static_cast<double>(batches_), nb = static_cast<double>(o.batches_);
  const double delta = o.bmean_ - bmean_;
  const double n = na + nb;
  bmean_ += delta * nb / n;
  bm2_ += o.bm2_ + delta * delta * na * nb / n;
  batches_ += o.batches_;
  count_ += o.count_;
  sum_ += o.sum_;
}

double Accumulator::mean() const {
  return count_ == 0 ? kNaN : sum_ / static_cast<double>(count_);
}

double Accumulator::std_error() const {
  if (batches_ < 2) return kNaN;
  const double b = static_cast<double>(batches_);
  return std::sqrt(std::max(0.0, bm2_) / (b - 1.0) / b);
}

void EnsembleStats::add_records(std::span<const ObservableRecord> records, std::size_t batches) {
  const std::size_t k = records.size();
  if (k == 0) return;
  batches = std::clamp<std::size_t>(batches, 1, k);
  std::vector<double> buf(k);
  for (std::size_t c = 0; c < kObsCount; ++c) {
    const auto o = static_cast<Obs>(c);
    for (std::size_t j = 0; j < k; ++j) buf[j] = obs_value(records[j], o);
    for (std::size_t b = 0; b < batches; ++b) {
      const std::size_t lo = b * k / batches, hi = (b + 1) * k / batches;
      acc_[c].add_batch(std::span<const double>(buf).subspan(lo, hi - lo));
    }
  }
}

void EnsembleStats::merge(const EnsembleStats& other) {
  for (std::size_t c = 0; c < kObsCount; ++c) acc_[c].merge(other.acc_[c]);
}

EnsembleStats stationary_estimate(std::span<const TrajectoryRecords> trajectories, double burn_in,
                                  std::size_t stride) {
  if (trajectories.empty()) throw EstimationError("stationary_estimate: no trajectories");
  if (stride == 0) stride = 1;
  const std::size_t m = trajectories.size();
  const std::size_t per = std::max<std::size_t>(1, (32 + m - 1) / m);
  EnsembleStats total;
  std::vector<ObservableRecord> kept;
  for (std::size_t j = 0; j < m; ++j) {
    kept.clear();
    std::size_t seen = 0;
    for (const auto& r : trajectories[j]) {
      if (!at_or_after(r.t, burn_in)) continue;
      if (seen++ % stride == 0) kept.push_back(r);
    }
    if (kept.size() < 64) {
      std::ostringstream msg;
      msg << "stationary_estimate: trajectory " << j << " has " << kept.size()
          << " samples after burn-in " << burn_in << " (stride " << stride
          << "); at least 64 are required";
      throw EstimationError(msg.str());
    }
    EnsembleStats one;
    one.add_records(kept, std::min(per, kept.size() / 8));
    total.merge(one);
  }
  if (total.batches() < kMinBatches) {
    std::ostringstream msg;
    msg << "stationary_estimate: " << total.batches() << " batches; at least " << kMinBatches
        << " are required";
    throw EstimationError(msg.str());
  }
  return total;
}

EnsembleStats cross_section(std::span<const TrajectoryRecords> trajectories, std::size_t k) {
  EnsembleStats s;
  for (const auto& tr : trajectories) {
    if (k >= tr.size()) throw EstimationError("cross_section: record index out of range");
    s.add_records(std::span<const ObservableRecord>(&tr[k], 1), 1);
  }
  return s;
}

double mixing_proxy(std::span<const TrajectoryRecords> trajectories) {
  if (trajectories.size() < 2) throw EstimationError("mixing_proxy: need at least 2 trajectories");
  std::size_t k = trajectories.front().size();
  for (const auto& tr : trajectories) k = std::min(k, tr.size());
  if (k < 4) throw EstimationError("mixing_proxy: need at least 4 records per trajectory");
  std::vector<double> mean(k), se(k);
  for (std::size_t i = 0; i < k; ++i) {
    const EnsembleStats s = cross_section(trajectories, i);
    mean[i] = s.mean(Obs::grad_l2_sq);
    se[i] = s.std_error(Obs::grad_l2_sq);
  }
  Accumulator tail;
  for (std::size_t i = k / 2; i < k; ++i) tail.add_batch(std::span<const double>(&mean[i], 1));
  const double ref = tail.mean();
  const double ref_se = tail.std_error();
  std::size_t first = k - 1;
  for (std::size_t i = k; i-- > 0;) {
    if (std::abs(mean[i] - ref) > se[i] + ref_se) break;
    first = i;
  }
  return trajectories.front()[first].t - trajectories.front()[0].t;
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::inconclusive: return "inconclusive";
    case Verdict::reported: return "reported";
    case Verdict::not_applicable: return "not_applicable";
  }
  return "?";
}

Verdict decide(double estimate, double target, double se, double allowance, const Tolerance& tol) {
  if (!std::isfinite(estimate)) return Verdict::fail;
  if (!std::isfinite(se)) return Verdict::inconclusive;
  if (target != 0.0 && se > tol.inconclusive_ratio * std::abs(target)) return Verdict::inconclusive;
  return std::abs(estimate - target) <= tol.n_sigma * se + allowance ? Verdict::pass
                                                                     : Verdict::fail;
}

namespace {
CheckResult make_check(std::string name, double target, double estimate, double se,
                       double allowance, const Tolerance& tol) {
  CheckResult c;
  c.name = std::move(name);
  c.target = target;
  c.estimate = estimate;
  c.std_error = se;
  c.allowance = allowance;
  c.verdict = decide(estimate, target, se, allowance, tol);
  return c;
}
}  // namespace

CheckResult check_moment_identity(const EnsembleStats& stats, const NoiseIntensity& h,
                                  const Tolerance& tol) {
  return make_check("moment_identity", h_moments(h).grad_l2_sq, stats.mean(Obs::cross_lap_l2_sq),
                    stats.std_error(Obs::cross_lap_l2_sq), tol.allowance(h.grid()), tol);
}

CheckResult check_balance_identity(const EnsembleStats& stats, const NoiseIntensity& h,
                                   const Tolerance& tol) {
  CheckResult c = make_check("balance_identity", 0.0, stats.mean(Obs::balance),
                             stats.std_error(Obs::balance), tol.allowance(h.grid()), tol);
  std::ostringstream note;
  note << "ugrad2 " << format_number(stats.mean(Obs::avg_ugrad2_dot_avg)) << ", h2u "
       << format_number(stats.mean(Obs::avg_h2u_dot_avg)) << ", hu_sq "
       << format_number(stats.mean(Obs::avg_hu_sq));
  c.note = note.str();
  return c;
}

CheckResult check_energy_identity(std::span<const TrajectoryRecords> trajectories, double s,
                                  double t, double nu, const NoiseIntensity& h,
                                  const Tolerance& tol) {
  if (!(t > s)) throw InvalidInput("check_energy_identity: need s < t");
  if (trajectories.size() < 2)
    throw EstimationError("check_energy_identity: need at least 2 trajectories");
  const double g = h_moments(h).grad_l2_sq;
  Accumulator acc;
  for (std::size_t j = 0; j < trajectories.size(); ++j) {
    const auto& tr = trajectories[j];
    std::size_t a = tr.size(), b = 0;
    for (std::size_t i = 0; i < tr.size(); ++i) {
      if (!at_or_after(tr[i].t, s) || !at_or_before(tr[i].t, t)) continue;
      a = std::min(a, i);
      b = i;
    }
    if (a >= tr.size() || std::abs(tr[a].t - s) > 1e-9 * std::max(1.0, std::abs(s)) ||
        std::abs(tr[b].t - t) > 1e-9 * std::max(1.0, std::abs(t)))
      throw EstimationError("check_energy_identity: trajectory " + std::to_string(j) +
                            " has no records at both ends of [s, t]");
    double integral = 0.0;
    for (std::size_t i = a; i < b; ++i)
      integral += 0.5 * (tr[i + 1].t - tr[i].t) *
                  (tr[i].cross_lap_l2_sq + tr[i + 1].cross_lap_l2_sq);
    const double r = tr[b].grad_l2_sq - tr[a].grad_l2_sq + 2.0 * nu * integral -
                     2.0 * nu * (t - s) * g;
    acc.add_batch(std::span<const double>(&r, 1));
  }
  CheckResult c = make_check("energy_identity", 0.0, acc.mean(), acc.std_error(),
                             tol.allowance(h.grid()), tol);
  c.note = "2 nu (t - s) ||h'||^2 = " + format_number(2.0 * nu * (t - s) * g);
  return c;
}

std::vector<CheckResult> check_inequalities(const EnsembleStats& stats, const NoiseIntensity& h,
                                            const Tolerance& tol) {
  const double g = h_moments(h).grad_l2_sq;
  const double allowance = tol.allowance(h.grid());
  std::vector<CheckResult> out;

  CheckResult bound;
  bound.name = "cross_lap_bound";
  bound.target = g;
  bound.estimate = stats.mean(Obs::cross_lap_l2_sq);
  bound.std_error = stats.std_error(Obs::cross_lap_l2_sq);
  bound.allowance = allowance;
  if (!std::isfinite(bound.estimate)) {
    bound.verdict = Verdict::fail;
  } else if (!std::isfinite(bound.std_error)) {
    bound.verdict = Verdict::inconclusive;
  } else {
    bound.verdict = bound.estimate - tol.n_sigma * bound.std_error <= g + allowance
                        ? Verdict::pass
                        : Verdict::fail;
  }
  bound.note = "one-sided: estimate <= target";
  out.push_back(bound);

  const double denom = g + 1.0;
  for (Obs o : {Obs::lap_l2_sq, Obs::grad_l4_4, Obs::grad_l2_sq}) {
    CheckResult r;
    r.name = std::string(obs_name(o)) + "_ratio";
    r.target = kNaN;
    r.estimate = stats.mean(o) / denom;
    r.std_error = stats.std_error(o) / denom;
    r.verdict = Verdict::reported;
    r.note = "mean / (||h'||^2 + 1); no constant to compare against";
    out.push_back(r);
  }
  return out;
}

double min_gradient(const TrajectoryRecords& records, double from_t) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& r : records)
    if (at_or_after(r.t, from_t)) m = std::min(m, r.grad_l2_sq);
  return m;
}

CheckResult check_positive_gradient(std::span<const TrajectoryRecords> trajectories,
                                    const NoiseIntensity& h, double floor, double from_t) {
  CheckResult c;
  c.name = "positive_gradient";
  c.target = 1.0;
  c.allowance = floor;
  if (h_moments(h).grad_l2_sq == 0.0) {
    c.verdict = Verdict::not_applicable;
    c.estimate = kNaN;
    c.std_error = kNaN;
    c.note = "h' vanishes";
    return c;
  }
  std::size_t ok = 0;
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& tr : trajectories) {
    const double m = min_gradient(tr, from_t);
    worst = std::min(worst, m);
    if (m > floor) ++ok;
  }
  const std::size_t total = trajectories.size();
  c.estimate = total == 0 ? kNaN : static_cast<double>(ok) / static_cast<double>(total);
  c.std_error = 0.0;
  c.verdict = (total > 0 && ok == total) ? Verdict::pass : Verdict::fail;
  c.note = std::to_string(ok) + " of " + std::to_string(total) +
           " trajectories above floor; smallest minimum " + format_number(worst);
  return c;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_stats_csv(std::ostream& out, std::span<const StatsRow> rows) {
  out << "run_id,nu,t";
  for (std::size_t c = 0; c < kObsCount; ++c) {
    const auto name = obs_name(static_cast<Obs>(c));
    out << ',' << name << "_mean," << name << "_stderr," << name << "_count";
  }
  out << '\n';
  for (const auto& row : rows) {
    out << row.run_id << ',' << format_number(row.nu) << ',' << format_number(row.t);
    for (std::size_t c = 0; c < kObsCount; ++c) {
      const auto& a = row.stats[static_cast<Obs>(c)];
      out << ',' << format_number(a.mean()) << ',' << format_number(a.std_error()) << ','
          << a.count();
    }
    out << '\n';
  }
}

}  // namespace fdsme
