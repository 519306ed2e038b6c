#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fdsme/fields.hpp"

namespace fdsme {

/// Snapshot observables of one field. Gradient quantities use the edge
/// differences of the grid (dirichlet_energy / gradient_density), which is
/// the form the mirrored Laplacian dissipates; fund_residual is built from
/// the central first difference.
struct ObservableRecord {
  double t = 0.0;
  double grad_l2_sq = 0.0;
  double grad_l4_4 = 0.0;
  double lap_l2_sq = 0.0;
  double cross_lap_l2_sq = 0.0;
  Vec3 avg = Vec3::Zero();
  double avg_hu_sq = 0.0;
  double avg_h2u_dot_avg = 0.0;
  double avg_ugrad2_dot_avg = 0.0;
  double fund_residual = 0.0;

  bool operator==(const ObservableRecord&) const = default;
};

ObservableRecord observe(const SphereField& u, const NoiseIntensity& h, double t);

// Scalar channels tracked by EnsembleStats, in CSV column order.
enum class Obs : std::size_t {
  grad_l2_sq,
  grad_l4_4,
  lap_l2_sq,
  cross_lap_l2_sq,
  avg_x,
  avg_y,
  avg_z,
  avg_norm,
  avg_hu_sq,
  avg_h2u_dot_avg,
  avg_ugrad2_dot_avg,
  fund_residual,
  // avg_ugrad2_dot_avg - avg_h2u_dot_avg + avg_hu_sq, per record
  balance,
};
inline constexpr std::size_t kObsCount = 13;

std::string_view obs_name(Obs o);
double obs_value(const ObservableRecord& r, Obs o);

/// Streaming mean plus batch-means error for one scalar.
class Accumulator {
public:
  // One contiguous batch of samples.
  void add_batch(std::span<const double> samples);
  void merge(const Accumulator& other);

  std::uint64_t count() const { return count_; }
  std::uint64_t batches() const { return batches_; }
  double mean() const;
  // sd(batch means) / sqrt(batches); NaN with fewer than 2 batches.
  double std_error() const;

private:
  std::uint64_t count_ = 0;
  double sum_ = 0.0;
  std::uint64_t batches_ = 0;
  double bmean_ = 0.0;
  double bm2_ = 0.0;
};

inline constexpr std::uint64_t kMinBatches = 8;

class EnsembleStats {
public:
  Accumulator& operator[](Obs o) { return acc_[static_cast<std::size_t>(o)]; }
  const Accumulator& operator[](Obs o) const { return acc_[static_cast<std::size_t>(o)]; }

  double mean(Obs o) const { return (*this)[o].mean(); }
  double std_error(Obs o) const { return (*this)[o].std_error(); }
  std::uint64_t count() const { return acc_[0].count(); }
  std::uint64_t batches() const { return acc_[0].batches(); }

  // Splits the records into `batches` contiguous blocks of near-equal size.
  void add_records(std::span<const ObservableRecord> records, std::size_t batches);
  void merge(const EnsembleStats& other);

private:
  std::array<Accumulator, kObsCount> acc_{};
};

using TrajectoryRecords = std::vector<ObservableRecord>;

/// Pools post-burn-in records (every `stride`-th one) of all trajectories.
/// Each trajectory contributes max(1, ceil(32 / M)) contiguous batches.
/// Requires 64 kept samples per trajectory and 8 batches overall.
EnsembleStats stationary_estimate(std::span<const TrajectoryRecords> trajectories, double burn_in,
                                  std::size_t stride = 1);

/// Cross-section over trajectories at the k-th record (one batch each).
EnsembleStats cross_section(std::span<const TrajectoryRecords> trajectories, std::size_t k);

/// Time after which the cross-section mean of grad_l2_sq stays within one
/// standard error of its mean over the last half of the records.
double mixing_proxy(std::span<const TrajectoryRecords> trajectories);

enum class Verdict { pass, fail, inconclusive, reported, not_applicable };
std::string_view to_string(Verdict v);

struct CheckResult {
  std::string name;
  double target = 0.0;
  double estimate = 0.0;
  double std_error = 0.0;
  double allowance = 0.0;
  Verdict verdict = Verdict::reported;
  std::string note;
};

struct Tolerance {
  double n_sigma = 3.0;
  double c_disc = 10.0;  // allowance = c_disc * dx^2
  double inconclusive_ratio = 0.5;

  double allowance(const Grid1D& grid) const { return c_disc * grid.dx() * grid.dx(); }
};

/// pass iff |estimate - target| <= n_sigma * se + allowance; inconclusive
/// when target != 0 and se exceeds inconclusive_ratio * |target|.
Verdict decide(double estimate, double target, double se, double allowance, const Tolerance& tol);

CheckResult check_moment_identity(const EnsembleStats& stats, const NoiseIntensity& h,
                                  const Tolerance& tol = {});
CheckResult check_balance_identity(const EnsembleStats& stats, const NoiseIntensity& h,
                                   const Tolerance& tol = {});

/// Per-trajectory residual
///   D(t) - D(s) + 2 nu int_s^t cross_lap - 2 nu (t - s) ||h'||^2
/// (trapezoid over the records in [s, t]), averaged over the ensemble.
CheckResult check_energy_identity(std::span<const TrajectoryRecords> trajectories, double s,
                                  double t, double nu, const NoiseIntensity& h,
                                  const Tolerance& tol = {});

/// The cross_lap bound gets a verdict; the lap / L4 / grad bounds have no
/// explicit constant and are reported as ratios to ||h'||^2 + 1.
std::vector<CheckResult> check_inequalities(const EnsembleStats& stats, const NoiseIntensity& h,
                                            const Tolerance& tol = {});

/// Every trajectory keeps grad_l2_sq above `floor` at all of its records
/// with t >= from_t. Not applicable when h' vanishes.
CheckResult check_positive_gradient(std::span<const TrajectoryRecords> trajectories,
                                    const NoiseIntensity& h, double floor = 1e-8,
                                    double from_t = 0.0);

/// Minimum of grad_l2_sq over the records with t >= from_t.
double min_gradient(const TrajectoryRecords& records, double from_t = 0.0);

/// Stats CSV: run_id,nu,t followed by <obs>_mean,<obs>_stderr,<obs>_count
/// for every channel in Obs order.
struct StatsRow {
  std::string run_id;
  double nu = 0.0;
  double t = 0.0;
  EnsembleStats stats;
};
void write_stats_csv(std::ostream& out, std::span<const StatsRow> rows);
std::string format_number(double v);

}  // namespace fdsme
