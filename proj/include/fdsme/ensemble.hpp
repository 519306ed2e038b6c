#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "fdsme/schemes.hpp"
#include "fdsme/statistics.hpp"

namespace fdsme {

/// Calls fn(i) for i in [0, count) on `threads` workers. Work is handed out
/// one index at a time; callers store results by index, so the outcome does
/// not depend on scheduling. If any call throws, the exception of the
/// lowest failing index is rethrown after all workers stop.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn);

struct FieldSnapshot {
  double t = 0.0;
  SphereField u;
};

struct EnsembleJob {
  ModelSpec spec;
  SchemeConfig scheme;
  SphereField initial;
  std::uint64_t master_seed = 1;
  std::size_t trajectories = 1;
  double t_end = 1.0;
  std::size_t sample_stride = 1;
  unsigned threads = 1;
  // Field snapshots of the first `snapshot_trajectories` trajectories at
  // every snapshot_stride-th sample.
  std::size_t snapshot_trajectories = 0;
  std::size_t snapshot_stride = 1;
};

struct EnsembleResult {
  std::vector<TrajectoryRecords> records;
  std::vector<std::vector<FieldSnapshot>> snapshots;
};

EnsembleResult run_ensemble(const EnsembleJob& job);

}  // namespace fdsme
