#include "fdsme/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

namespace fdsme {

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  std::mutex mu;
  std::size_t failed_index = count;
  std::exception_ptr failure;

  auto worker = [&] {
    for (;;) {
      if (stop.load()) return;
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (i < failed_index) {
          failed_index = i;
          failure = std::current_exception();
        }
        stop.store(true);
      }
    }
  };

  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
}

EnsembleResult run_ensemble(const EnsembleJob& job) {
  EnsembleResult result;
  result.records.resize(job.trajectories);
  const std::size_t nsnap = std::min(job.snapshot_trajectories, job.trajectories);
  result.snapshots.resize(nsnap);
  const std::size_t snap_stride = std::max<std::size_t>(1, job.snapshot_stride);

  parallel_for(job.trajectories, job.threads, [&](std::size_t index) {
    TrajectoryState state(job.initial, job.spec, job.scheme,
                          derive_substream(job.master_seed, index));
    auto& records = result.records[index];
    std::vector<FieldSnapshot>* snaps = index < nsnap ? &result.snapshots[index] : nullptr;
    std::size_t sample = 0;
    integrate(state, job.t_end,
              [&](const TrajectoryState& s) {
                records.push_back(observe(s.u, s.spec.h, s.t));
                if (snaps && sample % snap_stride == 0) snaps->push_back({s.t, s.u});
                ++sample;
              },
              job.sample_stride);
    // The last partial step may fall between samples; always record the end.
    if (records.empty() || records.back().t != state.t) {
      records.push_back(observe(state.u, state.spec.h, state.t));
      if (snaps) snaps->push_back({state.t, state.u});
    }
  });
  return result;
}

}  // namespace fdsme
