#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fdsme/config.hpp"
#include "fdsme/ensemble.hpp"
#include "fdsme/statistics.hpp"

namespace fdsme {

enum ExitStatus : int { kExitOk = 0, kExitCheckFailed = 1, kExitConfigError = 2, kExitRuntimeError = 3 };

/// fail always fails; inconclusive fails only in strict mode.
int exit_status(std::span<const CheckResult> checks, bool strict);

struct RunArtifacts {
  std::string stats_csv;
  std::string stationary_csv;  // empty when no stationary estimate was made
  std::string verdicts_json;
  std::string snapshots_csv;   // empty unless snapshots are enabled
  std::string curves_csv;
  std::vector<CheckResult> checks;
  EnsembleResult ensemble;
  std::optional<EnsembleStats> stationary;
  double burn_in = 0.0;
};

/// Integrates the ensemble for one viscosity and evaluates the checks that
/// apply to the model. Nothing here depends on cfg.threads except speed.
RunArtifacts run_experiment(const RunConfig& cfg, double nu, const std::string& run_id,
                            std::ostream* log = nullptr);

void write_artifacts(const RunArtifacts& a, const std::filesystem::path& dir);

std::string verdicts_to_json(std::span<const CheckResult> checks, const RunConfig* cfg,
                             const std::string& run_id, double nu);

struct SweepRow {
  double nu = 0.0;
  EnsembleStats stats;
  std::vector<CheckResult> checks;
  std::string flags;
};
std::string sweep_summary_csv(const RunConfig& cfg, std::span<const SweepRow> rows);

struct CliOptions {
  std::filesystem::path config;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  bool strict = false;
  std::optional<std::filesystem::path> out;
  std::string suite;
  double alpha = 0.1;
  int k = 1;
  double c_p = 1.0;
};

RunConfig resolve_config(const CliOptions& opt);

int command_run(const CliOptions& opt, std::ostream& out);
int command_sweep(const CliOptions& opt, std::ostream& out);
int command_verify(const CliOptions& opt, std::ostream& out);
int command_bound(const CliOptions& opt, std::ostream& out);
int command_transform(const CliOptions& opt, std::ostream& out);

}  // namespace fdsme
