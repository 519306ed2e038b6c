#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "fdsme/dynamics.hpp"
#include "fdsme/schemes.hpp"
#include "fdsme/statistics.hpp"

namespace fdsme {

inline constexpr const char* kVersion = "fdsme 0.1.0";

struct NoiseConfig {
  std::string family = "cosine";  // constant | cosine | tabulated
  double c = 0.0;
  double alpha = 0.1;
  int k = 1;
  std::filesystem::path path;  // tabulated only
};

struct ChecksConfig {
  std::vector<std::string> enabled;  // empty: every check that applies to the model
  Tolerance tol;
  double positive_floor = 1e-8;
  std::size_t positive_trajectories = 64;
  double energy_s = 0.0;
  double energy_t = -1.0;  // < 0: end of the run
  double conservation_tol = 1e-6;
  double c_p = 1.0;
};

struct RunConfig {
  ModelKind kind = ModelKind::llg_fluc_diss;
  double nu = 0.5;
  NoiseConfig h;
  double length = 0.0;  // 0: 2 pi k for the cosine family, else required
  std::size_t n = 64;
  SchemeConfig scheme;
  bool dt_auto = false;
  InitialKind initial = InitialConstant{Vec3(0.0, 0.0, 1.0)};
  double t_burn_in = 0.0;
  bool burn_in_auto = false;
  double t_total = 1.0;
  std::size_t sample_stride = 1;
  std::size_t n_trajectories = 1;
  std::uint64_t master_seed = 1;
  std::vector<double> sweep_nu;
  std::filesystem::path out_dir = "out";
  bool snapshots = false;
  std::size_t snapshot_stride = 1;
  ChecksConfig checks;
  // Not part of the digest: neither changes any emitted number.
  unsigned threads = 1;
  std::filesystem::path base_dir;

  Grid1D grid() const;
  NoiseIntensity noise(const Grid1D& grid) const;
  ModelSpec model(double nu_value) const;
  bool check_enabled(const std::string& name) const;
};

/// Parses and validates; throws ConfigError listing every violation.
RunConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

/// Normalized form with every default filled in (threads and paths omitted).
nlohmann::json to_json(const RunConfig& cfg);

/// FNV-1a 64 of to_json(cfg).dump().
std::uint64_t config_digest(const RunConfig& cfg);
std::string digest_hex(std::uint64_t digest);

}  // namespace fdsme
