#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string_view>

#include "fdsme/dynamics.hpp"
#include "fdsme/rng.hpp"

namespace fdsme {

enum class SchemeKind {
  // half midpoint drift, exact rotation noise, half midpoint drift
  strang_rotation,
  // Ito Euler-Maruyama with the -g^2 u correction, projected every step
  euler_ito_projected,
};

std::string_view to_string(SchemeKind kind);
SchemeKind parse_scheme_kind(std::string_view name);

struct SchemeConfig {
  double dt = 1e-4;
  SchemeKind kind = SchemeKind::strang_rotation;
  double fp_tol = 1e-12;
  int fp_max_iter = 50;

  void validate() const;
};

// dt <= 0.2 dx^2 keeps the midpoint fixed point a strong contraction.
double default_dt(const Grid1D& grid);

/// One stochastic trajectory. Confined to one worker at a time.
struct TrajectoryState {
  TrajectoryState(SphereField u, ModelSpec spec, SchemeConfig scheme, Substream rng);

  double t = 0.0;
  std::uint64_t steps = 0;
  SphereField u;
  Substream rng;
  ModelSpec spec;
  SchemeConfig scheme;

  // Cached noise coefficient and midpoint scratch (component-major).
  ScalarField g;
  bool g_space_constant = false;
  std::vector<double> work;
  int last_fp_iterations = 0;
};

/// Node-wise Rodrigues rotation of u_i by angle |omega_i| about omega_i.
SphereField rotation_step(const SphereField& u, std::span<const Vec3> omega);

// Rotate every node by g(x_i) dW: the Stratonovich flow of du = g u x o dW
// with the increment frozen over the substep.
void noise_substep(TrajectoryState& state, const Vec3& dW);

/// Implicit midpoint for du = m x G(m), G(m) = m'' - nu m x m''. Each
/// fixed-point sweep applies the Cayley rotation solving
/// u' - u = dt m x G with G frozen, so node norms stay at 1 to rounding
/// whether or not the iteration has converged. Iteration stops once the
/// last update, or the geometric tail d_k^2 / (d_{k-1} - d_k) bounding the
/// remaining error, is below fp_tol.
void drift_substep_midpoint(TrajectoryState& state, double dt_eff);

void step(TrajectoryState& state);
void step(TrajectoryState& state, double dt);

using Observer = std::function<void(const TrajectoryState&)>;

/// Steps until t_end (the last step may be shorter). The observer sees the
/// state whenever the global step count is a multiple of sample_stride,
/// including step 0.
void integrate(TrajectoryState& state, double t_end, const Observer& observer,
               std::size_t sample_stride);

// Versioned binary checkpoint: t, step count, field, substream position and
// the digest of the run configuration.
void save_checkpoint(const std::filesystem::path& path, const TrajectoryState& state,
                     std::uint64_t config_digest);
TrajectoryState load_checkpoint(const std::filesystem::path& path, const ModelSpec& spec,
                                const SchemeConfig& scheme, std::uint64_t config_digest);

}  // namespace fdsme
