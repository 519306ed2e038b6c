#include "fdsme/schemes.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include <Eigen/Geometry>

#include "fdsme/errors.hpp"

namespace fdsme {

using detail::FieldAccess;

std::string_view to_string(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::strang_rotation: return "strang_rotation";
    case SchemeKind::euler_ito_projected: return "euler_ito_projected";
  }
  return "?";
}

SchemeKind parse_scheme_kind(std::string_view name) {
  if (name == "strang_rotation") return SchemeKind::strang_rotation;
  if (name == "euler_ito_projected") return SchemeKind::euler_ito_projected;
  throw ConfigError("unknown scheme kind '" + std::string(name) + "'");
}

void SchemeConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("scheme: dt must be positive");
  if (!(fp_tol > 0.0 && fp_tol < 1e-6)) throw ConfigError("scheme: fp_tol must lie in (0, 1e-6)");
  if (fp_max_iter < 1) throw ConfigError("scheme: fp_max_iter must be at least 1");
}

double default_dt(const Grid1D& grid) { return 0.2 * grid.dx() * grid.dx(); }

TrajectoryState::TrajectoryState(SphereField u_, ModelSpec spec_, SchemeConfig scheme_,
                                 Substream rng_)
    : u(std::move(u_)), rng(rng_), spec(std::move(spec_)), scheme(scheme_) {
  scheme.validate();
  check_size(u.grid(), spec.h.grid().size(), "TrajectoryState");
  g = noise_coefficient(spec);
  g_space_constant = std::all_of(g.begin(), g.end(), [&](double v) { return v == g.front(); });
  work.resize(12 * u.size());
}

namespace {

inline Vec3 rodrigues(const Vec3& u, const Vec3& omega) {
  const double angle = omega.norm();
  if (angle < 1e-14) return u;
  const Vec3 axis = omega / angle;
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return c * u + s * axis.cross(u) + ((1.0 - c) * axis.dot(u)) * axis;
}

}  // namespace

SphereField rotation_step(const SphereField& u, std::span<const Vec3> omega) {
  check_size(u.grid(), omega.size(), "rotation_step");
  VectorField out(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = rodrigues(u[i], omega[i]);
  return FieldAccess::adopt(u.grid(), std::move(out));
}

void noise_substep(TrajectoryState& state, const Vec3& dW) {
  auto& u = FieldAccess::values(state.u);
  if (state.g_space_constant) {
    const Vec3 omega = state.g.front() * dW;
    const double angle = omega.norm();
    if (angle < 1e-14) return;
    // One rotation for the whole field: differences and averages rotate
    // rigidly along with it.
    const Eigen::Matrix3d rot = Eigen::AngleAxisd(angle, omega / angle).toRotationMatrix();
    for (auto& v : u) v = rot * v;
    return;
  }
  // All omega_i are parallel to dW; only the angle varies along x.
  const double len = dW.norm();
  if (len < 1e-300) return;
  const Vec3 axis = dW / len;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double angle = state.g[i] * len;
    if (std::abs(angle) < 1e-14) continue;
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    u[i] = c * u[i] + s * axis.cross(u[i]) + ((1.0 - c) * axis.dot(u[i])) * axis;
  }
}

void drift_substep_midpoint(TrajectoryState& state, double dt_eff) {
  if (!state.spec.has_drift()) return;
  auto& field = FieldAccess::values(state.u);
  const std::size_t n = field.size();
  const double dx = state.u.grid().dx();
  const double inv_dx2 = 1.0 / (dx * dx);
  const double nu = state.spec.damping();
  const double half = -0.5 * dt_eff;

  // Component-major blocks: u (start), p (iterate), m (midpoint), l (m'').
  double* base = state.work.data();
  double* u[3] = {base, base + n, base + 2 * n};
  double* p[3] = {base + 3 * n, base + 4 * n, base + 5 * n};
  double* m[3] = {base + 6 * n, base + 7 * n, base + 8 * n};
  double* l[3] = {base + 9 * n, base + 10 * n, base + 11 * n};
  for (std::size_t i = 0; i < n; ++i) {
    for (int c = 0; c < 3; ++c) u[c][i] = p[c][i] = m[c][i] = field[i][c];
  }

  double diff = 0.0;
  double prev = 0.0;
  for (int iter = 1; iter <= state.scheme.fp_max_iter; ++iter) {
    for (int c = 0; c < 3; ++c) {
      const double* a = m[c];
      double* o = l[c];
      o[0] = 2.0 * inv_dx2 * (a[1] - a[0]);
      for (std::size_t i = 1; i + 1 < n; ++i) o[i] = inv_dx2 * (a[i + 1] - 2.0 * a[i] + a[i - 1]);
      o[n - 1] = 2.0 * inv_dx2 * (a[n - 2] - a[n - 1]);
    }
    diff = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double l0 = l[0][i], l1 = l[1][i], l2 = l[2][i];
      const double m0 = m[0][i], m1 = m[1][i], m2 = m[2][i];
      const double a0 = half * (l0 - nu * (m1 * l2 - m2 * l1));
      const double a1 = half * (l1 - nu * (m2 * l0 - m0 * l2));
      const double a2 = half * (l2 - nu * (m0 * l1 - m1 * l0));
      const double u0 = u[0][i], u1 = u[1][i], u2 = u[2][i];
      // Cayley step u' = u + a x (u + u'), i.e. u' = u + 2/(1+|a|^2) (a x u + a x (a x u)).
      // Adding a small increment to u keeps |u'| = 1 to rounding over long runs.
      const double aa = a0 * a0 + a1 * a1 + a2 * a2;
      const double au = a0 * u0 + a1 * u1 + a2 * u2;
      const double k = 2.0 / (1.0 + aa);
      const double w0 = a1 * u2 - a2 * u1;
      const double w1 = a2 * u0 - a0 * u2;
      const double w2 = a0 * u1 - a1 * u0;
      const double v0 = u0 + k * (w0 + au * a0 - aa * u0);
      const double v1 = u1 + k * (w1 + au * a1 - aa * u1);
      const double v2 = u2 + k * (w2 + au * a2 - aa * u2);
      diff = std::max({diff, std::abs(v0 - p[0][i]), std::abs(v1 - p[1][i]), std::abs(v2 - p[2][i])});
      p[0][i] = v0;
      p[1][i] = v1;
      p[2][i] = v2;
    }
    const double tol = state.scheme.fp_tol;
    if (diff <= tol || (iter > 1 && diff < prev && diff * diff <= tol * (prev - diff))) {
      for (std::size_t i = 0; i < n; ++i) field[i] = Vec3(p[0][i], p[1][i], p[2][i]);
      state.last_fp_iterations = iter;
      return;
    }
    if (!std::isfinite(diff)) break;
    prev = diff;
    for (int c = 0; c < 3; ++c) {
      for (std::size_t i = 0; i < n; ++i) m[c][i] = 0.5 * (u[c][i] + p[c][i]);
    }
  }
  std::ostringstream msg;
  msg << "midpoint fixed point did not converge in " << state.scheme.fp_max_iter
      << " iterations (last update " << diff << ", dt " << dt_eff << "); reduce dt";
  throw StepSizeError(msg.str());
}

void step(TrajectoryState& state) { step(state, state.scheme.dt); }

void step(TrajectoryState& state, double dt) {
  // Drawn unconditionally so every model consumes the stream identically.
  const Vec3 dW = std::sqrt(dt) * state.rng.next_normal3();
  switch (state.scheme.kind) {
    case SchemeKind::strang_rotation:
      drift_substep_midpoint(state, 0.5 * dt);
      noise_substep(state, dW);
      drift_substep_midpoint(state, 0.5 * dt);
      break;
    case SchemeKind::euler_ito_projected: {
      const VectorField drift = drift_model(state.u, state.spec);
      const auto u = state.u.values();
      VectorField raw(u.size());
      for (std::size_t i = 0; i < u.size(); ++i) {
        const double g = state.g[i];
        raw[i] = u[i] + dt * (drift[i] - (g * g) * u[i]) + g * u[i].cross(dW);
      }
      state.u = project_sphere(state.u.grid(), raw);
      break;
    }
  }
  state.t += dt;
  ++state.steps;
}

void integrate(TrajectoryState& state, double t_end, const Observer& observer,
               std::size_t sample_stride) {
  const double dt = state.scheme.dt;
  if (t_end < state.t - 1e-12 * std::max(1.0, std::abs(t_end)))
    throw InvalidInput("integrate: t_end lies before the current time");
  if (sample_stride == 0) sample_stride = 1;

  auto notify = [&] {
    if (!observer || state.steps % sample_stride != 0) return;
    try {
      observer(state);
    } catch (const std::exception& e) {
      std::ostringstream msg;
      msg << "observer failed on trajectory " << state.rng.index() << " at t=" << state.t
          << ": " << e.what();
      throw TrajectoryError(msg.str(), static_cast<long long>(state.rng.index()), state.t);
    }
  };

  if (state.steps == 0) notify();
  const double span = t_end - state.t;
  if (span <= 0.0) return;
  const auto full = static_cast<std::uint64_t>(std::floor(span / dt + 1e-9));
  // Times are origin + steps * dt rather than a running sum, so they do not
  // collect rounding and a resumed run lands on the same values.
  const double origin = state.t - static_cast<double>(state.steps) * dt;
  try {
    for (std::uint64_t k = 0; k < full; ++k) {
      step(state, dt);
      state.t = origin + static_cast<double>(state.steps) * dt;
      notify();
    }
    const double rest = t_end - state.t;
    if (rest > 1e-9 * dt) {
      step(state, rest);
      notify();
    }
  } catch (const TrajectoryError&) {
    throw;
  } catch (const std::exception& e) {
    std::ostringstream msg;
    msg << "trajectory " << state.rng.index() << " failed at t=" << state.t << ": " << e.what();
    throw TrajectoryError(msg.str(), static_cast<long long>(state.rng.index()), state.t);
  }
  state.t = t_end;
}

namespace {

constexpr char kMagic[8] = {'F', 'D', 'S', 'M', 'E', 'C', 'K', 'P'};
constexpr std::uint32_t kCheckpointVersion = 1;

template <class T>
void put(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw ConfigError("checkpoint: truncated file");
  return v;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const TrajectoryState& state,
                     std::uint64_t config_digest) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write checkpoint " + path.string());
  out.write(kMagic, sizeof kMagic);
  put(out, kCheckpointVersion);
  put(out, config_digest);
  put(out, state.rng.seed());
  put(out, state.rng.index());
  put(out, state.rng.position());
  put(out, state.t);
  put(out, state.steps);
  put(out, static_cast<std::uint64_t>(state.u.size()));
  put(out, state.u.grid().length());
  for (const auto& v : state.u.values()) {
    put(out, v.x());
    put(out, v.y());
    put(out, v.z());
  }
  if (!out) throw ConfigError("failed writing checkpoint " + path.string());
}

TrajectoryState load_checkpoint(const std::filesystem::path& path, const ModelSpec& spec,
                                const SchemeConfig& scheme, std::uint64_t config_digest) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open checkpoint " + path.string());
  char magic[8];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof magic) != 0)
    throw ConfigError("checkpoint: bad magic in " + path.string());
  if (get<std::uint32_t>(in) != kCheckpointVersion)
    throw ConfigError("checkpoint: unsupported version");
  if (get<std::uint64_t>(in) != config_digest)
    throw ConfigError("checkpoint: configuration digest mismatch");
  const auto seed = get<std::uint64_t>(in);
  const auto index = get<std::uint64_t>(in);
  const auto position = get<std::uint64_t>(in);
  const auto t = get<double>(in);
  const auto steps = get<std::uint64_t>(in);
  const auto n = get<std::uint64_t>(in);
  const auto length = get<double>(in);
  const Grid1D grid(length, n);
  if (!(grid == spec.h.grid())) throw ConfigError("checkpoint: grid does not match the model");
  VectorField values(n);
  for (auto& v : values) {
    const double x = get<double>(in);
    const double y = get<double>(in);
    const double z = get<double>(in);
    v = Vec3(x, y, z);
  }
  Substream rng(seed, index);
  rng.seek(position);
  TrajectoryState state(SphereField(grid, std::move(values)), spec, scheme, rng);
  state.t = t;
  state.steps = steps;
  return state;
}

}  // namespace fdsme
