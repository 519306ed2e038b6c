#include "fdsme/dynamics.hpp"

#include <cmath>

#include "fdsme/errors.hpp"

namespace fdsme {

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::sme: return "sme";
    case ModelKind::llg_fluc_diss: return "llg_fluc_diss";
    case ModelKind::llg_modified: return "llg_modified";
    case ModelKind::ssme: return "ssme";
    case ModelKind::spherical_bm: return "spherical_bm";
  }
  return "?";
}

ModelKind parse_model_kind(std::string_view name) {
  for (auto k : {ModelKind::sme, ModelKind::llg_fluc_diss, ModelKind::llg_modified,
                 ModelKind::ssme, ModelKind::spherical_bm}) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError("unknown model kind '" + std::string(name) + "'");
}

ModelSpec::ModelSpec(ModelKind kind_, double nu_, NoiseIntensity h_)
    : kind(kind_), nu(nu_), h(std::move(h_)) {
  if (!(nu >= 0.0 && nu <= 1.0)) throw ConfigError("viscosity nu must lie in [0, 1]");
}

double ModelSpec::damping() const {
  return (kind == ModelKind::llg_fluc_diss || kind == ModelKind::llg_modified) ? nu : 0.0;
}

VectorField drift_sme(const SphereField& u) {
  VectorField lap = d2_neumann(u.grid(), u.values());
  for (std::size_t i = 0; i < u.size(); ++i) lap[i] = u[i].cross(lap[i]);
  return lap;
}

VectorField drift_model(const SphereField& u, const ModelSpec& spec) {
  check_size(u.grid(), spec.h.grid().size(), "drift_model");
  if (!spec.has_drift()) return VectorField(u.size(), Vec3::Zero());
  const double nu = spec.damping();
  VectorField lap = d2_neumann(u.grid(), u.values());
  for (std::size_t i = 0; i < u.size(); ++i) {
    const Vec3 precession = u[i].cross(lap[i]);
    lap[i] = precession - nu * u[i].cross(precession);
  }
  return lap;
}

ScalarField noise_coefficient(const ModelSpec& spec) {
  const auto h = spec.h.h();
  const double s = std::sqrt(spec.nu);
  ScalarField g(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) {
    switch (spec.kind) {
      case ModelKind::sme: g[i] = 0.0; break;
      case ModelKind::llg_fluc_diss: g[i] = s * h[i]; break;
      case ModelKind::llg_modified: g[i] = s * h[i] + 1.0; break;
      case ModelKind::ssme:
      case ModelKind::spherical_bm: g[i] = 1.0; break;
    }
  }
  return g;
}

VectorField ito_correction(const SphereField& u, const ModelSpec& spec) {
  const ScalarField g = noise_coefficient(spec);
  check_size(u.grid(), g.size(), "ito_correction");
  VectorField out(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = -(g[i] * g[i]) * u[i];
  return out;
}

}  // namespace fdsme
