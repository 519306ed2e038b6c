#pragma once

#include <string>
#include <string_view>

#include "fdsme/fields.hpp"

namespace fdsme {

enum class ModelKind { sme, llg_fluc_diss, llg_modified, ssme, spherical_bm };

std::string_view to_string(ModelKind kind);
ModelKind parse_model_kind(std::string_view name);

/// One of the five sphere-valued models:
///   sme            du = u x u''
///   llg_fluc_diss  du = u x u'' - nu u x (u x u'') + sqrt(nu) h u x o dW
///   llg_modified   same drift, noise coefficient sqrt(nu) h + 1
///   ssme           du = u x u'' + u x o dW
///   spherical_bm   du = u x o dW
struct ModelSpec {
  ModelSpec(ModelKind kind, double nu, NoiseIntensity h);

  ModelKind kind;
  double nu;
  NoiseIntensity h;

  // Coefficient of the damping term u x (u x u'') in the drift.
  double damping() const;
  bool has_drift() const { return kind != ModelKind::spherical_bm; }
};

VectorField drift_sme(const SphereField& u);

// Stratonovich drift; Ito corrections are added by Ito-mode schemes only.
VectorField drift_model(const SphereField& u, const ModelSpec& spec);

// g(x) multiplying u x o dW.
ScalarField noise_coefficient(const ModelSpec& spec);

// -g(x_i)^2 u_i, the Ito-minus-Stratonovich drift of rotation noise.
VectorField ito_correction(const SphereField& u, const ModelSpec& spec);

}  // namespace fdsme
