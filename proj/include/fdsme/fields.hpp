#pragma once

#include <filesystem>
#include <string>
#include <variant>

#include "fdsme/grid.hpp"

namespace fdsme {

inline constexpr double kUnitTolerance = 1e-12;

namespace detail {
struct FieldAccess;
}

/// Map x -> u(x) on the unit sphere, sampled at the grid nodes.
/// Every node satisfies ||u_i| - 1| <= kUnitTolerance; raw data has to go
/// through project_sphere() or the checked constructor.
class SphereField {
public:
  SphereField(const Grid1D& grid, VectorField values);

  const Grid1D& grid() const { return grid_; }
  std::span<const Vec3> values() const { return values_; }
  const Vec3& operator[](std::size_t i) const { return values_[i]; }
  std::size_t size() const { return values_.size(); }

  double max_norm_deviation() const;

private:
  struct Unchecked {};
  SphereField(const Grid1D& grid, VectorField values, Unchecked)
      : grid_(grid), values_(std::move(values)) {}

  friend struct detail::FieldAccess;
  friend SphereField project_sphere(const Grid1D& grid, std::span<const Vec3> raw);

  Grid1D grid_;
  VectorField values_;
};

namespace detail {
// Integrators update fields in place; they are responsible for keeping
// the node norms on the sphere.
struct FieldAccess {
  static VectorField& values(SphereField& u) { return u.values_; }
  static SphereField adopt(const Grid1D& grid, VectorField values) {
    return SphereField(grid, std::move(values), SphereField::Unchecked{});
  }
};
}  // namespace detail

struct NoiseConstant {
  double c;
};
struct NoiseCosine {
  double alpha;
  int k;
};
struct NoiseTabulated {};
using NoiseFamily = std::variant<NoiseConstant, NoiseCosine, NoiseTabulated>;

/// Scalar noise intensity h(x) together with d_x h. The derivative is
/// analytic for the built-in families and a second-order finite difference
/// for tabulated data.
class NoiseIntensity {
public:
  static NoiseIntensity constant(const Grid1D& grid, double c);
  // h(x) = alpha cos(x) on [0, 2 pi k]; the grid length must match.
  static NoiseIntensity cosine(const Grid1D& grid, double alpha, int k);
  static NoiseIntensity tabulated(const Grid1D& grid, ScalarField h);
  // Two-column CSV (x, h); x must coincide with the grid nodes.
  static NoiseIntensity from_csv(const Grid1D& grid, const std::filesystem::path& path);

  const Grid1D& grid() const { return grid_; }
  std::span<const double> h() const { return h_; }
  std::span<const double> dx_h() const { return dx_h_; }
  const NoiseFamily& family() const { return family_; }
  bool is_space_constant() const;

  NoiseIntensity scaled(double s) const;

private:
  NoiseIntensity(const Grid1D& grid, ScalarField h, ScalarField dx_h, NoiseFamily family)
      : grid_(grid), h_(std::move(h)), dx_h_(std::move(dx_h)), family_(family) {}

  Grid1D grid_;
  ScalarField h_;
  ScalarField dx_h_;
  NoiseFamily family_;
};

struct HMoments {
  double mean = 0.0;      // <h>
  double mean_sq = 0.0;   // <h^2>
  double mean_abs = 0.0;  // <|h|>
  double sup = 0.0;       // ||h||_inf
  double grad_l2_sq = 0.0;  // ||d_x h||^2_{L^2}
};

HMoments h_moments(const NoiseIntensity& h);

/// Space curve sampled on the grid (the primitive of a sphere-valued field).
struct Curve {
  Grid1D grid;
  VectorField points;
};

struct InitialConstant {
  Vec3 q;
};
// u(x) = (cos th, sin th, 0) with th(x) = amplitude * cos(pi x / L).
struct InitialGreatCircle {
  double amplitude;
};
using InitialKind = std::variant<InitialConstant, InitialGreatCircle>;

SphereField make_initial(const InitialKind& kind, const Grid1D& grid);

SphereField project_sphere(const Grid1D& grid, std::span<const Vec3> raw);

/// max(|u_1 - u_0|, |u_{n-1} - u_{n-2}|) / dx; large values mean the data
/// does not satisfy the Neumann condition.
double neumann_boundary_mismatch(const SphereField& u);

double tangency_residual(const SphereField& u);
double fundamental_identity_residual(const SphereField& u);
double damping_identity_residual(const Grid1D& grid, std::span<const Vec3> u);
inline double damping_identity_residual(const SphereField& u) {
  return damping_identity_residual(u.grid(), u.values());
}

}  // namespace fdsme
