#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace fdsme {

using Vec3 = Eigen::Vector3d;
using VectorField = std::vector<Vec3>;
using ScalarField = std::vector<double>;

/// Uniform grid x_i = i*dx, i = 0..n-1, on [0, length] with null Neumann
/// boundary conditions. All quadratures use trapezoid weights.
class Grid1D {
public:
  Grid1D(double length, std::size_t n);

  double length() const { return length_; }
  std::size_t size() const { return n_; }
  double dx() const { return dx_; }
  double x(std::size_t i) const { return static_cast<double>(i) * dx_; }
  double weight(std::size_t i) const {
    return (i == 0 || i + 1 == n_) ? 0.5 * dx_ : dx_;
  }
  std::vector<double> nodes() const;

  bool operator==(const Grid1D& other) const {
    return n_ == other.n_ && length_ == other.length_;
  }

private:
  double length_;
  std::size_t n_;
  double dx_;
};

// Central difference in the interior, zero at both boundary nodes.
VectorField d1_neumann(const Grid1D& grid, std::span<const Vec3> f);

// Three-point Laplacian with mirrored ghosts f_{-1} = f_1, f_n = f_{n-2}.
VectorField d2_neumann(const Grid1D& grid, std::span<const Vec3> f);

// Laplacian at a single node; the hot loops in the integrator use this.
inline Vec3 laplacian_at(std::span<const Vec3> f, std::size_t i, double inv_dx2) {
  const std::size_t n = f.size();
  if (i == 0) return 2.0 * inv_dx2 * (f[1] - f[0]);
  if (i + 1 == n) return 2.0 * inv_dx2 * (f[n - 2] - f[n - 1]);
  return inv_dx2 * (f[i + 1] - 2.0 * f[i] + f[i - 1]);
}

/// Node-wise gradient density (|f_{i+1}-f_i|^2 + |f_i-f_{i-1}|^2) / (2 dx^2)
/// with mirrored ghosts. Its trapezoid integral equals dirichlet_energy(f),
/// and for unit-length fields it equals -f_i . (d2_neumann f)_i exactly.
ScalarField gradient_density(const Grid1D& grid, std::span<const Vec3> f);

/// sum_i |f_{i+1}-f_i|^2 / dx, the discrete ||d_x f||^2_{L^2} that the
/// mirrored Laplacian dissipates: dirichlet_energy(f) = -inner_l2(d2 f, f).
double dirichlet_energy(const Grid1D& grid, std::span<const Vec3> f);

double norm_l2_sq(const Grid1D& grid, std::span<const Vec3> f);
double norm_l4_4(const Grid1D& grid, std::span<const Vec3> f);
double inner_l2(const Grid1D& grid, std::span<const Vec3> f, std::span<const Vec3> g);
Vec3 space_average(const Grid1D& grid, std::span<const Vec3> f);

double integrate(const Grid1D& grid, std::span<const double> f);
double space_average(const Grid1D& grid, std::span<const double> f);

// Throws ConfigError when the field does not live on the grid.
void check_size(const Grid1D& grid, std::size_t n, const char* what);

}  // namespace fdsme
