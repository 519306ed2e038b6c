#include "fdsme/grid.hpp"

#include <cmath>
#include <string>

#include "fdsme/errors.hpp"

namespace fdsme {

Grid1D::Grid1D(double length, std::size_t n) : length_(length), n_(n), dx_(0.0) {
  if (n < 3) throw ConfigError("Grid1D: need at least 3 nodes, got " + std::to_string(n));
  if (!(length > 0.0) || !std::isfinite(length))
    throw ConfigError("Grid1D: length must be positive and finite");
  dx_ = length / static_cast<double>(n - 1);
}

std::vector<double> Grid1D::nodes() const {
  std::vector<double> xs(n_);
  for (std::size_t i = 0; i < n_; ++i) xs[i] = x(i);
  return xs;
}

void check_size(const Grid1D& grid, std::size_t n, const char* what) {
  if (n != grid.size())
    throw ConfigError(std::string(what) + ": field has " + std::to_string(n) +
                      " nodes, grid has " + std::to_string(grid.size()));
}

VectorField d1_neumann(const Grid1D& grid, std::span<const Vec3> f) {
  check_size(grid, f.size(), "d1_neumann");
  const std::size_t n = f.size();
  const double inv2dx = 0.5 / grid.dx();
  VectorField out(n, Vec3::Zero());
  for (std::size_t i = 1; i + 1 < n; ++i) out[i] = inv2dx * (f[i + 1] - f[i - 1]);
  return out;
}

VectorField d2_neumann(const Grid1D& grid, std::span<const Vec3> f) {
  check_size(grid, f.size(), "d2_neumann");
  const double inv_dx2 = 1.0 / (grid.dx() * grid.dx());
  VectorField out(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = laplacian_at(f, i, inv_dx2);
  return out;
}

ScalarField gradient_density(const Grid1D& grid, std::span<const Vec3> f) {
  check_size(grid, f.size(), "gradient_density");
  const std::size_t n = f.size();
  const double inv_dx2 = 1.0 / (grid.dx() * grid.dx());
  std::vector<double> edge(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) edge[i] = (f[i + 1] - f[i]).squaredNorm();
  ScalarField out(n);
  // Mirrored ghosts make the outer edge a copy of the first inner one.
  out[0] = edge[0] * inv_dx2;
  out[n - 1] = edge[n - 2] * inv_dx2;
  for (std::size_t i = 1; i + 1 < n; ++i) out[i] = 0.5 * (edge[i - 1] + edge[i]) * inv_dx2;
  return out;
}

double dirichlet_energy(const Grid1D& grid, std::span<const Vec3> f) {
  check_size(grid, f.size(), "dirichlet_energy");
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < f.size(); ++i) s += (f[i + 1] - f[i]).squaredNorm();
  return s / grid.dx();
}

double norm_l2_sq(const Grid1D& grid, std::span<const Vec3> f) {
  check_size(grid, f.size(), "norm_l2_sq");
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += grid.weight(i) * f[i].squaredNorm();
  return s;
}

double norm_l4_4(const Grid1D& grid, std::span<const Vec3> f) {
  check_size(grid, f.size(), "norm_l4_4");
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double a = f[i].squaredNorm();
    s += grid.weight(i) * a * a;
  }
  return s;
}

double inner_l2(const Grid1D& grid, std::span<const Vec3> f, std::span<const Vec3> g) {
  check_size(grid, f.size(), "inner_l2");
  check_size(grid, g.size(), "inner_l2");
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += grid.weight(i) * f[i].dot(g[i]);
  return s;
}

Vec3 space_average(const Grid1D& grid, std::span<const Vec3> f) {
  check_size(grid, f.size(), "space_average");
  Vec3 s = Vec3::Zero();
  for (std::size_t i = 0; i < f.size(); ++i) s += grid.weight(i) * f[i];
  return s / grid.length();
}

double integrate(const Grid1D& grid, std::span<const double> f) {
  check_size(grid, f.size(), "integrate");
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += grid.weight(i) * f[i];
  return s;
}

double space_average(const Grid1D& grid, std::span<const double> f) {
  return integrate(grid, f) / grid.length();
}

}  // namespace fdsme
