#pragma once

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "fdsme/fields.hpp"

namespace fdsme::test {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline std::vector<double> orders(const std::vector<double>& e) {
  std::vector<double> p;
  for (std::size_t i = 0; i + 1 < e.size(); ++i) p.push_back(std::log2(e[i] / e[i + 1]));
  return p;
}

inline VectorField random_field(std::size_t n, unsigned seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd;
  VectorField f(n);
  for (auto& v : f) v = Vec3(nd(gen), nd(gen), nd(gen));
  return f;
}

inline SphereField random_sphere(const Grid1D& grid, unsigned seed) {
  auto f = random_field(grid.size(), seed);
  return project_sphere(grid, f);
}

}  // namespace fdsme::test
