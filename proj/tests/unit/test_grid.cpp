#include <gtest/gtest.h>

#include "fdsme/errors.hpp"
#include "fdsme/grid.hpp"
#include "util.hpp"

using namespace fdsme;
using fdsme::test::orders;

namespace {

VectorField cosines(const Grid1D& g) {
  VectorField f(g.size());
  for (std::size_t i = 0; i < g.size(); ++i)
    f[i] = Vec3(std::cos(g.x(i)), std::cos(2.0 * g.x(i)), 1.0);
  return f;
}

double max_err(const VectorField& a, const VectorField& b) {
  double e = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) e = std::max(e, (a[i] - b[i]).norm());
  return e;
}

}  // namespace

TEST(Grid, NodesAndWeights) {
  const Grid1D g(2.0, 5);
  EXPECT_DOUBLE_EQ(g.dx(), 0.5);
  EXPECT_DOUBLE_EQ(g.x(4), 2.0);
  EXPECT_DOUBLE_EQ(g.weight(0), 0.25);
  EXPECT_DOUBLE_EQ(g.weight(2), 0.5);
  double total = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) total += g.weight(i);
  EXPECT_DOUBLE_EQ(total, 2.0);
  EXPECT_THROW(Grid1D(1.0, 2), ConfigError);
  EXPECT_THROW(Grid1D(-1.0, 8), ConfigError);
}

TEST(Grid, LaplacianSecondOrderUpToBoundary) {
  std::vector<double> err;
  for (std::size_t n : {33u, 65u, 129u}) {
    const Grid1D g(std::numbers::pi, n);
    VectorField exact(n);
    for (std::size_t i = 0; i < n; ++i)
      exact[i] = Vec3(-std::cos(g.x(i)), -4.0 * std::cos(2.0 * g.x(i)), 0.0);
    err.push_back(max_err(d2_neumann(g, cosines(g)), exact));
  }
  for (double p : orders(err)) EXPECT_NEAR(p, 2.0, 0.1);
}

TEST(Grid, FirstDifferenceSecondOrder) {
  std::vector<double> err;
  for (std::size_t n : {33u, 65u, 129u}) {
    const Grid1D g(std::numbers::pi, n);
    VectorField exact(n);
    for (std::size_t i = 0; i < n; ++i)
      exact[i] = Vec3(-std::sin(g.x(i)), -2.0 * std::sin(2.0 * g.x(i)), 0.0);
    const auto d = d1_neumann(g, cosines(g));
    EXPECT_EQ(d.front(), Vec3::Zero());
    EXPECT_EQ(d.back(), Vec3::Zero());
    err.push_back(max_err(d, exact));
  }
  for (double p : orders(err)) EXPECT_NEAR(p, 2.0, 0.1);
}

TEST(Grid, LaplacianSelfAdjointAndDissipative) {
  const Grid1D g(3.0, 41);
  const auto f = test::random_field(41, 1), h = test::random_field(41, 2);
  const double a = inner_l2(g, d2_neumann(g, f), h);
  const double b = inner_l2(g, f, d2_neumann(g, h));
  EXPECT_NEAR(a, b, 1e-10 * std::abs(a));
  const double e = dirichlet_energy(g, f);
  EXPECT_GT(e, 0.0);
  EXPECT_NEAR(-inner_l2(g, d2_neumann(g, f), f), e, 1e-10 * e);
}

TEST(Grid, GradientDensityMatchesEnergy) {
  const Grid1D g(3.0, 41);
  const auto u = test::random_sphere(g, 3);
  const auto dens = gradient_density(g, u.values());
  EXPECT_NEAR(integrate(g, dens), dirichlet_energy(g, u.values()), 1e-10);
  const auto lap = d2_neumann(g, u.values());
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(-u[i].dot(lap[i]), dens[i], 1e-9 * (1 + dens[i]));
}

TEST(Grid, Quadratures) {
  const Grid1D g(2.0, 11);
  std::vector<double> lin(11);
  for (std::size_t i = 0; i < 11; ++i) lin[i] = 3.0 * g.x(i) + 1.0;
  EXPECT_NEAR(integrate(g, lin), 8.0, 1e-13);
  EXPECT_NEAR(space_average(g, lin), 4.0, 1e-13);
  const VectorField c(11, Vec3(1.0, -2.0, 0.5));
  EXPECT_NEAR((space_average(g, c) - Vec3(1.0, -2.0, 0.5)).norm(), 0.0, 1e-14);
  EXPECT_NEAR(norm_l2_sq(g, c), 2.0 * 5.25, 1e-12);
  EXPECT_NEAR(norm_l4_4(g, c), 2.0 * 5.25 * 5.25, 1e-11);
  EXPECT_EQ(dirichlet_energy(g, c), 0.0);
  EXPECT_THROW(check_size(g, 10, "field"), ConfigError);
}
