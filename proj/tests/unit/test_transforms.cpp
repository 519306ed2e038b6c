#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "fdsme/errors.hpp"
#include "fdsme/schemes.hpp"
#include "fdsme/transforms.hpp"
#include "util.hpp"

using namespace fdsme;
using fdsme::test::kTwoPi;

namespace {

SphereField from_function(const Grid1D& g, Vec3 (*f)(double)) {
  VectorField v(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) v[i] = f(g.x(i));
  return SphereField(g, std::move(v));
}

std::vector<CurveSnapshot> sme_snapshots(std::size_t n, double t_end) {
  const Grid1D g(kTwoPi, n);
  const ModelSpec sme(ModelKind::sme, 0.0, NoiseIntensity::constant(g, 0.0));
  SchemeConfig sc;
  sc.dt = default_dt(g);
  TrajectoryState st(make_initial(InitialGreatCircle{1.5}, g), sme, sc, Substream(1, 0));
  std::vector<CurveSnapshot> snaps;
  integrate(st, t_end, [&](const TrajectoryState& s) { snaps.push_back({s.t, bcf_transform(s.u)}); }, 1);
  return snaps;
}

}  // namespace

TEST(Bcf, CurveHasUnitSpeed) {
  const Grid1D g(kTwoPi, 257);
  const Curve c = bcf_transform(make_initial(InitialGreatCircle{1.3}, g));
  EXPECT_EQ(c.points.front(), Vec3::Zero());
  EXPECT_LE(arclength_residual(c), 1e-13);
  const Curve line = bcf_transform(make_initial(InitialConstant{Vec3::UnitY()}, g));
  EXPECT_NEAR(line.points.back()[1], kTwoPi, 1e-12);
}

TEST(Bcf, ResidualShrinksUnderRefinement) {
  std::vector<double> e;
  for (std::size_t n : {33u, 65u}) e.push_back(bcf_residual(sme_snapshots(n, 0.1)).residual);
  EXPECT_GT(std::log2(e[0] / e[1]), 1.8);
}

TEST(Bcf, ShuffledSnapshotsAreDetected) {
  auto snaps = sme_snapshots(65, 0.1);
  const double ordered = bcf_residual(snaps).residual;
  std::vector<Curve> curves;
  for (const auto& s : snaps) curves.push_back(s.curve);
  std::mt19937 gen(1);
  std::shuffle(curves.begin() + 1, curves.end() - 1, gen);
  for (std::size_t k = 0; k < snaps.size(); ++k) snaps[k].curve = curves[k];
  EXPECT_GT(bcf_residual(snaps).residual, 10.0 * ordered);
  EXPECT_THROW(bcf_residual(std::span(snaps).first(1)), InvalidInput);
}

TEST(Hashimoto, EquatorialCircle) {
  const Grid1D g(kTwoPi, 257);
  const auto f = hashimoto(from_function(g, [](double x) { return Vec3(std::cos(x), std::sin(x), 0.0); }));
  for (std::size_t i = 1; i + 1 < g.size(); ++i) {
    EXPECT_NEAR(f.k[i], 1.0, 5e-3);
    EXPECT_NEAR(f.tau[i], 0.0, 1e-12);
    EXPECT_NEAR(std::abs(f.q[i] - 1.0), 0.0, 5e-3);
  }
  // |d1 u| vanishes at the Neumann ends.
  EXPECT_FALSE(f.defined.front());
  EXPECT_TRUE(std::isnan(f.tau.front()));
  EXPECT_FALSE(f.warnings.empty());
}

TEST(Hashimoto, DoubleSpeedCircle) {
  const Grid1D g(std::numbers::pi, 257);
  const auto f = hashimoto(from_function(g, [](double x) { return Vec3(std::cos(2 * x), std::sin(2 * x), 0.0); }));
  for (std::size_t i = 1; i + 1 < g.size(); ++i) EXPECT_NEAR(f.k[i], 2.0, 1e-3);
}

// Tangent of a helix of radius 1 and pitch 1: k = tau = 1/2.
TEST(Hashimoto, HelixCurvatureAndTorsion) {
  std::vector<double> err;
  for (std::size_t n : {129u, 257u}) {
    const Grid1D g(4.0, n);
    const auto f = hashimoto(from_function(g, [](double x) {
      const double c = std::sqrt(2.0);
      return Vec3(-std::sin(x / c) / c, std::cos(x / c) / c, 1.0 / c);
    }));
    double e = 0.0;
    for (std::size_t i = 1; i + 1 < g.size(); ++i)
      e = std::max({e, std::abs(f.k[i] - 0.5), std::abs(f.tau[i] - 0.5)});
    err.push_back(e);
    // q = k exp(i int tau): phase grows linearly.
    const std::size_t mid = n / 2;
    EXPECT_NEAR(std::arg(f.q[mid]), std::remainder(0.5 * (g.x(mid) - g.dx()), kTwoPi), 0.02);
  }
  EXPECT_LT(err[1], 1e-3);
  EXPECT_GT(std::log2(err[0] / err[1]), 1.8);
}

TEST(Hashimoto, ConstantFieldUndefined) {
  const Grid1D g(1.0, 9);
  const auto f = hashimoto(make_initial(InitialConstant{Vec3::UnitZ()}, g));
  EXPECT_TRUE(std::none_of(f.defined.begin(), f.defined.end(), [](auto d) { return d != 0; }));
  EXPECT_THROW(hashimoto(make_initial(InitialConstant{Vec3::UnitZ()}, g), 0.0), InvalidInput);
  std::ostringstream out;
  write_hashimoto_csv(out, f);
  EXPECT_EQ(out.str().rfind("x,k,tau,re_q,im_q,defined\n", 0), 0u);
}
