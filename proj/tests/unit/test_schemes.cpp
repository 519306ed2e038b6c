#include <gtest/gtest.h>

#include <filesystem>

#include "fdsme/errors.hpp"
#include "fdsme/schemes.hpp"
#include "util.hpp"

using namespace fdsme;
using fdsme::test::kTwoPi;

namespace {

ModelSpec fluc_diss(const Grid1D& g, double nu = 0.5) {
  return ModelSpec(ModelKind::llg_fluc_diss, nu, NoiseIntensity::cosine(g, 0.1, 1));
}

SchemeConfig with_dt(double dt, SchemeKind k = SchemeKind::strang_rotation) {
  SchemeConfig sc;
  sc.dt = dt;
  sc.kind = k;
  return sc;
}

}  // namespace

TEST(Rotation, QuarterTurnAboutE3) {
  const Grid1D g(1.0, 3);
  const SphereField u(g, VectorField(3, Vec3::UnitX()));
  const VectorField omega = {Vec3(0, 0, std::numbers::pi / 2), Vec3::Zero(), Vec3(0, 0, std::numbers::pi)};
  const SphereField r = rotation_step(u, omega);
  EXPECT_NEAR((r[0] - Vec3::UnitY()).norm(), 0.0, 1e-15);
  EXPECT_EQ(r[1], Vec3::UnitX());
  EXPECT_NEAR((r[2] + Vec3::UnitX()).norm(), 0.0, 1e-15);
}

TEST(Rotation, AxisParallelToFieldIsFixed) {
  const Grid1D g(1.0, 3);
  const Vec3 q = Vec3(1, 2, 2) / 3.0;
  const SphereField u(g, VectorField(3, q));
  const SphereField r = rotation_step(u, VectorField(3, 0.7 * q));
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR((r[i] - q).norm(), 0.0, 1e-15);
}

TEST(Schemes, ConfigValidation) {
  EXPECT_THROW(with_dt(0.0).validate(), ConfigError);
  SchemeConfig sc;
  sc.fp_tol = 1e-3;
  EXPECT_THROW(sc.validate(), ConfigError);
  EXPECT_THROW(parse_scheme_kind("heun"), ConfigError);
  EXPECT_EQ(parse_scheme_kind(to_string(SchemeKind::euler_ito_projected)), SchemeKind::euler_ito_projected);
  EXPECT_DOUBLE_EQ(default_dt(Grid1D(1.0, 11)), 0.2 * 0.01);
}

TEST(Schemes, MidpointConservesSmeInvariants) {
  const Grid1D g(kTwoPi, 65);
  const ModelSpec sme(ModelKind::sme, 0.0, NoiseIntensity::constant(g, 0.0));
  TrajectoryState st(make_initial(InitialGreatCircle{1.0}, g), sme, with_dt(1e-3), Substream(1, 0));
  const double e0 = dirichlet_energy(g, st.u.values());
  const Vec3 a0 = space_average(g, st.u.values());
  for (int i = 0; i < 500; ++i) step(st);
  EXPECT_NEAR(dirichlet_energy(g, st.u.values()), e0, 1e-11 * e0);
  // Exact for the converged midpoint; each step stops within fp_tol.
  EXPECT_LE((space_average(g, st.u.values()) - a0).norm(), 500 * st.scheme.fp_tol);
  EXPECT_LE(st.u.max_norm_deviation(), 1e-13);
  EXPECT_GE(st.last_fp_iterations, 1);
}

TEST(Schemes, NoiseSubstepConstantCoefficientIsRigid) {
  const Grid1D g(kTwoPi, 65);
  const ModelSpec ssme(ModelKind::ssme, 0.0, NoiseIntensity::constant(g, 0.0));
  TrajectoryState st(make_initial(InitialGreatCircle{1.0}, g), ssme, with_dt(1e-3), Substream(2, 0));
  ASSERT_TRUE(st.g_space_constant);
  const double e0 = dirichlet_energy(g, st.u.values());
  const double a0 = space_average(g, st.u.values()).norm();
  for (int i = 0; i < 100; ++i) noise_substep(st, Vec3(0.3, -0.2, 0.5));
  EXPECT_NEAR(dirichlet_energy(g, st.u.values()), e0, 1e-12 * e0);
  EXPECT_NEAR(space_average(g, st.u.values()).norm(), a0, 1e-13);
}

TEST(Schemes, StrangKeepsNormsWithoutProjection) {
  const Grid1D g(kTwoPi, 64);
  TrajectoryState st(make_initial(InitialGreatCircle{1.0}, g), fluc_diss(g), with_dt(2e-4), Substream(3, 0));
  double worst = 0.0;
  for (int i = 0; i < 5000; ++i) {
    step(st);
    worst = std::max(worst, st.u.max_norm_deviation());
  }
  EXPECT_LE(worst, 1e-13);
}

TEST(Schemes, EulerItoStaysOnSphere) {
  const Grid1D g(kTwoPi, 32);
  TrajectoryState st(make_initial(InitialGreatCircle{1.0}, g), fluc_diss(g),
                     with_dt(2e-4, SchemeKind::euler_ito_projected), Substream(3, 0));
  for (int i = 0; i < 1000; ++i) step(st);
  EXPECT_LE(st.u.max_norm_deviation(), 1e-14);
}

TEST(Schemes, SameSeedSameTrajectory) {
  const Grid1D g(kTwoPi, 32);
  auto run = [&](std::uint64_t seed, std::uint64_t idx) {
    TrajectoryState st(make_initial(InitialConstant{Vec3::UnitZ()}, g), fluc_diss(g), with_dt(2e-4),
                       derive_substream(seed, idx));
    integrate(st, 0.1, nullptr, 1);
    return VectorField(st.u.values().begin(), st.u.values().end());
  };
  EXPECT_EQ(run(4, 0), run(4, 0));
  EXPECT_NE(run(4, 0), run(4, 1));
  EXPECT_NE(run(4, 0), run(5, 0));
}

TEST(Schemes, IntegrateObserverAndFinalTime) {
  const Grid1D g(kTwoPi, 16);
  TrajectoryState st(make_initial(InitialConstant{Vec3::UnitZ()}, g), fluc_diss(g), with_dt(0.01),
                     Substream(1, 0));
  std::vector<double> ts;
  integrate(st, 1.0, [&](const TrajectoryState& s) { ts.push_back(s.t); }, 10);
  ASSERT_EQ(ts.size(), 11u);
  EXPECT_EQ(ts.front(), 0.0);
  EXPECT_NEAR(ts.back(), 1.0, 1e-15);
  EXPECT_EQ(st.steps, 100u);
  EXPECT_THROW(integrate(st, 0.5, nullptr, 1), InvalidInput);
}

TEST(Checkpoint, ResumeIsBitIdentical) {
  const Grid1D g(kTwoPi, 32);
  const ModelSpec spec = fluc_diss(g);
  const auto u0 = make_initial(InitialConstant{Vec3::UnitZ()}, g);
  TrajectoryState full(u0, spec, with_dt(2e-4), derive_substream(8, 3));
  integrate(full, 0.2, nullptr, 1);

  TrajectoryState half(u0, spec, with_dt(2e-4), derive_substream(8, 3));
  integrate(half, 0.1, nullptr, 1);
  const auto path = std::filesystem::temp_directory_path() / "fdsme_test.ckpt";
  save_checkpoint(path, half, 0xabcdef);
  TrajectoryState resumed = load_checkpoint(path, spec, with_dt(2e-4), 0xabcdef);
  EXPECT_EQ(resumed.steps, half.steps);
  EXPECT_EQ(resumed.rng, half.rng);
  integrate(resumed, 0.2, nullptr, 1);
  EXPECT_EQ(resumed.t, full.t);
  EXPECT_EQ(resumed.steps, full.steps);
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_EQ(resumed.u[i], full.u[i]);

  EXPECT_THROW(load_checkpoint(path, spec, with_dt(2e-4), 0x1234), ConfigError);
  const Grid1D other(kTwoPi, 33);
  EXPECT_THROW(load_checkpoint(path, fluc_diss(other), with_dt(2e-4), 0xabcdef), ConfigError);
  std::filesystem::remove(path);
}

TEST(Dynamics, NoiseCoefficients) {
  const Grid1D g(kTwoPi, 9);
  const auto h = NoiseIntensity::cosine(g, 0.1, 1);
  const auto fd = noise_coefficient(ModelSpec(ModelKind::llg_fluc_diss, 0.25, h));
  const auto mod = noise_coefficient(ModelSpec(ModelKind::llg_modified, 0.25, h));
  for (std::size_t i = 0; i < 9; ++i) {
    EXPECT_NEAR(fd[i], 0.5 * h.h()[i], 1e-16);
    EXPECT_NEAR(mod[i], 0.5 * h.h()[i] + 1.0, 1e-15);
  }
  EXPECT_EQ(noise_coefficient(ModelSpec(ModelKind::ssme, 0.0, h))[4], 1.0);
  EXPECT_THROW(ModelSpec(ModelKind::llg_fluc_diss, 1.5, h), ConfigError);
  EXPECT_THROW(parse_model_kind("llg"), ConfigError);
}

TEST(Dynamics, DriftIsTangent) {
  const Grid1D g(kTwoPi, 33);
  const auto u = make_initial(InitialGreatCircle{1.2}, g);
  const auto d = drift_model(u, fluc_diss(g));
  for (std::size_t i = 0; i < u.size(); ++i) EXPECT_NEAR(d[i].dot(u[i]), 0.0, 1e-10);
  const auto ito = ito_correction(u, ModelSpec(ModelKind::ssme, 0.0, NoiseIntensity::constant(g, 0.0)));
  EXPECT_NEAR((ito[5] + u[5]).norm(), 0.0, 1e-15);
}
