#include <gtest/gtest.h>

#include "fdsme/errors.hpp"
#include "fdsme/lower_bound.hpp"
#include "util.hpp"

using namespace fdsme;
using fdsme::test::kTwoPi;

// Reference roots from an independent quadratic solve in sqrt(lambda).
TEST(Bound, CosineClosedForm) {
  const BoundResult b = lower_bound_cosine(0.1, 1);
  EXPECT_NEAR(b.lambda, 0.228325254484, 1e-11);
  EXPECT_NEAR(b.A, std::sqrt(2.0) * 2.01 / 2.0, 1e-15);
  EXPECT_NEAR(b.B, 1.0 + 4.0 / (std::numbers::pi * std::numbers::pi), 1e-15);
  EXPECT_EQ(b.R, 1.0);
  EXPECT_NEAR(lower_bound_cosine(1.0, 1).lambda, 0.142254771876, 1e-11);
  EXPECT_NEAR(lower_bound_cosine(100.0, 1).lambda, 1.9992e-08, 1e-12);
  EXPECT_EQ(lower_bound_cosine(0.1, 3).lambda, b.lambda);
  EXPECT_THROW(lower_bound_cosine(0.0, 1), InvalidInput);
  EXPECT_THROW(lower_bound_cosine(0.1, 0), InvalidInput);
}

TEST(Bound, PublishedValueDiffers) {
  EXPECT_GT(kPublishedCosineBound - lower_bound_cosine(0.1, 1).lambda, 1e-3);
}

TEST(Bound, BisectionAgrees) {
  for (double a : {0.01, 0.1, 0.5, 2.0, 30.0}) {
    const BoundResult b = lower_bound_cosine(a, 1);
    EXPECT_NEAR(bound_root_bisection(b.A, b.B, b.R), b.lambda, 1e-12);
    const double s = std::sqrt(b.lambda);
    EXPECT_NEAR(b.A * s + b.B * b.lambda - b.R, 0.0, 1e-14);
  }
}

TEST(Bound, MonotoneInCoefficients) {
  double prev = 1.0;
  for (double a = 0.1; a < 10.0; a *= 1.5) {
    const double l = bound_root(a, 1.0, 1.0);
    EXPECT_LT(l, prev);
    prev = l;
  }
  EXPECT_LT(bound_root(1.0, 2.0, 1.0), bound_root(1.0, 1.0, 1.0));
  EXPECT_GT(bound_root(1.0, 1.0, 2.0), bound_root(1.0, 1.0, 1.0));
  EXPECT_EQ(bound_root(1.0, 1.0, 0.0), 0.0);
  EXPECT_EQ(bound_root(1.0, 1.0, -1.0), 0.0);
  EXPECT_NEAR(bound_root(0.0, 1.0, 0.25), 0.25, 1e-15);
}

TEST(Bound, GeneralFormReproducesCosine) {
  const Grid1D g(kTwoPi, 4097);
  const double a = 0.1;
  const HMoments m = h_moments(NoiseIntensity::cosine(g, a, 1));
  const BoundResult gen = lower_bound_general({m, 1.0, kTwoPi});
  EXPECT_NEAR(gen.lambda, lower_bound_cosine(a, 1).lambda, 1e-6);
  EXPECT_TRUE(gen.warnings.empty());
}

TEST(Bound, GeneralFormValidation) {
  HMoments m;
  m.mean_sq = 1.0;
  m.mean = 0.0;
  m.grad_l2_sq = 1.0;
  EXPECT_THROW(lower_bound_general({m, 1.0, 0.0}), InvalidInput);
  EXPECT_THROW(lower_bound_general({m, 0.0, 1.0}), InvalidInput);
  HMoments flat;
  flat.mean = flat.mean_abs = flat.sup = 0.5;
  flat.mean_sq = 0.25;
  EXPECT_EQ(lower_bound_general({flat, 1.0, 1.0}).lambda, 0.0);
}

TEST(Bound, CrossValidation) {
  const std::vector<double> mins = {0.3, 0.5, 1e-10, 0.4};
  const BoundCrossCheck c = cross_validate_bound(mins, 0.2283);
  EXPECT_EQ(c.trajectories, 4u);
  EXPECT_EQ(c.nontrivial, 3u);
  EXPECT_DOUBLE_EQ(c.fraction, 0.75);
  EXPECT_FALSE(c.message.empty());
}
