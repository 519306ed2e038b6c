#pragma once

#include <span>
#include <string>
#include <vector>

#include "fdsme/fields.hpp"

namespace fdsme {

// Quoted value of the bound for h = 0.1 cos(x) on [0, 2 pi]. The closed-form
// root below gives 0.22833; the difference is reported, not reconciled.
inline constexpr double kPublishedCosineBound = 0.2298;

struct BoundInput {
  HMoments h_stats;
  double c_p = 1.0;  // Poincare constant
  double domain_len = 0.0;
};

/// Coefficients of A sqrt(l) + B l - R = 0 and its nonnegative root.
struct BoundResult {
  double A = 0.0;
  double B = 0.0;
  double R = 0.0;
  double lambda = 0.0;
  std::vector<std::string> warnings;
};

/// A = (2 + ||h||_inf^2 C_p) sqrt(2) C_p ||h'||^2 / |D|,
/// B = <|h|>^2 + 2 (<h^2> - <h>^2), R = 2 (<h^2> - <h>^2).
BoundResult lower_bound_general(const BoundInput& input);

/// Normalized cosine case: (1 + 4/pi^2) l + (sqrt(2) (2 + alpha^2) / 2) sqrt(l) - 1 = 0.
/// Does not depend on k.
BoundResult lower_bound_cosine(double alpha, int k = 1);

// Positive root in s = sqrt(l), squared; returns 0 when R <= 0.
double bound_root(double A, double B, double R);
// Same root by bisection of A s + B s^2 - R on [0, 1].
double bound_root_bisection(double A, double B, double R, int iterations = 200);

struct BoundCrossCheck {
  std::size_t trajectories = 0;
  std::size_t nontrivial = 0;
  double fraction = 0.0;
  double lambda = 0.0;
  bool consistent = true;
  std::string message;
};

/// Fraction of trajectories whose minimum grad_l2_sq exceeds `floor`,
/// juxtaposed with the bound. Diagnostic only.
BoundCrossCheck cross_validate_bound(std::span<const double> min_grad_per_trajectory,
                                     double lambda, double floor = 1e-8);

}  // namespace fdsme
