#include "fdsme/lower_bound.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "fdsme/errors.hpp"

namespace fdsme {

double bound_root(double A, double B, double R) {
  if (!(R > 0.0)) return 0.0;
  // Root of B s^2 + A s - R written without cancellation.
  const double s = 2.0 * R / (A + std::sqrt(A * A + 4.0 * B * R));
  return s * s;
}

double bound_root_bisection(double A, double B, double R, int iterations) {
  if (!(R > 0.0)) return 0.0;
  auto f = [&](double s) { return A * s + B * s * s - R; };
  double lo = 0.0, hi = 1.0;
  while (f(hi) < 0.0) hi *= 2.0;
  for (int i = 0; i < iterations && hi - lo > 0.0; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (f(mid) < 0.0 ? lo : hi) = mid;
  }
  const double s = 0.5 * (lo + hi);
  return s * s;
}

namespace {
BoundResult finish(double A, double B, double R, std::vector<std::string> warnings) {
  BoundResult r;
  r.A = A;
  r.B = B;
  r.R = R;
  r.warnings = std::move(warnings);
  r.lambda = bound_root(A, B, R);
  if (r.lambda > 1.0) {
    r.warnings.push_back("root " + std::to_string(r.lambda) + " exceeds 1; clamped");
    r.lambda = 1.0;
  }
  return r;
}
}  // namespace

BoundResult lower_bound_general(const BoundInput& in) {
  if (!(in.domain_len > 0.0)) throw InvalidInput("lower bound: domain length must be positive");
  if (!(in.c_p > 0.0)) throw InvalidInput("lower bound: C_p must be positive");
  if (!(in.h_stats.grad_l2_sq >= 0.0)) throw InvalidInput("lower bound: ||h'||^2 must be >= 0");
  std::vector<std::string> warnings;
  double var = in.h_stats.mean_sq - in.h_stats.mean * in.h_stats.mean;
  if (var < 0.0) {
    warnings.push_back("negative variance " + std::to_string(var) + " from quadrature; clamped to 0");
    var = 0.0;
  }
  const double sup2 = in.h_stats.sup * in.h_stats.sup;
  const double A = (2.0 + sup2 * in.c_p) * std::numbers::sqrt2 * in.c_p * in.h_stats.grad_l2_sq /
                   in.domain_len;
  const double B = in.h_stats.mean_abs * in.h_stats.mean_abs + 2.0 * var;
  const double R = 2.0 * var;
  return finish(A, B, R, std::move(warnings));
}

BoundResult lower_bound_cosine(double alpha, int k) {
  if (alpha == 0.0 || !std::isfinite(alpha))
    throw InvalidInput("lower_bound_cosine: alpha must be nonzero and finite");
  if (k < 1) throw InvalidInput("lower_bound_cosine: k must be a positive integer");
  const double A = std::numbers::sqrt2 * (2.0 + alpha * alpha) / 2.0;
  const double B = 1.0 + 4.0 / (std::numbers::pi * std::numbers::pi);
  return finish(A, B, 1.0, {});
}

BoundCrossCheck cross_validate_bound(std::span<const double> min_grad, double lambda,
                                     double floor) {
  BoundCrossCheck c;
  c.trajectories = min_grad.size();
  c.lambda = lambda;
  c.nontrivial = static_cast<std::size_t>(
      std::count_if(min_grad.begin(), min_grad.end(), [&](double g) { return g > floor; }));
  c.fraction = c.trajectories == 0
                   ? 0.0
                   : static_cast<double>(c.nontrivial) / static_cast<double>(c.trajectories);
  c.consistent = c.trajectories > 0 ? c.fraction >= lambda : lambda == 0.0;
  std::ostringstream msg;
  msg << c.nontrivial << " of " << c.trajectories << " trajectories non-trivial (fraction "
      << c.fraction << ") vs lower bound " << lambda;
  if (!c.consistent) msg << ": INCONSISTENT, fraction below the bound";
  c.message = msg.str();
  return c;
}

}  // namespace fdsme
