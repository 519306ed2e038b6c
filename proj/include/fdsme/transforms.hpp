#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "fdsme/fields.hpp"

namespace fdsme {

/// gamma_0 = 0, gamma_{i+1} = gamma_i + dx u_i. Forward differences give back
/// u exactly, so the discrete arclength is 1 up to rounding.
Curve bcf_transform(const SphereField& u);

// max_i | |gamma_{i+1} - gamma_i| / dx - 1 |
double arclength_residual(const Curve& c);

struct CurveSnapshot {
  double t = 0.0;
  Curve curve;
};

struct BcfResidual {
  // Interior residual after removing its spatial mean (a space-constant
  // translation of the curve, which does not change the flow).
  double residual = 0.0;
  // Same without the translation; carries the O(dx) boundary flux.
  double raw_residual = 0.0;
};

/// L2 norm over interior nodes of
///   gamma(t_m) - gamma(t_0) - int_{t_0}^{t_m} d1 gamma x d2 gamma dt
/// with the time integral taken by the trapezoid rule over the snapshots.
BcfResidual bcf_residual(std::span<const CurveSnapshot> snapshots);

struct HashimotoField {
  Grid1D grid;
  ScalarField k;
  ScalarField tau;  // NaN where undefined
  std::vector<std::complex<double>> q;
  std::vector<std::uint8_t> defined;
  std::vector<std::string> warnings;
};

/// k = |d1 u|, tau = (u x d1 u) . d2 u / k^2 where k > eps, q = k exp(i T)
/// with T the left-endpoint running integral of tau. T restarts at 0 after
/// every undefined node.
HashimotoField hashimoto(const SphereField& u, double eps = 1e-8);

// t,x,g1,g2,g3
void write_curve_csv(std::ostream& out, std::span<const CurveSnapshot> snapshots);
// x,k,tau,re_q,im_q,defined
void write_hashimoto_csv(std::ostream& out, const HashimotoField& f);

}  // namespace fdsme
