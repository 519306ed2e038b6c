#include "fdsme/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "fdsme/errors.hpp"
#include "fdsme/statistics.hpp"

namespace fdsme {

Curve bcf_transform(const SphereField& u) {
  const Grid1D& grid = u.grid();
  VectorField pts(u.size());
  pts[0] = Vec3::Zero();
  for (std::size_t i = 0; i + 1 < u.size(); ++i) pts[i + 1] = pts[i] + grid.dx() * u[i];
  return Curve{grid, std::move(pts)};
}

double arclength_residual(const Curve& c) {
  check_size(c.grid, c.points.size(), "arclength_residual");
  double r = 0.0;
  for (std::size_t i = 0; i + 1 < c.points.size(); ++i)
    r = std::max(r, std::abs((c.points[i + 1] - c.points[i]).norm() / c.grid.dx() - 1.0));
  return r;
}

namespace {
// d1 gamma x d2 gamma at interior nodes (zero at the ends, unused there).
VectorField binormal_velocity(const Curve& c) {
  const std::size_t n = c.points.size();
  const double dx = c.grid.dx();
  const auto& g = c.points;
  VectorField v(n, Vec3::Zero());
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const Vec3 d1 = (g[i + 1] - g[i - 1]) / (2.0 * dx);
    const Vec3 d2 = (g[i + 1] - 2.0 * g[i] + g[i - 1]) / (dx * dx);
    v[i] = d1.cross(d2);
  }
  return v;
}
}  // namespace

BcfResidual bcf_residual(std::span<const CurveSnapshot> snaps) {
  if (snaps.size() < 2) throw InvalidInput("bcf_residual: need at least 2 snapshots");
  const Grid1D& grid = snaps.front().curve.grid;
  const std::size_t n = grid.size();
  for (const auto& s : snaps) {
    if (!(s.curve.grid == grid)) throw ConfigError("bcf_residual: snapshots on different grids");
    check_size(grid, s.curve.points.size(), "bcf_residual");
  }
  VectorField r(n, Vec3::Zero());
  for (std::size_t i = 0; i < n; ++i) r[i] = snaps.back().curve.points[i] - snaps.front().curve.points[i];
  VectorField prev = binormal_velocity(snaps.front().curve);
  for (std::size_t k = 1; k < snaps.size(); ++k) {
    VectorField cur = binormal_velocity(snaps[k].curve);
    const double h = snaps[k].t - snaps[k - 1].t;
    for (std::size_t i = 1; i + 1 < n; ++i) r[i] -= 0.5 * h * (prev[i] + cur[i]);
    prev = std::move(cur);
  }
  Vec3 mean = Vec3::Zero();
  for (std::size_t i = 1; i + 1 < n; ++i) mean += r[i];
  mean /= static_cast<double>(n - 2);
  BcfResidual out;
  double s = 0.0, raw = 0.0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    s += grid.dx() * (r[i] - mean).squaredNorm();
    raw += grid.dx() * r[i].squaredNorm();
  }
  out.residual = std::sqrt(s);
  out.raw_residual = std::sqrt(raw);
  return out;
}

HashimotoField hashimoto(const SphereField& u, double eps) {
  if (!(eps > 0.0)) throw InvalidInput("hashimoto: eps must be positive");
  const Grid1D& grid = u.grid();
  const std::size_t n = u.size();
  const VectorField d1 = d1_neumann(grid, u.values());
  const VectorField d2 = d2_neumann(grid, u.values());
  HashimotoField f{grid, ScalarField(n), ScalarField(n), std::vector<std::complex<double>>(n),
                   std::vector<std::uint8_t>(n, 0), {}};
  std::size_t undefined = 0;
  double phase = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    f.k[i] = d1[i].norm();
    if (f.k[i] > eps) {
      f.defined[i] = 1;
      f.tau[i] = u[i].cross(d1[i]).dot(d2[i]) / (f.k[i] * f.k[i]);
    } else {
      f.tau[i] = std::numeric_limits<double>::quiet_NaN();
      ++undefined;
    }
    f.q[i] = std::polar(f.k[i], phase);
    phase = f.defined[i] ? phase + grid.dx() * f.tau[i] : 0.0;
  }
  if (undefined > 0)
    f.warnings.push_back("torsion undefined at " + std::to_string(undefined) +
                         " node(s) with |d1 u| <= eps; phase restarts after each");
  return f;
}

void write_curve_csv(std::ostream& out, std::span<const CurveSnapshot> snapshots) {
  out << "t,x,g1,g2,g3\n";
  for (const auto& s : snapshots) {
    for (std::size_t i = 0; i < s.curve.points.size(); ++i) {
      const Vec3& p = s.curve.points[i];
      out << format_number(s.t) << ',' << format_number(s.curve.grid.x(i)) << ','
          << format_number(p.x()) << ',' << format_number(p.y()) << ',' << format_number(p.z())
          << '\n';
    }
  }
}

void write_hashimoto_csv(std::ostream& out, const HashimotoField& f) {
  out << "x,k,tau,re_q,im_q,defined\n";
  for (std::size_t i = 0; i < f.k.size(); ++i) {
    out << format_number(f.grid.x(i)) << ',' << format_number(f.k[i]) << ','
        << format_number(f.tau[i]) << ',' << format_number(f.q[i].real()) << ','
        << format_number(f.q[i].imag()) << ',' << static_cast<int>(f.defined[i]) << '\n';
  }
}

}  // namespace fdsme
