#include "fdsme/fields.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "fdsme/errors.hpp"

namespace fdsme {

SphereField::SphereField(const Grid1D& grid, VectorField values)
    : grid_(grid), values_(std::move(values)) {
  check_size(grid_, values_.size(), "SphereField");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const double dev = std::abs(values_[i].norm() - 1.0);
    if (!(dev <= kUnitTolerance))
      throw InvalidInput("SphereField: node " + std::to_string(i) +
                         " is off the unit sphere by " + std::to_string(dev));
  }
}

double SphereField::max_norm_deviation() const {
  double m = 0.0;
  for (const auto& v : values_) m = std::max(m, std::abs(v.norm() - 1.0));
  return m;
}

NoiseIntensity NoiseIntensity::constant(const Grid1D& grid, double c) {
  return NoiseIntensity(grid, ScalarField(grid.size(), c), ScalarField(grid.size(), 0.0),
                        NoiseConstant{c});
}

NoiseIntensity NoiseIntensity::cosine(const Grid1D& grid, double alpha, int k) {
  if (k < 1) throw ConfigError("cosine noise: k must be a positive integer");
  const double expected = 2.0 * std::numbers::pi * k;
  if (std::abs(grid.length() - expected) > 1e-9 * expected)
    throw ConfigError("cosine noise: grid length must be 2*pi*k = " + std::to_string(expected));
  ScalarField h(grid.size()), dh(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    h[i] = alpha * std::cos(grid.x(i));
    dh[i] = -alpha * std::sin(grid.x(i));
  }
  return NoiseIntensity(grid, std::move(h), std::move(dh), NoiseCosine{alpha, k});
}

NoiseIntensity NoiseIntensity::tabulated(const Grid1D& grid, ScalarField h) {
  check_size(grid, h.size(), "tabulated noise");
  const std::size_t n = h.size();
  const double inv2dx = 0.5 / grid.dx();
  ScalarField dh(n);
  dh[0] = inv2dx * (-3.0 * h[0] + 4.0 * h[1] - h[2]);
  dh[n - 1] = inv2dx * (3.0 * h[n - 1] - 4.0 * h[n - 2] + h[n - 3]);
  for (std::size_t i = 1; i + 1 < n; ++i) dh[i] = inv2dx * (h[i + 1] - h[i - 1]);
  return NoiseIntensity(grid, std::move(h), std::move(dh), NoiseTabulated{});
}

NoiseIntensity NoiseIntensity::from_csv(const Grid1D& grid, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open noise table " + path.string());
  ScalarField xs, hs;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    double x = 0.0, h = 0.0;
    if (!(row >> x >> h)) {
      if (xs.empty()) continue;  // header
      throw ConfigError("malformed row in noise table " + path.string() + ": " + line);
    }
    xs.push_back(x);
    hs.push_back(h);
  }
  if (xs.size() != grid.size())
    throw ConfigError("noise table " + path.string() + " has " + std::to_string(xs.size()) +
                      " rows, grid has " + std::to_string(grid.size()) + " nodes");
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (std::abs(xs[i] - grid.x(i)) > 1e-9 * grid.length())
      throw ConfigError("noise table " + path.string() + ": x at row " + std::to_string(i) +
                        " does not match grid node " + std::to_string(grid.x(i)));
  }
  return tabulated(grid, std::move(hs));
}

bool NoiseIntensity::is_space_constant() const {
  if (std::holds_alternative<NoiseConstant>(family_)) return true;
  return std::all_of(h_.begin(), h_.end(), [&](double v) { return v == h_.front(); });
}

NoiseIntensity NoiseIntensity::scaled(double s) const {
  ScalarField h(h_), dh(dx_h_);
  for (auto& v : h) v *= s;
  for (auto& v : dh) v *= s;
  NoiseFamily fam = family_;
  if (auto* c = std::get_if<NoiseConstant>(&fam)) c->c *= s;
  if (auto* c = std::get_if<NoiseCosine>(&fam)) c->alpha *= s;
  return NoiseIntensity(grid_, std::move(h), std::move(dh), fam);
}

HMoments h_moments(const NoiseIntensity& h) {
  const Grid1D& grid = h.grid();
  const std::size_t n = grid.size();
  HMoments m;
  double s1 = 0.0, s2 = 0.0, sa = 0.0, sg = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = grid.weight(i);
    const double v = h.h()[i];
    s1 += w * v;
    s2 += w * v * v;
    sa += w * std::abs(v);
    sg += w * h.dx_h()[i] * h.dx_h()[i];
    m.sup = std::max(m.sup, std::abs(v));
  }
  m.mean = s1 / grid.length();
  m.mean_sq = s2 / grid.length();
  m.mean_abs = sa / grid.length();
  m.grad_l2_sq = sg;
  return m;
}

SphereField make_initial(const InitialKind& kind, const Grid1D& grid) {
  const std::size_t n = grid.size();
  if (const auto* c = std::get_if<InitialConstant>(&kind)) {
    const double norm = c->q.norm();
    if (!(std::abs(norm - 1.0) <= 1e-9))
      throw InvalidInput("constant initial datum must be a unit vector, |Q| = " +
                         std::to_string(norm));
    // Exact unit vector so the field invariant holds at 1e-12.
    return SphereField(grid, VectorField(n, c->q / norm));
  }
  const auto& gc = std::get<InitialGreatCircle>(kind);
  VectorField v(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double th = gc.amplitude * std::cos(std::numbers::pi * grid.x(i) / grid.length());
    v[i] = Vec3(std::cos(th), std::sin(th), 0.0);
  }
  return SphereField(grid, std::move(v));
}

SphereField project_sphere(const Grid1D& grid, std::span<const Vec3> raw) {
  check_size(grid, raw.size(), "project_sphere");
  VectorField v(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const double norm = raw[i].norm();
    if (!(norm >= 1e-12))
      throw DegenerateProjection("project_sphere: node " + std::to_string(i) +
                                 " has norm " + std::to_string(norm));
    v[i] = raw[i] / norm;
  }
  return SphereField(grid, std::move(v), SphereField::Unchecked{});
}

double neumann_boundary_mismatch(const SphereField& u) {
  const std::size_t n = u.size();
  const double left = (u[1] - u[0]).norm();
  const double right = (u[n - 1] - u[n - 2]).norm();
  return std::max(left, right) / u.grid().dx();
}

double tangency_residual(const SphereField& u) {
  const VectorField d1 = d1_neumann(u.grid(), u.values());
  double r = 0.0;
  for (std::size_t i = 1; i + 1 < u.size(); ++i) r = std::max(r, std::abs(u[i].dot(d1[i])));
  return r;
}

double fundamental_identity_residual(const SphereField& u) {
  const Grid1D& grid = u.grid();
  const VectorField d1 = d1_neumann(grid, u.values());
  const VectorField d2 = d2_neumann(grid, u.values());
  VectorField cross(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) cross[i] = u[i].cross(d2[i]);
  return norm_l2_sq(grid, d2) - norm_l2_sq(grid, cross) - norm_l4_4(grid, d1);
}

double damping_identity_residual(const Grid1D& grid, std::span<const Vec3> u) {
  const VectorField d1 = d1_neumann(grid, u);
  const VectorField d2 = d2_neumann(grid, u);
  double s = 0.0;
  for (std::size_t i = 1; i + 1 < u.size(); ++i) {
    const Vec3 lhs = -u[i].cross(u[i].cross(d2[i]));
    const Vec3 rhs = d2[i] + u[i] * d1[i].squaredNorm();
    s += grid.dx() * (lhs - rhs).squaredNorm();
  }
  return std::sqrt(s);
}

}  // namespace fdsme
