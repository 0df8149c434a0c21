#include "hypcm/sphere_grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "hypcm/errors.hpp"

namespace hypcm {

namespace {

constexpr double kPi = std::numbers::pi;

// Integral of sin^m over [0, theta].
double sin_power_primitive(int m, double theta) {
  if (m == 0) return theta;
  if (m == 1) return 1.0 - std::cos(theta);
  return -std::pow(std::sin(theta), m - 1) * std::cos(theta) / m +
         (m - 1.0) / m * sin_power_primitive(m - 2, theta);
}

void check_size(std::span<const double> f, const SphereGrid& grid) {
  if (static_cast<int>(f.size()) != grid.size())
    throw DomainError("field has " + std::to_string(f.size()) + " entries, grid has " +
                      std::to_string(grid.size()) + " nodes");
}

}  // namespace

const char* grid_mode_name(GridMode mode) {
  return mode == GridMode::FullS2 ? "full-s2" : "axisymmetric";
}

double sphere_measure(int m) {
  const double a = 0.5 * (m + 1);
  return 2.0 * std::pow(kPi, a) / std::tgamma(a);
}

SphereGrid SphereGrid::build(GridMode mode, int n_theta, int n_phi, int dim) {
  if (n_theta < kMinThetaNodes)
    throw ConfigError("n_theta=" + std::to_string(n_theta) + " below the floor of " +
                      std::to_string(kMinThetaNodes));
  if (dim < 2) throw ConfigError("sphere dimension must be at least 2");
  SphereGrid g;
  g.mode_ = mode;
  g.dim_ = dim;
  g.n_theta_ = n_theta;
  g.h_theta_ = kPi / n_theta;
  if (mode == GridMode::FullS2) {
    if (dim != 2) throw ConfigError("full-s2 grids require n = 2");
    if (n_phi < 4 || n_phi % 2 != 0)
      throw ConfigError("full-s2 grids need an even n_phi >= 4 (got " + std::to_string(n_phi) + ")");
    g.n_phi_ = n_phi;
    g.h_phi_ = 2.0 * kPi / n_phi;
  } else {
    g.n_phi_ = 1;
    g.h_phi_ = 0.0;
  }

  g.thetas_.resize(n_theta);
  g.ring_weights_.resize(n_theta);
  for (int i = 0; i < n_theta; ++i) {
    g.thetas_[i] = (i + 0.5) * g.h_theta_;
    const double lo = i * g.h_theta_;
    const double hi = (i + 1) * g.h_theta_;
    if (mode == GridMode::FullS2) {
      // 2 sin(h/2) sin(theta_i) h_phi
      g.ring_weights_[i] = g.h_phi_ * (std::cos(lo) - std::cos(hi));
    } else {
      g.ring_weights_[i] = sphere_measure(dim - 1) *
                           (sin_power_primitive(dim - 1, hi) - sin_power_primitive(dim - 1, lo));
    }
  }
  return g;
}

double SphereGrid::total_measure() const { return sphere_measure(dim_); }

int SphereGrid::neighbor(int node, int d_ring, int d_column) const {
  int r = ring(node) + d_ring;
  int c = column(node) + d_column;
  bool crossed = false;
  if (r < 0) {
    r = -1 - r;
    crossed = true;
  } else if (r >= n_theta_) {
    r = 2 * n_theta_ - 1 - r;
    crossed = true;
  }
  if (mode_ == GridMode::Axisymmetric) return r;
  if (crossed) c += n_phi_ / 2;
  c %= n_phi_;
  if (c < 0) c += n_phi_;
  return index(r, c);
}

std::vector<int> SphereGrid::stencil(int node) const {
  std::vector<int> s;
  if (mode_ == GridMode::Axisymmetric) {
    s = {neighbor(node, -1, 0), node, neighbor(node, 1, 0)};
  } else {
    s.reserve(9);
    for (int dr = -1; dr <= 1; ++dr)
      for (int dc = -1; dc <= 1; ++dc) s.push_back(neighbor(node, dr, dc));
  }
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

std::array<double, 3> SphereGrid::unit_vector(int node) const {
  const double t = theta(node);
  const double p = phi(node);
  return {std::sin(t) * std::cos(p), std::sin(t) * std::sin(p), std::cos(t)};
}

// Plain centred quotients in (theta, phi); across a pole the theta
// neighbour is the antipodal column of the first/last ring.

FrameVector covariant_grad_at(std::span<const double> f, const SphereGrid& grid, int p) {
  const double ht = grid.h_theta();
  const double t = grid.theta(p);
  FrameVector v;
  v.e1 = (f[grid.neighbor(p, 1, 0)] - f[grid.neighbor(p, -1, 0)]) / (2.0 * ht);
  if (grid.mode() == GridMode::FullS2) {
    const double hp = grid.h_phi();
    const double fp = (f[grid.neighbor(p, 0, 1)] - f[grid.neighbor(p, 0, -1)]) / (2.0 * hp);
    v.e2 = fp / std::sin(t);
  }
  return v;
}

FrameMatrix covariant_hess_at(std::span<const double> f, const SphereGrid& grid, int p) {
  const double ht = grid.h_theta();
  const double t = grid.theta(p);
  const double st = std::sin(t);
  const double cot = std::cos(t) / st;
  const double f0 = f[p];
  const double fn = f[grid.neighbor(p, 1, 0)];
  const double fs = f[grid.neighbor(p, -1, 0)];
  const double d_t = (fn - fs) / (2.0 * ht);
  const double d_tt = (fn - 2.0 * f0 + fs) / (ht * ht);

  FrameMatrix m;
  m.m11 = d_tt;
  if (grid.mode() == GridMode::Axisymmetric) {
    m.m22 = cot * d_t;
    return m;
  }
  const double hp = grid.h_phi();
  const double fe = f[grid.neighbor(p, 0, 1)];
  const double fw = f[grid.neighbor(p, 0, -1)];
  const double d_p = (fe - fw) / (2.0 * hp);
  const double d_pp = (fe - 2.0 * f0 + fw) / (hp * hp);
  const double d_tp = (f[grid.neighbor(p, 1, 1)] - f[grid.neighbor(p, 1, -1)] -
                       f[grid.neighbor(p, -1, 1)] + f[grid.neighbor(p, -1, -1)]) /
                      (4.0 * ht * hp);
  m.m12 = (d_tp - cot * d_p) / st;
  m.m22 = d_pp / (st * st) + cot * d_t;
  return m;
}

VectorField covariant_grad(std::span<const double> f, const SphereGrid& grid) {
  check_size(f, grid);
  VectorField out(grid.size());
  for (int p = 0; p < grid.size(); ++p) out[p] = covariant_grad_at(f, grid, p);
  return out;
}

MatrixField covariant_hess(std::span<const double> f, const SphereGrid& grid) {
  check_size(f, grid);
  MatrixField out(grid.size());
  for (int p = 0; p < grid.size(); ++p) out[p] = covariant_hess_at(f, grid, p);
  return out;
}

ScalarField laplacian(std::span<const double> f, const SphereGrid& grid) {
  const auto h = covariant_hess(f, grid);
  ScalarField out(grid.size());
  for (int p = 0; p < grid.size(); ++p) out[p] = h[p].m11 + (grid.dim() - 1) * h[p].m22;
  return out;
}

double integrate(std::span<const double> f, const SphereGrid& grid) {
  check_size(f, grid);
  double s = 0.0;
  for (int p = 0; p < grid.size(); ++p) s += f[p] * grid.weight(p);
  return s;
}

double integrate(std::span<const double> f, const SphereGrid& grid, const NodeMask& mask) {
  check_size(f, grid);
  if (static_cast<int>(mask.size()) != grid.size()) throw DomainError("mask size does not match grid");
  double s = 0.0;
  for (int p = 0; p < grid.size(); ++p)
    if (mask[p]) s += f[p] * grid.weight(p);
  return s;
}

NodeMask full_mask(const SphereGrid& grid) { return NodeMask(grid.size(), true); }

NodeMask northern_hemisphere_mask(const SphereGrid& grid) {
  NodeMask m(grid.size());
  for (int p = 0; p < grid.size(); ++p) m[p] = grid.theta(p) < 0.5 * kPi;
  return m;
}

NodeMask complement(const NodeMask& mask) {
  NodeMask m(mask.size());
  for (std::size_t i = 0; i < mask.size(); ++i) m[i] = !mask[i];
  return m;
}

}  // namespace hypcm
