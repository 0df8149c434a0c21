#include "hypcm/hypersurface.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "hypcm/errors.hpp"

namespace hypcm {

double HyperbolicProfile::phi(double rho) { return std::sinh(rho); }
double HyperbolicProfile::phi_prime(double rho) { return std::cosh(rho); }
double HyperbolicProfile::Phi(double rho) { return std::cosh(rho) - 1.0; }

RadialField::RadialField(std::shared_ptr<const SphereGrid> grid, ScalarField rho)
    : grid_(std::move(grid)), rho_(std::move(rho)) {
  if (!grid_) throw DomainError("RadialField: null grid");
  if (static_cast<int>(rho_.size()) != grid_->size())
    throw DomainError("RadialField: " + std::to_string(rho_.size()) + " values for " +
                      std::to_string(grid_->size()) + " nodes");
  for (std::size_t p = 0; p < rho_.size(); ++p)
    if (!(rho_[p] > 0.0) || !std::isfinite(rho_[p]))
      throw DomainError("RadialField: rho must be positive, got " + std::to_string(rho_[p]) +
                        " at node " + std::to_string(p));
}

NodeGeometry node_geometry(double rho, const FrameVector& grad, const FrameMatrix& hess, int dim) {
  const double phi = std::sinh(rho);
  const double dphi = std::cosh(rho);
  const double p1 = grad.e1;
  const double p2 = grad.e2;
  const double grad2 = p1 * p1 + p2 * p2;
  const double w = std::sqrt(phi * phi + grad2);

  NodeGeometry out;
  out.rho = rho;
  out.grad_rho = grad;
  out.omega_tilde = w;
  out.u = phi * phi / w;
  out.area_el = std::pow(phi, dim - 1) * w;
  out.g = {phi * phi + p1 * p1, p1 * p2, phi * phi + p2 * p2};

  // B = -phi rho_ij + 2 phi' rho_i rho_j + phi^2 phi' delta_ij
  const double b11 = -phi * hess.m11 + 2.0 * dphi * p1 * p1 + phi * phi * dphi;
  const double b12 = -phi * hess.m12 + 2.0 * dphi * p1 * p2;
  const double b22 = -phi * hess.m22 + 2.0 * dphi * p2 * p2 + phi * phi * dphi;
  // S = I - rho_i rho_j / (w (w + phi))
  const double c = 1.0 / (w * (w + phi));
  const double s11 = 1.0 - c * p1 * p1;
  const double s12 = -c * p1 * p2;
  const double s22 = 1.0 - c * p2 * p2;
  // SB
  const double t11 = s11 * b11 + s12 * b12;
  const double t12 = s11 * b12 + s12 * b22;
  const double t21 = s12 * b11 + s22 * b12;
  const double t22 = s12 * b12 + s22 * b22;
  const double scale = 1.0 / (phi * phi * w);
  out.h_tilde.m11 = scale * (t11 * s11 + t12 * s12);
  out.h_tilde.m12 = scale * 0.5 * ((t11 * s12 + t12 * s22) + (t21 * s11 + t22 * s12));
  out.h_tilde.m22 = scale * (t21 * s12 + t22 * s22);

  // Closed-form eigenvalues of the symmetric 2x2 block.
  const double mean = 0.5 * (out.h_tilde.m11 + out.h_tilde.m22);
  const double rad = std::hypot(0.5 * (out.h_tilde.m11 - out.h_tilde.m22), out.h_tilde.m12);
  out.kappa.reserve(dim);
  out.kappa.push_back(mean + rad);
  out.kappa.push_back(mean - rad);
  if (dim > 2) {
    const double lat = (-phi * hess.m22 + phi * phi * dphi) * scale;
    out.kappa.insert(out.kappa.end(), dim - 2, lat);
    std::stable_sort(out.kappa.begin(), out.kappa.end(), [](double a, double b) { return a > b; });
  }
  return out;
}

std::array<double, 4> raw_shape_operator(double rho, const FrameVector& grad, const FrameMatrix& hess) {
  const double phi = std::sinh(rho);
  const double dphi = std::cosh(rho);
  const double p1 = grad.e1;
  const double p2 = grad.e2;
  const double w2 = phi * phi + p1 * p1 + p2 * p2;
  const double w = std::sqrt(w2);
  // h_ij
  const double h11 = (-phi * hess.m11 + 2.0 * dphi * p1 * p1 + phi * phi * dphi) / w;
  const double h12 = (-phi * hess.m12 + 2.0 * dphi * p1 * p2) / w;
  const double h22 = (-phi * hess.m22 + 2.0 * dphi * p2 * p2 + phi * phi * dphi) / w;
  // g^ij
  const double gi11 = (1.0 - p1 * p1 / w2) / (phi * phi);
  const double gi12 = (-p1 * p2 / w2) / (phi * phi);
  const double gi22 = (1.0 - p2 * p2 / w2) / (phi * phi);
  return {gi11 * h11 + gi12 * h12, gi11 * h12 + gi12 * h22,
          gi12 * h11 + gi22 * h12, gi12 * h12 + gi22 * h22};
}

GeometryField::GeometryField(std::shared_ptr<const SphereGrid> grid, std::vector<NodeGeometry> nodes)
    : grid_(std::move(grid)), nodes_(std::move(nodes)) {
  const int n = grid_->dim();
  sigmas_.resize(nodes_.size() * (n + 1));
  for (std::size_t p = 0; p < nodes_.size(); ++p) {
    const auto e = sigma_all(std::span<const double>(nodes_[p].kappa), n);
    std::copy(e.begin(), e.end(), sigmas_.begin() + p * (n + 1));
  }
}

PrincipalSpectrum GeometryField::kappa(int node) const { return PrincipalSpectrum(nodes_[node].kappa, true); }

ScalarField GeometryField::sigma_field(int k) const {
  if (k < 0 || k > dim()) throw DomainError("sigma_field: k=" + std::to_string(k) + " out of range");
  ScalarField out(nodes_.size());
  for (int p = 0; p < size(); ++p) out[p] = sigma(p, k);
  return out;
}

ScalarField GeometryField::area_field() const {
  ScalarField out(nodes_.size());
  for (int p = 0; p < size(); ++p) out[p] = nodes_[p].area_el;
  return out;
}

int GeometryField::admissible_count(int k) const {
  if (k < 1 || k > dim()) throw DomainError("admissible_count: k=" + std::to_string(k) + " out of range");
  int count = 0;
  for (int p = 0; p < size(); ++p) {
    bool ok = true;
    for (int j = 1; j <= k && ok; ++j) ok = sigma(p, j) > 0.0;
    count += ok;
  }
  return count;
}

double GeometryField::max_principal_curvature() const {
  double m = -std::numeric_limits<double>::infinity();
  for (const auto& nd : nodes_) m = std::max(m, nd.kappa.front());
  return m;
}

GeometryField geometry_from_radial(const RadialField& r) {
  const SphereGrid& grid = r.grid();
  const auto rho = r.rho();
  std::vector<NodeGeometry> nodes(grid.size());
  for (int p = 0; p < grid.size(); ++p)
    nodes[p] = node_geometry(rho[p], covariant_grad_at(rho, grid, p), covariant_hess_at(rho, grid, p), grid.dim());
  return GeometryField(r.grid_ptr(), std::move(nodes));
}

namespace {

ScalarField measure_density(const GeometryField& geom, int r_index) {
  const int n = geom.dim();
  if (r_index < 0 || r_index > n)
    throw DomainError("curvature_measure: r=" + std::to_string(r_index) + " outside [0, " + std::to_string(n) + "]");
  ScalarField density(geom.size());
  for (int p = 0; p < geom.size(); ++p) density[p] = geom.sigma(p, n - r_index) * geom[p].area_el;
  return density;
}

}  // namespace

double curvature_measure(const GeometryField& geom, int r_index) {
  return integrate(measure_density(geom, r_index), geom.grid());
}

double curvature_measure(const GeometryField& geom, int r_index, const NodeMask& mask) {
  return integrate(measure_density(geom, r_index), geom.grid(), mask);
}

double gamma_transform(double rho) {
  if (!(rho > 0.0)) throw DomainError("gamma_transform: rho must be positive");
  return std::log(std::tanh(0.5 * rho));
}

double gamma_inverse(double gamma) {
  if (!(gamma < 0.0)) throw DomainError("gamma_inverse: gamma must be negative");
  return 2.0 * std::atanh(std::exp(gamma));
}

double gamma_tilde_transform(double rho) {
  if (!(rho > 0.0)) throw DomainError("gamma_tilde_transform: rho must be positive");
  const double s = std::sinh(rho);
  return -0.5 * (std::cosh(rho) / (s * s) + std::log(std::tanh(0.5 * rho)));
}

HyperboloidPoint embed_point(double rho, const std::array<double, 3>& unit) {
  const double s = std::sinh(rho);
  return {std::cosh(rho), s * unit[0], s * unit[1], s * unit[2]};
}

std::vector<HyperboloidPoint> embed_hyperboloid(const RadialField& r) {
  std::vector<HyperboloidPoint> out(r.grid().size());
  for (int p = 0; p < r.grid().size(); ++p) out[p] = embed_point(r.rho()[p], r.grid().unit_vector(p));
  return out;
}

std::array<double, 3> poincare_ball(const HyperboloidPoint& x) {
  const double d = 1.0 + x[0];
  return {x[1] / d, x[2] / d, x[3] / d};
}

double hyperbolic_distance(const HyperboloidPoint& x, const HyperboloidPoint& y) {
  const double c = x[0] * y[0] - x[1] * y[1] - x[2] * y[2] - x[3] * y[3];
  return std::acosh(std::max(1.0, c));
}

}  // namespace hypcm
