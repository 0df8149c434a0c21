#pragma once

// Geometry of a star-shaped hypersurface in hyperbolic space H^{n+1} written as
// a radial graph rho over S^n, in geodesic polar coordinates
// ds^2 = drho^2 + sinh^2(rho) dz^2.

#include <array>
#include <memory>
#include <span>
#include <vector>

#include "hypcm/sphere_grid.hpp"
#include "hypcm/symfun.hpp"

namespace hypcm {

/// Warping profile of the hyperbolic metric.
struct HyperbolicProfile {
  static double phi(double rho);        // sinh
  static double phi_prime(double rho);  // cosh
  /// Primitive of phi normalised to Phi(0) = 0.
  static double Phi(double rho);
};

/// Positive radial function sampled on a grid.
class RadialField {
 public:
  /// Throws DomainError if any value is not strictly positive (or not finite)
  /// or the size does not match the grid.
  RadialField(std::shared_ptr<const SphereGrid> grid, ScalarField rho);

  const SphereGrid& grid() const { return *grid_; }
  const std::shared_ptr<const SphereGrid>& grid_ptr() const { return grid_; }
  std::span<const double> rho() const { return rho_; }
  const ScalarField& values() const { return rho_; }

 private:
  std::shared_ptr<const SphereGrid> grid_;
  ScalarField rho_;
};

/// Derived geometry at one node.
struct NodeGeometry {
  double rho = 0.0;
  FrameVector grad_rho;
  double omega_tilde = 0.0;  // sqrt(phi^2 + |grad rho|^2)
  double u = 0.0;            // support function phi^2 / omega_tilde
  double area_el = 0.0;      // phi^{n-1} omega_tilde, density against dmu_{S^n}
  FrameMatrix g;             // induced metric, 2x2 frame block
  FrameMatrix h_tilde;       // symmetrised shape operator, 2x2 frame block
  std::vector<double> kappa; // n principal curvatures, descending
};

/// Node geometry from rho and its frame gradient and Hessian. `dim` is the
/// sphere dimension n; for n > 2 the latitudinal curvature (from m22) fills the
/// remaining n-2 slots, which is exact for axisymmetric fields.
NodeGeometry node_geometry(double rho, const FrameVector& grad, const FrameMatrix& hess, int dim);

/// Mixed tensor h^i_j = g^{ik} h_kj of the 2x2 frame block, before
/// symmetrisation (row-major 2x2). Similar to h_tilde.
std::array<double, 4> raw_shape_operator(double rho, const FrameVector& grad, const FrameMatrix& hess);

/// Per-node geometry of a radial graph.
class GeometryField {
 public:
  GeometryField(std::shared_ptr<const SphereGrid> grid, std::vector<NodeGeometry> nodes);

  const SphereGrid& grid() const { return *grid_; }
  int dim() const { return grid_->dim(); }
  int size() const { return static_cast<int>(nodes_.size()); }
  const NodeGeometry& operator[](int node) const { return nodes_[node]; }
  std::span<const NodeGeometry> nodes() const { return nodes_; }

  PrincipalSpectrum kappa(int node) const;
  /// sigma_k of the principal curvatures at a node, 0 <= k <= n.
  double sigma(int node, int k) const { return sigmas_[node * (dim() + 1) + k]; }
  ScalarField sigma_field(int k) const;
  ScalarField area_field() const;
  /// Nodes whose curvature vector lies in Gamma_k.
  int admissible_count(int k) const;
  bool admissible(int k) const { return admissible_count(k) == size(); }
  double max_principal_curvature() const;

 private:
  std::shared_ptr<const SphereGrid> grid_;
  std::vector<NodeGeometry> nodes_;
  std::vector<double> sigmas_;
};

GeometryField geometry_from_radial(const RadialField& r);

/// Phi_r = integral of sigma_{n-r}(kappa) area_el over the (masked) nodes.
double curvature_measure(const GeometryField& geom, int r_index);
double curvature_measure(const GeometryField& geom, int r_index, const NodeMask& mask);

/// gamma(rho) = ln tanh(rho / 2), the primitive of 1/sinh.
double gamma_transform(double rho);
double gamma_inverse(double gamma);
/// Primitive of 1/sinh^3 vanishing at infinity.
double gamma_tilde_transform(double rho);

/// Minkowski coordinates (x0, x1, x2, x3) on the hyperboloid -x0^2 + |x|^2 = -1.
using HyperboloidPoint = std::array<double, 4>;

HyperboloidPoint embed_point(double rho, const std::array<double, 3>& unit);
std::vector<HyperboloidPoint> embed_hyperboloid(const RadialField& r);
/// Poincare ball projection x / (1 + x0).
std::array<double, 3> poincare_ball(const HyperboloidPoint& x);
/// Hyperbolic distance arccosh(x0 y0 - x.y).
double hyperbolic_distance(const HyperboloidPoint& x, const HyperboloidPoint& y);

}  // namespace hypcm
