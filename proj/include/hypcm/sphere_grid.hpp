#pragma once

// Cell-centred equiangular grids on S^n and covariant finite differences with
// respect to the round metric, expressed in the orthonormal frame
// e1 = d/dtheta, e2 = (1/sin theta) d/dphi.

#include <array>
#include <span>
#include <vector>

namespace hypcm {

enum class GridMode { FullS2, Axisymmetric };

const char* grid_mode_name(GridMode mode);

using ScalarField = std::vector<double>;
using NodeMask = std::vector<bool>;

struct FrameVector {
  double e1 = 0.0;
  double e2 = 0.0;
};

/// Symmetric frame matrix. On axisymmetric grids of S^n, `m22` is the common
/// value of all n-1 latitudinal diagonal entries and `m12` is zero.
struct FrameMatrix {
  double m11 = 0.0;
  double m12 = 0.0;
  double m22 = 0.0;
};

using VectorField = std::vector<FrameVector>;
using MatrixField = std::vector<FrameMatrix>;

/// Rings are cell-centred in theta (no node at either pole). On the full S^2
/// grid the azimuthal columns sit at phi_j = j * h_phi; stencils that step
/// across a pole continue to the antipodal column (phi + pi) of the same ring.
/// The axisymmetric grid stores one node per ring for any sphere dimension n
/// and reflects across the poles.
///
/// Quadrature weights are exact cell measures, so they sum to |S^n| to
/// round-off; they agree with sin(theta) h_theta h_phi to O(h^2).
class SphereGrid {
 public:
  static constexpr int kMinThetaNodes = 16;

  /// Throws ConfigError below the resolution floor, for an odd n_phi on the
  /// full grid, or for dim != 2 on the full grid.
  static SphereGrid build(GridMode mode, int n_theta, int n_phi = 0, int dim = 2);

  GridMode mode() const { return mode_; }
  /// Dimension n of the sphere S^n.
  int dim() const { return dim_; }
  int n_theta() const { return n_theta_; }
  /// 1 on axisymmetric grids.
  int n_phi() const { return n_phi_; }
  int size() const { return n_theta_ * n_phi_; }
  double h_theta() const { return h_theta_; }
  double h_phi() const { return h_phi_; }

  int index(int ring, int column) const { return ring * n_phi_ + column; }
  int ring(int node) const { return node / n_phi_; }
  int column(int node) const { return node % n_phi_; }
  double theta(int node) const { return thetas_[ring(node)]; }
  double phi(int node) const { return column(node) * h_phi_; }
  double weight(int node) const { return ring_weights_[ring(node)]; }
  std::span<const double> ring_thetas() const { return thetas_; }

  /// Total measure |S^n|.
  double total_measure() const;

  /// Node read by a stencil offset (d_ring, d_column) from `node`, with pole
  /// continuation applied.
  int neighbor(int node, int d_ring, int d_column) const;

  /// Every node read by the gradient and Hessian stencils at `node`, including
  /// `node` itself; sorted, no duplicates.
  std::vector<int> stencil(int node) const;

  /// Unit vector in R^3 of the node (phi = 0 representative on axisymmetric
  /// grids).
  std::array<double, 3> unit_vector(int node) const;

  /// Field of f(theta, phi) sampled at the nodes.
  template <class F>
  ScalarField sample(F&& f) const {
    ScalarField out(size());
    for (int p = 0; p < size(); ++p) out[p] = f(theta(p), phi(p));
    return out;
  }

 private:
  GridMode mode_ = GridMode::FullS2;
  int dim_ = 2;
  int n_theta_ = 0;
  int n_phi_ = 1;
  double h_theta_ = 0.0;
  double h_phi_ = 0.0;
  std::vector<double> thetas_;
  std::vector<double> ring_weights_;
};

/// Measure of the unit sphere S^m.
double sphere_measure(int m);

/// Frame components (f_theta, f_phi / sin theta) by centred differences.
VectorField covariant_grad(std::span<const double> f, const SphereGrid& grid);

/// Frame components of the covariant Hessian of the round metric.
MatrixField covariant_hess(std::span<const double> f, const SphereGrid& grid);

/// Gradient and Hessian at a single node (same stencils as above).
FrameVector covariant_grad_at(std::span<const double> f, const SphereGrid& grid, int node);
FrameMatrix covariant_hess_at(std::span<const double> f, const SphereGrid& grid, int node);

/// Trace of the covariant Hessian, (n-1) m22 counted on axisymmetric grids.
ScalarField laplacian(std::span<const double> f, const SphereGrid& grid);

double integrate(std::span<const double> f, const SphereGrid& grid);
/// Sum of f * w over nodes where mask is true.
double integrate(std::span<const double> f, const SphereGrid& grid, const NodeMask& mask);

NodeMask full_mask(const SphereGrid& grid);
NodeMask northern_hemisphere_mask(const SphereGrid& grid);
NodeMask complement(const NodeMask& mask);

}  // namespace hypcm
