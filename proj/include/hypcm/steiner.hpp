#pragma once

// Volumes of outer parallel shells in H^{n+1} and their decomposition in the
// basis l_{n+1-r}(t) = int_0^t sinh^{n-r}(x) cosh^r(x) dx, whose coefficients
// are the curvature measures Phi_r.

#include <vector>

#include "hypcm/hypersurface.hpp"

namespace hypcm {

/// int_0^t sinh^{n-r} cosh^r by adaptive Gauss-Kronrod quadrature.
double l_coefficient(double t, int n, int r);

/// Volume swept by the outward normal flow over [0, t] from the masked part of
/// the surface: sum_nodes w area_el int_0^t prod_i (cosh s + kappa_i sinh s) ds.
/// Throws FocalCrossingError if a factor vanishes on [0, t].
double parallel_shell_volume(const GeometryField& geom, double t);
double parallel_shell_volume(const GeometryField& geom, double t, const NodeMask& mask);

/// sum_r l_{n+1-r}(t) Phi_r with Phi_r evaluated as surface integrals.
double steiner_prediction(const GeometryField& geom, double t, const NodeMask& mask);

struct SteinerFit {
  std::vector<double> phis_fit;     // Phi_0..Phi_n from the least-squares fit
  std::vector<double> phis_direct;  // Phi_0..Phi_n as surface integrals
  std::vector<double> t_samples;
  std::vector<double> shell_volumes;
  double condition = 0.0;           // 2-norm condition number of the design matrix
  double max_rel_err = 0.0;         // max_r |fit - direct| / |direct|
};

/// Fits Phi_r to sampled shell volumes. Needs at least n+2 strictly increasing
/// positive samples; throws FitError when the design matrix is numerically
/// rank deficient.
SteinerFit steiner_decompose(const GeometryField& geom, const NodeMask& mask, std::vector<double> t_samples);

}  // namespace hypcm
