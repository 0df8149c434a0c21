#pragma once

// Computable forms of the a priori estimates, used to validate solutions, and
// the feasibility gate of the k = n (Alexandrov) problem.

#include <span>
#include <string>
#include <vector>

#include "hypcm/hypersurface.hpp"

namespace hypcm {

struct C0Bounds {
  double c0 = 0.0;
  double c1 = 0.0;
};

/// C(n,k) cosh^k(rho) sinh^{n-k}(rho): the right-hand side produced by the
/// geodesic sphere of radius rho. Strictly increasing on rho > 0.
double round_sphere_map(int n, int k, double rho);

/// Unique rho > 0 with round_sphere_map(n, k, rho) = c, found by a verified
/// bracket, bisection and Newton polish. For k = n the map starts at 1, so
/// c <= 1 throws InfeasibleError.
double geodesic_sphere_radius(int n, int k, double c);

/// Radial bounds for k < n:
///   c1 = arcsinh((max f0 / C(n,k))^{1/n}),
///   c0 = root of round_sphere_map(n, k, .) = min f0.
/// Throws DomainError for k = n.
C0Bounds c0_bounds(std::span<const double> f0, int n, int k);

/// Radial bounds for k = n, valid when inf f0 > 1:
///   c0 = arccosh(min f0^{1/n}), c1 = arccosh(max f0^{1/n}).
C0Bounds alexandrov_c0_bounds(std::span<const double> f0, int n);

struct Verdict {
  std::string name;
  std::string anchor;  // which estimate the check stands for
  bool applicable = true;
  bool pass = false;
  double observed = 0.0;
  double bound = 0.0;
};

struct AprioriReport {
  double c0 = 0.0;
  double c1 = 0.0;
  double rho_min = 0.0;
  double rho_max = 0.0;
  double grad_gamma_max = 0.0;
  double lambda_max = 0.0;
  bool admissible = false;
  int admissible_nodes = 0;
  double tol = 0.0;  // 2 h^2 max(rho)
  std::vector<Verdict> verdicts;

  /// All applicable verdicts pass.
  bool pass() const;
};

/// Validator report for a computed solution. Never throws on failed checks.
AprioriReport apriori_report(const RadialField& solution, const GeometryField& geom,
                             std::span<const double> f0, int k);

enum class Feasibility { Feasible, Infeasible, Unknown };

const char* feasibility_name(Feasibility f);

/// inf f0 > 1: feasible; max f0 < 1: infeasible; otherwise unknown.
Feasibility feasibility_alexandrov(std::span<const double> f0);

struct GradientBoundCheck {
  bool applicable = false;       // false unless every principal curvature is positive
  double sup_grad_gamma_tilde = 0.0;
  double bound = 0.0;            // 1 / sinh^2(rho) at the node of the supremum
  double min_bound = 0.0;        // min over nodes of 1 / sinh^2(rho), reported only
  double slack = 0.0;
  bool pass = false;
};

/// Checks sup |grad gamma~| < 1 / phi^2 at the maximising node, where
/// d gamma~ / d rho = 1 / sinh^3(rho). Skipped on non-convex surfaces.
GradientBoundCheck gradient_bound_alexandrov(const RadialField& solution, const GeometryField& geom);

}  // namespace hypcm
