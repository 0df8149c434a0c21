#pragma once

// Prescribed curvature-measure equation
//   (phi^{n-1} sqrt(phi^2 + |grad rho|^2))^{1/k} sigma_k(kappa)^{1/k} = f^{1/k}
// on S^n: residual, finite-difference Jacobian, safeguarded Newton and the
// continuity-method driver.

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/SparseCore>

#include "hypcm/errors.hpp"
#include "hypcm/estimates.hpp"
#include "hypcm/hypersurface.hpp"

namespace hypcm {

struct ContinuationConfig {
  int k = 1;
  double t_step_init = 0.25;
  double t_step_min = 1e-4;
  double newton_tol = 1e-10;  // sup-norm of the residual
  int newton_max_iter = 25;
  double fd_eps = 1e-7;
  double backtrack_factor = 0.5;
  int max_backtracks = 30;
  int threads = 1;
  /// Called with every accepted Newton iterate (and the path start).
  std::function<void(double t, const RadialField& rho)> on_accept;

  /// Throws ConfigError when the fields are inconsistent.
  void validate(int n) const;
};

struct TraceEntry {
  double t = 0.0;
  int newton_iters = 0;
  double residual_norm = 0.0;
};

struct SolveReport {
  std::vector<TraceEntry> t_trace;
  double final_residual = 0.0;
  /// sup |area_el sigma_k - f0|, the residual in the un-rooted form.
  double final_raw_residual = 0.0;
  bool admissible = false;
  bool bounds_ok = false;
  int accepted_iterates = 0;
  int rejected_steps = 0;
  std::optional<AprioriReport> apriori;
  std::optional<GradientBoundCheck> gradient_bound;
  std::string wall_notes;
};

class ContinuationStallError : public Error {
 public:
  ContinuationStallError(const std::string& what, std::vector<TraceEntry> trace)
      : Error(ErrorCategory::ContinuationStall, what), trace_(std::move(trace)) {}
  const std::vector<TraceEntry>& trace() const { return trace_; }

 private:
  std::vector<TraceEntry> trace_;
};

double sup_norm(std::span<const double> v);

/// Nodewise (area_el sigma_k)^{1/k} - f_target^{1/k}. Throws InadmissibleError
/// when the curvature vector leaves Gamma_k at any node.
ScalarField residual(const RadialField& r, std::span<const double> f_target, int k);

/// Right-hand side on the continuation path at parameter t:
/// (1 - t) + t f0 for k < n and 2 (1 - t) + t f0 for k = n.
ScalarField continuation_target(std::span<const double> f0, int n, int k, double t);

/// Jacobian of `residual`, sparse over the grid stencil. Each node's residual
/// is differenced forward in its local jet (rho, frame gradient, frame
/// Hessian) with step fd_eps * max(1, |q|); the jet's linear dependence on
/// the nodal values is applied exactly through the stencil weights. Nodal
/// perturbations are avoided because next to a pole a unit change of one
/// value moves the Hessian by O(h^-4).
Eigen::SparseMatrix<double> jacobian(const RadialField& r, std::span<const double> f_target, int k,
                                     double fd_eps, int threads = 1);

/// Size of the residual change caused by rounding rho to double precision:
/// eps * max_p sum_q |J_pq| |rho_q|. The stencil weights grow like h^-4 next
/// to the poles, so on fine full grids this exceeds a fixed newton_tol.
double residual_floor(const Eigen::SparseMatrix<double>& jac, std::span<const double> rho);
double residual_floor(const RadialField& r, std::span<const double> f_target, int k, double fd_eps);

struct NewtonResult {
  RadialField solution;
  int iterations = 0;
  double residual_norm = 0.0;
};

/// Damped Newton with backtracking; a step is accepted only if the iterate is
/// positive, admissible and lowers the sup-norm residual. Converged means
/// residual <= max(newton_tol, residual_floor).
NewtonResult newton_solve(const RadialField& init, std::span<const double> f_target, int k,
                          const ContinuationConfig& cfg, double t_for_callback = 1.0);

struct ContinuationResult {
  RadialField solution;
  SolveReport report;
};

/// Continuity method from the geodesic sphere at t = 0 to the target at t = 1.
/// For k = n, max f0 < 1 throws InfeasibleError before any iteration and the
/// undecided regime (inf f0 <= 1 <= max f0) throws UndeterminedError.
ContinuationResult continuation_solve(std::shared_ptr<const SphereGrid> grid, std::span<const double> f0,
                                      const ContinuationConfig& cfg);

struct UniquenessEntry {
  bool converged = false;
  int iterations = 0;
  double sup_diff = 0.0;
  bool agrees = false;
  std::string note;
};

struct UniquenessReport {
  double tolerance = 0.0;
  std::vector<UniquenessEntry> entries;
  bool all_agree = true;
};

/// Re-runs the final Newton solve from reference + each perturbation and
/// compares with the reference. Disagreement is flagged, not thrown.
/// The default tolerance is 10 * newton_tol.
UniquenessReport uniqueness_probe(const RadialField& reference, std::span<const double> f0,
                                  const ContinuationConfig& cfg, const std::vector<ScalarField>& perturbations,
                                  std::optional<double> tolerance = std::nullopt);

}  // namespace hypcm
