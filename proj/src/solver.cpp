#include "hypcm/solver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

#include <Eigen/SparseLU>

namespace hypcm {

void ContinuationConfig::validate(int n) const {
  std::ostringstream os;
  if (k < 1 || k > n) os << "k=" << k << " must lie in [1, " << n << "]; ";
  if (!(t_step_min > 0.0 && t_step_min <= t_step_init && t_step_init <= 1.0))
    os << "need 0 < t_step_min <= t_step_init <= 1; ";
  if (!(newton_tol > 0.0)) os << "newton_tol must be positive; ";
  if (newton_max_iter < 1) os << "newton_max_iter must be at least 1; ";
  if (!(fd_eps > 0.0)) os << "fd_eps must be positive; ";
  if (!(backtrack_factor > 0.0 && backtrack_factor < 1.0)) os << "backtrack_factor must lie in (0, 1); ";
  if (max_backtracks < 0) os << "max_backtracks must be non-negative; ";
  if (threads < 1) os << "threads must be at least 1; ";
  if (!os.str().empty()) throw ConfigError("continuation config: " + os.str());
}

double sup_norm(std::span<const double> v) {
  double m = 0.0;
  for (const double x : v) m = std::max(m, std::abs(x));
  return m;
}

namespace {

// Local jet of rho at a node: value, frame gradient, frame Hessian.
constexpr int kJet = 6;
using Jet = std::array<double, kJet>;

Jet jet_at(std::span<const double> f, const SphereGrid& grid, int p) {
  const FrameVector g = covariant_grad_at(f, grid, p);
  const FrameMatrix h = covariant_hess_at(f, grid, p);
  return {f[p], g.e1, g.e2, h.m11, h.m12, h.m22};
}

double node_residual(const Jet& q, double f, int k, int n, int node) {
  const NodeGeometry g = node_geometry(q[0], {q[1], q[2]}, {q[3], q[4], q[5]}, n);
  const auto e = sigma_all(std::span<const double>(g.kappa), k);
  for (int j = 1; j <= k; ++j)
    if (!(e[j] > 0.0)) {
      std::ostringstream os;
      os << "curvature vector leaves Gamma_" << k << " at node " << node << " (sigma_" << j << " = " << e[j] << ")";
      throw InadmissibleError(os.str());
    }
  return std::pow(g.area_el * e[k], 1.0 / k) - std::pow(f, 1.0 / k);
}

}  // namespace

ScalarField residual(const RadialField& r, std::span<const double> f_target, int k) {
  const SphereGrid& grid = r.grid();
  const int n = grid.dim();
  if (k < 1 || k > n) throw DomainError("residual: k out of range");
  if (static_cast<int>(f_target.size()) != grid.size()) throw DomainError("residual: f_target size mismatch");
  const auto rho = r.rho();
  ScalarField out(grid.size());
  for (int p = 0; p < grid.size(); ++p) out[p] = node_residual(jet_at(rho, grid, p), f_target[p], k, n, p);
  return out;
}

ScalarField continuation_target(std::span<const double> f0, int n, int k, double t) {
  const double base = k == n ? 2.0 : 1.0;
  ScalarField out(f0.size());
  for (std::size_t p = 0; p < f0.size(); ++p) out[p] = base * (1.0 - t) + t * f0[p];
  return out;
}

namespace {

struct Colouring {
  std::vector<std::vector<int>> rows_of_col;
  std::vector<std::vector<int>> cols_of_colour;
};

// Greedy distance-2 colouring: columns sharing a row never share a colour.
Colouring colour_columns(const SphereGrid& grid) {
  const int n = grid.size();
  std::vector<std::vector<int>> stencils(n);
  Colouring c;
  c.rows_of_col.resize(n);
  for (int row = 0; row < n; ++row) {
    stencils[row] = grid.stencil(row);
    for (const int col : stencils[row]) c.rows_of_col[col].push_back(row);
  }
  std::vector<int> colour(n, -1);
  std::vector<int> stamp;
  for (int col = 0; col < n; ++col) {
    for (const int row : c.rows_of_col[col])
      for (const int other : stencils[row])
        if (colour[other] >= 0) {
          if (static_cast<int>(stamp.size()) <= colour[other]) stamp.resize(colour[other] + 1, -1);
          stamp[colour[other]] = col;
        }
    int chosen = 0;
    while (chosen < static_cast<int>(stamp.size()) && stamp[chosen] == col) ++chosen;
    colour[col] = chosen;
    if (static_cast<int>(c.cols_of_colour.size()) <= chosen) c.cols_of_colour.resize(chosen + 1);
    c.cols_of_colour[chosen].push_back(col);
  }
  return c;
}

template <class F>
void parallel_for(int count, int threads, F&& body) {
  threads = std::max(1, std::min(threads, count));
  if (threads == 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&, t] {
      for (int i = t; i < count; i += threads) body(i);
    });
}

}  // namespace

Eigen::SparseMatrix<double> jacobian(const RadialField& r, std::span<const double> f_target, int k,
                                     double fd_eps, int threads) {
  if (!(fd_eps > 0.0)) throw DomainError("jacobian: fd_eps must be positive");
  const SphereGrid& grid = r.grid();
  const int n = grid.size();
  const int dim = grid.dim();
  if (static_cast<int>(f_target.size()) != n) throw DomainError("jacobian: f_target size mismatch");
  const auto rho = r.rho();
  const bool full = grid.mode() == GridMode::FullS2;

  // Nodal sensitivities dR_p / dq_a by forward differences in the jet.
  std::vector<Jet> sens(n);
  std::vector<std::string> failures(n);
  parallel_for(n, threads, [&](int p) {
    const Jet q = jet_at(rho, grid, p);
    double base = 0.0;
    try {
      base = node_residual(q, f_target[p], k, dim, p);
    } catch (const Error& e) {
      failures[p] = e.what();
      return;
    }
    for (int a = 0; a < kJet; ++a) {
      if (!full && (a == 2 || a == 4)) {
        sens[p][a] = 0.0;
        continue;
      }
      double eps = fd_eps * std::max(1.0, std::abs(q[a]));
      bool done = false;
      for (int attempt = 0; attempt < 2 && !done; ++attempt, eps *= 0.1) {
        Jet qp = q;
        qp[a] += eps;
        try {
          sens[p][a] = (node_residual(qp, f_target[p], k, dim, p) - base) / eps;
          done = true;
        } catch (const Error& e) {
          failures[p] = e.what();
        }
      }
      if (!done) return;
    }
    failures[p].clear();
  });
  for (int p = 0; p < n; ++p)
    if (!failures[p].empty()) throw InadmissibleError("jacobian: " + failures[p]);

  // The jet is linear in the nodal values; applying the stencils to the
  // indicator of one colour class yields dq_a(row) / drho(col) exactly.
  const Colouring colouring = colour_columns(grid);
  const int ncol = static_cast<int>(colouring.cols_of_colour.size());
  std::vector<std::vector<Eigen::Triplet<double>>> parts(ncol);
  parallel_for(ncol, threads, [&](int c) {
    ScalarField chi(n, 0.0);
    for (const int col : colouring.cols_of_colour[c]) chi[col] = 1.0;
    auto& out = parts[c];
    for (const int col : colouring.cols_of_colour[c])
      for (const int row : colouring.rows_of_col[col]) {
        const Jet dq = jet_at(chi, grid, row);
        double v = 0.0;
        for (int a = 0; a < kJet; ++a) v += sens[row][a] * dq[a];
        out.emplace_back(row, col, v);
      }
  });

  std::vector<Eigen::Triplet<double>> all;
  for (auto& part : parts) all.insert(all.end(), part.begin(), part.end());
  Eigen::SparseMatrix<double> jac(n, n);
  jac.setFromTriplets(all.begin(), all.end());
  return jac;
}

double residual_floor(const Eigen::SparseMatrix<double>& jac, std::span<const double> rho) {
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(jac.rows());
  for (int c = 0; c < jac.outerSize(); ++c)
    for (Eigen::SparseMatrix<double>::InnerIterator it(jac, c); it; ++it)
      acc[it.row()] += std::abs(it.value()) * std::abs(rho[static_cast<std::size_t>(it.col())]);
  return std::numeric_limits<double>::epsilon() * (acc.size() ? acc.maxCoeff() : 0.0);
}

double residual_floor(const RadialField& r, std::span<const double> f_target, int k, double fd_eps) {
  return residual_floor(jacobian(r, f_target, k, fd_eps), r.rho());
}

NewtonResult newton_solve(const RadialField& init, std::span<const double> f_target, int k,
                          const ContinuationConfig& cfg, double t_for_callback) {
  const auto& grid_ptr = init.grid_ptr();
  RadialField current = init;
  ScalarField res = residual(current, f_target, k);
  double norm = sup_norm(res);
  if (norm <= cfg.newton_tol) return {std::move(current), 0, norm};

  for (int it = 1; it <= cfg.newton_max_iter; ++it) {
    const Eigen::SparseMatrix<double> jac = jacobian(current, f_target, k, cfg.fd_eps, cfg.threads);
    const double tol = std::max(cfg.newton_tol, residual_floor(jac, current.rho()));
    if (norm <= tol) return {std::move(current), it - 1, norm};
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    lu.compute(jac);
    if (lu.info() != Eigen::Success) throw NumericError("newton: singular Jacobian (" + lu.lastErrorMessage() + ")");
    const Eigen::Map<const Eigen::VectorXd> rvec(res.data(), static_cast<Eigen::Index>(res.size()));
    const Eigen::VectorXd delta = lu.solve(-rvec);
    if (lu.info() != Eigen::Success || !delta.allFinite()) throw NumericError("newton: linear solve failed");

    bool accepted = false;
    double alpha = 1.0;
    for (int b = 0; b <= cfg.max_backtracks && !accepted; ++b, alpha *= cfg.backtrack_factor) {
      ScalarField trial = current.values();
      bool positive = true;
      for (std::size_t p = 0; p < trial.size(); ++p) {
        trial[p] += alpha * delta[static_cast<Eigen::Index>(p)];
        positive = positive && trial[p] > 0.0;
      }
      if (!positive) continue;
      try {
        RadialField candidate(grid_ptr, std::move(trial));
        ScalarField trial_res = residual(candidate, f_target, k);
        const double trial_norm = sup_norm(trial_res);
        if (trial_norm < norm) {
          current = std::move(candidate);
          res = std::move(trial_res);
          norm = trial_norm;
          accepted = true;
        }
      } catch (const InadmissibleError&) {
      }
    }
    if (!accepted) {
      std::ostringstream os;
      os << "newton: no admissible decrease after " << cfg.max_backtracks << " backtracks (residual " << norm << ")";
      throw SafeguardError(os.str());
    }
    if (cfg.on_accept) cfg.on_accept(t_for_callback, current);
    if (norm <= tol) return {std::move(current), it, norm};
  }
  std::ostringstream os;
  os << "newton: no convergence in " << cfg.newton_max_iter << " iterations (residual " << norm << ")";
  throw NonConvergenceError(os.str(), norm);
}

ContinuationResult continuation_solve(std::shared_ptr<const SphereGrid> grid, std::span<const double> f0,
                                      const ContinuationConfig& cfg) {
  const int n = grid->dim();
  const int k = cfg.k;
  cfg.validate(n);
  if (static_cast<int>(f0.size()) != grid->size()) throw DomainError("continuation_solve: f0 size mismatch");
  for (const double v : f0)
    if (!(v > 0.0) || !std::isfinite(v)) throw DomainError("continuation_solve: f0 must be positive and finite");
  if (k == n) {
    switch (feasibility_alexandrov(f0)) {
      case Feasibility::Infeasible:
        throw InfeasibleError("max f0 < 1: the k = n equation has no convex solution");
      case Feasibility::Unknown:
        throw UndeterminedError("inf f0 <= 1 <= max f0: existence for k = n is undecided in this regime");
      case Feasibility::Feasible:
        break;
    }
  }

  SolveReport report;
  const double rho0 = geodesic_sphere_radius(n, k, k == n ? 2.0 : 1.0);
  RadialField rho(grid, ScalarField(grid->size(), rho0));
  {
    const auto start = newton_solve(rho, continuation_target(f0, n, k, 0.0), k, cfg, 0.0);
    rho = start.solution;
    report.t_trace.push_back({0.0, start.iterations, start.residual_norm});
    report.accepted_iterates += start.iterations;
    if (cfg.on_accept) cfg.on_accept(0.0, rho);
  }

  double t = 0.0;
  double step = cfg.t_step_init;
  int fast_streak = 0;
  while (t < 1.0) {
    const double t_try = std::min(1.0, t + step);
    try {
      auto res = newton_solve(rho, continuation_target(f0, n, k, t_try), k, cfg, t_try);
      rho = std::move(res.solution);
      t = t_try;
      report.t_trace.push_back({t, res.iterations, res.residual_norm});
      report.accepted_iterates += res.iterations;
      if (res.iterations <= 1) {
        if (++fast_streak >= 2) {
          step = std::min(1.0, 2.0 * step);
          fast_streak = 0;
        }
      } else {
        fast_streak = 0;
      }
    } catch (const Error& e) {
      switch (e.category()) {
        case ErrorCategory::NonConvergence:
        case ErrorCategory::Safeguard:
        case ErrorCategory::Numeric:
        case ErrorCategory::Inadmissible:
          break;
        default:
          throw;
      }
      ++report.rejected_steps;
      fast_streak = 0;
      step *= 0.5;
      if (step < cfg.t_step_min) {
        std::ostringstream os;
        os << "continuation stalled at t=" << t << " (step below " << cfg.t_step_min << "): " << e.what();
        throw ContinuationStallError(os.str(), report.t_trace);
      }
    }
  }

  const ScalarField target = continuation_target(f0, n, k, 1.0);
  const GeometryField geom = geometry_from_radial(rho);
  report.final_residual = sup_norm(residual(rho, target, k));
  for (int p = 0; p < geom.size(); ++p)
    report.final_raw_residual =
        std::max(report.final_raw_residual, std::abs(geom[p].area_el * geom.sigma(p, k) - target[p]));
  report.admissible = geom.admissible(k);
  report.apriori = apriori_report(rho, geom, f0, k);
  report.bounds_ok = report.apriori->pass();
  if (k == n) {
    report.gradient_bound = gradient_bound_alexandrov(rho, geom);
    report.bounds_ok = report.bounds_ok && report.gradient_bound->pass;
  }
  std::ostringstream notes;
  notes << grid_mode_name(grid->mode()) << " grid " << grid->n_theta() << "x" << grid->n_phi() << ", n=" << n
        << ", k=" << k << ", start radius " << rho0 << ", " << report.t_trace.size() - 1 << " t-steps, "
        << report.rejected_steps << " rejected";
  report.wall_notes = notes.str();
  return {std::move(rho), std::move(report)};
}

UniquenessReport uniqueness_probe(const RadialField& reference, std::span<const double> f0,
                                  const ContinuationConfig& cfg, const std::vector<ScalarField>& perturbations,
                                  std::optional<double> tolerance) {
  const SphereGrid& grid = reference.grid();
  const int n = grid.dim();
  const ScalarField target = continuation_target(f0, n, cfg.k, 1.0);
  UniquenessReport rep;
  rep.tolerance = tolerance.value_or(10.0 * cfg.newton_tol);
  ContinuationConfig quiet = cfg;
  quiet.on_accept = nullptr;
  for (const auto& pert : perturbations) {
    UniquenessEntry entry;
    try {
      if (static_cast<int>(pert.size()) != grid.size()) throw DomainError("perturbation size mismatch");
      ScalarField start = reference.values();
      for (std::size_t p = 0; p < start.size(); ++p) start[p] += pert[p];
      const auto res = newton_solve(RadialField(reference.grid_ptr(), std::move(start)), target, cfg.k, quiet);
      entry.converged = true;
      entry.iterations = res.iterations;
      for (int p = 0; p < grid.size(); ++p)
        entry.sup_diff = std::max(entry.sup_diff, std::abs(res.solution.rho()[p] - reference.rho()[p]));
      entry.agrees = entry.sup_diff <= rep.tolerance;
    } catch (const Error& e) {
      entry.note = std::string(category_name(e.category())) + ": " + e.what();
    }
    rep.all_agree = rep.all_agree && entry.agrees;
    rep.entries.push_back(std::move(entry));
  }
  return rep;
}

}  // namespace hypcm
