#include "hypcm/estimates.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hypcm/errors.hpp"

namespace hypcm {

namespace {

std::pair<double, double> min_max(std::span<const double> f) {
  if (f.empty()) throw DomainError("empty field");
  const auto [lo, hi] = std::minmax_element(f.begin(), f.end());
  return {*lo, *hi};
}

double h_scale_tolerance(const SphereGrid& grid, double scale) {
  return 2.0 * grid.h_theta() * grid.h_theta() * scale;
}

}  // namespace

double round_sphere_map(int n, int k, double rho) {
  return binomial(n, k) * std::pow(std::cosh(rho), k) * std::pow(std::sinh(rho), n - k);
}

double geodesic_sphere_radius(int n, int k, double c) {
  if (k < 1 || k > n) throw DomainError("geodesic_sphere_radius: need 1 <= k <= n");
  if (!(c > 0.0) || !std::isfinite(c)) throw DomainError("geodesic_sphere_radius: target must be positive");
  if (k == n && c <= 1.0) {
    std::ostringstream os;
    os << "k = n requires a target above 1 (cosh^n >= 1), got " << c;
    throw InfeasibleError(os.str());
  }
  auto g = [&](double r) { return round_sphere_map(n, k, r) - c; };

  double lo = 0.0;
  double hi = 1.0;
  while (g(hi) <= 0.0) {
    if (g(hi) == 0.0) return hi;
    lo = hi;
    hi *= 2.0;
    if (hi > 1e3) throw NumericError("geodesic_sphere_radius: failed to bracket the root");
  }
  // g(lo) < 0 < g(hi) is verified here rather than assumed.
  if (!(g(lo) < 0.0 && g(hi) > 0.0)) throw NumericError("geodesic_sphere_radius: invalid bracket");

  for (int it = 0; it < 200 && hi - lo > 1e-10 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) > 0.0 ? hi : lo) = mid;
  }
  double r = 0.5 * (lo + hi);
  // Newton polish; d/drho log(map) = k tanh + (n-k) coth.
  for (int it = 0; it < 8; ++it) {
    const double m = round_sphere_map(n, k, r);
    const double dm = m * (k * std::tanh(r) + (n - k) / std::tanh(r));
    const double next = r - (m - c) / dm;
    if (!(next > lo && next < hi)) break;
    if (std::abs(next - r) <= 1e-16 * r) {
      r = next;
      break;
    }
    r = next;
  }
  return r;
}

C0Bounds c0_bounds(std::span<const double> f0, int n, int k) {
  if (k >= n) throw DomainError("c0_bounds: requires k < n; use alexandrov_c0_bounds for k = n");
  if (k < 1) throw DomainError("c0_bounds: k must be at least 1");
  const auto [fmin, fmax] = min_max(f0);
  if (!(fmin > 0.0)) throw DomainError("c0_bounds: f0 must be positive");
  C0Bounds b;
  b.c1 = std::asinh(std::pow(fmax / binomial(n, k), 1.0 / n));
  b.c0 = geodesic_sphere_radius(n, k, fmin);
  return b;
}

C0Bounds alexandrov_c0_bounds(std::span<const double> f0, int n) {
  const auto [fmin, fmax] = min_max(f0);
  if (!(fmin > 1.0)) throw DomainError("alexandrov_c0_bounds: requires inf f0 > 1");
  return {std::acosh(std::pow(fmin, 1.0 / n)), std::acosh(std::pow(fmax, 1.0 / n))};
}

bool AprioriReport::pass() const {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return !v.applicable || v.pass; });
}

AprioriReport apriori_report(const RadialField& solution, const GeometryField& geom,
                             std::span<const double> f0, int k) {
  const SphereGrid& grid = solution.grid();
  const int n = grid.dim();
  AprioriReport rep;
  std::tie(rep.rho_min, rep.rho_max) = min_max(solution.rho());
  rep.tol = h_scale_tolerance(grid, rep.rho_max);

  ScalarField gamma(grid.size());
  for (int p = 0; p < grid.size(); ++p) gamma[p] = gamma_transform(solution.rho()[p]);
  for (const auto& v : covariant_grad(gamma, grid))
    rep.grad_gamma_max = std::max(rep.grad_gamma_max, std::hypot(v.e1, v.e2));
  rep.lambda_max = geom.max_principal_curvature();
  rep.admissible_nodes = geom.admissible_count(k);
  rep.admissible = rep.admissible_nodes == grid.size();

  Verdict c0{"c0-lower", "C0 estimate: rho >= c0 from the minimum point of rho"};
  Verdict c1{"c1-upper", "C0 estimate: rho <= c1 from the maximum point of rho"};
  bool have_bounds = false;
  if (k < n) {
    const auto b = c0_bounds(f0, n, k);
    rep.c0 = b.c0;
    rep.c1 = b.c1;
    have_bounds = true;
  } else if (feasibility_alexandrov(f0) == Feasibility::Feasible) {
    const auto b = alexandrov_c0_bounds(f0, n);
    rep.c0 = b.c0;
    rep.c1 = b.c1;
    have_bounds = true;
  }
  c0.applicable = c1.applicable = have_bounds;
  c0.observed = rep.rho_min;
  c0.bound = rep.c0;
  c0.pass = have_bounds && rep.c0 - rep.tol <= rep.rho_min;
  c1.observed = rep.rho_max;
  c1.bound = rep.c1;
  c1.pass = have_bounds && rep.rho_max <= rep.c1 + rep.tol;
  rep.verdicts.push_back(c0);
  rep.verdicts.push_back(c1);

  Verdict adm{"admissible", "admissibility: curvature vector in Gamma_k at every node"};
  adm.observed = rep.admissible_nodes;
  adm.bound = grid.size();
  adm.pass = rep.admissible;
  rep.verdicts.push_back(adm);

  Verdict grad{"gradient-finite", "C1 estimate: |grad gamma| bounded (reported)"};
  grad.observed = rep.grad_gamma_max;
  grad.pass = std::isfinite(rep.grad_gamma_max);
  rep.verdicts.push_back(grad);

  Verdict curv{"curvature-finite", "C2 estimate: max principal curvature bounded (reported)"};
  curv.observed = rep.lambda_max;
  curv.pass = std::isfinite(rep.lambda_max);
  rep.verdicts.push_back(curv);
  return rep;
}

const char* feasibility_name(Feasibility f) {
  switch (f) {
    case Feasibility::Feasible: return "feasible";
    case Feasibility::Infeasible: return "infeasible";
    case Feasibility::Unknown: return "unknown";
  }
  return "unknown";
}

Feasibility feasibility_alexandrov(std::span<const double> f0) {
  const auto [fmin, fmax] = min_max(f0);
  if (fmin > 1.0) return Feasibility::Feasible;
  if (fmax < 1.0) return Feasibility::Infeasible;
  return Feasibility::Unknown;
}

GradientBoundCheck gradient_bound_alexandrov(const RadialField& solution, const GeometryField& geom) {
  const SphereGrid& grid = solution.grid();
  GradientBoundCheck out;
  for (int p = 0; p < geom.size(); ++p)
    if (!(geom[p].kappa.back() > 0.0)) return out;
  out.applicable = true;

  ScalarField gt(grid.size());
  for (int p = 0; p < grid.size(); ++p) gt[p] = gamma_tilde_transform(solution.rho()[p]);
  const auto grad = covariant_grad(gt, grid);
  int arg = 0;
  out.min_bound = std::numeric_limits<double>::infinity();
  for (int p = 0; p < grid.size(); ++p) {
    const double m = std::hypot(grad[p].e1, grad[p].e2);
    if (m > out.sup_grad_gamma_tilde) {
      out.sup_grad_gamma_tilde = m;
      arg = p;
    }
    const double s = std::sinh(solution.rho()[p]);
    out.min_bound = std::min(out.min_bound, 1.0 / (s * s));
  }
  const double s = std::sinh(solution.rho()[arg]);
  out.bound = 1.0 / (s * s);
  out.slack = h_scale_tolerance(grid, out.bound);
  out.pass = out.sup_grad_gamma_tilde < out.bound + out.slack;
  return out;
}

}  // namespace hypcm
