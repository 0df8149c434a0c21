#include "hypcm/steiner.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "hypcm/errors.hpp"

namespace hypcm {

namespace {

using boost::math::quadrature::gauss;
using boost::math::quadrature::gauss_kronrod;

// Composite Gauss-Legendre over pieces of length <= 1.
template <class F>
double composite_gauss(F&& f, double t) {
  const int pieces = std::max(1, static_cast<int>(std::ceil(t)));
  const double len = t / pieces;
  double sum = 0.0;
  for (int i = 0; i < pieces; ++i) sum += gauss<double, 30>::integrate(f, i * len, (i + 1) * len);
  return sum;
}

// First s > 0 where cosh s + kappa sinh s vanishes (infinity if never).
double focal_distance(double kappa) {
  if (kappa >= -1.0) return std::numeric_limits<double>::infinity();
  return std::atanh(-1.0 / kappa);
}

}  // namespace

double l_coefficient(double t, int n, int r) {
  if (!(t >= 0.0)) throw DomainError("l_coefficient: t must be non-negative");
  if (r < 0 || r > n) throw DomainError("l_coefficient: r outside [0, n]");
  if (t == 0.0) return 0.0;
  auto f = [n, r](double x) { return std::pow(std::sinh(x), n - r) * std::pow(std::cosh(x), r); };
  return gauss_kronrod<double, 31>::integrate(f, 0.0, t, 15, 1e-15);
}

double parallel_shell_volume(const GeometryField& geom, double t) {
  return parallel_shell_volume(geom, t, full_mask(geom.grid()));
}

double parallel_shell_volume(const GeometryField& geom, double t, const NodeMask& mask) {
  if (!(t >= 0.0)) throw DomainError("parallel_shell_volume: t must be non-negative");
  const SphereGrid& grid = geom.grid();
  if (static_cast<int>(mask.size()) != grid.size()) throw DomainError("parallel_shell_volume: mask size mismatch");
  if (t == 0.0) return 0.0;
  double total = 0.0;
  for (int p = 0; p < grid.size(); ++p) {
    if (!mask[p]) continue;
    const auto& kappa = geom[p].kappa;
    for (const double kp : kappa)
      if (focal_distance(kp) <= t) {
        std::ostringstream os;
        os << "parallel_shell_volume: focal crossing at node " << p << " (kappa=" << kp << ", t=" << t << ")";
        throw FocalCrossingError(os.str());
      }
    auto jac = [&kappa](double s) {
      const double c = std::cosh(s);
      const double sh = std::sinh(s);
      double prod = 1.0;
      for (const double kp : kappa) prod *= c + kp * sh;
      return prod;
    };
    total += grid.weight(p) * geom[p].area_el * composite_gauss(jac, t);
  }
  return total;
}

double steiner_prediction(const GeometryField& geom, double t, const NodeMask& mask) {
  const int n = geom.dim();
  double sum = 0.0;
  for (int r = 0; r <= n; ++r) sum += l_coefficient(t, n, r) * curvature_measure(geom, r, mask);
  return sum;
}

SteinerFit steiner_decompose(const GeometryField& geom, const NodeMask& mask, std::vector<double> t_samples) {
  const int n = geom.dim();
  const int m = static_cast<int>(t_samples.size());
  if (m < n + 2)
    throw FitError("steiner_decompose: need at least " + std::to_string(n + 2) + " samples, got " + std::to_string(m));
  for (int i = 0; i < m; ++i)
    if (!(t_samples[i] > 0.0) || (i > 0 && !(t_samples[i] > t_samples[i - 1])))
      throw FitError("steiner_decompose: samples must be positive and strictly increasing");

  SteinerFit fit;
  fit.t_samples = std::move(t_samples);
  Eigen::MatrixXd design(m, n + 1);
  Eigen::VectorXd rhs(m);
  for (int i = 0; i < m; ++i) {
    const double t = fit.t_samples[i];
    for (int r = 0; r <= n; ++r) design(i, r) = l_coefficient(t, n, r);
    rhs[i] = parallel_shell_volume(geom, t, mask);
    fit.shell_volumes.push_back(rhs[i]);
  }

  // Columns are scaled to unit norm before the SVD so the condition number
  // reflects the sample geometry rather than the size of each basis function.
  Eigen::VectorXd col_scale = design.colwise().norm().transpose();
  if ((col_scale.array() <= 0.0).any()) throw FitError("steiner_decompose: zero basis column");
  const Eigen::MatrixXd scaled = design * col_scale.cwiseInverse().asDiagonal();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(scaled, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  fit.condition = sv[0] / sv[sv.size() - 1];
  if (!(sv[sv.size() - 1] > 1e-10 * sv[0]))
    throw FitError("steiner_decompose: design matrix is rank deficient (samples too clustered)");
  const Eigen::VectorXd coef = svd.solve(rhs).cwiseQuotient(col_scale);

  for (int r = 0; r <= n; ++r) {
    fit.phis_fit.push_back(coef[r]);
    fit.phis_direct.push_back(curvature_measure(geom, r, mask));
    const double denom = std::abs(fit.phis_direct[r]);
    const double err = std::abs(fit.phis_fit[r] - fit.phis_direct[r]);
    fit.max_rel_err = std::max(fit.max_rel_err, denom > 0.0 ? err / denom : err);
  }
  return fit;
}

}  // namespace hypcm
