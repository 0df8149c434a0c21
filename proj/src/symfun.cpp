#include "hypcm/symfun.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace hypcm {

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double c = 1.0;
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return std::round(c);
}

PrincipalSpectrum::PrincipalSpectrum(std::vector<double> values, bool sorted)
    : values_(std::move(values)), sorted_(sorted) {
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i]))
      throw DomainError("PrincipalSpectrum: non-finite entry at index " + std::to_string(i));
    if (sorted_ && i + 1 < values_.size() && values_[i] < values_[i + 1])
      throw DomainError("PrincipalSpectrum: flagged sorted but not descending");
  }
}

PrincipalSpectrum PrincipalSpectrum::sorted_descending() const {
  std::vector<double> v = values_;
  std::stable_sort(v.begin(), v.end(), [](double a, double b) { return a > b; });
  return PrincipalSpectrum(std::move(v), true);
}

double sigma(const PrincipalSpectrum& lambda, int k) { return sigma(lambda.values(), k); }

double sigma_minor(const PrincipalSpectrum& lambda, int k, std::span<const int> deleted) {
  const int n = lambda.dim();
  if (deleted.empty() || deleted.size() > 2)
    throw DomainError("sigma_minor: expected 1 or 2 deleted indices");
  for (const int d : deleted)
    if (d < 0 || d >= n) throw DomainError("sigma_minor: index " + std::to_string(d) + " out of range");
  if (deleted.size() == 2 && deleted[0] == deleted[1])
    throw DomainError("sigma_minor: duplicate deleted index");
  if (k < 0 || k > n) throw DomainError("sigma_minor: k=" + std::to_string(k) + " out of range");

  std::vector<double> rest;
  rest.reserve(lambda.size());
  for (int i = 0; i < n; ++i)
    if (std::find(deleted.begin(), deleted.end(), i) == deleted.end()) rest.push_back(lambda[i]);
  if (k > static_cast<int>(rest.size())) return 0.0;
  return sigma(std::span<const double>(rest), k);
}

double sigma_minor(const PrincipalSpectrum& lambda, int k, int i) {
  const int d[1] = {i};
  return sigma_minor(lambda, k, d);
}

double sigma_minor(const PrincipalSpectrum& lambda, int k, int i, int j) {
  const int d[2] = {i, j};
  return sigma_minor(lambda, k, d);
}

std::vector<double> sigma_grad(const PrincipalSpectrum& lambda, int k) {
  const int n = lambda.dim();
  if (k < 1 || k > n) throw DomainError("sigma_grad: k=" + std::to_string(k) + " out of range");
  std::vector<double> g(lambda.size());
  for (int i = 0; i < n; ++i) g[i] = sigma_minor(lambda, k - 1, i);
  return g;
}

bool gamma_cone_contains(const PrincipalSpectrum& lambda, int k) {
  if (k < 1 || k > lambda.dim())
    throw DomainError("gamma_cone_contains: k=" + std::to_string(k) + " out of range");
  const auto e = sigma_all(lambda.values(), k);
  for (int j = 1; j <= k; ++j)
    if (!(e[j] > 0.0)) return false;
  return true;
}

SymMatrix::SymMatrix(int n) : entries_(Eigen::MatrixXd::Zero(n, n)) {}

SymMatrix SymMatrix::from_dense(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) throw DomainError("SymMatrix: matrix is not square");
  SymMatrix m(static_cast<int>(a.rows()));
  m.entries_ = 0.5 * (a + a.transpose());
  return m;
}

SymMatrix SymMatrix::diagonal(std::span<const double> d) {
  SymMatrix m(static_cast<int>(d.size()));
  for (std::size_t i = 0; i < d.size(); ++i) m.entries_(i, i) = d[i];
  return m;
}

namespace {

Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eigensolve(const SymMatrix& w) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(w.dense());
  if (es.info() != Eigen::Success) {
    std::ostringstream os;
    os << "symmetric eigensolver failed (n=" << w.dim() << ", |W|_F=" << w.dense().norm() << ")";
    throw NumericError(os.str());
  }
  return es;
}

}  // namespace

MatrixSigma sigma_of_matrix(const SymMatrix& w, int k) {
  if (k < 0 || k > w.dim()) throw DomainError("sigma_of_matrix: k=" + std::to_string(k) + " out of range");
  const auto es = eigensolve(w);
  // Eigen returns ascending eigenvalues.
  std::vector<double> v(es.eigenvalues().data(), es.eigenvalues().data() + w.dim());
  std::reverse(v.begin(), v.end());
  PrincipalSpectrum spec(std::move(v), true);
  return {sigma(spec, k), std::move(spec)};
}

SymMatrix sigma_matrix_gradient(const SymMatrix& w, int k) {
  const int n = w.dim();
  if (k < 1 || k > n) throw DomainError("sigma_matrix_gradient: k=" + std::to_string(k) + " out of range");
  const auto es = eigensolve(w);
  PrincipalSpectrum lambda(std::vector<double>(es.eigenvalues().data(), es.eigenvalues().data() + n));
  Eigen::VectorXd d(n);
  for (int i = 0; i < n; ++i) d[i] = sigma_minor(lambda, k - 1, i);
  const Eigen::MatrixXd& q = es.eigenvectors();
  return SymMatrix::from_dense(q * d.asDiagonal() * q.transpose());
}

double minor_identity_residual(const PrincipalSpectrum& lambda, int l, int i, int j) {
  const int n = lambda.dim();
  if (i == j) throw DomainError("minor_identity_residual: i == j");
  if (i < 0 || j < 0 || i >= n || j >= n) throw DomainError("minor_identity_residual: index out of range");
  if (l < 2 || l > n) throw DomainError("minor_identity_residual: l=" + std::to_string(l) + " out of range");

  const double lhs = sigma_minor(lambda, l - 1, i) * sigma_minor(lambda, l - 1, j) -
                     sigma(lambda, l) * sigma_minor(lambda, l - 2, i, j);
  const double m1 = sigma_minor(lambda, l - 1, i, j);
  const double rhs = m1 * m1 - sigma_minor(lambda, l, i, j) * sigma_minor(lambda, l - 2, i, j);
  return lhs - rhs;
}

}  // namespace hypcm
