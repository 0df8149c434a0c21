#pragma once

// Elementary symmetric functions, Garding cones and the related identities
// for vectors and symmetric matrices.

#include <algorithm>
#include <concepts>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "hypcm/errors.hpp"

namespace hypcm {

/// Binomial coefficient C(n, k) as a double; zero outside 0 <= k <= n.
double binomial(int n, int k);

/// All sigma_0..sigma_kmax of `values` by the O(n*kmax) product recurrence.
/// Entries beyond the vector length are zero.
template <std::floating_point T>
std::vector<T> sigma_all(std::span<const T> values, int kmax) {
  std::vector<T> e(static_cast<std::size_t>(kmax) + 1, T(0));
  e[0] = T(1);
  int seen = 0;
  for (const T x : values) {
    ++seen;
    for (int j = std::min(kmax, seen); j >= 1; --j) e[j] += x * e[j - 1];
  }
  return e;
}

/// sigma_k of `values`; k must lie in [0, n].
template <std::floating_point T>
T sigma(std::span<const T> values, int k) {
  if (k < 0 || k > static_cast<int>(values.size()))
    throw DomainError("sigma: k=" + std::to_string(k) + " outside [0, " +
                      std::to_string(values.size()) + "]");
  return sigma_all(values, k)[k];
}

/// Principal-curvature style n-vector. `sorted()` reports whether the values
/// are known to be in descending order.
class PrincipalSpectrum {
 public:
  PrincipalSpectrum() = default;
  explicit PrincipalSpectrum(std::vector<double> values, bool sorted = false);

  /// Descending copy. Stable: equal entries keep their original order.
  PrincipalSpectrum sorted_descending() const;

  std::span<const double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  int dim() const { return static_cast<int>(values_.size()); }
  bool sorted() const { return sorted_; }
  double operator[](std::size_t i) const { return values_[i]; }

 private:
  std::vector<double> values_;
  bool sorted_ = false;
};

double sigma(const PrincipalSpectrum& lambda, int k);

/// sigma_k with the entries at `deleted` (0-based, 1 or 2 distinct indices)
/// removed. k may range up to n; the value is 0 when k exceeds the number of
/// remaining entries.
double sigma_minor(const PrincipalSpectrum& lambda, int k, std::span<const int> deleted);
double sigma_minor(const PrincipalSpectrum& lambda, int k, int i);
double sigma_minor(const PrincipalSpectrum& lambda, int k, int i, int j);

/// Gradient of sigma_k with respect to the entries: component i is
/// sigma_{k-1}(lambda | i).
std::vector<double> sigma_grad(const PrincipalSpectrum& lambda, int k);

/// Strict membership in the open cone {sigma_j > 0, j = 1..k}. No tolerance.
bool gamma_cone_contains(const PrincipalSpectrum& lambda, int k);

/// Symmetric matrix; every write updates both triangles.
class SymMatrix {
 public:
  explicit SymMatrix(int n);
  /// Symmetrizes the input as (A + A^T) / 2.
  static SymMatrix from_dense(const Eigen::MatrixXd& a);
  static SymMatrix diagonal(std::span<const double> d);

  int dim() const { return static_cast<int>(entries_.rows()); }
  double operator()(int i, int j) const { return entries_(i, j); }
  void set(int i, int j, double v) {
    entries_(i, j) = v;
    entries_(j, i) = v;
  }
  const Eigen::MatrixXd& dense() const { return entries_; }

 private:
  Eigen::MatrixXd entries_;
};

struct MatrixSigma {
  double value;
  PrincipalSpectrum spectrum;  // eigenvalues, descending
};

/// sigma_k of the eigenvalues of W. Throws NumericError if the symmetric
/// eigensolver fails.
MatrixSigma sigma_of_matrix(const SymMatrix& w, int k);

/// The matrix {d sigma_k(W) / d W_ij} = Q diag(sigma_{k-1}(lambda|i)) Q^T.
SymMatrix sigma_matrix_gradient(const SymMatrix& w, int k);

/// For i != j and 2 <= l <= n:
///   [s^{ii} s^{jj} - s_l * s_{l-2}(|ij)] - [s_{l-1}(|ij)^2 - s_l(|ij) s_{l-2}(|ij)]
/// where s^{ii} = sigma_{l-1}(lambda|i). Zero up to round-off.
double minor_identity_residual(const PrincipalSpectrum& lambda, int l, int i, int j);

}  // namespace hypcm
