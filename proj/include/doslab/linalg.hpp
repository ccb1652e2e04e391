#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace doslab {

/// Real symmetric tridiagonal matrix: `diag` has n entries, `off[i]` couples
/// rows i and i+1.
struct TridiagMatrix {
  std::vector<double> diag;
  std::vector<double> off;

  std::size_t size() const { return diag.size(); }
  void validate() const;
  /// max|diag| + 2 max|off|; bounds the spectral radius.
  double norm_bound() const;
  double trace() const;
};

/// Dense row-major square matrix.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  explicit DenseMatrix(std::size_t n) : n_(n), data_(n * n, 0.0) {}

  static DenseMatrix identity(std::size_t n);

  std::size_t size() const { return n_; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
  std::span<const double> data() const { return data_; }

  double max_abs() const;

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

/// Eigenvalues sorted ascending; `vectors(i, k)` is component i of the k-th
/// eigenvector when present.
struct EigenDecomposition {
  std::vector<double> eigenvalues;
  DenseMatrix vectors;

  bool has_vectors() const { return vectors.size() == eigenvalues.size() && !eigenvalues.empty(); }
};

/// Eigenvalues plus selected rows of the eigenvector matrix:
/// `components[r * n + k]` is component rows[r] of eigenvector k.
struct RowComponents {
  std::vector<double> eigenvalues;
  std::vector<std::size_t> rows;
  std::vector<double> components;

  double at(std::size_t r, std::size_t k) const { return components[r * eigenvalues.size() + k]; }
};

/// Number of eigenvalues strictly below E, by the inertia of T - E = L D L^T.
std::size_t sturm_count(const TridiagMatrix& t, double energy);

std::vector<double> eigenvalues_bisection(const TridiagMatrix& t, double tol);
/// Eigenvalues with indices first..last-1 in ascending order.
std::vector<double> eigenvalues_bisection_range(const TridiagMatrix& t, std::size_t first, std::size_t last,
                                                double tol);

/// Orthogonally similar tridiagonal form of the cyclic chain `t` plus a
/// coupling `wrap` between rows 0 and n-1 (Givens band reduction of the
/// folded ring, O(n^2)). Requires n >= 3.
TridiagMatrix cyclic_to_tridiagonal(const TridiagMatrix& t, double wrap);

/// 1e-12 times the spectral-radius estimate.
double default_tolerance(const TridiagMatrix& t);

/// Implicit QL. Eigenvectors orthonormal, sign fixed so that the first
/// nonzero component is positive.
EigenDecomposition eigen_full(const TridiagMatrix& t, double tol);
EigenDecomposition eigen_full(const TridiagMatrix& t);

/// Implicit QL without eigenvectors.
std::vector<double> eigenvalues_ql(const TridiagMatrix& t);

/// Implicit QL accumulating only the requested rows of the eigenvector
/// matrix. Cost O(n^2 * rows.size()) instead of O(n^3).
RowComponents eigen_rows(const TridiagMatrix& t, std::span<const std::size_t> rows);

/// Cyclic Jacobi sweeps until the off-diagonal Frobenius norm is <= tol.
EigenDecomposition dense_eigen_jacobi(const DenseMatrix& a, double tol);
EigenDecomposition dense_eigen_jacobi(const DenseMatrix& a);

/// Unit eigenvectors for the given (accurate) eigenvalues of `t` by inverse
/// iteration; vectors of close eigenvalues are re-orthogonalized. Column k
/// of the result belongs to eigenvalues[k].
std::vector<std::vector<double>> inverse_iteration(const TridiagMatrix& t,
                                                   std::span<const double> eigenvalues);

}  // namespace doslab
