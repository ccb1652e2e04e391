#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "doslab/linalg.hpp"
#include "doslab/model.hpp"

namespace doslab {

// Spectral routines on a FiniteOperator. 1D Dirichlet chains use the
// tridiagonal solvers, 1D periodic chains are first reduced to an
// orthogonally similar tridiagonal matrix, anything needing eigenvectors off the tridiagonal path falls
// back to dense Jacobi.

/// Number of eigenvalues strictly below E.
std::size_t count_below(const FiniteOperator& h, double energy);
/// Number of eigenvalues <= E.
std::size_t count_at_most(const FiniteOperator& h, double energy);
/// count_at_most on every grid point (grid need not be sorted).
std::vector<std::size_t> counts_on_grid(const FiniteOperator& h, std::span<const double> grid);

std::vector<double> operator_eigenvalues(const FiniteOperator& h);
/// Eigenvalues inside the closed window [lo, hi].
std::vector<double> eigenvalues_in(const FiniteOperator& h, double lo, double hi);
EigenDecomposition operator_eigensystem(const FiniteOperator& h);

/// Eigenvalues and |u_k(site)|^2 for each requested site:
/// weights[r][k] belongs to sites[r] and eigenvalue k.
struct SiteWeights {
  std::vector<double> eigenvalues;
  std::vector<std::vector<double>> weights;
};
SiteWeights site_weights(const FiniteOperator& h, std::span<const std::size_t> sites);

/// Normalized eigenvector densities |u(x)|^2 for the eigenvalues in [lo, hi].
struct EigenProfile {
  double energy;
  std::vector<double> density;
};
std::vector<EigenProfile> eigen_profiles(const FiniteOperator& h, double lo, double hi);

}  // namespace doslab
