#pragma once
// Independent reference values for the tests. Nothing here calls into the
// library's solvers.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

namespace oracle {

// 2 cos(k pi / (L + 1)), k = 1..L, ascending.
inline std::vector<double> free_dirichlet_eigs(std::size_t L) {
  std::vector<double> e(L);
  for (std::size_t k = 1; k <= L; ++k) e[k - 1] = 2.0 * std::cos(static_cast<double>(k) * std::numbers::pi / (L + 1.0));
  std::sort(e.begin(), e.end());
  return e;
}

// 2 cos(2 pi k / L), k = 0..L-1, ascending.
inline std::vector<double> free_periodic_eigs(std::size_t L) {
  std::vector<double> e(L);
  for (std::size_t k = 0; k < L; ++k) e[k] = 2.0 * std::cos(2.0 * std::numbers::pi * static_cast<double>(k) / L);
  std::sort(e.begin(), e.end());
  return e;
}

// Fraction of the values that are <= E.
inline double counting_ids(const std::vector<double>& eigs, double E) {
  std::size_t c = 0;
  for (double e : eigs) c += e <= E;
  return static_cast<double>(c) / static_cast<double>(eigs.size());
}

// Infinite-volume free IDS.
inline double free_ids(double E) {
  if (E <= -2.0) return 0.0;
  if (E >= 2.0) return 1.0;
  return std::acos(-E / 2.0) / std::numbers::pi;
}

// exp(gamma) is the larger root of z + 1/z = |E| for |E| > 2.
inline double free_lyapunov(double E) {
  const double a = std::abs(E);
  return a <= 2.0 ? 0.0 : std::log((a + std::sqrt(a * a - 4.0)) / 2.0);
}

inline std::vector<double> sym_eigs(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  std::vector<double> out(es.eigenvalues().data(), es.eigenvalues().data() + m.rows());
  std::sort(out.begin(), out.end());
  return out;
}

inline Eigen::MatrixXd tridiag(const std::vector<double>& d, const std::vector<double>& off) {
  const auto n = static_cast<Eigen::Index>(d.size());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) m(i, i) = d[static_cast<std::size_t>(i)];
  for (Eigen::Index i = 0; i + 1 < n; ++i) m(i, i + 1) = m(i + 1, i) = off[static_cast<std::size_t>(i)];
  return m;
}

// Period-2 chain with potential (a, b): E = (a+b)/2 +- sqrt(((a-b)/2)^2 + 4 cos^2(k/2)).
// Returns the two band intervals as {lo0, hi0, lo1, hi1}.
inline std::vector<double> period2_bands(double a, double b) {
  const double m = 0.5 * (a + b), h = 0.5 * (a - b);
  const double inner = std::sqrt(h * h), outer = std::sqrt(h * h + 4.0);
  return {m - outer, m - inner, m + inner, m + outer};
}

inline double rational_trace(double lam, long p, long q, double theta, double E) {
  double a = 1, b = 0, c = 0, d = 1;
  for (long n = 0; n < q; ++n) {
    const double t = E - 2.0 * lam * std::cos(2.0 * std::numbers::pi * (theta + static_cast<double>(n * p % q) / q));
    const double na = t * a - c, nb = t * b - d;
    c = a;
    d = b;
    a = na;
    b = nb;
  }
  return a + d;
}

// Lebesgue measure of {E : |tr T_q(E)| <= 2} for V_n = 2 lam cos(2 pi (theta + n p / q)),
// sampled on a grid of spacing h over [lo, hi].
inline double rational_band_measure(double lam, long p, long q, double theta, double lo, double hi, double h) {
  std::size_t inside = 0;
  for (double E = lo + 0.5 * h; E < hi; E += h) inside += std::abs(rational_trace(lam, p, q, theta, E)) <= 2.0;
  return static_cast<double>(inside) * h;
}

// Same for the union over all phases. The trace is D(E) + A cos(2 pi q theta)
// (Chambers), so the two phases 0 and 1/(2q) recover D and A and the union is
// {E : |D(E)| <= 2 + |A|}.
inline double rational_union_measure(double lam, long p, long q, double lo, double hi, double h) {
  std::size_t inside = 0;
  for (double E = lo + 0.5 * h; E < hi; E += h) {
    const double t0 = rational_trace(lam, p, q, 0.0, E);
    const double t1 = rational_trace(lam, p, q, 0.5 / static_cast<double>(q), E);
    inside += std::abs(0.5 * (t0 + t1)) <= 2.0 + std::abs(0.5 * (t0 - t1));
  }
  return static_cast<double>(inside) * h;
}

}  // namespace oracle
