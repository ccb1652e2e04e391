#include "doslab/linalg.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "doslab/error.hpp"

namespace doslab {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double max_off_squared(const TridiagMatrix& t, double wrap = 0.0) {
  double m = wrap * wrap;
  for (double b : t.off) m = std::max(m, b * b);
  return m;
}

// Pivots smaller than this are pushed away from zero, keeping their sign
// (exact zero counts as positive, so a hit is never counted as "below").
inline double guard_pivot(double d, double pivmin) {
  if (std::abs(d) < pivmin) return d < 0.0 ? -pivmin : pivmin;
  return d;
}

struct Bounds {
  double lo;
  double hi;
};

Bounds gershgorin(const TridiagMatrix& t, double wrap) {
  const std::size_t n = t.size();
  Bounds b{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (std::size_t i = 0; i < n; ++i) {
    double r = 0.0;
    if (i > 0) r += std::abs(t.off[i - 1]);
    if (i + 1 < n) r += std::abs(t.off[i]);
    if (wrap != 0.0 && (i == 0 || i + 1 == n)) r += std::abs(wrap);
    b.lo = std::min(b.lo, t.diag[i] - r);
    b.hi = std::max(b.hi, t.diag[i] + r);
  }
  const double pad = 2.0 * kEps * std::max({1.0, std::abs(b.lo), std::abs(b.hi)}) * static_cast<double>(n);
  b.lo -= pad;
  b.hi += pad;
  return b;
}

template <class Count>
std::vector<double> bisect_range(std::size_t first, std::size_t last, Bounds bounds, double tol, Count count) {
  require(tol > 0.0, "bisection tolerance must be positive, got " + std::to_string(tol));
  std::vector<double> out;
  out.reserve(last > first ? last - first : 0);
  double floor_k = bounds.lo;
  for (std::size_t k = first; k < last; ++k) {
    double a = floor_k;
    double b = bounds.hi;
    while (b - a > tol) {
      const double mid = 0.5 * (a + b);
      if (mid <= a || mid >= b) break;
      if (count(mid) <= k) {
        a = mid;
      } else {
        b = mid;
      }
    }
    out.push_back(0.5 * (a + b));
    floor_k = a;
  }
  return out;
}

template <class Count>
std::vector<double> bisect_all(std::size_t n, Bounds bounds, double tol, Count count) {
  return bisect_range(0, n, bounds, tol, count);
}

// Implicit QL on (d, e) with e[i] coupling i and i+1 (e[n-1] == 0).
// z holds m tracked rows of the eigenvector matrix, stored by column:
// z[col * m + r]. On return d holds unsorted eigenvalues.
void implicit_ql(std::vector<double>& d, std::vector<double>& e, std::vector<double>& z,
                 std::size_t m, double deflate_tol) {
  const std::size_t n = d.size();
  if (n == 1) return;
  double shift_acc = 0.0;
  double tst1 = 0.0;
  const int max_iter = 60;
  for (std::size_t l = 0; l < n; ++l) {
    tst1 = std::max(tst1, std::abs(d[l]) + std::abs(e[l]));
    std::size_t mm = l;
    while (mm < n) {
      if (std::abs(e[mm]) <= std::max(kEps * tst1, deflate_tol)) break;
      ++mm;
    }
    if (mm > l) {
      int iter = 0;
      do {
        if (++iter > max_iter) {
          throw ConvergenceError("implicit QL did not converge for eigenvalue " + std::to_string(l) +
                                 " after " + std::to_string(max_iter) + " iterations");
        }
        double g = d[l];
        double p = (d[l + 1] - g) / (2.0 * e[l]);
        double r = std::hypot(p, 1.0);
        if (p < 0) r = -r;
        d[l] = e[l] / (p + r);
        d[l + 1] = e[l] * (p + r);
        const double dl1 = d[l + 1];
        double h = g - d[l];
        for (std::size_t i = l + 2; i < n; ++i) d[i] -= h;
        shift_acc += h;

        p = d[mm];
        double c = 1.0, c2 = 1.0, c3 = 1.0;
        const double el1 = e[l + 1];
        double s = 0.0, s2 = 0.0;
        for (std::size_t ii = mm; ii-- > l;) {
          c3 = c2;
          c2 = c;
          s2 = s;
          g = c * e[ii];
          h = c * p;
          r = std::hypot(p, e[ii]);
          e[ii + 1] = s * r;
          s = e[ii] / r;
          c = p / r;
          p = c * d[ii] - s * g;
          d[ii + 1] = h + s * (c * g + s * d[ii]);
          if (m > 0) {
            double* zi = z.data() + ii * m;
            double* zi1 = zi + m;
            for (std::size_t k = 0; k < m; ++k) {
              const double t1 = zi1[k];
              zi1[k] = s * zi[k] + c * t1;
              zi[k] = c * zi[k] - s * t1;
            }
          }
        }
        p = -s * s2 * c3 * el1 * e[l] / dl1;
        e[l] = s * p;
        d[l] = c * p;
      } while (std::abs(e[l]) > std::max(kEps * tst1, deflate_tol));
    }
    d[l] += shift_acc;
    e[l] = 0.0;
  }
}

std::vector<std::size_t> ascending_order(const std::vector<double>& values) {
  std::vector<std::size_t> idx(values.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  return idx;
}

void fix_sign(DenseMatrix& v, std::size_t col) {
  const std::size_t n = v.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double x = v(i, col);
    if (std::abs(x) > 1e-8) {
      if (x < 0) {
        for (std::size_t j = 0; j < n; ++j) v(j, col) = -v(j, col);
      }
      return;
    }
  }
}

}  // namespace

void TridiagMatrix::validate() const {
  require(!diag.empty(), "tridiagonal matrix must have at least one row");
  require(off.size() + 1 == diag.size(),
          "tridiagonal matrix needs n-1 off-diagonal entries (n=" + std::to_string(diag.size()) +
              ", off=" + std::to_string(off.size()) + ")");
  for (double x : diag) require(std::isfinite(x), "non-finite diagonal entry");
  for (double x : off) require(std::isfinite(x), "non-finite off-diagonal entry");
}

double TridiagMatrix::norm_bound() const {
  double md = 0.0;
  for (double x : diag) md = std::max(md, std::abs(x));
  double mo = 0.0;
  for (double x : off) mo = std::max(mo, std::abs(x));
  return md + 2.0 * mo;
}

double TridiagMatrix::trace() const { return std::accumulate(diag.begin(), diag.end(), 0.0); }

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

double DenseMatrix::max_abs() const {
  double m = 0.0;
  for (double x : data_) m = std::max(m, std::abs(x));
  return m;
}

std::size_t sturm_count(const TridiagMatrix& t, double energy) {
  require(std::isfinite(energy), "sturm_count: energy must be finite");
  const std::size_t n = t.size();
  const double pivmin = DBL_MIN * std::max(1.0, max_off_squared(t));
  std::size_t count = 0;
  double d = guard_pivot(t.diag[0] - energy, pivmin);
  if (d < 0) ++count;
  for (std::size_t i = 1; i < n; ++i) {
    const double b = t.off[i - 1];
    d = guard_pivot((t.diag[i] - energy) - b * b / d, pivmin);
    if (d < 0) ++count;
  }
  return count;
}

double default_tolerance(const TridiagMatrix& t) { return 1e-12 * std::max(1.0, t.norm_bound()); }

std::vector<double> eigenvalues_bisection(const TridiagMatrix& t, double tol) {
  t.validate();
  return bisect_all(t.size(), gershgorin(t, 0.0), tol, [&](double e) { return sturm_count(t, e); });
}

std::vector<double> eigenvalues_bisection_range(const TridiagMatrix& t, std::size_t first, std::size_t last,
                                                double tol) {
  t.validate();
  require(last <= t.size() && first <= last, "eigenvalue index range out of bounds");
  return bisect_range(first, last, gershgorin(t, 0.0), tol, [&](double e) { return sturm_count(t, e); });
}

namespace {

// Symmetric matrix of bandwidth <= 3, upper band stored row by row.
class SymBand {
 public:
  static constexpr std::size_t kWidth = 3;
  explicit SymBand(std::size_t n) : n_(n), a_(n * (kWidth + 1), 0.0) {}
  double get(std::size_t i, std::size_t j) const {
    if (j < i) std::swap(i, j);
    return j - i > kWidth ? 0.0 : a_[i * (kWidth + 1) + (j - i)];
  }
  void set(std::size_t i, std::size_t j, double v) {
    if (j < i) std::swap(i, j);
    if (j - i > kWidth) return;
    a_[i * (kWidth + 1) + (j - i)] = v;
  }
  // A <- G^T A G for the rotation mixing p and p + 1.
  void rotate(std::size_t p, double c, double s) {
    const std::size_t q = p + 1;
    const std::size_t lo = p >= kWidth ? p - kWidth : 0;
    const std::size_t hi = std::min(n_ - 1, q + kWidth);
    for (std::size_t j = lo; j <= hi; ++j) {
      if (j == p || j == q) continue;
      const double x = get(p, j), y = get(q, j);
      set(p, j, c * x + s * y);
      set(q, j, -s * x + c * y);
    }
    const double app = get(p, p), aqq = get(q, q), apq = get(p, q);
    set(p, p, c * c * app + 2 * c * s * apq + s * s * aqq);
    set(q, q, s * s * app - 2 * c * s * apq + c * c * aqq);
    set(p, q, (c * c - s * s) * apq + c * s * (aqq - app));
  }
  // Rotate p, p + 1 so that entry (k, p + 1) vanishes.
  void annihilate(std::size_t k, std::size_t p) {
    const double x = get(k, p), y = get(k, p + 1);
    if (y == 0.0) return;
    const double r = std::hypot(x, y);
    rotate(p, x / r, y / r);
    set(k, p + 1, 0.0);
  }

 private:
  std::size_t n_;
  std::vector<double> a_;
};

}  // namespace

TridiagMatrix cyclic_to_tridiagonal(const TridiagMatrix& t, double wrap) {
  t.validate();
  const std::size_t n = t.size();
  require(n >= 3, "cyclic chain needs at least 3 sites");
  // Folding the ring as 0, n-1, 1, n-2, ... gives bandwidth 2.
  std::vector<std::size_t> pos(n);
  for (std::size_t i = 0, lo = 0, hi = n - 1; i < n; ++i) pos[i % 2 == 0 ? lo++ : hi--] = i;
  SymBand a(n);
  for (std::size_t i = 0; i < n; ++i) a.set(pos[i], pos[i], t.diag[i]);
  for (std::size_t i = 0; i + 1 < n; ++i) a.set(pos[i], pos[i + 1], a.get(pos[i], pos[i + 1]) + t.off[i]);
  a.set(pos[0], pos[n - 1], a.get(pos[0], pos[n - 1]) + wrap);

  // Givens band reduction: clear (k, k+2), then chase the bulge at distance 3 down the band.
  for (std::size_t k = 0; k + 2 < n; ++k) {
    if (a.get(k, k + 2) == 0.0) continue;
    a.annihilate(k, k + 1);
    for (std::size_t r = k + 1; r + 3 < n; r += 2) {
      if (a.get(r, r + 3) == 0.0) break;
      a.annihilate(r, r + 2);
    }
  }
  TridiagMatrix out;
  out.diag.resize(n);
  out.off.resize(n - 1);
  for (std::size_t i = 0; i < n; ++i) out.diag[i] = a.get(i, i);
  for (std::size_t i = 0; i + 1 < n; ++i) out.off[i] = a.get(i, i + 1);
  return out;
}

EigenDecomposition eigen_full(const TridiagMatrix& t, double tol) {
  t.validate();
  require(tol > 0.0, "eigen_full: tolerance must be positive");
  const std::size_t n = t.size();
  std::vector<double> d = t.diag;
  std::vector<double> e(n, 0.0);
  std::copy(t.off.begin(), t.off.end(), e.begin());
  std::vector<double> z(n * n, 0.0);
  for (std::size_t k = 0; k < n; ++k) z[k * n + k] = 1.0;
  implicit_ql(d, e, z, n, tol);

  const auto order = ascending_order(d);
  EigenDecomposition out;
  out.eigenvalues.resize(n);
  out.vectors = DenseMatrix(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t src = order[k];
    out.eigenvalues[k] = d[src];
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = z[src * n + i];
    fix_sign(out.vectors, k);
  }
  return out;
}

EigenDecomposition eigen_full(const TridiagMatrix& t) { return eigen_full(t, default_tolerance(t)); }

std::vector<double> eigenvalues_ql(const TridiagMatrix& t) {
  t.validate();
  const std::size_t n = t.size();
  std::vector<double> d = t.diag;
  std::vector<double> e(n, 0.0);
  std::copy(t.off.begin(), t.off.end(), e.begin());
  std::vector<double> z;
  implicit_ql(d, e, z, 0, default_tolerance(t));
  std::sort(d.begin(), d.end());
  return d;
}

RowComponents eigen_rows(const TridiagMatrix& t, std::span<const std::size_t> rows) {
  t.validate();
  const std::size_t n = t.size();
  const std::size_t m = rows.size();
  for (std::size_t r : rows) require(r < n, "eigen_rows: row " + std::to_string(r) + " out of range");
  std::vector<double> d = t.diag;
  std::vector<double> e(n, 0.0);
  std::copy(t.off.begin(), t.off.end(), e.begin());
  std::vector<double> z(n * m, 0.0);
  for (std::size_t r = 0; r < m; ++r) z[rows[r] * m + r] = 1.0;
  implicit_ql(d, e, z, m, default_tolerance(t));

  const auto order = ascending_order(d);
  RowComponents out;
  out.rows.assign(rows.begin(), rows.end());
  out.eigenvalues.resize(n);
  out.components.resize(n * m);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t src = order[k];
    out.eigenvalues[k] = d[src];
    for (std::size_t r = 0; r < m; ++r) out.components[r * n + k] = z[src * m + r];
  }
  return out;
}

EigenDecomposition dense_eigen_jacobi(const DenseMatrix& input, double tol) {
  const std::size_t n = input.size();
  require(n >= 1, "dense_eigen_jacobi: empty matrix");
  require(tol > 0.0, "dense_eigen_jacobi: tolerance must be positive");
  const double scale = std::max(1.0, input.max_abs());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      require(std::isfinite(input(i, j)) && std::isfinite(input(j, i)), "dense_eigen_jacobi: non-finite entry");
      if (std::abs(input(i, j) - input(j, i)) > 1e-12 * scale) {
        fail("dense_eigen_jacobi: matrix is not symmetric at (" + std::to_string(i) + "," + std::to_string(j) + ")");
      }
    }
  }

  DenseMatrix a = input;
  DenseMatrix v = DenseMatrix::identity(n);
  auto off_norm = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) s += 2.0 * a(i, j) * a(i, j);
    return std::sqrt(s);
  };

  const int max_sweeps = 100;
  int sweep = 0;
  while (off_norm() > tol) {
    if (++sweep > max_sweeps) {
      throw ConvergenceError("Jacobi did not reach off-diagonal norm " + std::to_string(tol) + " in " +
                             std::to_string(max_sweeps) + " sweeps");
    }
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        double t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        if (theta < 0) t = -t;
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = a(p, k) = c * akp - s * akq;
          a(k, q) = a(q, k) = s * akp + c * akq;
        }
        a(p, p) -= t * apq;
        a(q, q) += t * apq;
        a(p, q) = a(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<double> diag(n);
  for (std::size_t i = 0; i < n; ++i) diag[i] = a(i, i);
  const auto order = ascending_order(diag);
  EigenDecomposition out;
  out.eigenvalues.resize(n);
  out.vectors = DenseMatrix(n);
  for (std::size_t k = 0; k < n; ++k) {
    out.eigenvalues[k] = diag[order[k]];
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
    fix_sign(out.vectors, k);
  }
  return out;
}

EigenDecomposition dense_eigen_jacobi(const DenseMatrix& a) {
  double fro = 0.0;
  for (double x : a.data()) fro += x * x;
  return dense_eigen_jacobi(a, 1e-13 * std::max(1.0, std::sqrt(fro)));
}

std::vector<std::vector<double>> inverse_iteration(const TridiagMatrix& t, std::span<const double> eigenvalues) {
  t.validate();
  const std::size_t n = t.size();
  const double norm = std::max(t.norm_bound(), DBL_MIN);
  const double cluster = 1e-3 * norm;
  std::vector<std::vector<double>> out;
  out.reserve(eigenvalues.size());

  std::vector<double> dl(n), d(n), du(n), du2(n);
  std::vector<char> swapped(n);
  for (std::size_t k = 0; k < eigenvalues.size(); ++k) {
    const double sigma = eigenvalues[k];
    // LU with partial pivoting of T - sigma (LAPACK dgttrf layout).
    for (std::size_t i = 0; i < n; ++i) d[i] = t.diag[i] - sigma;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      dl[i] = t.off[i];
      du[i] = t.off[i];
      du2[i] = 0.0;
      swapped[i] = 0;
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (std::abs(d[i]) >= std::abs(dl[i])) {
        if (d[i] != 0.0) {
          const double fact = dl[i] / d[i];
          dl[i] = fact;
          d[i + 1] -= fact * du[i];
        }
      } else {
        const double fact = d[i] / dl[i];
        d[i] = dl[i];
        dl[i] = fact;
        const double temp = du[i];
        du[i] = d[i + 1];
        d[i + 1] = temp - fact * d[i + 1];
        if (i + 2 < n) {
          du2[i] = du[i + 1];
          du[i + 1] = -fact * du[i + 1];
        }
        swapped[i] = 1;
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (std::abs(d[i]) < kEps * norm) d[i] = (d[i] < 0 ? -1.0 : 1.0) * kEps * norm;
    }

    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = 1.0 + 0.1 * std::sin(1.0 + 3.7 * static_cast<double>(i));
    for (int it = 0; it < 3; ++it) {
      for (std::size_t i = 0; i + 1 < n; ++i) {
        if (!swapped[i]) {
          x[i + 1] -= dl[i] * x[i];
        } else {
          const double temp = x[i];
          x[i] = x[i + 1];
          x[i + 1] = temp - dl[i] * x[i];
        }
      }
      x[n - 1] /= d[n - 1];
      if (n > 1) x[n - 2] = (x[n - 2] - du[n - 2] * x[n - 1]) / d[n - 2];
      if (n >= 3)
        for (std::size_t i = n - 2; i-- > 0;) x[i] = (x[i] - du[i] * x[i + 1] - du2[i] * x[i + 2]) / d[i];

      for (std::size_t j = 0; j < k; ++j) {
        if (std::abs(eigenvalues[j] - sigma) > cluster) continue;
        double dot = 0.0;
        for (std::size_t i = 0; i < n; ++i) dot += out[j][i] * x[i];
        for (std::size_t i = 0; i < n; ++i) x[i] -= dot * out[j][i];
      }
      double nrm = 0.0;
      for (double xi : x) nrm += xi * xi;
      nrm = std::sqrt(nrm);
      if (!(nrm > 0.0) || !std::isfinite(nrm)) {
        throw ConvergenceError("inverse iteration lost the eigenvector near " + std::to_string(sigma));
      }
      for (double& xi : x) xi /= nrm;
    }
    out.push_back(std::move(x));
  }
  return out;
}

}  // namespace doslab
