#include "doslab/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "doslab/error.hpp"

namespace doslab {

namespace {

bool is_cyclic(const FiniteOperator& h) { return h.box().d == 1 && h.box().bc == Boundary::periodic; }

double after(double e) { return std::nextafter(e, std::numeric_limits<double>::infinity()); }

// Tridiagonal matrix with the spectrum of a 1D operator.
TridiagMatrix spectral_chain(const FiniteOperator& h) {
  return is_cyclic(h) ? cyclic_to_tridiagonal(h.chain(), h.wrap()) : h.chain();
}

}  // namespace

std::size_t count_below(const FiniteOperator& h, double energy) {
  require(std::isfinite(energy), "count_below: energy must be finite");
  if (h.box().d == 1) return sturm_count(spectral_chain(h), energy);
  const auto ev = operator_eigenvalues(h);
  return static_cast<std::size_t>(std::lower_bound(ev.begin(), ev.end(), energy) - ev.begin());
}

std::size_t count_at_most(const FiniteOperator& h, double energy) {
  require(std::isfinite(energy), "count_at_most: energy must be finite");
  if (h.box().d == 1) return count_below(h, after(energy));
  const auto ev = operator_eigenvalues(h);
  return static_cast<std::size_t>(std::upper_bound(ev.begin(), ev.end(), energy) - ev.begin());
}

std::vector<std::size_t> counts_on_grid(const FiniteOperator& h, std::span<const double> grid) {
  std::vector<std::size_t> out(grid.size());
  if (h.box().d == 1) {
    const TridiagMatrix t = spectral_chain(h);
    for (std::size_t g = 0; g < grid.size(); ++g) {
      require(std::isfinite(grid[g]), "counts_on_grid: energy must be finite");
      out[g] = sturm_count(t, after(grid[g]));
    }
    return out;
  }
  const auto ev = operator_eigenvalues(h);
  for (std::size_t g = 0; g < grid.size(); ++g)
    out[g] = static_cast<std::size_t>(std::upper_bound(ev.begin(), ev.end(), grid[g]) - ev.begin());
  return out;
}

std::vector<double> operator_eigenvalues(const FiniteOperator& h) {
  if (h.box().d == 1) return eigenvalues_ql(spectral_chain(h));
  return dense_eigen_jacobi(h.dense()).eigenvalues;
}

std::vector<double> eigenvalues_in(const FiniteOperator& h, double lo, double hi) {
  if (!(lo <= hi)) return {};
  if (h.box().d == 1) {
    const TridiagMatrix t = spectral_chain(h);
    const std::size_t first = std::isfinite(lo) ? sturm_count(t, lo) : 0;
    const std::size_t last = std::isfinite(hi) ? sturm_count(t, after(hi)) : h.size();
    if (first >= last) return {};
    auto ev = eigenvalues_bisection_range(t, first, last, 1e-13 * std::max(1.0, t.norm_bound()));
    for (double& e : ev) e = std::clamp(e, lo, hi);
    return ev;
  }
  std::vector<double> out;
  for (double e : operator_eigenvalues(h))
    if (e >= lo && e <= hi) out.push_back(e);
  return out;
}

EigenDecomposition operator_eigensystem(const FiniteOperator& h) {
  if (h.is_tridiagonal()) return eigen_full(h.chain());
  return dense_eigen_jacobi(h.dense());
}

SiteWeights site_weights(const FiniteOperator& h, std::span<const std::size_t> sites) {
  for (std::size_t s : sites) {
    require(s < h.size(), "site " + std::to_string(s) + " outside box of " + std::to_string(h.size()) + " sites");
  }
  SiteWeights out;
  if (h.is_tridiagonal()) {
    const RowComponents rc = eigen_rows(h.chain(), sites);
    out.eigenvalues = rc.eigenvalues;
    out.weights.assign(sites.size(), std::vector<double>(rc.eigenvalues.size()));
    for (std::size_t r = 0; r < sites.size(); ++r)
      for (std::size_t k = 0; k < rc.eigenvalues.size(); ++k) {
        const double c = rc.at(r, k);
        out.weights[r][k] = c * c;
      }
    return out;
  }
  const EigenDecomposition ed = operator_eigensystem(h);
  out.eigenvalues = ed.eigenvalues;
  out.weights.assign(sites.size(), std::vector<double>(ed.eigenvalues.size()));
  for (std::size_t r = 0; r < sites.size(); ++r)
    for (std::size_t k = 0; k < ed.eigenvalues.size(); ++k) {
      const double c = ed.vectors(sites[r], k);
      out.weights[r][k] = c * c;
    }
  return out;
}

std::vector<EigenProfile> eigen_profiles(const FiniteOperator& h, double lo, double hi) {
  std::vector<EigenProfile> out;
  if (h.is_tridiagonal()) {
    const TridiagMatrix t = h.chain();
    const auto ev = eigenvalues_ql(t);
    std::vector<double> inside;
    for (double e : ev)
      if (e >= lo && e <= hi) inside.push_back(e);
    if (inside.empty()) return out;
    const auto vecs = inverse_iteration(t, inside);
    for (std::size_t k = 0; k < inside.size(); ++k) {
      EigenProfile p{inside[k], std::vector<double>(t.size())};
      for (std::size_t i = 0; i < t.size(); ++i) p.density[i] = vecs[k][i] * vecs[k][i];
      out.push_back(std::move(p));
    }
    return out;
  }
  const EigenDecomposition ed = operator_eigensystem(h);
  for (std::size_t k = 0; k < ed.eigenvalues.size(); ++k) {
    const double e = ed.eigenvalues[k];
    if (e < lo || e > hi) continue;
    EigenProfile p{e, std::vector<double>(h.size())};
    for (std::size_t i = 0; i < h.size(); ++i) p.density[i] = ed.vectors(i, k) * ed.vectors(i, k);
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace doslab
