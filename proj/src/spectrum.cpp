#include "doslab/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "json.hpp"

#include "doslab/error.hpp"
#include "doslab/parallel.hpp"

namespace doslab {

SpectrumEstimate estimate_spectrum(const DOSMeasure& dos, double eps, double mass_floor) {
  require(eps > 0.0, "spectrum resolution must be positive");
  require(mass_floor >= 0.0, "mass floor must be non-negative");
  SpectrumEstimate out;
  out.resolution = eps;
  if (dos.empty()) return out;

  // nu([E - eps, E + eps]) only changes at e_k +- eps; it is constant on the
  // open pieces between consecutive breakpoints, so sampling the midpoints
  // and the breakpoints themselves gives the closure exactly.
  std::vector<double> breaks;
  breaks.reserve(2 * dos.size());
  for (const Atom& a : dos.atoms()) {
    breaks.push_back(a.energy - eps);
    breaks.push_back(a.energy + eps);
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  std::vector<Interval> pieces;
  for (std::size_t k = 0; k < breaks.size(); ++k) {
    const double x = breaks[k];
    if (dos.mass(x - eps, x + eps) > mass_floor) pieces.push_back({x, x});
    if (k + 1 < breaks.size()) {
      const double mid = 0.5 * (x + breaks[k + 1]);
      if (dos.mass(mid - eps, mid + eps) > mass_floor) pieces.push_back({x, breaks[k + 1]});
    }
  }
  IntervalSet support(std::move(pieces));
  const Interval& hull = dos.meta().hull;
  out.support = support.intersect(hull);
  for (const auto& p : out.support.intervals()) {
    const auto atoms = dos.atoms();
    const auto lo = std::lower_bound(atoms.begin(), atoms.end(), p.lo,
                                     [](const Atom& a, double e) { return a.energy < e; });
    const auto hi = std::upper_bound(atoms.begin(), atoms.end(), p.hi,
                                     [](double e, const Atom& a) { return e < a.energy; });
    out.coverage.push_back(static_cast<std::size_t>(hi - lo));
  }
  return out;
}

double default_resolution(const LatticeBox& box) {
  require(box.L >= 1, "box length must be positive");
  return 2.0 * std::numbers::pi / static_cast<double>(box.L);
}

IntervalSet detect_gaps(const EmpiricalCDF& cdf, const Interval& window, double plateau_tol, double resolution) {
  require(window.lo < window.hi, "gap window must have lo < hi");
  require(plateau_tol >= 0.0, "plateau tolerance must be non-negative");
  if (cdf.measure().empty()) return IntervalSet({window});
  const auto est = estimate_spectrum(cdf.measure(), 0.5 * resolution, plateau_tol);
  return est.support.complement_within(window);
}

IntervalSet detect_gaps(const EmpiricalCDF& cdf, const Interval& window, double plateau_tol) {
  return detect_gaps(cdf, window, plateau_tol, default_resolution(cdf.measure().meta().box));
}

// ---------------------------------------------------------------------------
// Restriction to a spectral subspace
// ---------------------------------------------------------------------------

namespace {

template <class Apply>
std::vector<double> compress(const EigenDecomposition& eig, const Interval& window, Apply&& apply) {
  const std::size_t n = eig.eigenvalues.size();
  std::vector<std::vector<double>> basis;
  for (std::size_t k = 0; k < n; ++k) {
    if (!window.contains(eig.eigenvalues[k])) continue;
    std::vector<double> q(n);
    for (std::size_t i = 0; i < n; ++i) q[i] = eig.vectors(i, k);
    basis.push_back(std::move(q));
  }
  const std::size_t m = basis.size();
  if (m == 0) return {};
  std::vector<std::vector<double>> hq(m, std::vector<double>(n));
  for (std::size_t a = 0; a < m; ++a) apply(basis[a], hq[a]);
  DenseMatrix c(m);
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = a; b < m; ++b) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += basis[a][i] * hq[b][i];
      c(a, b) = s;
      c(b, a) = s;
    }
  }
  auto ev = dense_eigen_jacobi(c).eigenvalues;
  std::sort(ev.begin(), ev.end());
  return ev;
}

}  // namespace

std::vector<double> restrict_to_spectral_subspace(const FiniteOperator& h, const Interval& window) {
  return compress(operator_eigensystem(h), window,
                  [&](const std::vector<double>& x, std::vector<double>& y) { h.apply(x, y); });
}

std::vector<double> restrict_to_spectral_subspace(const TridiagMatrix& t, const Interval& window) {
  t.validate();
  const std::size_t n = t.size();
  return compress(eigen_full(t), window, [&](const std::vector<double>& x, std::vector<double>& y) {
    for (std::size_t i = 0; i < n; ++i) {
      double s = t.diag[i] * x[i];
      if (i > 0) s += t.off[i - 1] * x[i - 1];
      if (i + 1 < n) s += t.off[i] * x[i + 1];
      y[i] = s;
    }
  });
}

std::vector<double> restrict_to_spectral_subspace(const DenseMatrix& a, const Interval& window) {
  const std::size_t n = a.size();
  return compress(dense_eigen_jacobi(a), window, [&](const std::vector<double>& x, std::vector<double>& y) {
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += a(i, j) * x[j];
      y[i] = s;
    }
  });
}

// ---------------------------------------------------------------------------
// Theorem checker
// ---------------------------------------------------------------------------

RealizationSpectrum realization_spectrum(const FiniteOperator& h, const Interval& window) {
  RealizationSpectrum out;
  out.box = h.box();
  out.window = window;
  out.all_bulk = h.box().bc == Boundary::periodic;
  if (out.all_bulk) {
    out.eigenvalues = eigenvalues_in(h, window.lo, window.hi);
  } else {
    out.profiles = eigen_profiles(h, window.lo, window.hi);
    for (const auto& p : out.profiles) out.eigenvalues.push_back(p.energy);
  }
  return out;
}

std::vector<RealizationSpectrum> ensemble_spectra(const ModelSpec& model, const LatticeBox& box,
                                                  const EnsembleConfig& ensemble, const Interval& window) {
  const Ensemble ens(model, box, ensemble);
  std::vector<RealizationSpectrum> out(ens.size());
  parallel_for(ens.size(), ensemble.workers,
               [&](std::size_t k) { out[k] = realization_spectrum(ens.realization(k), window); });
  return out;
}

std::string_view to_string(TheoremVerdict v) {
  switch (v) {
    case TheoremVerdict::consistent: return "CONSISTENT";
    case TheoremVerdict::inconsistent: return "INCONSISTENT";
    case TheoremVerdict::inconclusive: return "INCONCLUSIVE";
  }
  return "?";
}

namespace {

bool bulk_supported(const EigenProfile& p, const LatticeBox& box, std::int64_t margin) {
  double bulk = 0.0;
  for (std::size_t x = 0; x < p.density.size(); ++x)
    if (box.distance_to_boundary(x) >= margin) bulk += p.density[x];
  return bulk >= 0.5;
}

}  // namespace

TheoremReport theorem_check(const DOSMeasure& dos, std::span<const RealizationSpectrum> spectra, const IntervalSet& a,
                            double mass_tol, std::int64_t boundary_margin) {
  require(mass_tol >= 0.0, "mass tolerance must be non-negative");
  require(boundary_margin >= 0, "boundary margin must be non-negative");
  TheoremReport r;
  r.model_hash = dos.meta().model_hash;
  r.interval = a;
  r.mass_tol = mass_tol;
  for (const auto& p : a.intervals()) r.mass += dos.mass(p.lo, p.hi);

  for (const auto& s : spectra) {
    if (s.all_bulk) {
      for (double e : s.eigenvalues) {
        if (!a.interior_contains(e)) continue;
        ++r.interior_eigenvalues;
        ++r.interior_hits;
      }
      continue;
    }
    for (const auto& p : s.profiles) {
      if (!a.interior_contains(p.energy)) continue;
      ++r.interior_eigenvalues;
      if (bulk_supported(p, s.box, boundary_margin)) ++r.interior_hits;
    }
  }

  if (r.mass <= mass_tol) {
    r.verdict = r.interior_hits == 0 ? TheoremVerdict::consistent : TheoremVerdict::inconsistent;
  } else if (r.mass < 10.0 * mass_tol) {
    r.verdict = TheoremVerdict::inconclusive;
  } else {
    r.verdict = TheoremVerdict::consistent;
  }
  r.note = "ensemble union of " + std::to_string(spectra.size()) +
           " realizations taken as the spectrum; a spectrum carried by a positive-probability event is not "
           "distinguished from an almost-sure one";
  return r;
}

std::string to_json(const TheoremReport& report) {
  nlohmann::ordered_json j;
  j["model_hash"] = report.model_hash;
  auto pieces = nlohmann::ordered_json::array();
  for (const auto& p : report.interval.intervals()) pieces.push_back({p.lo, p.hi});
  j["interval"] = pieces;
  j["mass"] = report.mass;
  j["mass_tol"] = report.mass_tol;
  j["interior_hits"] = report.interior_hits;
  j["verdict"] = std::string(to_string(report.verdict));
  return j.dump();
}

}  // namespace doslab
