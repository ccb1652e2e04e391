#include "doslab/regularity.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "doslab/error.hpp"
#include "doslab/spectrum.hpp"

namespace doslab {

namespace {

void check_scales(std::span<const double> scales) {
  require(!scales.empty(), "need at least one scale");
  for (std::size_t k = 0; k < scales.size(); ++k) {
    require(scales[k] > 0.0 && std::isfinite(scales[k]), "scales must be positive and finite");
    if (k > 0) require(scales[k] < scales[k - 1], "scales must be strictly decreasing");
  }
}

Interval data_window(const EmpiricalCDF& cdf) {
  const Interval hull = cdf.measure().meta().hull;
  if (std::isfinite(hull.lo) && std::isfinite(hull.hi)) return hull;
  const auto atoms = cdf.atoms();
  if (atoms.empty()) return {0.0, 0.0};
  return {atoms.front().energy, atoms.back().energy};
}

// sup over E in [lo, hi - h] of nu((E, E + h]).
double window_sup(std::span<const Atom> atoms, std::span<const double> prefix, const EmpiricalCDF& cdf,
                  const Interval& w, double h) {
  if (h >= w.length()) return cdf(w.hi) - cdf(w.lo);
  double best = cdf(w.lo + h) - cdf(w.lo);
  auto first = std::lower_bound(atoms.begin(), atoms.end(), w.lo + h,
                                [](const Atom& a, double e) { return a.energy < e; });
  const auto last = std::upper_bound(atoms.begin(), atoms.end(), w.hi,
                                     [](double e, const Atom& a) { return e < a.energy; });
  std::size_t i = static_cast<std::size_t>(first - atoms.begin());
  std::size_t left = 0;
  for (auto it = first; it != last; ++it, ++i) {
    const double edge = it->energy - h;
    while (atoms[left].energy <= edge) ++left;
    best = std::max(best, prefix[i + 1] - prefix[left]);
  }
  return best;
}

}  // namespace

ModulusProfile modulus_profile(const EmpiricalCDF& cdf, std::span<const Interval> windows,
                               std::span<const double> scales) {
  check_scales(scales);
  ModulusProfile out;
  out.windows.assign(windows.begin(), windows.end());
  out.scales.assign(scales.begin(), scales.end());
  out.sup_increment.assign(scales.size(), 0.0);
  const auto atoms = cdf.atoms();
  const double total = cdf.total_weight();
  std::vector<double> prefix(atoms.size() + 1, 0.0);
  for (std::size_t k = 0; k < atoms.size(); ++k) prefix[k + 1] = prefix[k] + atoms[k].weight;

  double inside = 0.0;
  for (const auto& w : windows) {
    require(w.lo < w.hi && std::isfinite(w.lo) && std::isfinite(w.hi), "regularity windows must be finite, lo < hi");
    inside += cdf(w.hi) - cdf(w.lo);
    for (std::size_t s = 0; s < scales.size(); ++s) {
      out.sup_increment[s] = std::max(out.sup_increment[s], window_sup(atoms, prefix, cdf, w, scales[s]) / total);
    }
  }
  out.empty_window = !(inside > 0.0);
  if (out.empty_window) std::fill(out.sup_increment.begin(), out.sup_increment.end(), 0.0);
  for (double& x : out.sup_increment) x = std::clamp(x, 0.0, 1.0);
  return out;
}

ModulusProfile modulus_profile(const EmpiricalCDF& cdf, const Interval& window, std::span<const double> scales) {
  return modulus_profile(cdf, std::span<const Interval>(&window, 1), scales);
}

HolderFit holder_fit(const ModulusProfile& profile) {
  const std::size_t n = profile.scales.size();
  require(n >= 4, "Hoelder fit needs at least 4 scales, got " + std::to_string(n));
  HolderFit fit;
  if (std::any_of(profile.sup_increment.begin(), profile.sup_increment.end(), [](double x) { return !(x > 0.0); }))
    return fit;
  std::vector<double> x(n), y(n);
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    x[k] = std::log(profile.scales[k]);
    y[k] = std::log(profile.sup_increment[k]);
    mx += x[k];
    my += y[k];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    sxy += (x[k] - mx) * (y[k] - my);
    sxx += (x[k] - mx) * (x[k] - mx);
  }
  const double slope = sxy / sxx;
  for (std::size_t k = 0; k < n; ++k)
    fit.residual = std::max(fit.residual, std::abs(y[k] - (my + slope * (x[k] - mx))));
  fit.alpha = std::clamp(slope, 0.0, 1.5);
  fit.defined = true;
  return fit;
}

std::vector<Interval> hull_tiling(const ModelSpec& model, const LatticeBox& box, double width) {
  require(width > 0.0, "tile width must be positive");
  const Interval hull = gershgorin_hull(model, box);
  const auto n = static_cast<std::size_t>(std::ceil(hull.length() / width - 1e-9));
  std::vector<Interval> out;
  for (std::size_t k = 0; k < std::max<std::size_t>(n, 1); ++k)
    out.push_back({hull.lo + static_cast<double>(k) * width, hull.lo + static_cast<double>(k + 1) * width});
  return out;
}

WegnerResult wegner_check(const ModelSpec& model, const LatticeBox& box, const EnsembleConfig& ensemble,
                          std::span<const Interval> intervals) {
  const auto* a = std::get_if<AndersonModel>(&model.family);
  require(a != nullptr, "Wegner check applies to Anderson models only, got '" + std::string(model.family_name()) + "'");
  require(a->disorder.absolutely_continuous(),
          "Wegner check needs an absolutely continuous single-site law, got '" + std::string(a->disorder.name()) + "'");
  require(a->lambda != 0.0, "Wegner check needs lambda != 0");
  require(!intervals.empty(), "Wegner check needs at least one interval");

  WegnerResult r;
  r.bound = a->disorder.density_sup() / std::abs(a->lambda);
  r.intervals.assign(intervals.begin(), intervals.end());
  std::vector<double> grid;
  for (const auto& iv : intervals) {
    require(iv.lo < iv.hi && std::isfinite(iv.lo) && std::isfinite(iv.hi), "Wegner intervals must be finite, lo < hi");
    grid.push_back(iv.lo);
    grid.push_back(iv.hi);
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  const auto n = ensemble_ids_on_grid(model, box, ensemble, grid);
  auto at = [&](double e) { return n[static_cast<std::size_t>(std::lower_bound(grid.begin(), grid.end(), e) - grid.begin())]; };
  for (const auto& iv : intervals) {
    const double c = (at(iv.hi) - at(iv.lo)) / iv.length();
    r.per_interval.push_back(c);
    if (c > r.constant || r.per_interval.size() == 1) {
      r.constant = std::max(c, 0.0);
      r.worst = iv;
    }
  }
  r.pass = r.constant <= 1.25 * r.bound;
  return r;
}

std::vector<Interval> interior_windows(const EmpiricalCDF& cdf, double resolution, double plateau_tol, double margin,
                                       double min_width) {
  if (cdf.atoms().empty()) return {};
  const Interval window = data_window(cdf);
  if (!(window.lo < window.hi)) return {};
  const auto bands = detect_gaps(cdf, window, plateau_tol, resolution).complement_within(window);
  std::vector<Interval> out;
  for (const auto& p : bands.intervals()) {
    const Interval w{p.lo + margin, p.hi - margin};
    if (w.length() >= min_width) out.push_back(w);
  }
  return out;
}

std::string_view to_string(AcVerdict v) {
  switch (v) {
    case AcVerdict::lipschitz_consistent: return "lipschitz_consistent";
    case AcVerdict::holder: return "holder";
    case AcVerdict::singular_consistent: return "singular_consistent";
    case AcVerdict::inconclusive: return "inconclusive";
  }
  return "?";
}

RegularityReport regularity_report(const EmpiricalCDF& cdf, const RegularityOptions& options) {
  check_scales(options.scales);
  check_scales(options.measure_eps);
  require(!cdf.atoms().empty(), "regularity report needs a non-empty measure");
  RegularityReport r;

  const double min_scale = 4.0 / static_cast<double>(cdf.atoms().size());
  for (double h : options.scales)
    if (h >= min_scale) r.scales.push_back(h);
  if (r.scales.size() < options.scales.size() && (r.scales.empty() || r.scales.back() > min_scale))
    r.scales.push_back(min_scale);

  r.windows = interior_windows(cdf, options.resolution, options.plateau_tol, options.edge_margin, options.min_window);
  if (r.windows.empty()) {
    r.full_window = true;
    const Interval w = data_window(cdf);
    r.windows = {w.lo < w.hi ? w : Interval{w.lo - 1.0, w.hi + 1.0}};
  }
  const auto profile = modulus_profile(cdf, r.windows, r.scales);
  r.sup_increment = profile.sup_increment;
  if (r.scales.size() >= 4) r.fit = holder_fit(profile);

  const double h_min = r.scales.back();
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  std::size_t used = 0;
  for (std::size_t k = 0; k < r.scales.size(); ++k) {
    if (r.scales[k] > 100.0 * h_min * (1.0 + 1e-12)) continue;
    const double q = r.sup_increment[k] / r.scales[k];
    lo = std::min(lo, q);
    hi = std::max(hi, q);
    ++used;
  }
  r.lipschitz_ratio = (used >= 2 && lo > 0.0) ? hi / lo : std::numeric_limits<double>::infinity();

  r.measure_eps = options.measure_eps;
  for (double eps : options.measure_eps)
    r.spectrum_measure.push_back(lebesgue_measure(estimate_spectrum(cdf.measure(), eps, options.measure_floor).support));
  r.measure_shrinks = r.spectrum_measure.size() >= 2;
  for (std::size_t k = 1; k < r.spectrum_measure.size(); ++k)
    if (!(r.spectrum_measure[k] < r.spectrum_measure[k - 1])) r.measure_shrinks = false;

  r.verdict = ac_verdict(r);
  return r;
}

AcVerdict ac_verdict(const RegularityReport& report) {
  if (!report.fit.defined) return AcVerdict::inconclusive;
  if (report.lipschitz_ratio <= 2.0) return AcVerdict::lipschitz_consistent;
  if (report.fit.alpha < 0.9 && report.measure_shrinks) return AcVerdict::singular_consistent;
  return AcVerdict::holder;
}

std::string describe_verdict(const RegularityReport& report) {
  if (report.verdict != AcVerdict::holder) return std::string(to_string(report.verdict));
  char buf[64];
  std::snprintf(buf, sizeof buf, "holder(%.3f)", report.fit.alpha);
  return buf;
}

}  // namespace doslab
