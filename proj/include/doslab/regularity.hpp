#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "doslab/dos.hpp"
#include "doslab/interval.hpp"
#include "doslab/model.hpp"

namespace doslab {

inline const std::vector<double> kDefaultScales = {1e-1, 3e-2, 1e-2, 3e-3, 1e-3};

struct ModulusProfile {
  std::vector<Interval> windows;
  std::vector<double> scales;
  /// sup_E nu((E, E + h]) / total mass, E + h and E inside one window.
  std::vector<double> sup_increment;
  /// No atoms inside the windows.
  bool empty_window = false;
};

/// Exact sup over each window (the maximum is attained with E + h on an
/// atom). Scales must be positive and strictly decreasing.
ModulusProfile modulus_profile(const EmpiricalCDF& cdf, std::span<const Interval> windows,
                               std::span<const double> scales);
ModulusProfile modulus_profile(const EmpiricalCDF& cdf, const Interval& window, std::span<const double> scales);

struct HolderFit {
  double alpha = 0.0;
  double residual = 0.0;
  /// False when some increment is zero.
  bool defined = false;
};

/// Least-squares slope of log(sup increment) against log h, clamped to
/// [0, 1.5]. Needs at least 4 scales.
HolderFit holder_fit(const ModulusProfile& profile);

struct WegnerResult {
  double constant = 0.0;
  double bound = 0.0;
  Interval worst;
  bool pass = false;
  std::vector<Interval> intervals;
  std::vector<double> per_interval;
};

/// sup over intervals of E[#eigenvalues in [a, b]] / ((b - a) |box|),
/// compared with 1.25 * ||h0||_inf / |lambda|. Anderson models with
/// absolutely continuous disorder only.
WegnerResult wegner_check(const ModelSpec& model, const LatticeBox& box, const EnsembleConfig& ensemble,
                          std::span<const Interval> intervals);

/// Consecutive intervals of the given width covering the Gershgorin hull.
std::vector<Interval> hull_tiling(const ModelSpec& model, const LatticeBox& box, double width);

/// Support pieces of the gap-detected spectrum, shrunk by `margin` at both
/// ends; pieces narrower than min_width afterwards are dropped.
std::vector<Interval> interior_windows(const EmpiricalCDF& cdf, double resolution, double plateau_tol,
                                       double margin = 0.1, double min_width = 0.1);

enum class AcVerdict { lipschitz_consistent, holder, singular_consistent, inconclusive };
std::string_view to_string(AcVerdict v);

struct RegularityOptions {
  std::vector<double> scales = kDefaultScales;
  std::vector<double> measure_eps = kDefaultScales;
  double measure_floor = 0.0;
  /// Gap detection for the interior windows.
  double resolution = 3e-3;
  double plateau_tol = 1e-4;
  double edge_margin = 0.1;
  double min_window = 0.1;
};

struct RegularityReport {
  std::vector<Interval> windows;
  /// True when no interior window survived and the whole hull was used.
  bool full_window = false;
  std::vector<double> scales;
  std::vector<double> sup_increment;
  HolderFit fit;
  /// max / min of sup_increment / h over scales within two decades of the
  /// smallest.
  double lipschitz_ratio = 0.0;
  std::vector<double> measure_eps;
  std::vector<double> spectrum_measure;
  bool measure_shrinks = false;
  double wegner_constant = 0.0;
  bool has_wegner = false;
  AcVerdict verdict = AcVerdict::inconclusive;
};

/// Scales below 4 / (atom count) are replaced by that floor.
RegularityReport regularity_report(const EmpiricalCDF& cdf, const RegularityOptions& options = {});

/// lipschitz_consistent when lipschitz_ratio <= 2; singular_consistent when
/// alpha < 0.9 and the spectrum measure strictly shrinks with eps; holder
/// for any other defined fit.
AcVerdict ac_verdict(const RegularityReport& report);

std::string describe_verdict(const RegularityReport& report);

}  // namespace doslab
