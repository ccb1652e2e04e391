#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "doslab/dos.hpp"
#include "doslab/interval.hpp"
#include "doslab/model.hpp"
#include "doslab/solvers.hpp"

namespace doslab {

struct SpectrumEstimate {
  IntervalSet support;
  double resolution = 0.0;
  /// Number of atoms inside each support interval.
  std::vector<std::size_t> coverage;
};

/// Closure of {E : nu([E - eps, E + eps]) > mass_floor}, clipped to the
/// Gershgorin hull recorded in the measure.
SpectrumEstimate estimate_spectrum(const DOSMeasure& dos, double eps, double mass_floor);

/// 2 pi / L for the measure's box: an upper bound on the level spacing
/// inside a band of the free chain.
double default_resolution(const LatticeBox& box);

/// Maximal pieces of the window where N grows by at most plateau_tol over
/// every sub-window of width `resolution`.
IntervalSet detect_gaps(const EmpiricalCDF& cdf, const Interval& window, double plateau_tol, double resolution);
IntervalSet detect_gaps(const EmpiricalCDF& cdf, const Interval& window, double plateau_tol);

/// Spectrum of the compression of H to M = span{eigenvectors with
/// eigenvalue in I}, computed from the compressed matrix P_M H P_M.
std::vector<double> restrict_to_spectral_subspace(const FiniteOperator& h, const Interval& window);
std::vector<double> restrict_to_spectral_subspace(const TridiagMatrix& t, const Interval& window);
std::vector<double> restrict_to_spectral_subspace(const DenseMatrix& a, const Interval& window);

/// Eigenvalues of one realization plus eigenvector densities for those in
/// `window`. Periodic boxes have no boundary, so profiles are skipped.
struct RealizationSpectrum {
  LatticeBox box;
  Interval window;
  std::vector<double> eigenvalues;
  std::vector<EigenProfile> profiles;
  bool all_bulk = false;
};

RealizationSpectrum realization_spectrum(const FiniteOperator& h, const Interval& window);
std::vector<RealizationSpectrum> ensemble_spectra(const ModelSpec& model, const LatticeBox& box,
                                                  const EnsembleConfig& ensemble, const Interval& window);

enum class TheoremVerdict { consistent, inconsistent, inconclusive };
std::string_view to_string(TheoremVerdict v);

struct TheoremReport {
  std::string model_hash;
  IntervalSet interval;
  double mass = 0.0;
  double mass_tol = 0.0;
  std::size_t interior_hits = 0;
  /// All ensemble eigenvalues in the interior, bulk-supported or not.
  std::size_t interior_eigenvalues = 0;
  TheoremVerdict verdict = TheoremVerdict::consistent;
  std::string note;
};

/// Zero nu-mass on A must come with no bulk-supported eigenvalues inside A.
/// An eigenvalue is bulk-supported when at least half of its eigenvector
/// weight sits at distance >= boundary_margin from the boundary.
TheoremReport theorem_check(const DOSMeasure& dos, std::span<const RealizationSpectrum> spectra, const IntervalSet& a,
                            double mass_tol, std::int64_t boundary_margin);

std::string to_json(const TheoremReport& report);

}  // namespace doslab
