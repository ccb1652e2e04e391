#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "doslab/dos.hpp"
#include "doslab/model.hpp"
#include "doslab/rng.hpp"

namespace doslab {

// Half-line recursions u_{n+1} = (E - V_n) u_n - u_{n-1} with u_0 = 0,
// u_1 = 1, driven by the potential of a 1D box of length n_steps.

struct LyapunovResult {
  double E = 0.0;
  /// Per-site growth rate of ||T_n ... T_1||.
  double gamma = 0.0;
  std::size_t n_steps = 0;
  /// Batch-means standard error.
  double std_error = 0.0;
};

LyapunovResult lyapunov(const ModelSpec& model, double energy, std::size_t n_steps, const RealizationSeed& seed);
LyapunovResult lyapunov(std::span<const double> potential, double energy);

/// IDS from node counting: N(E) = 1 - nodes / n_steps (hopping +1 puts the
/// oscillating solutions at the bottom of the spectrum).
double rotation_number_ids(const ModelSpec& model, double energy, std::size_t n_steps, const RealizationSeed& seed);
double rotation_number_ids(std::span<const double> potential, double energy);

struct ThoulessResult {
  double gamma = 0.0;
  double atom_sum = 0.0;
  double residual = 0.0;
  /// Distance from E to the nearest atom.
  double distance = 0.0;
};

/// |gamma(E) - sum_k w_k log|E - E_k||, with weights normalized to total 1.
/// E must be at least `min_distance` away from every atom.
ThoulessResult thouless_check(const LyapunovResult& gamma, const EmpiricalCDF& cdf, double min_distance = 0.1);

}  // namespace doslab
