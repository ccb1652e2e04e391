#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "doslab/model.hpp"

namespace doslab {

struct Atom {
  double energy;
  double weight;

  friend bool operator==(const Atom&, const Atom&) = default;
};

struct MeasureMeta {
  std::string model_hash;
  LatticeBox box;
  std::uint64_t master_seed = 0;
  std::size_t n_samples = 1;
  /// Bound on the support of every realization's spectrum.
  Interval hull;
};

/// Finite atomic measure: sorted distinct energies with positive weights.
class DOSMeasure {
 public:
  DOSMeasure() = default;
  /// Sorts, merges equal energies and drops non-positive weights.
  explicit DOSMeasure(std::vector<Atom> atoms, MeasureMeta meta = {});

  std::span<const Atom> atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }
  bool empty() const { return atoms_.empty(); }
  double total_weight() const { return cumulative_.empty() ? 0.0 : cumulative_.back(); }
  const MeasureMeta& meta() const { return meta_; }
  MeasureMeta& meta() { return meta_; }

  /// Mass of (-inf, E] (right-continuous).
  double cumulative(double energy) const;
  /// Mass of (-inf, E).
  double cumulative_before(double energy) const;
  /// Mass of the closed interval [a, b].
  double mass(double a, double b) const { return b < a ? 0.0 : cumulative(b) - cumulative_before(a); }
  /// Mass of the open interval (a, b).
  double mass_open(double a, double b) const { return b <= a ? 0.0 : cumulative_before(b) - cumulative(a); }

 private:
  std::vector<Atom> atoms_;
  std::vector<double> cumulative_;
  MeasureMeta meta_;
};

/// Distribution function N(E) = nu((-inf, E]) of a DOSMeasure.
class EmpiricalCDF {
 public:
  EmpiricalCDF() = default;
  explicit EmpiricalCDF(DOSMeasure measure) : measure_(std::move(measure)) {}

  double operator()(double energy) const { return measure_.cumulative(energy); }
  const DOSMeasure& measure() const { return measure_; }
  std::span<const Atom> atoms() const { return measure_.atoms(); }
  double total_weight() const { return measure_.total_weight(); }

 private:
  DOSMeasure measure_;
};

double ids_eval(const EmpiricalCDF& cdf, double energy);

enum class EnsembleMode {
  /// Exhaustive enumeration when the disorder is finitely supported with at
  /// most 2^16 configurations, Monte Carlo otherwise.
  automatic,
  monte_carlo,
};

struct EnsembleConfig {
  std::size_t n_samples = 1;
  std::uint64_t master_seed = 0;
  EnsembleMode mode = EnsembleMode::automatic;
  /// Thread count; never changes results.
  unsigned workers = 1;
};

/// The realizations averaged over by the ensemble operations, with their
/// probabilities. Anderson models draw seeds (master, k); quasi-periodic
/// families use the phases theta + k/n; deterministic families have one
/// realization.
class Ensemble {
 public:
  Ensemble(ModelSpec model, LatticeBox box, EnsembleConfig config);

  std::size_t size() const { return size_; }
  bool exhaustive() const { return exhaustive_; }
  double probability(std::size_t k) const;
  PotentialField potential(std::size_t k) const;
  FiniteOperator realization(std::size_t k) const { return FiniteOperator(box_, potential(k)); }

  const ModelSpec& model() const { return model_; }
  const LatticeBox& box() const { return box_; }
  const EnsembleConfig& config() const { return config_; }
  MeasureMeta meta() const;

 private:
  ModelSpec model_;
  LatticeBox box_;
  EnsembleConfig config_;
  std::vector<std::pair<double, double>> atoms_;
  std::size_t size_ = 1;
  bool exhaustive_ = false;
};

/// Atoms at the eigenvalues with weights |u_k(site)|^2.
DOSMeasure local_dos_at_site(const ModelSpec& model, const LatticeBox& box, const RealizationSeed& seed,
                             std::size_t site);

/// Finite-volume IDS: atoms at the eigenvalues with weight 1/|box|.
EmpiricalCDF finite_volume_ids(const ModelSpec& model, const LatticeBox& box, const RealizationSeed& seed);

/// Ensemble average of finite_volume_ids.
EmpiricalCDF ensemble_ids(const ModelSpec& model, const LatticeBox& box, const EnsembleConfig& ensemble);

/// Ensemble-averaged N(E) on a grid from eigenvalue counts only.
std::vector<double> ensemble_ids_on_grid(const ModelSpec& model, const LatticeBox& box,
                                         const EnsembleConfig& ensemble, std::span<const double> grid);

DOSMeasure ensemble_dos(const ModelSpec& model, const LatticeBox& box, const EnsembleConfig& ensemble,
                        std::size_t site);
/// One averaged measure per site, sharing the diagonalizations.
std::vector<DOSMeasure> ensemble_dos_sites(const ModelSpec& model, const LatticeBox& box,
                                           const EnsembleConfig& ensemble, std::span<const std::size_t> sites);

/// sup_E |F(E) - G(E)| over the merged atom grid; atoms closer than
/// 1e-12 max(1, |E|) are read as one energy.
double sup_distance(const DOSMeasure& f, const DOSMeasure& g);

struct SiteIndependenceResult {
  double max_deviation = 0.0;
  std::size_t worst_i = 0;
  std::size_t worst_j = 0;
  /// Some site lies closer than L/8 to the boundary.
  bool boundary_warning = false;
};

SiteIndependenceResult dos_site_independence_check(const ModelSpec& model, const LatticeBox& box,
                                                   const EnsembleConfig& ensemble, std::span<const std::size_t> sites);

/// Pairwise merge of sorted atom lists in a fixed tree order; equal energies
/// are combined. The result does not depend on how the lists were produced.
std::vector<Atom> tree_merge(std::vector<std::vector<Atom>> lists);

}  // namespace doslab
