#include "doslab/dos.hpp"

#include <algorithm>
#include <cmath>

#include "doslab/error.hpp"
#include "doslab/parallel.hpp"
#include "doslab/solvers.hpp"

namespace doslab {

namespace {

constexpr std::size_t kMaxEnumeration = std::size_t{1} << 16;

std::vector<Atom> normalize_atoms(std::vector<Atom> atoms) {
  std::stable_sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return a.energy < b.energy; });
  std::vector<Atom> out;
  out.reserve(atoms.size());
  for (const Atom& a : atoms) {
    if (!(a.weight > 0.0)) continue;
    require(std::isfinite(a.energy) && std::isfinite(a.weight), "atom with non-finite energy or weight");
    if (!out.empty() && out.back().energy == a.energy) {
      out.back().weight += a.weight;
    } else {
      out.push_back(a);
    }
  }
  return out;
}

std::vector<Atom> merge_two(const std::vector<Atom>& a, const std::vector<Atom>& b) {
  std::vector<Atom> out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].energy < b[j].energy)) {
      out.push_back(a[i++]);
    } else if (i == a.size() || b[j].energy < a[i].energy) {
      out.push_back(b[j++]);
    } else {
      out.push_back({a[i].energy, a[i].weight + b[j].weight});
      ++i;
      ++j;
    }
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Measures
// ---------------------------------------------------------------------------

DOSMeasure::DOSMeasure(std::vector<Atom> atoms, MeasureMeta meta)
    : atoms_(normalize_atoms(std::move(atoms))), meta_(std::move(meta)) {
  cumulative_.resize(atoms_.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    acc += atoms_[i].weight;
    cumulative_[i] = acc;
  }
}

double DOSMeasure::cumulative(double energy) const {
  const auto it = std::upper_bound(atoms_.begin(), atoms_.end(), energy,
                                   [](double e, const Atom& a) { return e < a.energy; });
  const auto idx = static_cast<std::size_t>(it - atoms_.begin());
  return idx == 0 ? 0.0 : cumulative_[idx - 1];
}

double DOSMeasure::cumulative_before(double energy) const {
  const auto it = std::lower_bound(atoms_.begin(), atoms_.end(), energy,
                                   [](const Atom& a, double e) { return a.energy < e; });
  const auto idx = static_cast<std::size_t>(it - atoms_.begin());
  return idx == 0 ? 0.0 : cumulative_[idx - 1];
}

double ids_eval(const EmpiricalCDF& cdf, double energy) { return cdf(energy); }

std::vector<Atom> tree_merge(std::vector<std::vector<Atom>> lists) {
  if (lists.empty()) return {};
  for (auto& l : lists) l = normalize_atoms(std::move(l));
  while (lists.size() > 1) {
    std::vector<std::vector<Atom>> next((lists.size() + 1) / 2);
    for (std::size_t i = 0; i < next.size(); ++i) {
      next[i] = 2 * i + 1 < lists.size() ? merge_two(lists[2 * i], lists[2 * i + 1]) : std::move(lists[2 * i]);
    }
    lists = std::move(next);
  }
  return std::move(lists.front());
}

double sup_distance(const DOSMeasure& f, const DOSMeasure& g) {
  const auto fa = f.atoms();
  const auto ga = g.atoms();
  double cf = 0.0, cg = 0.0, worst = 0.0;
  std::size_t i = 0, j = 0;
  while (i < fa.size() || j < ga.size()) {
    double x;
    if (j == ga.size() || (i < fa.size() && fa[i].energy <= ga[j].energy)) {
      x = fa[i].energy;
    } else {
      x = ga[j].energy;
    }
    // energies a few ulps apart come from the same level computed twice
    const double top = x + 1e-12 * std::max(1.0, std::abs(x));
    while (i < fa.size() && fa[i].energy <= top) cf += fa[i++].weight;
    while (j < ga.size() && ga[j].energy <= top) cg += ga[j++].weight;
    worst = std::max(worst, std::abs(cf - cg));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Ensembles
// ---------------------------------------------------------------------------

Ensemble::Ensemble(ModelSpec model, LatticeBox box, EnsembleConfig config)
    : model_(std::move(model)), box_(box), config_(config) {
  model_.validate();
  box_.validate();
  require(config_.n_samples >= 1, "ensemble needs n_samples >= 1");
  if (const auto req = model_.required_dimension(); req && *req != box_.d) {
    fail("model '" + std::string(model_.family_name()) + "' does not fit a d=" + std::to_string(box_.d) + " box");
  }
  if (const auto* a = std::get_if<AndersonModel>(&model_.family)) {
    atoms_ = a->disorder.atoms();
    if (config_.mode == EnsembleMode::automatic && !atoms_.empty()) {
      std::size_t configs = 1;
      bool small = true;
      for (std::size_t s = 0; s < box_.sites() && small; ++s) {
        configs *= atoms_.size();
        small = configs <= kMaxEnumeration;
      }
      if (small) {
        exhaustive_ = true;
        size_ = configs;
        return;
      }
    }
    size_ = config_.n_samples;
  } else if (model_.has_phase()) {
    size_ = config_.n_samples;
  } else {
    size_ = 1;
  }
}

double Ensemble::probability(std::size_t k) const {
  if (!exhaustive_) return 1.0 / static_cast<double>(size_);
  double p = 1.0;
  for (std::size_t s = 0; s < box_.sites(); ++s) {
    p *= atoms_[k % atoms_.size()].second;
    k /= atoms_.size();
  }
  return p;
}

PotentialField Ensemble::potential(std::size_t k) const {
  require(k < size_, "realization index out of range");
  const RealizationSeed seed{config_.master_seed, k};
  if (exhaustive_) {
    const auto& a = std::get<AndersonModel>(model_.family);
    PotentialField v(box_.sites());
    for (std::size_t s = 0; s < v.size(); ++s) {
      v[s] = a.lambda * atoms_[k % atoms_.size()].first;
      k /= atoms_.size();
    }
    return v;
  }
  if (model_.has_phase()) {
    ModelSpec m = model_;
    const double step = static_cast<double>(k) / static_cast<double>(size_);
    std::visit(
        [step](auto& fam) {
          if constexpr (requires { fam.theta; }) {
            const double t = fam.theta + step;
            fam.theta = t - std::floor(t);
          }
        },
        m.family);
    return sample_potential(m, box_, seed);
  }
  return sample_potential(model_, box_, seed);
}

MeasureMeta Ensemble::meta() const {
  return {model_hash(model_), box_, config_.master_seed, config_.n_samples, gershgorin_hull(model_, box_)};
}

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

DOSMeasure local_dos_at_site(const ModelSpec& model, const LatticeBox& box, const RealizationSeed& seed,
                             std::size_t site) {
  const FiniteOperator h = build_finite_operator(model, box, seed);
  require(site < h.size(), "site " + std::to_string(site) + " outside box of " + std::to_string(h.size()) + " sites");
  const std::size_t sites[] = {site};
  const SiteWeights sw = site_weights(h, sites);
  std::vector<Atom> atoms(sw.eigenvalues.size());
  for (std::size_t k = 0; k < atoms.size(); ++k) atoms[k] = {sw.eigenvalues[k], sw.weights[0][k]};
  return DOSMeasure(std::move(atoms), {model_hash(model), box, seed.master, 1, gershgorin_hull(model, box)});
}

EmpiricalCDF finite_volume_ids(const ModelSpec& model, const LatticeBox& box, const RealizationSeed& seed) {
  const FiniteOperator h = build_finite_operator(model, box, seed);
  const auto ev = operator_eigenvalues(h);
  const double w = 1.0 / static_cast<double>(ev.size());
  std::vector<Atom> atoms(ev.size());
  for (std::size_t k = 0; k < ev.size(); ++k) atoms[k] = {ev[k], w};
  return EmpiricalCDF(DOSMeasure(std::move(atoms), {model_hash(model), box, seed.master, 1, gershgorin_hull(model, box)}));
}

EmpiricalCDF ensemble_ids(const ModelSpec& model, const LatticeBox& box, const EnsembleConfig& ensemble) {
  const Ensemble ens(model, box, ensemble);
  std::vector<std::vector<Atom>> lists(ens.size());
  parallel_for(ens.size(), ensemble.workers, [&](std::size_t k) {
    const auto ev = operator_eigenvalues(ens.realization(k));
    const double w = ens.probability(k) / static_cast<double>(ev.size());
    lists[k].resize(ev.size());
    for (std::size_t i = 0; i < ev.size(); ++i) lists[k][i] = {ev[i], w};
  });
  return EmpiricalCDF(DOSMeasure(tree_merge(std::move(lists)), ens.meta()));
}

std::vector<double> ensemble_ids_on_grid(const ModelSpec& model, const LatticeBox& box,
                                         const EnsembleConfig& ensemble, std::span<const double> grid) {
  const Ensemble ens(model, box, ensemble);
  std::vector<std::vector<std::size_t>> counts(ens.size());
  parallel_for(ens.size(), ensemble.workers,
               [&](std::size_t k) { counts[k] = counts_on_grid(ens.realization(k), grid); });
  const double sites = static_cast<double>(box.sites());
  std::vector<double> out(grid.size(), 0.0);
  if (ens.exhaustive()) {
    for (std::size_t k = 0; k < ens.size(); ++k) {
      const double p = ens.probability(k);
      for (std::size_t g = 0; g < grid.size(); ++g) out[g] += p * static_cast<double>(counts[k][g]);
    }
    for (double& x : out) x /= sites;
  } else {
    // integer totals: exact and independent of summation order
    for (std::size_t g = 0; g < grid.size(); ++g) {
      std::uint64_t total = 0;
      for (std::size_t k = 0; k < ens.size(); ++k) total += counts[k][g];
      out[g] = static_cast<double>(total) / (static_cast<double>(ens.size()) * sites);
    }
  }
  return out;
}

std::vector<DOSMeasure> ensemble_dos_sites(const ModelSpec& model, const LatticeBox& box,
                                           const EnsembleConfig& ensemble, std::span<const std::size_t> sites) {
  const Ensemble ens(model, box, ensemble);
  for (std::size_t s : sites) {
    require(s < box.sites(), "site " + std::to_string(s) + " outside box of " + std::to_string(box.sites()) + " sites");
  }
  std::vector<std::vector<std::vector<Atom>>> lists(sites.size(), std::vector<std::vector<Atom>>(ens.size()));
  parallel_for(ens.size(), ensemble.workers, [&](std::size_t k) {
    const SiteWeights sw = site_weights(ens.realization(k), sites);
    const double p = ens.probability(k);
    for (std::size_t r = 0; r < sites.size(); ++r) {
      auto& l = lists[r][k];
      l.resize(sw.eigenvalues.size());
      for (std::size_t i = 0; i < l.size(); ++i) l[i] = {sw.eigenvalues[i], p * sw.weights[r][i]};
    }
  });
  std::vector<DOSMeasure> out;
  out.reserve(sites.size());
  for (auto& l : lists) out.emplace_back(tree_merge(std::move(l)), ens.meta());
  return out;
}

DOSMeasure ensemble_dos(const ModelSpec& model, const LatticeBox& box, const EnsembleConfig& ensemble,
                        std::size_t site) {
  const std::size_t sites[] = {site};
  return std::move(ensemble_dos_sites(model, box, ensemble, sites).front());
}

SiteIndependenceResult dos_site_independence_check(const ModelSpec& model, const LatticeBox& box,
                                                   const EnsembleConfig& ensemble,
                                                   std::span<const std::size_t> sites) {
  require(sites.size() >= 2, "site independence check needs at least two sites");
  SiteIndependenceResult res;
  for (std::size_t s : sites) {
    require(s < box.sites(), "site " + std::to_string(s) + " outside box");
    if (box.distance_to_boundary(s) * 8 < box.L) res.boundary_warning = true;
  }
  const auto measures = ensemble_dos_sites(model, box, ensemble, sites);
  for (std::size_t i = 0; i < measures.size(); ++i) {
    for (std::size_t j = i + 1; j < measures.size(); ++j) {
      const double d = sup_distance(measures[i], measures[j]);
      if (d > res.max_deviation) {
        res.max_deviation = d;
        res.worst_i = sites[i];
        res.worst_j = sites[j];
      }
    }
  }
  return res;
}

}  // namespace doslab
