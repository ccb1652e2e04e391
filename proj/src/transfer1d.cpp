#include "doslab/transfer1d.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "doslab/error.hpp"

namespace doslab {

namespace {

constexpr std::size_t kMinSteps = 1000;
constexpr std::size_t kBatches = 20;
const double kRescale = std::ldexp(1.0, 100);
const double kLogRescale = 100.0 * std::log(2.0);

PotentialField half_line(const ModelSpec& model, std::size_t n_steps, const RealizationSeed& seed) {
  require(n_steps >= kMinSteps, "need at least " + std::to_string(kMinSteps) + " steps, got " + std::to_string(n_steps));
  if (const auto req = model.required_dimension(); req && *req != 1) fail("transfer matrices need a 1D model");
  if (const auto* a = std::get_if<AndersonModel>(&model.family)) require(a->d == 1, "transfer matrices need a 1D model");
  LatticeBox box{1, static_cast<std::int64_t>(n_steps), Boundary::dirichlet};
  return sample_potential(model, box, seed);
}

void check_potential(std::span<const double> v, double energy) {
  require(std::isfinite(energy), "energy must be finite");
  for (double x : v) require(std::isfinite(x), "potential contains a non-finite value");
}

// Largest singular value of a 2x2 matrix.
double norm2(const std::array<double, 4>& m) {
  const double s = m[0] * m[0] + m[1] * m[1] + m[2] * m[2] + m[3] * m[3];
  const double det = m[0] * m[3] - m[1] * m[2];
  const double disc = std::sqrt(std::max(0.0, s * s - 4.0 * det * det));
  return std::sqrt(0.5 * (s + disc));
}

}  // namespace

LyapunovResult lyapunov(std::span<const double> potential, double energy) {
  check_potential(potential, energy);
  const std::size_t n = potential.size();
  require(n >= kMinSteps, "need at least " + std::to_string(kMinSteps) + " steps");

  // P = T_k ... T_1, stored row-major.
  std::array<double, 4> p{1.0, 0.0, 0.0, 1.0};
  double log_scale = 0.0;
  const std::size_t batch = n / kBatches;
  std::vector<double> batch_rates;
  double last_log = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double c = energy - potential[k];
    p = {c * p[0] - p[2], c * p[1] - p[3], p[0], p[1]};
    const double big = std::max({std::abs(p[0]), std::abs(p[1]), std::abs(p[2]), std::abs(p[3])});
    if (big > kRescale) {
      for (double& x : p) x /= kRescale;
      log_scale += kLogRescale;
    }
    if ((k + 1) % batch == 0 && batch_rates.size() < kBatches) {
      const double now = log_scale + std::log(norm2(p));
      batch_rates.push_back((now - last_log) / static_cast<double>(batch));
      last_log = now;
    }
  }
  LyapunovResult r;
  r.E = energy;
  r.n_steps = n;
  r.gamma = std::max(0.0, (log_scale + std::log(norm2(p))) / static_cast<double>(n));
  double mean = 0.0;
  for (double g : batch_rates) mean += g;
  mean /= static_cast<double>(batch_rates.size());
  double var = 0.0;
  for (double g : batch_rates) var += (g - mean) * (g - mean);
  var /= static_cast<double>(batch_rates.size() - 1);
  r.std_error = std::sqrt(var / static_cast<double>(batch_rates.size()));
  return r;
}

LyapunovResult lyapunov(const ModelSpec& model, double energy, std::size_t n_steps, const RealizationSeed& seed) {
  return lyapunov(half_line(model, n_steps, seed), energy);
}

double rotation_number_ids(std::span<const double> potential, double energy) {
  check_potential(potential, energy);
  const std::size_t n = potential.size();
  require(n >= 1, "empty potential");
  double prev = 0.0;
  double cur = 1.0;
  std::size_t nodes = 0;
  for (std::size_t k = 0; k < n; ++k) {
    double next = (energy - potential[k]) * cur - prev;
    // A zero lands exactly on a node; the sign flip after it is the same node.
    if (next == 0.0 || (cur != 0.0 && (next < 0.0) != (cur < 0.0))) ++nodes;
    prev = cur;
    cur = next;
    if (std::abs(cur) > kRescale || std::abs(prev) > kRescale) {
      cur /= kRescale;
      prev /= kRescale;
    }
  }
  return std::clamp(1.0 - static_cast<double>(nodes) / static_cast<double>(n), 0.0, 1.0);
}

double rotation_number_ids(const ModelSpec& model, double energy, std::size_t n_steps, const RealizationSeed& seed) {
  return rotation_number_ids(half_line(model, n_steps, seed), energy);
}

ThoulessResult thouless_check(const LyapunovResult& gamma, const EmpiricalCDF& cdf, double min_distance) {
  const auto atoms = cdf.atoms();
  require(!atoms.empty(), "Thouless check needs a non-empty measure");
  ThoulessResult r;
  r.gamma = gamma.gamma;
  r.distance = std::numeric_limits<double>::infinity();
  for (const Atom& a : atoms) r.distance = std::min(r.distance, std::abs(gamma.E - a.energy));
  require(r.distance >= min_distance, "E = " + format_double(gamma.E) + " lies " + format_double(r.distance) +
                                          " from the spectrum estimate; need at least " + format_double(min_distance));
  double sum = 0.0;
  for (const Atom& a : atoms) sum += a.weight * std::log(std::abs(gamma.E - a.energy));
  r.atom_sum = sum / cdf.total_weight();
  r.residual = std::abs(r.gamma - r.atom_sum);
  return r;
}

}  // namespace doslab
