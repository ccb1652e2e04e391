#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "doslab/interval.hpp"
#include "doslab/linalg.hpp"
#include "doslab/rng.hpp"

namespace doslab {

/// (sqrt(5) - 1) / 2, the default quasi-periodic frequency.
inline constexpr double kGoldenFrequency = 0.61803398874989484820;

// ---------------------------------------------------------------------------
// Disorder distributions
// ---------------------------------------------------------------------------

struct UniformDisorder {
  double a = 0.0;
  double b = 1.0;
};

/// Takes value v1 with probability p, v0 otherwise.
struct BernoulliDisorder {
  double v0 = 0.0;
  double v1 = 1.0;
  double p = 0.5;
};

struct DiscreteDisorder {
  std::vector<double> values;
  std::vector<double> probs;
};

/// Single-site distribution of the random couplings. Always valid once
/// constructed.
class DisorderSpec {
 public:
  using Kind = std::variant<UniformDisorder, BernoulliDisorder, DiscreteDisorder>;

  DisorderSpec() : kind_(UniformDisorder{}) {}
  static DisorderSpec uniform(double a, double b);
  static DisorderSpec bernoulli(double v0, double v1, double p);
  static DisorderSpec discrete(std::vector<double> values, std::vector<double> probs);

  const Kind& kind() const { return kind_; }
  std::string_view name() const;

  /// Inverse distribution function; u in [0, 1).
  double quantile(double u) const;
  double cdf(double x) const;

  bool absolutely_continuous() const { return std::holds_alternative<UniformDisorder>(kind_); }
  /// Sup norm of the density; only defined for absolutely continuous laws.
  double density_sup() const;
  /// (value, probability) pairs with positive probability; empty for uniform.
  std::vector<std::pair<double, double>> atoms() const;

 private:
  explicit DisorderSpec(Kind k) : kind_(std::move(k)) {}
  Kind kind_;
};

// ---------------------------------------------------------------------------
// Model families
// ---------------------------------------------------------------------------

struct FreeModel {};

/// Diagonal disorder V(x) = lambda * omega_x with i.i.d. omega.
struct AndersonModel {
  double lambda = 1.0;
  DisorderSpec disorder;
  int d = 1;
  /// Translation of the random stream along the first lattice axis.
  std::int64_t shift = 0;
};

/// V(n) = 2 lambda cos(2 pi (theta + (n + shift) alpha) mod 1).
struct AlmostMathieuModel {
  double lambda = 1.0;
  double alpha = kGoldenFrequency;
  double theta = 0.0;
  std::int64_t shift = 0;

  /// Effective phase frac(theta + shift * alpha).
  double phase() const;
};

/// Sturmian potential V(n) = lambda * 1[frac((n + shift) / phi + theta) >= 1 - 1/phi].
struct FibonacciModel {
  double lambda = 1.0;
  double theta = 0.0;
  std::int64_t shift = 0;

  double phase() const;
};

struct PeriodicModel {
  std::vector<double> values;
};

struct ModelSpec {
  std::variant<FreeModel, AndersonModel, AlmostMathieuModel, FibonacciModel, PeriodicModel> family;

  std::string_view family_name() const;
  /// True when realizations depend on the seed.
  bool is_random() const { return std::holds_alternative<AndersonModel>(family); }
  /// Quasi-periodic families whose ensemble is the phase circle.
  bool has_phase() const {
    return std::holds_alternative<AlmostMathieuModel>(family) || std::holds_alternative<FibonacciModel>(family);
  }
  /// Lattice dimension the family insists on, if any.
  std::optional<int> required_dimension() const;
  void validate() const;
};

ModelSpec free_model();
ModelSpec anderson_model(double lambda, DisorderSpec disorder, int d = 1);
ModelSpec almost_mathieu_model(double lambda, double alpha = kGoldenFrequency, double theta = 0.0);
ModelSpec fibonacci_model(double lambda, double theta = 0.0);
ModelSpec periodic_model(std::vector<double> values);

// ---------------------------------------------------------------------------
// Finite volume
// ---------------------------------------------------------------------------

enum class Boundary { dirichlet, periodic };

std::string_view to_string(Boundary bc);
Boundary parse_boundary(std::string_view text);

struct LatticeBox {
  int d = 1;
  std::int64_t L = 1;
  Boundary bc = Boundary::dirichlet;

  std::size_t sites() const;
  void validate() const;
  std::array<std::int64_t, 2> coords(std::size_t site) const;
  std::size_t site(std::int64_t x, std::int64_t y = 0) const;
  /// Lattice distance to the nearest boundary face; periodic boxes have none
  /// and report L.
  std::int64_t distance_to_boundary(std::size_t site) const;
  std::string describe() const;

  friend bool operator==(const LatticeBox&, const LatticeBox&) = default;
};

using PotentialField = std::vector<double>;

PotentialField sample_potential(const ModelSpec& model, const LatticeBox& box, const RealizationSeed& seed);

struct Bond {
  std::size_t i;
  std::size_t j;
  double weight;
};

/// Finite-volume truncation H = hopping + diag(V) on a lattice box. Hopping
/// amplitude is 1 between nearest neighbours; periodic boxes add the wrap
/// bonds (bonds that coincide, as for L = 2, add up).
class FiniteOperator {
 public:
  FiniteOperator(LatticeBox box, PotentialField potential);

  const LatticeBox& box() const { return box_; }
  const PotentialField& potential() const { return potential_; }
  std::size_t size() const { return potential_.size(); }

  /// 1D only: diagonal plus chain couplings, without the wrap bond.
  TridiagMatrix chain() const;
  /// 1D periodic wrap coupling (0 for Dirichlet).
  double wrap() const;
  bool is_tridiagonal() const { return box_.d == 1 && box_.bc == Boundary::dirichlet; }

  std::vector<Bond> bonds() const;
  DenseMatrix dense() const;
  /// y = H x.
  void apply(std::span<const double> x, std::span<double> y) const;

 private:
  LatticeBox box_;
  PotentialField potential_;
};

/// Smallest interval holding every potential value the model can produce.
Interval potential_range(const ModelSpec& model);
/// Gershgorin bound on the spectrum of every realization in the box.
Interval gershgorin_hull(const ModelSpec& model, const LatticeBox& box);

FiniteOperator build_finite_operator(const ModelSpec& model, const LatticeBox& box, const RealizationSeed& seed);

/// Lattice translation by i along the first axis: the shifted model's
/// potential at n equals the original's at n + i.
ModelSpec shift_realization(const ModelSpec& model, std::int64_t i);

// ---------------------------------------------------------------------------
// Model files
// ---------------------------------------------------------------------------

/// Parses the key=value model format. Unknown, duplicate, or inapplicable
/// keys are errors.
ModelSpec parse_model(std::string_view text);
ModelSpec load_model_file(const std::string& path);

/// Canonical text: sorted keys, 17 significant digits.
std::string serialize_model(const ModelSpec& model);
/// Hex FNV-1a of the canonical text.
std::string model_hash(const ModelSpec& model);

std::string format_double(double x);

}  // namespace doslab
