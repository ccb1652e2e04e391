#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "doslab/dos.hpp"
#include "doslab/interval.hpp"
#include "doslab/model.hpp"

namespace doslab {

struct EnergyGrid {
  double a = 0.0;
  double b = 0.0;
  std::size_t n = 2;

  std::vector<double> points() const;
};

/// "a:b:n" with n >= 2 and a <= b.
EnergyGrid parse_grid(const std::string& text);

struct RunRequest {
  std::string command;
  std::string model_path;
  /// Used instead of model_path when set.
  std::optional<ModelSpec> model;
  int d = 1;
  std::int64_t L = 64;
  std::optional<Boundary> bc;
  EnsembleConfig ensemble;
  std::optional<EnergyGrid> grid;
  std::optional<Interval> interval;
  std::string out;
  std::string cache_dir;

  std::optional<std::size_t> site;
  std::vector<std::size_t> sites;
  std::optional<double> eps;
  double mass_floor = 0.0;
  std::optional<double> mass_tol;
  std::optional<std::int64_t> boundary_margin;
  std::size_t steps = 10000;
  int Q = 8;
  std::optional<double> plateau_tol;
};

inline const std::vector<std::string> kCommands = {"ids",          "dos",              "spectrum",   "gaps",
                                                   "lyapunov",     "check-theorem",    "check-lemma-disc",
                                                   "regularity",   "butterfly"};

/// Canonical text of everything that determines the output; worker count
/// and output path are left out.
std::string canonical_request(const RunRequest& request, const ModelSpec& model, const LatticeBox& box);

/// Band intervals of the almost Mathieu operator at alpha = p/q, from the
/// q x q Bloch matrices at k = 0 and k = pi.
std::vector<Interval> rational_bands(double lambda, std::int64_t p, std::int64_t q, double theta);

/// Runs one command, writing the artifact to request.out (stdout when empty).
/// Diagnostics go to `log`. Returns the process exit code.
int run(const RunRequest& request, std::ostream& out, std::ostream& log);

}  // namespace doslab
