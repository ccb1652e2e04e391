// doslab: density-of-states experiments from the command line.
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "doslab/cli.hpp"
#include "doslab/error.hpp"

int main(int argc, char** argv) {
  CLI::App app{"doslab: density of states, spectra and regularity of ergodic Schroedinger operators"};
  doslab::RunRequest req;
  std::string bc, grid, interval, mode = "automatic";
  std::string sites;
  std::size_t site = 0;
  double eps = 0, mass_tol = 0, plateau_tol = 0;
  std::int64_t margin = 0;

  app.add_option("command", req.command, "ids | dos | spectrum | gaps | lyapunov | check-theorem | check-lemma-disc | "
                                         "regularity | butterfly")
      ->required()
      ->check(CLI::IsMember(doslab::kCommands));
  app.add_option("--model", req.model_path, "model file (key=value lines)")->required();
  app.add_option("--L", req.L, "box side length")->capture_default_str();
  app.add_option("--d", req.d, "lattice dimension (1 or 2)")->capture_default_str();
  app.add_option("--bc", bc, "dirichlet | periodic (gaps and check-theorem default to periodic)");
  app.add_option("--samples", req.ensemble.n_samples, "ensemble size")->capture_default_str();
  app.add_option("--seed", req.ensemble.master_seed, "master seed")->capture_default_str();
  app.add_option("--mode", mode, "automatic | monte_carlo")->check(CLI::IsMember({"automatic", "monte_carlo"}));
  app.add_option("--grid", grid, "energy grid a:b:n");
  app.add_option("--interval", interval, "interval a,b");
  app.add_option("--out", req.out, "output file (stdout when omitted)");
  app.add_option("--cache", req.cache_dir, "cache directory (overridden by $DOSLAB_CACHE_DIR)");
  app.add_option("--workers", req.ensemble.workers, "threads; results do not depend on it")->capture_default_str();
  auto* site_opt = app.add_option("--site", site, "site index for dos");
  app.add_option("--sites", sites, "comma-separated site indices for check-lemma-disc");
  auto* eps_opt = app.add_option("--eps", eps, "resolution for spectrum, gaps and regularity windows");
  app.add_option("--mass-floor", req.mass_floor, "mass floor of the spectrum estimate")->capture_default_str();
  auto* tol_opt = app.add_option("--mass-tol", mass_tol, "mass tolerance for check-theorem");
  auto* margin_opt = app.add_option("--boundary-margin", margin, "bulk margin for check-theorem (default L/8)");
  app.add_option("--steps", req.steps, "transfer-matrix steps")->capture_default_str();
  app.add_option("--Q", req.Q, "largest denominator for butterfly")->capture_default_str();
  auto* plateau_opt = app.add_option("--plateau-tol", plateau_tol, "plateau tolerance for gap detection");

  CLI11_PARSE(app, argc, argv);

  try {
    if (!bc.empty()) req.bc = doslab::parse_boundary(bc);
    if (!grid.empty()) req.grid = doslab::parse_grid(grid);
    if (!interval.empty()) req.interval = doslab::parse_interval(interval);
    req.ensemble.mode = mode == "monte_carlo" ? doslab::EnsembleMode::monte_carlo : doslab::EnsembleMode::automatic;
    if (*site_opt) req.site = site;
    if (*eps_opt) req.eps = eps;
    if (*tol_opt) req.mass_tol = mass_tol;
    if (*margin_opt) req.boundary_margin = margin;
    if (*plateau_opt) req.plateau_tol = plateau_tol;
    if (!sites.empty()) {
      std::size_t pos = 0;
      while (pos <= sites.size()) {
        const auto comma = sites.find(',', pos);
        const std::string tok = sites.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        req.sites.push_back(static_cast<std::size_t>(std::stoull(tok)));
        if (comma == std::string::npos) break;
        pos = comma + 1;
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return doslab::run(req, std::cout, std::cerr);
}
