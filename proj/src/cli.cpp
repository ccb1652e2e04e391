#include "doslab/cli.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numbers>
#include <numeric>
#include <sstream>

#include "json.hpp"

#include "doslab/cache.hpp"
#include "doslab/csv.hpp"
#include "doslab/error.hpp"
#include "doslab/regularity.hpp"
#include "doslab/spectrum.hpp"
#include "doslab/transfer1d.hpp"

namespace doslab {

std::vector<double> EnergyGrid::points() const {
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    out[k] = k + 1 == n ? b : a + (b - a) * static_cast<double>(k) / static_cast<double>(n - 1);
  }
  return out;
}

EnergyGrid parse_grid(const std::string& text) {
  const auto c1 = text.find(':');
  const auto c2 = c1 == std::string::npos ? std::string::npos : text.find(':', c1 + 1);
  require(c2 != std::string::npos && text.find(':', c2 + 1) == std::string::npos,
          "grid must look like a:b:n, got '" + text + "'");
  EnergyGrid g;
  try {
    std::size_t used = 0;
    const std::string sa = text.substr(0, c1), sb = text.substr(c1 + 1, c2 - c1 - 1), sn = text.substr(c2 + 1);
    g.a = std::stod(sa, &used);
    require(used == sa.size(), "bad grid start");
    g.b = std::stod(sb, &used);
    require(used == sb.size(), "bad grid end");
    const long long n = std::stoll(sn, &used);
    require(used == sn.size() && n >= 2, "grid needs n >= 2");
    g.n = static_cast<std::size_t>(n);
  } catch (const std::logic_error& e) {
    if (dynamic_cast<const InvalidInput*>(&e)) throw;
    fail("bad grid '" + text + "'");
  }
  require(std::isfinite(g.a) && std::isfinite(g.b) && g.a <= g.b, "grid needs finite a <= b, got '" + text + "'");
  return g;
}

std::vector<Interval> rational_bands(double lambda, std::int64_t p, std::int64_t q, double theta) {
  require(q >= 1 && p >= 0, "rational frequency needs q >= 1, p >= 0");
  const auto n = static_cast<std::size_t>(q);
  std::vector<double> v(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double ph = theta + static_cast<double>((static_cast<std::int64_t>(j) * p) % q) / static_cast<double>(q);
    v[j] = 2.0 * lambda * std::cos(2.0 * std::numbers::pi * (ph - std::floor(ph)));
  }
  auto bloch = [&](double s) {
    if (n == 1) return std::vector<double>{v[0] + 2.0 * s};
    DenseMatrix h(n);
    for (std::size_t j = 0; j < n; ++j) h(j, j) = v[j];
    for (std::size_t j = 0; j + 1 < n; ++j) h(j, j + 1) = h(j + 1, j) = 1.0;
    h(0, n - 1) += s;
    h(n - 1, 0) += s;
    auto ev = dense_eigen_jacobi(h).eigenvalues;
    std::sort(ev.begin(), ev.end());
    return ev;
  };
  const auto e0 = bloch(1.0);
  const auto e1 = bloch(-1.0);
  std::vector<Interval> bands(n);
  for (std::size_t j = 0; j < n; ++j) bands[j] = {std::min(e0[j], e1[j]), std::max(e0[j], e1[j])};
  return bands;
}

namespace {

std::string one_line(std::string s) {
  while (!s.empty() && s.back() == '\n') s.pop_back();
  std::replace(s.begin(), s.end(), '\n', ';');
  return s;
}

struct Context {
  const RunRequest& req;
  ModelSpec model;
  LatticeBox box;
  std::string key;
};

void stamp(CsvWriter& csv, const Context& c) {
  csv.meta("doslab", kVersion);
  csv.meta("command", c.req.command);
  csv.meta("model", one_line(serialize_model(c.model)));
  csv.meta("model_hash", model_hash(c.model));
  csv.meta("box", c.box.describe());
  csv.meta("samples", std::to_string(c.req.ensemble.n_samples));
  csv.meta("seed", std::to_string(c.req.ensemble.master_seed));
  csv.meta("mode", c.req.ensemble.mode == EnsembleMode::automatic ? "automatic" : "monte_carlo");
  csv.meta("key", c.key);
}

const EnergyGrid& need_grid(const RunRequest& r) {
  require(r.grid.has_value(), "command '" + r.command + "' needs --grid a:b:n");
  return *r.grid;
}

Interval finite_window(const Context& c) {
  const Interval hull = gershgorin_hull(c.model, c.box);
  if (!c.req.interval) return hull;
  Interval w = *c.req.interval;
  if (!std::isfinite(w.lo)) w.lo = hull.lo - 1.0;
  if (!std::isfinite(w.hi)) w.hi = hull.hi + 1.0;
  return w;
}

std::string cmd_ids(const Context& c) {
  const auto grid = need_grid(c.req).points();
  const auto n = ensemble_ids_on_grid(c.model, c.box, c.req.ensemble, grid);
  CsvWriter csv;
  stamp(csv, c);
  csv.columns({"E", "N"});
  for (std::size_t k = 0; k < grid.size(); ++k) csv.row(std::vector<double>{grid[k], n[k]});
  return csv.str();
}

std::string cmd_dos(const Context& c) {
  const DOSMeasure m = c.req.site ? ensemble_dos(c.model, c.box, c.req.ensemble, *c.req.site)
                                  : ensemble_ids(c.model, c.box, c.req.ensemble).measure();
  CsvWriter csv;
  stamp(csv, c);
  csv.meta("site", c.req.site ? std::to_string(*c.req.site) : "average");
  csv.columns({"E", "weight"});
  for (const Atom& a : m.atoms()) csv.row(std::vector<double>{a.energy, a.weight});
  return csv.str();
}

std::string cmd_spectrum(const Context& c) {
  const auto cdf = ensemble_ids(c.model, c.box, c.req.ensemble);
  const double eps = c.req.eps.value_or(default_resolution(c.box));
  const auto est = estimate_spectrum(cdf.measure(), eps, c.req.mass_floor);
  CsvWriter csv;
  stamp(csv, c);
  csv.meta("eps", format_double(eps));
  csv.meta("mass_floor", format_double(c.req.mass_floor));
  csv.columns({"lo", "hi", "atoms"});
  const auto pieces = est.support.intervals();
  for (std::size_t k = 0; k < pieces.size(); ++k)
    csv.row(std::vector<double>{pieces[k].lo, pieces[k].hi, static_cast<double>(est.coverage[k])});
  csv.trailer("lebesgue_measure=" + format_double(lebesgue_measure(est.support)));
  return csv.str();
}

std::string cmd_gaps(const Context& c) {
  const auto cdf = ensemble_ids(c.model, c.box, c.req.ensemble);
  const Interval window = finite_window(c);
  const double tol = c.req.plateau_tol.value_or(1e-3 * cdf.total_weight());
  const double res = c.req.eps.value_or(default_resolution(c.box));
  const auto gaps = detect_gaps(cdf, window, tol, res);
  CsvWriter csv;
  stamp(csv, c);
  csv.meta("window", format_double(window.lo) + "," + format_double(window.hi));
  csv.meta("plateau_tol", format_double(tol));
  csv.meta("resolution", format_double(res));
  csv.columns({"lo", "hi"});
  for (const auto& g : gaps.intervals()) csv.row(std::vector<double>{g.lo, g.hi});
  return csv.str();
}

std::string cmd_lyapunov(const Context& c) {
  const auto grid = need_grid(c.req).points();
  const RealizationSeed seed{c.req.ensemble.master_seed, 0};
  const LatticeBox line{1, static_cast<std::int64_t>(c.req.steps), Boundary::dirichlet};
  const auto v = sample_potential(c.model, line, seed);
  CsvWriter csv;
  stamp(csv, c);
  csv.meta("steps", std::to_string(c.req.steps));
  csv.columns({"E", "gamma", "stderr", "N_rotation"});
  for (double e : grid) {
    const auto g = lyapunov(v, e);
    csv.row(std::vector<double>{e, g.gamma, g.std_error, rotation_number_ids(v, e)});
  }
  return csv.str();
}

std::string cmd_check_theorem(const Context& c) {
  require(c.req.interval.has_value(), "check-theorem needs --interval a,b");
  const auto cdf = ensemble_ids(c.model, c.box, c.req.ensemble);
  const IntervalSet a({*c.req.interval});
  const double tol = c.req.mass_tol.value_or(1e-3 * cdf.total_weight());
  const std::int64_t margin = c.req.boundary_margin.value_or(c.box.L / 8);
  const Interval window = finite_window(c);
  const auto spectra = ensemble_spectra(c.model, c.box, c.req.ensemble, window);
  const auto report = theorem_check(cdf.measure(), spectra, a, tol, margin);
  auto j = nlohmann::ordered_json::parse(to_json(report));
  j["note"] = report.note;
  return j.dump(2) + "\n";
}

std::vector<std::size_t> default_sites(const LatticeBox& box) {
  std::vector<std::size_t> out;
  for (std::int64_t k = 0; k < 5; ++k) {
    const std::int64_t x = box.L / 4 + k * box.L / 8;
    out.push_back(box.d == 1 ? box.site(x) : box.site(x, box.L / 2));
  }
  return out;
}

std::string cmd_lemma_disc(const Context& c) {
  const auto sites = c.req.sites.empty() ? default_sites(c.box) : c.req.sites;
  const auto r = dos_site_independence_check(c.model, c.box, c.req.ensemble, sites);
  nlohmann::ordered_json j;
  j["model_hash"] = model_hash(c.model);
  j["box"] = c.box.describe();
  j["samples"] = c.req.ensemble.n_samples;
  j["seed"] = c.req.ensemble.master_seed;
  j["sites"] = sites;
  j["max_deviation"] = r.max_deviation;
  j["worst_i"] = r.worst_i;
  j["worst_j"] = r.worst_j;
  j["boundary_warning"] = r.boundary_warning;
  return j.dump(2) + "\n";
}

std::string cmd_regularity(const Context& c) {
  const auto cdf = ensemble_ids(c.model, c.box, c.req.ensemble);
  RegularityOptions opt;
  opt.measure_floor = c.req.mass_floor;
  if (c.req.plateau_tol) opt.plateau_tol = *c.req.plateau_tol;
  if (c.req.eps) opt.resolution = *c.req.eps;
  auto rep = regularity_report(cdf, opt);
  if (const auto* a = std::get_if<AndersonModel>(&c.model.family); a && a->disorder.absolutely_continuous() &&
                                                                  a->lambda != 0.0) {
    const auto tiles = hull_tiling(c.model, c.box, 0.05);
    rep.wegner_constant = wegner_check(c.model, c.box, c.req.ensemble, tiles).constant;
    rep.has_wegner = true;
  }
  CsvWriter csv;
  stamp(csv, c);
  std::string windows;
  for (const auto& w : rep.windows) windows += (windows.empty() ? "" : ";") + format_double(w.lo) + "," + format_double(w.hi);
  csv.meta("windows", windows);
  csv.columns({"scale", "sup_increment"});
  for (std::size_t k = 0; k < rep.scales.size(); ++k) csv.row(std::vector<double>{rep.scales[k], rep.sup_increment[k]});
  std::string verdict = "verdict=" + describe_verdict(rep) + " alpha=" + format_double(rep.fit.alpha) +
                        " fit_residual=" + format_double(rep.fit.residual) +
                        " lipschitz_ratio=" + format_double(rep.lipschitz_ratio) +
                        " measure_shrinks=" + (rep.measure_shrinks ? "true" : "false");
  if (rep.has_wegner) verdict += " wegner_constant=" + format_double(rep.wegner_constant);
  csv.trailer(verdict);
  return csv.str();
}

std::string cmd_butterfly(const Context& c) {
  const auto* m = std::get_if<AlmostMathieuModel>(&c.model.family);
  require(m != nullptr, "butterfly needs an almost_mathieu model");
  require(c.req.Q >= 1, "butterfly needs Q >= 1");
  CsvWriter csv;
  stamp(csv, c);
  csv.meta("Q", std::to_string(c.req.Q));
  csv.columns({"alpha", "band_lo", "band_hi"});
  for (std::int64_t q = 1; q <= c.req.Q; ++q) {
    for (std::int64_t p = 0; p < q; ++p) {
      if (std::gcd(p, q) != 1) continue;
      const double alpha = static_cast<double>(p) / static_cast<double>(q);
      for (const auto& b : rational_bands(m->lambda, p, q, m->phase()))
        csv.row(std::vector<double>{alpha, b.lo, b.hi});
    }
  }
  return csv.str();
}

std::string compute(const Context& c) {
  const std::string& cmd = c.req.command;
  if (cmd == "ids") return cmd_ids(c);
  if (cmd == "dos") return cmd_dos(c);
  if (cmd == "spectrum") return cmd_spectrum(c);
  if (cmd == "gaps") return cmd_gaps(c);
  if (cmd == "lyapunov") return cmd_lyapunov(c);
  if (cmd == "check-theorem") return cmd_check_theorem(c);
  if (cmd == "check-lemma-disc") return cmd_lemma_disc(c);
  if (cmd == "regularity") return cmd_regularity(c);
  if (cmd == "butterfly") return cmd_butterfly(c);
  fail("unknown command '" + cmd + "'");
}

}  // namespace

std::string canonical_request(const RunRequest& r, const ModelSpec& model, const LatticeBox& box) {
  std::ostringstream s;
  auto opt = [](const auto& o) { return o ? format_double(static_cast<double>(*o)) : std::string("-"); };
  s << "command=" << r.command << "\n"
    << serialize_model(model) << "box=" << box.describe() << "\n"
    << "samples=" << r.ensemble.n_samples << "\nseed=" << r.ensemble.master_seed
    << "\nmode=" << (r.ensemble.mode == EnsembleMode::automatic ? "automatic" : "monte_carlo") << "\n";
  s << "grid=" << (r.grid ? format_double(r.grid->a) + ":" + format_double(r.grid->b) + ":" + std::to_string(r.grid->n)
                          : "-")
    << "\ninterval=" << (r.interval ? format_double(r.interval->lo) + "," + format_double(r.interval->hi) : "-")
    << "\nsite=" << (r.site ? std::to_string(*r.site) : "-") << "\nsites=";
  for (std::size_t k : r.sites) s << k << ",";
  s << "\neps=" << opt(r.eps) << "\nmass_floor=" << format_double(r.mass_floor) << "\nmass_tol=" << opt(r.mass_tol)
    << "\nboundary_margin=" << opt(r.boundary_margin) << "\nsteps=" << r.steps << "\nQ=" << r.Q
    << "\nplateau_tol=" << opt(r.plateau_tol) << "\nversion=" << kVersion << "\n";
  return s.str();
}

int run(const RunRequest& request, std::ostream& out, std::ostream& log) {
  try {
    require(std::find(kCommands.begin(), kCommands.end(), request.command) != kCommands.end(),
            "unknown command '" + request.command + "'");
    ModelSpec model = request.model ? *request.model : load_model_file(request.model_path);
    model.validate();
    Boundary bc = Boundary::dirichlet;
    if (request.bc) {
      bc = *request.bc;
    } else if (request.command == "check-theorem" || request.command == "gaps") {
      bc = Boundary::periodic;
    }
    int d = request.d;
    if (const auto* a = std::get_if<AndersonModel>(&model.family)) {
      if (request.d != a->d) {
        require(request.d == 1 || a->d == 1, "--d disagrees with the model's d");
        d = std::max(request.d, a->d);
        std::get<AndersonModel>(model.family).d = d;
      }
    }
    const LatticeBox box{d, request.L, bc};
    box.validate();
    require(request.ensemble.n_samples >= 1, "--samples must be >= 1");

    Context ctx{request, model, box, ""};
    const std::string canonical = canonical_request(request, model, box);
    ctx.key = cache_key(canonical);

    std::string payload;
    const std::string cache_dir = ResultCache::resolve_dir(request.cache_dir);
    std::optional<ResultCache> cache;
    if (!cache_dir.empty()) cache.emplace(cache_dir);
    bool hit = false;
    if (cache) {
      auto found = cache->lookup(ctx.key);
      if (found.status == ResultCache::Status::hit) {
        payload = std::move(found.payload);
        hit = true;
        log << "cache hit " << ctx.key << "\n";
      } else if (found.status == ResultCache::Status::corrupt) {
        log << "warning: cache entry " << ctx.key << " is corrupt; recomputing\n";
      }
    }
    if (!hit) {
      payload = compute(ctx);
      if (cache) cache->store(ctx.key, payload);
    }
    if (request.out.empty()) {
      out << payload;
    } else {
      write_file_atomic(request.out, payload);
    }
    return 0;
  } catch (const InvalidInput& e) {
    log << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace doslab
