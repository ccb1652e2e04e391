#include "doctest.h"

#include <cmath>

#include "doslab/error.hpp"
#include "doslab/regularity.hpp"
#include "oracles.hpp"

using namespace doslab;

namespace {

EmpiricalCDF free_cdf(std::size_t L) {
  std::vector<Atom> atoms;
  for (double e : oracle::free_dirichlet_eigs(L)) atoms.push_back({e, 1.0 / static_cast<double>(L)});
  MeasureMeta meta;
  meta.hull = {-2.0, 2.0};
  return EmpiricalCDF(DOSMeasure(atoms, meta));
}

EmpiricalCDF uniform_cdf(std::size_t n) {
  std::vector<Atom> atoms(n);
  for (std::size_t k = 0; k < n; ++k) atoms[k] = {(static_cast<double>(k) + 0.5) / static_cast<double>(n), 1.0 / n};
  MeasureMeta meta;
  meta.hull = {0.0, 1.0};
  return EmpiricalCDF(DOSMeasure(atoms, meta));
}

}  // namespace

TEST_CASE("modulus_profile examples") {
  const EmpiricalCDF step(DOSMeasure({{0.3, 1.0}}));
  const std::vector<double> h{0.2, 0.1, 0.05};
  const auto p = modulus_profile(step, {0.0, 1.0}, h);
  for (double x : p.sup_increment) CHECK(x == 1.0);

  const auto u = uniform_cdf(100000);
  const auto q = modulus_profile(u, {0.0, 1.0}, kDefaultScales);
  for (std::size_t k = 0; k < q.scales.size(); ++k) CHECK(std::abs(q.sup_increment[k] - q.scales[k]) <= 2e-5);

  const auto away = modulus_profile(u, {5.0, 6.0}, kDefaultScales);
  CHECK(away.empty_window);
  for (double x : away.sup_increment) CHECK(x == 0.0);

  const std::vector<double> bad{0.1, 0.2};
  CHECK_THROWS_AS(modulus_profile(u, {0.0, 1.0}, bad), InvalidInput);
}

TEST_CASE("modulus_profile: free-model density in the interior") {
  const auto cdf = free_cdf(20000);
  const auto p = modulus_profile(cdf, {-1.5, 1.5}, kDefaultScales);
  // density 1/(pi sqrt(4 - E^2)) peaks at the window ends
  const double rho = 1.0 / (std::numbers::pi * std::sqrt(4.0 - 1.5 * 1.5));
  for (std::size_t k = 0; k < p.scales.size(); ++k) {
    CHECK(p.sup_increment[k] / p.scales[k] <= rho * 1.02 + 1.0 / (20000 * p.scales[k]));
    CHECK(p.sup_increment[k] / p.scales[k] >= rho * 0.9);
  }
}

TEST_CASE("modulus_profile increments grow with h") {
  const auto cdf = ensemble_ids(anderson_model(1.0, DisorderSpec::uniform(0, 1)), {1, 200, Boundary::dirichlet}, {10, 2});
  const auto p = modulus_profile(cdf, {-2.0, 3.0}, kDefaultScales);
  for (std::size_t k = 1; k < p.scales.size(); ++k) CHECK(p.sup_increment[k] <= p.sup_increment[k - 1]);
}

TEST_CASE("holder_fit examples") {
  const auto u = uniform_cdf(100000);
  const auto fit = holder_fit(modulus_profile(u, {0.0, 1.0}, kDefaultScales));
  CHECK(fit.defined);
  CHECK(fit.alpha == doctest::Approx(1.0).epsilon(0.02));

  const EmpiricalCDF step(DOSMeasure({{0.5, 1.0}}));
  const auto s = holder_fit(modulus_profile(step, {0.0, 1.0}, kDefaultScales));
  CHECK(s.alpha == doctest::Approx(0.0));

  // square-root edge of the free band
  const auto cdf = free_cdf(100000);
  const std::vector<double> edge_scales{1e-2, 3e-3, 1e-3, 3e-4, 1e-4};
  const auto e = holder_fit(modulus_profile(cdf, {1.9, 2.1}, edge_scales));
  CHECK(e.alpha == doctest::Approx(0.5).epsilon(0.1));

  ModulusProfile zero;
  zero.scales = {1e-1, 1e-2, 1e-3, 1e-4};
  zero.sup_increment = {0.1, 0.0, 0.0, 0.0};
  CHECK_FALSE(holder_fit(zero).defined);
  zero.scales.pop_back();
  zero.sup_increment.pop_back();
  CHECK_THROWS_AS(holder_fit(zero), InvalidInput);
}

TEST_CASE("ac_verdict: uniform CDF is Lipschitz") {
  for (std::size_t n : {1000, 100000}) {
    const auto rep = regularity_report(uniform_cdf(n));
    CHECK(rep.verdict == AcVerdict::lipschitz_consistent);
    CHECK(ac_verdict(rep) == AcVerdict::lipschitz_consistent);
  }
}

TEST_CASE("regularity_report raises scales below the sampling floor") {
  const auto rep = regularity_report(uniform_cdf(1000));
  CHECK(rep.scales.back() == doctest::Approx(4e-3));
  for (std::size_t k = 1; k < rep.scales.size(); ++k) CHECK(rep.scales[k] < rep.scales[k - 1]);
}

TEST_CASE("ac_verdict: staircase is singular") {
  // middle-thirds Cantor measure, log 2 / log 3 ~ 0.63
  std::vector<Atom> atoms;
  const int depth = 12;
  for (int k = 0; k < (1 << depth); ++k) {
    double x = 0.0, scale = 1.0;
    for (int b = depth - 1; b >= 0; --b) {
      scale /= 3.0;
      if ((k >> b) & 1) x += 2.0 * scale;
    }
    atoms.push_back({x, 1.0 / (1 << depth)});
  }
  MeasureMeta meta;
  meta.hull = {0.0, 1.0};
  const auto rep = regularity_report(EmpiricalCDF(DOSMeasure(atoms, meta)));
  CHECK(rep.fit.alpha == doctest::Approx(std::log(2) / std::log(3)).epsilon(0.15));
  CHECK(rep.measure_shrinks);
  CHECK(rep.verdict == AcVerdict::singular_consistent);
  CHECK(describe_verdict(rep) == "singular_consistent");
}

TEST_CASE("wegner_check") {
  const auto m = anderson_model(1.0, DisorderSpec::uniform(0, 1));
  const LatticeBox box{1, 128, Boundary::dirichlet};
  const std::vector<Interval> outside{{10, 11}};
  const auto r = wegner_check(m, box, {20, 3}, outside);
  CHECK(r.constant == 0.0);
  CHECK(r.bound == doctest::Approx(1.0));
  CHECK(r.pass);

  const auto tiles = hull_tiling(m, box, 0.05);
  CHECK(tiles.front().lo == doctest::Approx(-2.0));
  CHECK(tiles.back().hi >= 3.0 - 1e-9);
  const auto w = wegner_check(m, box, {50, 3}, tiles);
  CHECK(w.constant > 0.0);
  CHECK(w.constant <= 1.25 * w.bound);

  CHECK_THROWS_AS(wegner_check(anderson_model(1.0, DisorderSpec::bernoulli(0, 1, 0.5)), box, {1, 0}, tiles),
                  InvalidInput);
  CHECK_THROWS_AS(wegner_check(almost_mathieu_model(1.0), box, {1, 0}, tiles), InvalidInput);
  CHECK_THROWS_AS(wegner_check(fibonacci_model(1.0), box, {1, 0}, tiles), InvalidInput);
}

TEST_CASE("interior_windows avoid band edges") {
  const auto cdf = finite_volume_ids(periodic_model({1, -1}), {1, 1024, Boundary::periodic}, {0, 0});
  const auto w = interior_windows(cdf, 0.02, 1e-4);
  REQUIRE(w.size() == 2);
  const auto b = oracle::period2_bands(1, -1);
  CHECK(w[0].lo == doctest::Approx(b[0] + 0.1).epsilon(0.01));
  CHECK(w[0].hi <= b[1] - 0.1 + 0.02);
  CHECK(w[1].lo >= b[2] + 0.1 - 0.02);
}
