#include "doctest.h"

#include <cmath>

#include "doslab/dos.hpp"
#include "doslab/error.hpp"
#include "oracles.hpp"

using namespace doslab;

namespace {
const RealizationSeed kSeed{7, 0};
LatticeBox line(std::int64_t L, Boundary bc = Boundary::dirichlet) { return {1, L, bc}; }
}  // namespace

TEST_CASE("local_dos_at_site examples") {
  const auto one = local_dos_at_site(periodic_model({0.75}), line(1), kSeed, 0);
  REQUIRE(one.size() == 1);
  CHECK(one.atoms()[0] == Atom{0.75, 1.0});

  const auto two = local_dos_at_site(free_model(), line(2), kSeed, 0);
  REQUIRE(two.size() == 2);
  CHECK(two.atoms()[0].energy == doctest::Approx(-1.0));
  CHECK(two.atoms()[0].weight == doctest::Approx(0.5));
  CHECK(two.atoms()[1].energy == doctest::Approx(1.0));
  CHECK(two.atoms()[1].weight == doctest::Approx(0.5));

  const auto m = anderson_model(1.0, DisorderSpec::uniform(0, 1));
  for (std::size_t s : {0, 5, 19}) CHECK(local_dos_at_site(m, line(20), kSeed, s).total_weight() == doctest::Approx(1.0));
  CHECK_THROWS_AS(local_dos_at_site(m, line(20), kSeed, 20), InvalidInput);
}

TEST_CASE("finite_volume_ids examples") {
  const auto c = finite_volume_ids(free_model(), line(3), kSeed);
  REQUIRE(c.atoms().size() == 3);
  CHECK(c(-std::sqrt(2.0) - 1e-9) == 0.0);
  CHECK(c(-1.0) == doctest::Approx(1.0 / 3));
  CHECK(ids_eval(c, 0.0) == doctest::Approx(2.0 / 3));
  CHECK(ids_eval(c, -10.0) == 0.0);
  CHECK(ids_eval(c, 10.0) == doctest::Approx(c.total_weight()));

  const auto big = finite_volume_ids(free_model(), line(1000), kSeed);
  CHECK(std::abs(big(0.0) - 0.5) <= 1e-3);
  CHECK(std::abs(big(1.0) - 2.0 / 3.0) <= 2e-3);
  const auto exact = oracle::free_dirichlet_eigs(1000);
  for (double e = -2.5; e <= 2.5; e += 0.1) CHECK(big(e) == doctest::Approx(oracle::counting_ids(exact, e)).epsilon(1e-12));
}

TEST_CASE("trace identity: site average of local DOS equals the IDS measure") {
  const auto m = anderson_model(1.0, DisorderSpec::uniform(-1, 1));
  const auto box = line(12);
  const auto ids = finite_volume_ids(m, box, kSeed);
  std::vector<Atom> all;
  for (std::size_t s = 0; s < 12; ++s) {
    const auto l = local_dos_at_site(m, box, kSeed, s);
    for (const Atom& a : l.atoms()) all.push_back({a.energy, a.weight / 12.0});
  }
  const DOSMeasure avg(all);
  for (const Atom& a : ids.atoms()) {
    CHECK(avg.cumulative(a.energy) == doctest::Approx(ids(a.energy)).epsilon(1e-9));
    CHECK(avg.cumulative_before(a.energy) == doctest::Approx(ids.measure().cumulative_before(a.energy)).epsilon(1e-9));
  }
}

TEST_CASE("ensemble_dos examples") {
  // one-site box, exhaustive over both outcomes
  const double p = 0.3;
  const auto m = anderson_model(1.0, DisorderSpec::bernoulli(0.0, 1.0, p));
  const auto d = ensemble_dos(m, line(1), {1, 0, EnsembleMode::automatic, 1}, 0);
  REQUIRE(d.size() == 2);
  CHECK(d.atoms()[0].energy == 0.0);
  CHECK(d.atoms()[0].weight == doctest::Approx(1 - p));
  CHECK(d.atoms()[1].energy == 1.0);
  CHECK(d.atoms()[1].weight == doctest::Approx(p));

  const auto f1 = ensemble_dos(free_model(), line(9), {10, 3}, 4);
  const auto f0 = local_dos_at_site(free_model(), line(9), {3, 0}, 4);
  CHECK(sup_distance(f1, f0) < 1e-12);

  const auto u = anderson_model(1.0, DisorderSpec::uniform(0, 1));
  const auto single = ensemble_dos(u, line(16), {1, 99}, 5);
  const auto direct = local_dos_at_site(u, line(16), {99, 0}, 5);
  REQUIRE(single.size() == direct.size());
  for (std::size_t k = 0; k < single.size(); ++k) {
    CHECK(single.atoms()[k].energy == direct.atoms()[k].energy);
    CHECK(single.atoms()[k].weight == doctest::Approx(direct.atoms()[k].weight).epsilon(1e-14));
  }
}

TEST_CASE("ensemble results do not depend on the worker count") {
  const auto u = anderson_model(1.0, DisorderSpec::uniform(0, 1));
  const auto a = ensemble_dos(u, line(32), {40, 5, EnsembleMode::automatic, 1}, 10);
  const auto b = ensemble_dos(u, line(32), {40, 5, EnsembleMode::automatic, 4}, 10);
  REQUIRE(a.size() == b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a.atoms()[k].energy == b.atoms()[k].energy);
    CHECK(a.atoms()[k].weight == b.atoms()[k].weight);
  }
  const std::vector<double> grid{-1.0, 0.0, 0.5, 1.0, 2.0};
  CHECK(ensemble_ids_on_grid(u, line(32), {40, 5, EnsembleMode::automatic, 1}, grid) ==
        ensemble_ids_on_grid(u, line(32), {40, 5, EnsembleMode::automatic, 3}, grid));
}

TEST_CASE("tree_merge is independent of list order") {
  std::vector<std::vector<Atom>> lists = {{{0.0, 0.1}, {1.0, 0.2}}, {{0.5, 0.3}}, {{0.0, 0.05}, {2.0, 0.1}}};
  auto reversed = lists;
  std::reverse(reversed.begin(), reversed.end());
  const auto a = tree_merge(lists);
  const auto b = tree_merge(reversed);
  REQUIRE(a.size() == 4);
  CHECK(a[0].weight == doctest::Approx(0.15));
  CHECK(DOSMeasure(a).total_weight() == doctest::Approx(DOSMeasure(b).total_weight()));
}

TEST_CASE("ensemble_ids_on_grid agrees with ensemble_ids") {
  const auto u = anderson_model(2.0, DisorderSpec::uniform(-0.5, 0.5));
  const EnsembleConfig cfg{25, 8};
  const auto cdf = ensemble_ids(u, line(40), cfg);
  std::vector<double> grid;
  for (double e = -3.0; e <= 3.0; e += 0.25) grid.push_back(e);
  const auto n = ensemble_ids_on_grid(u, line(40), cfg, grid);
  for (std::size_t g = 0; g < grid.size(); ++g) CHECK(n[g] == doctest::Approx(cdf(grid[g])).epsilon(1e-12));
}

TEST_CASE("exhaustive ensemble is exact") {
  // L=2 bernoulli: brute force over the four configurations
  const double p = 0.4;
  const auto m = anderson_model(1.0, DisorderSpec::bernoulli(0.0, 1.0, p));
  const auto cdf = ensemble_ids(m, line(2), {1, 0});
  std::vector<Atom> atoms;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      const double w = (a ? p : 1 - p) * (b ? p : 1 - p);
      const double m = 0.5 * (a + b), r = std::sqrt(0.25 * (a - b) * (a - b) + 1.0);
      atoms.push_back({m - r, w / 2});
      atoms.push_back({m + r, w / 2});
    }
  const DOSMeasure expect(atoms);
  CHECK(sup_distance(cdf.measure(), expect) < 1e-12);

  const std::size_t sites[] = {0, 1};
  CHECK(dos_site_independence_check(m, line(2), {1, 0}, sites).max_deviation < 1e-12);
}

TEST_CASE("site independence: trivial cases") {
  const std::size_t same[] = {7, 7};
  const auto u = anderson_model(1.0, DisorderSpec::uniform(0, 1));
  CHECK(dos_site_independence_check(u, line(32), {20, 1}, same).max_deviation == 0.0);
  const std::size_t bulk[] = {40, 41};
  const auto free = dos_site_independence_check(free_model(), line(128), {1, 0}, bulk);
  CHECK(free.max_deviation <= 4.0 / 128);
  CHECK_FALSE(free.boundary_warning);
  const std::size_t edge[] = {1, 60};
  CHECK(dos_site_independence_check(free_model(), line(128), {1, 0}, edge).boundary_warning);
}

TEST_CASE("Dirichlet and periodic IDS bracket each other") {
  for (std::int64_t L : {64, 256, 1024}) {
    const auto dir = finite_volume_ids(free_model(), line(L), kSeed);
    const auto per = finite_volume_ids(free_model(), line(L, Boundary::periodic), kSeed);
    double worst = 0.0;
    for (double e = -1.93; e < 1.95; e += 0.071) worst = std::max(worst, std::abs(dir(e) - per(e)));
    CHECK(worst * static_cast<double>(L) <= 4.0);
  }
}

TEST_CASE("empirical CDFs are nondecreasing and bounded") {
  const auto c = ensemble_ids(anderson_model(1.0, DisorderSpec::uniform(0, 1)), line(50), {20, 1});
  double prev = 0.0;
  for (double e = -3.0; e <= 4.0; e += 0.01) {
    const double n = c(e);
    CHECK(n >= prev);
    CHECK(n <= c.total_weight() + 1e-15);
    prev = n;
  }
  CHECK(c.total_weight() == doctest::Approx(1.0));
}
