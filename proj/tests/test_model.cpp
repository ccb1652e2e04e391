#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "doslab/error.hpp"
#include "doslab/model.hpp"
#include "doslab/solvers.hpp"
#include "oracles.hpp"

using namespace doslab;

namespace {
const RealizationSeed kSeed{12345, 3};
LatticeBox line(std::int64_t L, Boundary bc = Boundary::dirichlet) { return {1, L, bc}; }
}  // namespace

TEST_CASE("sample_potential: closed-form families") {
  CHECK(sample_potential(free_model(), line(5), kSeed) == PotentialField(5, 0.0));
  CHECK(sample_potential(almost_mathieu_model(1.0, 0.0, 0.0), line(3), kSeed) == PotentialField{2.0, 2.0, 2.0});
  CHECK(sample_potential(anderson_model(1.0, DisorderSpec::bernoulli(0.0, 1.0, 1.0)), line(4), kSeed) ==
        PotentialField{1.0, 1.0, 1.0, 1.0});
  CHECK(sample_potential(periodic_model({1.0, -1.0}), line(5), kSeed) == PotentialField{1, -1, 1, -1, 1});
}

TEST_CASE("sample_potential: fibonacci coding sequence") {
  // frac(n / phi) >= 1 - 1/phi marks the sites carrying lambda
  const auto v = sample_potential(fibonacci_model(2.0), line(8), kSeed);
  const PotentialField expect{0, 2, 0, 2, 2, 0, 2, 0};
  CHECK(v == expect);
}

TEST_CASE("sample_potential: determinism and seed dependence") {
  const auto m = anderson_model(1.0, DisorderSpec::uniform(0.0, 1.0));
  CHECK(sample_potential(m, line(64), kSeed) == sample_potential(m, line(64), kSeed));
  CHECK(sample_potential(m, line(64), kSeed) != sample_potential(m, line(64), {12345, 4}));
  CHECK(sample_potential(m, line(64), kSeed) != sample_potential(m, line(64), {12346, 3}));
  // non-random families ignore the seed
  CHECK(sample_potential(almost_mathieu_model(0.7), line(16), {1, 1}) ==
        sample_potential(almost_mathieu_model(0.7), line(16), {9, 9}));
}

TEST_CASE("sample_potential: dimension mismatch rejected") {
  CHECK_THROWS_AS(sample_potential(almost_mathieu_model(1.0), {2, 4, Boundary::dirichlet}, kSeed), InvalidInput);
  CHECK_THROWS_AS(sample_potential(anderson_model(1.0, DisorderSpec::uniform(0, 1), 2), line(4), kSeed), InvalidInput);
  CHECK_NOTHROW(sample_potential(anderson_model(1.0, DisorderSpec::uniform(0, 1), 2), {2, 4, Boundary::dirichlet}, kSeed));
}

TEST_CASE("build_finite_operator") {
  const auto h = build_finite_operator(free_model(), line(3), kSeed);
  CHECK(h.chain().diag == std::vector<double>{0, 0, 0});
  CHECK(h.chain().off == std::vector<double>{1, 1});
  CHECK(h.wrap() == 0.0);

  const auto p = build_finite_operator(periodic_model({1.0, -1.0}), line(4), kSeed);
  CHECK(p.chain().diag == std::vector<double>{1, -1, 1, -1});
  CHECK(p.chain().off == std::vector<double>{1, 1, 1});

  const auto c = build_finite_operator(free_model(), line(4, Boundary::periodic), kSeed);
  const auto dense = c.dense();
  CHECK(dense(0, 3) == 1.0);
  CHECK(dense(3, 0) == 1.0);
  const auto ev = operator_eigenvalues(c);
  const auto expect = oracle::free_periodic_eigs(4);
  REQUIRE(ev.size() == 4);
  for (std::size_t k = 0; k < 4; ++k) CHECK(std::abs(ev[k] - expect[k]) < 1e-12);
}

TEST_CASE("build_finite_operator: 2D box is symmetric with unit hopping") {
  const auto h = build_finite_operator(anderson_model(1.0, DisorderSpec::uniform(0, 1), 2), {2, 4, Boundary::periodic},
                                       kSeed);
  const auto m = h.dense();
  for (std::size_t i = 0; i < m.size(); ++i) {
    int neighbours = 0;
    for (std::size_t j = 0; j < m.size(); ++j) {
      CHECK(m(i, j) == m(j, i));
      if (i != j && m(i, j) != 0.0) {
        CHECK(m(i, j) == 1.0);
        ++neighbours;
      }
    }
    CHECK(neighbours == 4);
    CHECK(m(i, i) == h.potential()[i]);
  }
}

TEST_CASE("shift_realization examples") {
  const auto am = shift_realization(almost_mathieu_model(1.0, 0.5, 0.25), 1);
  CHECK(std::get<AlmostMathieuModel>(am.family).phase() == doctest::Approx(0.75));
  CHECK(serialize_model(shift_realization(free_model(), 7)) == serialize_model(free_model()));
  const auto per = shift_realization(periodic_model({1.0, -1.0}), 1);
  CHECK(std::get<PeriodicModel>(per.family).values == std::vector<double>{-1.0, 1.0});
}

TEST_CASE("shift covariance holds exactly on the overlap") {
  const std::vector<ModelSpec> models = {
      anderson_model(1.3, DisorderSpec::uniform(-0.5, 0.5)),
      anderson_model(1.0, DisorderSpec::bernoulli(0.0, 1.0, 0.3)),
      almost_mathieu_model(0.8, kGoldenFrequency, 0.1),
      fibonacci_model(1.5, 0.2),
      periodic_model({0.5, -1.0, 2.0}),
  };
  const auto box = line(50);
  for (const auto& m : models) {
    for (std::int64_t i : {1, 4, 17}) {
      const auto a = sample_potential(m, box, kSeed);
      const auto b = sample_potential(shift_realization(m, i), box, kSeed);
      for (std::int64_t n = 0; n + i < 50; ++n) CHECK(b[static_cast<std::size_t>(n)] == a[static_cast<std::size_t>(n + i)]);
    }
  }
}

TEST_CASE("anderson marginals match the single-site law") {
  for (const auto& law : {DisorderSpec::uniform(-1.0, 2.0), DisorderSpec::bernoulli(0.0, 1.0, 0.3),
                          DisorderSpec::discrete({-1.0, 0.5, 3.0}, {0.2, 0.5, 0.3})}) {
    std::vector<double> v;
    const auto m = anderson_model(1.0, law);
    for (std::uint64_t k = 0; k < 100; ++k) {
      const auto p = sample_potential(m, line(1000), {77, k});
      v.insert(v.end(), p.begin(), p.end());
    }
    std::sort(v.begin(), v.end());
    // Kolmogorov-Smirnov distance, checking both one-sided limits at each jump
    double ks = 0.0;
    const double n = static_cast<double>(v.size());
    for (std::size_t i = 0; i < v.size();) {
      std::size_t j = i;
      while (j < v.size() && v[j] == v[i]) ++j;
      const double left = law.cdf(std::nextafter(v[i], -INFINITY));
      ks = std::max({ks, std::abs(static_cast<double>(j) / n - law.cdf(v[i])), std::abs(static_cast<double>(i) / n - left)});
      i = j;
    }
    CHECK(ks <= 0.02);
  }
}

TEST_CASE("disorder validation") {
  CHECK_THROWS_AS(DisorderSpec::uniform(1.0, 1.0), InvalidInput);
  CHECK_THROWS_AS(DisorderSpec::bernoulli(0.0, 1.0, 1.5), InvalidInput);
  CHECK_THROWS_AS(DisorderSpec::discrete({0.0, 1.0}, {0.5, 0.6}), InvalidInput);
  CHECK_THROWS_AS(DisorderSpec::discrete({0.0, NAN}, {0.5, 0.5}), InvalidInput);
  CHECK(DisorderSpec::uniform(0.0, 0.5).density_sup() == doctest::Approx(2.0));
}

TEST_CASE("lattice box validation") {
  CHECK_THROWS_AS(line(2, Boundary::periodic).validate(), InvalidInput);
  CHECK_THROWS_AS(line(0).validate(), InvalidInput);
  CHECK_THROWS_AS((LatticeBox{3, 4, Boundary::dirichlet}.validate()), InvalidInput);
  CHECK_NOTHROW(line(3, Boundary::periodic).validate());
  CHECK((LatticeBox{2, 5, Boundary::dirichlet}.sites()) == 25);
}

TEST_CASE("model files: strict parsing and canonical form") {
  const auto m = parse_model("# comment\nfamily=anderson\nlambda=2\ndist=bernoulli\na=0\nb=1\np=0.25\n");
  const auto& a = std::get<AndersonModel>(m.family);
  CHECK(a.lambda == 2.0);
  CHECK(a.disorder.quantile(0.9) == 1.0);
  CHECK(a.disorder.quantile(0.1) == 0.0);

  CHECK_THROWS_AS(parse_model("family=free\nlambda=1\n"), InvalidInput);
  CHECK_THROWS_AS(parse_model("family=anderson\nlambda=1\ncolour=red\n"), InvalidInput);
  CHECK_THROWS_AS(parse_model("family=anderson\nlambda=1\nlambda=2\n"), InvalidInput);
  CHECK_THROWS_AS(parse_model("family=almost_mathieu\nlambda=x\n"), InvalidInput);
  CHECK_THROWS_AS(parse_model("family=almost_mathieu\nalpha=1.5\n"), InvalidInput);
  CHECK_THROWS_AS(parse_model("lambda=1\n"), InvalidInput);

  const auto x = parse_model("family=almost_mathieu\nlambda=0.5\ntheta=0.1\n");
  const auto y = parse_model("theta=0.1\nlambda=0.5\nfamily=almost_mathieu\n");
  CHECK(serialize_model(x) == serialize_model(y));
  CHECK(model_hash(x) == model_hash(y));
  CHECK(serialize_model(parse_model(serialize_model(x))) == serialize_model(x));
  CHECK(model_hash(x) != model_hash(parse_model("family=almost_mathieu\nlambda=0.5\ntheta=0.2\n")));
}
