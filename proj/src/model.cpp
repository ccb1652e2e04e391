#include "doslab/model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <numeric>
#include <set>
#include <sstream>

#include "doslab/error.hpp"

namespace doslab {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double frac(double x) { return x - std::floor(x); }

void require_finite(double x, const std::string& what) { require(std::isfinite(x), what + " must be finite"); }

}  // namespace

// ---------------------------------------------------------------------------
// DisorderSpec
// ---------------------------------------------------------------------------

DisorderSpec DisorderSpec::uniform(double a, double b) {
  require_finite(a, "uniform lower end a");
  require_finite(b, "uniform upper end b");
  require(a < b, "uniform disorder needs a < b (got a=" + format_double(a) + ", b=" + format_double(b) + ")");
  return DisorderSpec(UniformDisorder{a, b});
}

DisorderSpec DisorderSpec::bernoulli(double v0, double v1, double p) {
  require_finite(v0, "bernoulli value a");
  require_finite(v1, "bernoulli value b");
  require(p >= 0.0 && p <= 1.0, "bernoulli probability p must lie in [0, 1], got " + format_double(p));
  return DisorderSpec(BernoulliDisorder{v0, v1, p});
}

DisorderSpec DisorderSpec::discrete(std::vector<double> values, std::vector<double> probs) {
  require(!values.empty(), "discrete disorder needs at least one value");
  require(values.size() == probs.size(), "discrete disorder: values and probs differ in length");
  double total = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    require_finite(values[i], "discrete value");
    require(std::isfinite(probs[i]) && probs[i] >= 0.0, "discrete probabilities must be non-negative");
    total += probs[i];
  }
  require(std::abs(total - 1.0) <= 1e-12, "discrete probabilities must sum to 1 (sum=" + format_double(total) + ")");
  return DisorderSpec(DiscreteDisorder{std::move(values), std::move(probs)});
}

std::string_view DisorderSpec::name() const {
  return std::visit(Overloaded{[](const UniformDisorder&) { return std::string_view("uniform"); },
                               [](const BernoulliDisorder&) { return std::string_view("bernoulli"); },
                               [](const DiscreteDisorder&) { return std::string_view("discrete"); }},
                    kind_);
}

double DisorderSpec::quantile(double u) const {
  return std::visit(Overloaded{[u](const UniformDisorder& k) { return k.a + (k.b - k.a) * u; },
                               [u](const BernoulliDisorder& k) { return u < 1.0 - k.p ? k.v0 : k.v1; },
                               [u](const DiscreteDisorder& k) {
                                 double cum = 0.0;
                                 std::size_t last = 0;
                                 for (std::size_t i = 0; i < k.values.size(); ++i) {
                                   if (k.probs[i] <= 0.0) continue;
                                   cum += k.probs[i];
                                   last = i;
                                   if (u < cum) return k.values[i];
                                 }
                                 return k.values[last];
                               }},
                    kind_);
}

double DisorderSpec::cdf(double x) const {
  return std::visit(Overloaded{[x](const UniformDisorder& k) { return std::clamp((x - k.a) / (k.b - k.a), 0.0, 1.0); },
                               [x](const BernoulliDisorder& k) {
                                 double c = 0.0;
                                 if (k.v0 <= x) c += 1.0 - k.p;
                                 if (k.v1 <= x) c += k.p;
                                 return c;
                               },
                               [x](const DiscreteDisorder& k) {
                                 double c = 0.0;
                                 for (std::size_t i = 0; i < k.values.size(); ++i)
                                   if (k.values[i] <= x) c += k.probs[i];
                                 return c;
                               }},
                    kind_);
}

double DisorderSpec::density_sup() const {
  const auto* u = std::get_if<UniformDisorder>(&kind_);
  require(u != nullptr, "disorder '" + std::string(name()) + "' has no bounded density");
  return 1.0 / (u->b - u->a);
}

std::vector<std::pair<double, double>> DisorderSpec::atoms() const {
  std::vector<std::pair<double, double>> out;
  if (const auto* b = std::get_if<BernoulliDisorder>(&kind_)) {
    if (1.0 - b->p > 0.0) out.emplace_back(b->v0, 1.0 - b->p);
    if (b->p > 0.0) out.emplace_back(b->v1, b->p);
  } else if (const auto* d = std::get_if<DiscreteDisorder>(&kind_)) {
    for (std::size_t i = 0; i < d->values.size(); ++i)
      if (d->probs[i] > 0.0) out.emplace_back(d->values[i], d->probs[i]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// ModelSpec
// ---------------------------------------------------------------------------

double AlmostMathieuModel::phase() const { return frac(theta + static_cast<double>(shift) * alpha); }

double FibonacciModel::phase() const { return frac(theta + static_cast<double>(shift) * kGoldenFrequency); }

std::string_view ModelSpec::family_name() const {
  return std::visit(Overloaded{[](const FreeModel&) { return std::string_view("free"); },
                               [](const AndersonModel&) { return std::string_view("anderson"); },
                               [](const AlmostMathieuModel&) { return std::string_view("almost_mathieu"); },
                               [](const FibonacciModel&) { return std::string_view("fibonacci"); },
                               [](const PeriodicModel&) { return std::string_view("periodic"); }},
                    family);
}

std::optional<int> ModelSpec::required_dimension() const {
  if (std::holds_alternative<FreeModel>(family)) return std::nullopt;
  if (const auto* a = std::get_if<AndersonModel>(&family)) return a->d;
  return 1;
}

void ModelSpec::validate() const {
  std::visit(Overloaded{[](const FreeModel&) {},
                        [](const AndersonModel& m) {
                          require_finite(m.lambda, "lambda");
                          require(m.d == 1 || m.d == 2, "anderson dimension d must be 1 or 2");
                        },
                        [](const AlmostMathieuModel& m) {
                          require_finite(m.lambda, "lambda");
                          require(m.alpha >= 0.0 && m.alpha < 1.0, "alpha must lie in [0, 1)");
                          require(m.theta >= 0.0 && m.theta < 1.0, "theta must lie in [0, 1)");
                        },
                        [](const FibonacciModel& m) {
                          require_finite(m.lambda, "lambda");
                          require(m.theta >= 0.0 && m.theta < 1.0, "theta must lie in [0, 1)");
                        },
                        [](const PeriodicModel& m) {
                          require(!m.values.empty(), "periodic model needs period >= 1");
                          for (double v : m.values) require_finite(v, "periodic value");
                        }},
             family);
}

ModelSpec free_model() { return ModelSpec{FreeModel{}}; }

ModelSpec anderson_model(double lambda, DisorderSpec disorder, int d) {
  ModelSpec m{AndersonModel{lambda, std::move(disorder), d, 0}};
  m.validate();
  return m;
}

ModelSpec almost_mathieu_model(double lambda, double alpha, double theta) {
  ModelSpec m{AlmostMathieuModel{lambda, alpha, theta, 0}};
  m.validate();
  return m;
}

ModelSpec fibonacci_model(double lambda, double theta) {
  ModelSpec m{FibonacciModel{lambda, theta, 0}};
  m.validate();
  return m;
}

ModelSpec periodic_model(std::vector<double> values) {
  ModelSpec m{PeriodicModel{std::move(values)}};
  m.validate();
  return m;
}

// ---------------------------------------------------------------------------
// LatticeBox
// ---------------------------------------------------------------------------

std::string_view to_string(Boundary bc) { return bc == Boundary::dirichlet ? "dirichlet" : "periodic"; }

Boundary parse_boundary(std::string_view text) {
  if (text == "dirichlet") return Boundary::dirichlet;
  if (text == "periodic") return Boundary::periodic;
  fail("unknown boundary condition '" + std::string(text) + "' (expected dirichlet or periodic)");
}

std::size_t LatticeBox::sites() const {
  return d == 1 ? static_cast<std::size_t>(L) : static_cast<std::size_t>(L) * static_cast<std::size_t>(L);
}

void LatticeBox::validate() const {
  require(d == 1 || d == 2, "lattice dimension must be 1 or 2, got " + std::to_string(d));
  require(L >= 1, "box side L must be >= 1, got " + std::to_string(L));
  require(d == 1 || L <= 4096, "2D box side too large for dense solvers");
  if (bc == Boundary::periodic) {
    if (d == 1) require(L >= 3, "periodic 1D box needs L >= 3, got " + std::to_string(L));
    if (d == 2) require(L >= 2, "periodic 2D box needs L >= 2, got " + std::to_string(L));
  }
}

std::array<std::int64_t, 2> LatticeBox::coords(std::size_t s) const {
  const auto si = static_cast<std::int64_t>(s);
  if (d == 1) return {si, 0};
  return {si % L, si / L};
}

std::size_t LatticeBox::site(std::int64_t x, std::int64_t y) const {
  return static_cast<std::size_t>(d == 1 ? x : x + L * y);
}

std::int64_t LatticeBox::distance_to_boundary(std::size_t s) const {
  if (bc == Boundary::periodic) return L;
  const auto c = coords(s);
  std::int64_t dist = std::min(c[0], L - 1 - c[0]);
  if (d == 2) dist = std::min({dist, c[1], L - 1 - c[1]});
  return dist;
}

std::string LatticeBox::describe() const {
  return "d=" + std::to_string(d) + ",L=" + std::to_string(L) + ",bc=" + std::string(to_string(bc));
}

// ---------------------------------------------------------------------------
// Potentials and operators
// ---------------------------------------------------------------------------

PotentialField sample_potential(const ModelSpec& model, const LatticeBox& box, const RealizationSeed& seed) {
  model.validate();
  box.validate();
  if (const auto req = model.required_dimension(); req && *req != box.d) {
    fail("model '" + std::string(model.family_name()) + "' is " + std::to_string(*req) + "-dimensional but box has d=" +
         std::to_string(box.d));
  }
  const std::size_t n = box.sites();
  PotentialField v(n, 0.0);
  std::visit(Overloaded{[](const FreeModel&) {},
                        [&](const AndersonModel& m) {
                          for (std::size_t s = 0; s < n; ++s) {
                            const auto c = box.coords(s);
                            v[s] = m.lambda * m.disorder.quantile(site_uniform(seed, c[0] + m.shift, c[1]));
                          }
                        },
                        [&](const AlmostMathieuModel& m) {
                          for (std::size_t s = 0; s < n; ++s) {
                            const std::int64_t k = static_cast<std::int64_t>(s) + m.shift;
                            const double ph = frac(m.theta + static_cast<double>(k) * m.alpha);
                            v[s] = 2.0 * m.lambda * std::cos(2.0 * std::numbers::pi * ph);
                          }
                        },
                        [&](const FibonacciModel& m) {
                          const double cut = 1.0 - kGoldenFrequency;
                          for (std::size_t s = 0; s < n; ++s) {
                            const std::int64_t k = static_cast<std::int64_t>(s) + m.shift;
                            const double ph = frac(static_cast<double>(k) * kGoldenFrequency + m.theta);
                            v[s] = ph >= cut ? m.lambda : 0.0;
                          }
                        },
                        [&](const PeriodicModel& m) {
                          for (std::size_t s = 0; s < n; ++s) v[s] = m.values[s % m.values.size()];
                        }},
             model.family);
  return v;
}

FiniteOperator::FiniteOperator(LatticeBox box, PotentialField potential)
    : box_(box), potential_(std::move(potential)) {
  box_.validate();
  require(potential_.size() == box_.sites(), "potential length does not match box size");
  for (double x : potential_) require(std::isfinite(x), "potential contains a non-finite value");
}

TridiagMatrix FiniteOperator::chain() const {
  require(box_.d == 1, "chain() is only defined for 1D boxes");
  TridiagMatrix t;
  t.diag = potential_;
  t.off.assign(potential_.size() - 1, 1.0);
  return t;
}

double FiniteOperator::wrap() const { return box_.d == 1 && box_.bc == Boundary::periodic ? 1.0 : 0.0; }

std::vector<Bond> FiniteOperator::bonds() const {
  std::map<std::pair<std::size_t, std::size_t>, double> acc;
  const std::int64_t L = box_.L;
  const bool periodic = box_.bc == Boundary::periodic;
  auto add = [&](std::size_t a, std::size_t b) {
    if (a == b) return;
    acc[{std::min(a, b), std::max(a, b)}] += 1.0;
  };
  for (std::size_t s = 0; s < size(); ++s) {
    const auto c = box_.coords(s);
    for (int axis = 0; axis < box_.d; ++axis) {
      auto nb = c;
      nb[axis] += 1;
      if (nb[axis] == L) {
        if (!periodic) continue;
        nb[axis] = 0;
      }
      add(s, box_.site(nb[0], nb[1]));
    }
  }
  std::vector<Bond> out;
  out.reserve(acc.size());
  for (const auto& [key, w] : acc) out.push_back({key.first, key.second, w});
  return out;
}

DenseMatrix FiniteOperator::dense() const {
  DenseMatrix m(size());
  for (std::size_t i = 0; i < size(); ++i) m(i, i) = potential_[i];
  for (const auto& b : bonds()) {
    m(b.i, b.j) += b.weight;
    m(b.j, b.i) += b.weight;
  }
  return m;
}

void FiniteOperator::apply(std::span<const double> x, std::span<double> y) const {
  require(x.size() == size() && y.size() == size(), "apply: vector length mismatch");
  for (std::size_t i = 0; i < size(); ++i) y[i] = potential_[i] * x[i];
  for (const auto& b : bonds()) {
    y[b.i] += b.weight * x[b.j];
    y[b.j] += b.weight * x[b.i];
  }
}

Interval potential_range(const ModelSpec& model) {
  return std::visit(Overloaded{[](const FreeModel&) { return Interval{0.0, 0.0}; },
                               [](const AndersonModel& m) {
                                 double lo = 0.0, hi = 0.0;
                                 if (const auto* u = std::get_if<UniformDisorder>(&m.disorder.kind())) {
                                   lo = u->a;
                                   hi = u->b;
                                 } else {
                                   const auto atoms = m.disorder.atoms();
                                   lo = hi = atoms.front().first;
                                   for (const auto& [v, p] : atoms) {
                                     lo = std::min(lo, v);
                                     hi = std::max(hi, v);
                                   }
                                 }
                                 return Interval{std::min(m.lambda * lo, m.lambda * hi),
                                                 std::max(m.lambda * lo, m.lambda * hi)};
                               },
                               [](const AlmostMathieuModel& m) {
                                 return Interval{-2.0 * std::abs(m.lambda), 2.0 * std::abs(m.lambda)};
                               },
                               [](const FibonacciModel& m) {
                                 return Interval{std::min(0.0, m.lambda), std::max(0.0, m.lambda)};
                               },
                               [](const PeriodicModel& m) {
                                 const auto [lo, hi] = std::minmax_element(m.values.begin(), m.values.end());
                                 return Interval{*lo, *hi};
                               }},
                    model.family);
}

Interval gershgorin_hull(const ModelSpec& model, const LatticeBox& box) {
  const Interval v = potential_range(model);
  const double reach = 2.0 * box.d;
  return {v.lo - reach, v.hi + reach};
}

FiniteOperator build_finite_operator(const ModelSpec& model, const LatticeBox& box, const RealizationSeed& seed) {
  return FiniteOperator(box, sample_potential(model, box, seed));
}

ModelSpec shift_realization(const ModelSpec& model, std::int64_t i) {
  ModelSpec out = model;
  std::visit(Overloaded{[](FreeModel&) {},
                        [i](AndersonModel& m) { m.shift += i; },
                        [i](AlmostMathieuModel& m) { m.shift += i; },
                        [i](FibonacciModel& m) { m.shift += i; },
                        [i](PeriodicModel& m) {
                          const auto p = static_cast<std::int64_t>(m.values.size());
                          const auto r = ((i % p) + p) % p;
                          std::rotate(m.values.begin(), m.values.begin() + r, m.values.end());
                        }},
             out.family);
  return out;
}

// ---------------------------------------------------------------------------
// Model files
// ---------------------------------------------------------------------------

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_number(std::string_view key, std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double x = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, x);
  if (ec != std::errc() || ptr != end || text.empty()) {
    fail("model key '" + std::string(key) + "': '" + std::string(text) + "' is not a number");
  }
  return x;
}

std::int64_t parse_integer(std::string_view key, std::string_view text) {
  text = trim(text);
  std::int64_t x = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, x);
  if (ec != std::errc() || ptr != end || text.empty()) {
    fail("model key '" + std::string(key) + "': '" + std::string(text) + "' is not an integer");
  }
  return x;
}

std::vector<double> parse_list(std::string_view key, std::string_view text) {
  std::vector<double> out;
  while (true) {
    const auto comma = text.find(',');
    out.push_back(parse_number(key, text.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

std::string join(const std::vector<double>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) s += ',';
    s += format_double(xs[i]);
  }
  return s;
}

}  // namespace

ModelSpec parse_model(std::string_view text) {
  std::map<std::string, std::string> kv;
  std::size_t lineno = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) fail("model line " + std::to_string(lineno) + ": expected key=value");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (!kv.emplace(key, value).second) fail("model key '" + key + "' given twice");
  }

  const auto fam = kv.find("family");
  if (fam == kv.end()) fail("model file has no 'family' key");
  const std::string family = fam->second;

  std::set<std::string> allowed{"family"};
  auto num = [&](const std::string& key, double fallback) {
    allowed.insert(key);
    const auto it = kv.find(key);
    return it == kv.end() ? fallback : parse_number(key, it->second);
  };
  auto integer = [&](const std::string& key, std::int64_t fallback) {
    allowed.insert(key);
    const auto it = kv.find(key);
    return it == kv.end() ? fallback : parse_integer(key, it->second);
  };
  auto list = [&](const std::string& key) -> std::vector<double> {
    allowed.insert(key);
    const auto it = kv.find(key);
    if (it == kv.end()) fail("model family '" + family + "' needs key '" + key + "'");
    return parse_list(key, it->second);
  };

  ModelSpec model;
  if (family == "free") {
    model = free_model();
  } else if (family == "anderson") {
    allowed.insert("dist");
    const auto dist_it = kv.find("dist");
    const std::string dist = dist_it == kv.end() ? "uniform" : dist_it->second;
    DisorderSpec disorder;
    if (dist == "uniform") {
      disorder = DisorderSpec::uniform(num("a", 0.0), num("b", 1.0));
    } else if (dist == "bernoulli") {
      const double v0 = num("a", 0.0);
      const double v1 = num("b", 1.0);
      disorder = DisorderSpec::bernoulli(v0, v1, num("p", 0.5));
    } else if (dist == "discrete") {
      auto values = list("values");
      disorder = DisorderSpec::discrete(std::move(values), list("probs"));
    } else {
      fail("unknown disorder distribution '" + dist + "'");
    }
    AndersonModel a{num("lambda", 1.0), disorder, static_cast<int>(integer("d", 1)), integer("shift", 0)};
    model = ModelSpec{a};
  } else if (family == "almost_mathieu") {
    model = ModelSpec{AlmostMathieuModel{num("lambda", 1.0), num("alpha", kGoldenFrequency), num("theta", 0.0),
                                         integer("shift", 0)}};
  } else if (family == "fibonacci") {
    model = ModelSpec{FibonacciModel{num("lambda", 1.0), num("theta", 0.0), integer("shift", 0)}};
  } else if (family == "periodic") {
    model = ModelSpec{PeriodicModel{list("values")}};
  } else {
    fail("unknown model family '" + family + "'");
  }

  for (const auto& [key, value] : kv) {
    if (!allowed.count(key)) fail("model key '" + key + "' is not valid for family '" + family + "'");
  }
  model.validate();
  return model;
}

ModelSpec load_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open model file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_model(ss.str());
}

std::string serialize_model(const ModelSpec& model) {
  std::map<std::string, std::string> kv;
  kv["family"] = std::string(model.family_name());
  std::visit(Overloaded{[](const FreeModel&) {},
                        [&](const AndersonModel& m) {
                          kv["lambda"] = format_double(m.lambda);
                          kv["d"] = std::to_string(m.d);
                          kv["dist"] = std::string(m.disorder.name());
                          if (m.shift != 0) kv["shift"] = std::to_string(m.shift);
                          std::visit(Overloaded{[&](const UniformDisorder& u) {
                                                  kv["a"] = format_double(u.a);
                                                  kv["b"] = format_double(u.b);
                                                },
                                                [&](const BernoulliDisorder& b) {
                                                  kv["a"] = format_double(b.v0);
                                                  kv["b"] = format_double(b.v1);
                                                  kv["p"] = format_double(b.p);
                                                },
                                                [&](const DiscreteDisorder& d) {
                                                  kv["values"] = join(d.values);
                                                  kv["probs"] = join(d.probs);
                                                }},
                                     m.disorder.kind());
                        },
                        [&](const AlmostMathieuModel& m) {
                          kv["lambda"] = format_double(m.lambda);
                          kv["alpha"] = format_double(m.alpha);
                          kv["theta"] = format_double(m.theta);
                          if (m.shift != 0) kv["shift"] = std::to_string(m.shift);
                        },
                        [&](const FibonacciModel& m) {
                          kv["lambda"] = format_double(m.lambda);
                          kv["theta"] = format_double(m.theta);
                          if (m.shift != 0) kv["shift"] = std::to_string(m.shift);
                        },
                        [&](const PeriodicModel& m) { kv["values"] = join(m.values); }},
             model.family);
  std::string out;
  for (const auto& [k, v] : kv) out += k + "=" + v + "\n";
  return out;
}

std::string model_hash(const ModelSpec& model) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(serialize_model(model))));
  return buf;
}

}  // namespace doslab
