#include "doslab/interval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "doslab/error.hpp"

namespace doslab {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

double parse_end(const std::string& raw) {
  const std::string s = trim(raw);
  if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  require(!s.empty() && end == s.c_str() + s.size() && std::isfinite(v), "bad interval endpoint '" + s + "'");
  return v;
}

}  // namespace

Interval parse_interval(const std::string& text) {
  const auto comma = text.find(',');
  require(comma != std::string::npos && text.find(',', comma + 1) == std::string::npos,
          "interval must look like a,b: '" + text + "'");
  Interval out{parse_end(text.substr(0, comma)), parse_end(text.substr(comma + 1))};
  require(out.lo <= out.hi, "interval endpoints reversed: '" + text + "'");
  return out;
}

IntervalSet::IntervalSet(std::vector<Interval> pieces) {
  std::erase_if(pieces, [](const Interval& p) { return std::isnan(p.lo) || std::isnan(p.hi) || p.lo > p.hi; });
  std::sort(pieces.begin(), pieces.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  for (const auto& p : pieces) {
    if (!pieces_.empty() && p.lo <= pieces_.back().hi) {
      pieces_.back().hi = std::max(pieces_.back().hi, p.hi);
    } else {
      pieces_.push_back(p);
    }
  }
}

bool IntervalSet::contains(double x) const {
  return std::any_of(pieces_.begin(), pieces_.end(), [x](const Interval& p) { return p.contains(x); });
}

bool IntervalSet::interior_contains(double x) const {
  return std::any_of(pieces_.begin(), pieces_.end(), [x](const Interval& p) { return p.interior_contains(x); });
}

bool IntervalSet::subset_of(const IntervalSet& other, double slack) const {
  for (const auto& p : pieces_) {
    const bool inside = std::any_of(other.pieces_.begin(), other.pieces_.end(), [&](const Interval& q) {
      return p.lo >= q.lo - slack && p.hi <= q.hi + slack;
    });
    if (!inside) return false;
  }
  return true;
}

IntervalSet IntervalSet::complement_within(const Interval& window) const {
  std::vector<Interval> out;
  double cursor = window.lo;
  for (const auto& p : pieces_) {
    if (p.hi < window.lo) continue;
    if (p.lo > window.hi) break;
    if (p.lo > cursor) out.push_back({cursor, p.lo});
    cursor = std::max(cursor, p.hi);
  }
  if (cursor < window.hi) out.push_back({cursor, window.hi});
  return IntervalSet(std::move(out));
}

IntervalSet IntervalSet::intersect(const Interval& window) const {
  std::vector<Interval> out;
  for (const auto& p : pieces_) {
    const double lo = std::max(p.lo, window.lo);
    const double hi = std::min(p.hi, window.hi);
    if (lo <= hi) out.push_back({lo, hi});
  }
  return IntervalSet(std::move(out));
}

double lebesgue_measure(const IntervalSet& s) {
  double total = 0.0;
  for (const auto& p : s.intervals()) total += p.length();
  return total;
}

}  // namespace doslab
