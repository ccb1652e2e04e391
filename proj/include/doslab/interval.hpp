#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace doslab {

/// Closed interval [lo, hi]; either end may be infinite.
struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();

  double length() const { return hi - lo; }
  bool contains(double x) const { return x >= lo && x <= hi; }
  bool interior_contains(double x) const { return x > lo && x < hi; }

  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Parses "a,b"; "-inf"/"inf" are accepted.
Interval parse_interval(const std::string& text);

/// Finite union of disjoint closed intervals, sorted, with
/// a_k <= b_k < a_{k+1}.
class IntervalSet {
 public:
  IntervalSet() = default;
  /// Sorts and merges overlapping or touching pieces.
  explicit IntervalSet(std::vector<Interval> pieces);

  std::span<const Interval> intervals() const { return pieces_; }
  std::size_t size() const { return pieces_.size(); }
  bool empty() const { return pieces_.empty(); }

  bool contains(double x) const;
  bool interior_contains(double x) const;
  /// Every piece of *this lies inside `other` widened by `slack` at both ends.
  bool subset_of(const IntervalSet& other, double slack = 0.0) const;
  /// Closure of window \ *this; zero-length pieces are dropped.
  IntervalSet complement_within(const Interval& window) const;
  IntervalSet intersect(const Interval& window) const;

 private:
  std::vector<Interval> pieces_;
};

double lebesgue_measure(const IntervalSet& s);

}  // namespace doslab
