#pragma once
// Finite unions of real intervals with open/closed endpoints. All comparisons
// are exact.

#include <limits>
#include <string>
#include <vector>

namespace recourse {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool lo_closed = true;
  bool hi_closed = true;

  static Interval closed(double a, double b) { return {a, b, true, true}; }
  static Interval open(double a, double b) { return {a, b, false, false}; }
  static Interval closed_open(double a, double b) { return {a, b, true, false}; }
  static Interval open_closed(double a, double b) { return {a, b, false, true}; }
  static Interval point(double a) { return {a, a, true, true}; }
  static Interval line() { return {-kInf, kInf, false, false}; }

  // Nonempty, with open infinite endpoints.
  bool valid() const;
  bool contains(double x) const;
  double length() const { return hi - lo; }
  bool operator==(const Interval& o) const = default;
};

class IntervalSet {
 public:
  IntervalSet() = default;
  // Normalizes.
  IntervalSet(std::vector<Interval> parts);  // NOLINT(google-explicit-constructor)
  IntervalSet(std::initializer_list<Interval> parts) : IntervalSet(std::vector<Interval>(parts)) {}

  static IntervalSet empty_set() { return {}; }
  static IntervalSet line() { return IntervalSet(std::vector<Interval>{Interval::line()}); }

  const std::vector<Interval>& parts() const { return parts_; }
  bool empty() const { return parts_.empty(); }
  std::size_t size() const { return parts_.size(); }
  const Interval& operator[](std::size_t i) const { return parts_[i]; }

  bool contains(double x) const;
  // Index of the part containing x, or -1.
  int part_of(double x) const;
  bool operator==(const IntervalSet& o) const = default;

 private:
  std::vector<Interval> parts_;
};

// Sort and merge touching or overlapping parts; drops invalid intervals.
IntervalSet normalize(std::vector<Interval> parts);

IntervalSet closure(const IntervalSet& a);
IntervalSet interior(const IntervalSet& a);
IntervalSet complement(const IntervalSet& a);
IntervalSet set_union(const IntervalSet& a, const IntervalSet& b);
IntervalSet intersection(const IntervalSet& a, const IntervalSet& b);
IntervalSet difference(const IntervalSet& a, const IntervalSet& b);
bool contains(const IntervalSet& a, double x);
bool intersects(const IntervalSet& a, const IntervalSet& b);

// cl(A) n B = {} and A n cl(B) = {}.
bool is_separated(const IntervalSet& a, const IntervalSet& b);
// inf |a - b|; +inf if either set is empty. Throws NotSeparated otherwise.
double min_gap(const IntervalSet& a, const IntervalSet& b);
// inf over a in A of |x - a|; +inf for the empty set.
double distance(double x, const IntervalSet& a);

std::string to_string(const Interval& iv);
std::string to_string(const IntervalSet& s);
Interval parse_interval(const std::string& text);
IntervalSet parse_interval_set(const std::string& text);
std::string format_real(double v);

}  // namespace recourse
