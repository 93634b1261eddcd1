#include <doctest.h>

#include "recourse/core.hpp"
#include "recourse/intervals.hpp"

using namespace recourse;

TEST_CASE("normalize merges touching parts and keeps open gaps") {
  IntervalSet a{Interval::closed_open(0, 1), Interval::closed(1, 2), Interval::open(3, 4), Interval::open(4, 5)};
  REQUIRE(a.size() == 3);
  CHECK(a[0] == Interval::closed(0, 2));
  CHECK(a[1] == Interval::open(3, 4));
  CHECK(!a.contains(4.0));
  CHECK(IntervalSet{Interval::open(1, 1)}.empty());
  CHECK(IntervalSet{Interval::point(2)}.contains(2.0));
}

TEST_CASE("closure, interior and complement") {
  IntervalSet a{Interval::open(0, 1), Interval::closed_open(2, 3)};
  CHECK(closure(a) == IntervalSet{Interval::closed(0, 1), Interval::closed(2, 3)});
  CHECK(interior(a) == IntervalSet{Interval::open(0, 1), Interval::open(2, 3)});
  IntervalSet c = complement(a);
  CHECK(c.contains(0.0));
  CHECK(c.contains(1.0));
  CHECK(!c.contains(2.0));
  CHECK(c.contains(3.0));
  CHECK(complement(IntervalSet::line()).empty());
  CHECK(complement(IntervalSet{}) == IntervalSet::line());
}

TEST_CASE("boolean operations respect endpoint closedness") {
  IntervalSet a{Interval::closed(0, 2)}, b{Interval::open(1, 3)};
  CHECK(intersection(a, b) == IntervalSet{Interval::open_closed(1, 2)});
  CHECK(difference(a, b) == IntervalSet{Interval::closed(0, 1)});
  CHECK(set_union(a, b) == IntervalSet{Interval::closed_open(0, 3)});
  CHECK(intersects(a, b));
  CHECK(!intersects(IntervalSet{Interval::open(0, 1)}, IntervalSet{Interval::open(1, 2)}));
}

TEST_CASE("separation") {
  IntervalSet l{Interval::open(-1, 0)}, r{Interval::open(0, 1)};
  CHECK(is_separated(l, r));
  CHECK(min_gap(l, r) == 0.0);
  CHECK(!is_separated(IntervalSet{Interval::open_closed(-1, 0)}, r));
  CHECK(!is_separated(IntervalSet{Interval::closed(-1, 0)}, IntervalSet{Interval::closed(0, 1)}));
  CHECK(is_separated(IntervalSet{}, r));
  CHECK(min_gap(IntervalSet{Interval::closed(-3, -1)}, IntervalSet{Interval::closed(2, 4)}) == 3.0);
  CHECK(min_gap(IntervalSet{}, r) == kInf);
  CHECK_THROWS_AS(min_gap(IntervalSet{Interval::closed(0, 1)}, IntervalSet{Interval::open(1, 2)}), NotSeparated);
}

TEST_CASE("distance and part lookup") {
  IntervalSet a{Interval::open(0, 1), Interval::closed(3, 4)};
  CHECK(distance(2.0, a) == 1.0);
  CHECK(distance(0.5, a) == 0.0);
  CHECK(distance(-2.0, a) == 2.0);
  CHECK(a.part_of(3.5) == 1);
  CHECK(a.part_of(1.0) == -1);
  CHECK(distance(0.0, IntervalSet{}) == kInf);
}

TEST_CASE("text round trip") {
  IntervalSet a{Interval::open(-kInf, -1), Interval::closed_open(0.5, 2), Interval::point(3)};
  CHECK(parse_interval_set(to_string(a)) == a);
  CHECK(parse_interval("(0, 1]") == Interval::open_closed(0, 1));
  CHECK(parse_interval_set(to_string(IntervalSet{})).empty());
}
