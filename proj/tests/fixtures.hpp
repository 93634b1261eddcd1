#pragma once
// Hand-built L/R/O instances for the 1D decision procedure.

#include <string>
#include <vector>

#include "recourse/intervals.hpp"
#include "recourse/onedim.hpp"

namespace fixtures {

using recourse::Interval;
using recourse::IntervalSet;
using recourse::kInf;

struct LroFixture {
  std::string name;
  IntervalSet L, R, O;
  bool possible;
  int k_tilde;  // expected |K~|; -1 when not checked
};

inline Interval op(double a, double b) { return Interval::open(a, b); }
inline Interval cl(double a, double b) { return Interval::closed(a, b); }

inline std::vector<LroFixture> lro_fixtures() {
  return {
      // Possible, O empty
      {"halflines_apart", {op(-kInf, -1)}, {op(1, kInf)}, {}, true, 0},
      {"halflines_open_at_zero", {op(-kInf, 0)}, {op(0, kInf)}, {}, true, 0},
      {"right_inside_left", {op(-3, 3)}, {op(-1, 1)}, {}, true, 0},
      {"left_inside_right", {op(-1, 1)}, {op(-3, 3)}, {}, true, 0},
      {"closed_halflines", {Interval{-kInf, -1, false, true}}, {Interval{1, kInf, true, false}}, {}, true, 0},
      {"left_inside_right_merged", {op(-4, -3), op(-2, 0)}, {Interval::open_closed(-2, 0), Interval::closed_open(0, 2)},
       {}, true, 0},
      {"shared_single", {op(-2, 2)}, {op(-2, 2)}, {}, true, 1},
      {"shared_middle", {op(-5, -3), op(-1, 1)}, {op(-1, 1), op(3, 5)}, {}, true, 1},
      {"shared_point", {cl(-3, -2), Interval::point(0)}, {Interval::point(0), cl(2, 3)}, {}, true, 1},
      {"shared_next_to_right", {op(-kInf, -2), op(-1, 0)}, {op(-1, 0), op(0, kInf)}, {}, true, 1},
      {"shared_two", {op(-6, -4), op(-2, -1), op(1, 2)}, {op(-2, -1), op(1, 2), op(4, 6)}, {}, true, 2},
      {"shared_two_unbounded", {op(-kInf, -5), op(-3, -2), op(2, 3)}, {op(-3, -2), op(2, 3), op(5, kInf)}, {}, true, 2},
      {"shared_three", {op(-7, -6), op(-4, -3), op(-1, 1), op(3, 4)}, {op(-4, -3), op(-1, 1), op(3, 4), op(6, 7)}, {},
       true, 3},
      // Possible, O nonempty
      {"stay_between", {op(-kInf, -1)}, {op(1, kInf)}, {cl(-1, 1)}, true, 0},
      {"stay_isolated", {op(-3, -1)}, {op(1, 3)}, {cl(-0.5, 0.5)}, true, 0},
      {"stay_absorbed", {op(-3, 1)}, {op(2, 4)}, {op(-1, 0)}, true, 0},
      {"stay_next_to_shared", {op(-4, -3), op(0, 1)}, {op(0, 1), op(3, 4)}, {cl(1, 2)}, true, 1},
      {"stay_with_three_shared", {op(-9, -8), op(-6, -5), op(-3, -2), op(2, 3)},
       {op(-6, -5), op(-3, -2), op(2, 3), op(8, 9)}, {cl(-1, 1)}, true, 3},
      // Impossible
      {"crossing", {op(-3, 1)}, {op(-1, 3)}, {}, false, -1},
      {"crossing_unbounded", {op(-kInf, 1)}, {op(-1, kInf)}, {}, false, -1},
      {"shared_endpoint", {Interval::open_closed(-3, 0)}, {Interval::closed_open(0, 3)}, {}, false, -1},
      {"closed_meets_open", {Interval::open_closed(-2, 0)}, {op(0, 2)}, {}, false, -1},
      {"ramp_shape", {op(-kInf, -2), op(-0.75, 0.125)}, {op(-0.125, 0.75), op(2, kInf)}, {}, false, -1},
      {"crossing_with_shared", {op(-5, -4), op(-1, 0.5)}, {op(-5, -4), op(-0.5, 1)}, {}, false, -1},
      {"crossing_with_stay", {op(-3, 0.5)}, {op(-0.5, 3)}, {cl(4, 5)}, false, -1},
  };
}

}  // namespace fixtures
