#include <cmath>

#include <doctest.h>

#include "recourse/attributions.hpp"
#include "recourse/models.hpp"
#include "recourse/verify.hpp"

using namespace recourse;

TEST_CASE("ray steps are sorted and end at delta") {
  auto s = ray_steps(2.0);
  REQUIRE(!s.empty());
  CHECK(s.back() == 2.0);
  CHECK(s.front() > 0.0);
  for (std::size_t i = 1; i < s.size(); ++i) CHECK(s[i] > s[i - 1]);
}

TEST_CASE("verdicts on x^2") {
  RecourseProblem p(models::quad(), UtilitySpec::difference(), 1.0, 2.0);
  double x = 0.5;
  CHECK(check_recourse_phi(p, Point(&x, 1), {1.0}).status == VerdictStatus::Satisfied);
  // Moving left from 0.5 by at most 2 reaches x^2 = 2.25 only at -1.5: still a target.
  CHECK(check_recourse_phi(p, Point(&x, 1), {-1.0}).status == VerdictStatus::Satisfied);
  double z = 0.0;
  RecourseVerdict v = check_recourse_phi(p, Point(&z, 1), {0.0});
  CHECK(v.status == VerdictStatus::Violated);
  CHECK(v.witness.size() == 1);
  CHECK(std::abs(v.witness[0]) >= 1.0);
  RecourseProblem far(models::quad(), UtilitySpec::difference(), 100.0, 1.0);
  CHECK(check_recourse_phi(far, Point(&z, 1), {1.0}).status == VerdictStatus::Vacuous);
}

TEST_CASE("scan and probe") {
  RecourseProblem p(models::circle(), UtilitySpec::class_score(), 0.0, 1.0);
  Evaluator phi = projection_evaluator(default_family_builder(p));
  ScanReport r = scan_recourse(p, phi, grid_2d(-0.8, 0.8, -0.8, 0.8, 9, 9));
  CHECK(r.total == 81);
  CHECK(r.violated == 0);
  Evaluator smooth = [](Point x) { return Vec{std::sin(x[0]), std::cos(x[1])}; };
  CHECK(continuity_probe(smooth, grid_2d(-1, 1, -1, 1, 11, 11), 1e-3, 0.01).jumps.empty());
  JumpReport j = continuity_probe(phi, {Vec{-1e-3, 0}}, 2e-3, 1.0);
  bool along_x = false;
  for (const Jump& jump : j.jumps) along_x = along_x || (jump.axis == 0 && jump.discontinuity && jump.magnitude > 1.9);
  CHECK(along_x);
}

TEST_CASE("sparse targets are searched along axes") {
  RecourseProblem p(models::linear({1.0, 1.0}), UtilitySpec::class_score(), 1.0, 1.5, ConstraintSpec::sparse(1));
  Vec x{0, 0}, w;
  REQUIRE(find_target(p, x, {}, &w));
  CHECK(p.in_target(x, w));
  CHECK((w[0] == 0.0 || w[1] == 0.0));
  RecourseProblem none(models::linear({1.0, 1.0}), UtilitySpec::class_score(), 2.0, 1.5, ConstraintSpec::sparse(1));
  CHECK(!find_target(none, x, {}, &w));
}

TEST_CASE("counterexample battery passes") {
  BatteryReport r = run_counterexample_battery();
  for (const auto& c : r.claims) CHECK_MESSAGE(c.passed, c.id);
  CHECK(r.all_passed());
  CHECK(to_json(r)["all_passed"] == true);
  CHECK(battery_table(r).find("example2_ig_origin") != std::string::npos);
}
