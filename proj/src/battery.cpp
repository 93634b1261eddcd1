#include <cmath>
#include <cstdio>
#include <sstream>

#include "recourse/attributions.hpp"
#include "recourse/models.hpp"
#include "recourse/multidim.hpp"
#include "recourse/onedim.hpp"
#include "recourse/verify.hpp"

namespace recourse {

bool BatteryReport::all_passed() const {
  for (const auto& c : claims)
    if (!c.passed) return false;
  return !claims.empty();
}

namespace {

ClaimResult example1() {
  ClaimResult c{"example1_smoothgrad", "SmoothGrad on x^2 is 2x and gives no recourse at x = 0", false, {}};
  Model m = models::quad();
  RecourseProblem p(m, UtilitySpec::difference(), 1.0, 2.0);
  SmoothGradConfig cfg;
  cfg.analytic = true;
  Evaluator phi = [&](Point x) { return smoothgrad(m, x, cfg, Exec::Serial).weights; };
  bool exact = true;
  for (int k = -50; k < 50; ++k) {
    double x = 0.07 * k + 0.01;
    if (phi(Point(&x, 1))[0] != 2.0 * x) exact = false;
  }
  double z = 0.0;
  RecourseVerdict at0 = check_recourse_at(p, phi, Point(&z, 1));
  bool far_ok = true;
  for (double x : {-3.0, -1.0, -0.1, 0.1, 1.0, 3.0})
    far_ok = far_ok && check_recourse_at(p, phi, Point(&x, 1)).status == VerdictStatus::Satisfied;
  c.passed = exact && at0.status == VerdictStatus::Violated && far_ok;
  c.detail = {{"equals_2x", exact}, {"verdict_at_0", to_json(at0)}, {"satisfied_away_from_0", far_ok}};
  return c;
}

RecourseProblem example2_problem() {
  return RecourseProblem(models::gauss(), UtilitySpec::ratio(true), 2.0, std::sqrt(std::log(2.0)) + 0.2);
}

ClaimResult example2(bool beyond) {
  ClaimResult c{beyond ? "example2_ig_beyond_delta" : "example2_ig_origin",
                beyond ? "Integrated Gradients points the wrong way for x > delta"
                       : "Integrated Gradients gives no recourse at x = 0",
                false,
                {}};
  RecourseProblem p = example2_problem();
  const Model& m = p.model();
  IGConfig cfg;
  cfg.steps = 2000;
  Evaluator phi = [&](Point x) { return integrated_gradients(m, x, cfg).weights; };
  double one = 1.0;
  double ig1 = phi(Point(&one, 1))[0];
  bool closed_form = std::abs(ig1 - (std::exp(-1.0) - 1.0)) <= 1e-6;
  double x = beyond ? p.delta() + 0.1 : 0.0;
  RecourseVerdict v = check_recourse_at(p, phi, Point(&x, 1));
  c.passed = closed_form && v.status == VerdictStatus::Violated;
  c.detail = {{"ig_at_1", ig1}, {"closed_form", std::exp(-1.0) - 1.0}, {"delta", p.delta()}, {"verdict", to_json(v)}};
  return c;
}

ClaimResult example3() {
  ClaimResult c{"example3_projection_jump",
                "The projection attribution on the unit circle is recourse sensitive but jumps at the origin",
                false,
                {}};
  RecourseProblem p(models::circle(), UtilitySpec::class_score(), 0.0, 1.0);
  Evaluator phi = projection_evaluator(default_family_builder(p));
  JumpReport jr = continuity_probe(phi, {Vec{-1e-3, 0.0}}, 2e-3, 1.0, Exec::Serial);
  double mag = jr.jumps.empty() ? 0.0 : jr.jumps.front().magnitude;
  bool jump = !jr.jumps.empty() && mag >= 1.9 && jr.jumps.front().discontinuity;
  std::vector<Vec> grid;
  for (int i = 0; i < 20; ++i)
    for (int k = 0; k < 20; ++k) {
      double r = 0.05 + 0.9 * i / 19.0, t = 2.0 * M_PI * k / 20.0 + 0.1;
      grid.push_back({r * std::cos(t), r * std::sin(t)});
    }
  ScanReport sr = scan_recourse(p, phi, grid, {}, Exec::Serial);
  c.passed = jump && sr.violated == 0;
  c.detail = {{"jump", to_json(jr)}, {"scan", to_json(sr)}};
  return c;
}

ClaimResult quad_overlap() {
  ClaimResult c{"quad_overlap", "L and R overlap on [-(d^2-t)/(2d), (d^2-t)/(2d)] for x^2", false, {}};
  RecourseProblem p(models::quad(), UtilitySpec::difference(), 1.0, 2.0);
  const double formula = (2.0 * 2.0 - 1.0) / (2.0 * 2.0);
  LRO ex = compute_lro(p, LroMode::Exact);
  IntervalSet ov = intersection(ex.L, ex.R);
  bool exact_ok = ov.size() == 1 && std::abs(ov[0].lo + formula) <= 1e-9 && std::abs(ov[0].hi - formula) <= 1e-9;
  SampleGrid g{-3.0, 3.0, 1e-3};
  LRO sm = compute_lro(p, LroMode::Sampled, g, Exec::Serial);
  IntervalSet ovs = intersection(sm.L, sm.R);
  bool sampled_ok = ovs.size() == 1 && std::abs(ovs[0].lo + formula) <= 2e-3 && std::abs(ovs[0].hi - formula) <= 2e-3;
  c.passed = exact_ok && sampled_ok;
  c.detail = {{"formula", formula}, {"exact", to_string(ov)}, {"sampled", to_string(ovs)}};
  return c;
}

ClaimResult thm1() {
  ClaimResult c{"thm1_forced_overlap", "The ramp model admits no continuous recourse-sensitive attribution", false, {}};
  RecourseProblem p(models::thm1(0.0, 1.0, 1.0), UtilitySpec::difference(), 0.5, 1.0);
  Certificate cert = decide(compute_lro(p, LroMode::Exact), Exec::Serial);
  bool ok = !cert.possible && cert.witness && check_witness(cert.lro, *cert.witness) &&
            std::abs(cert.witness->shared) <= 0.125;
  c.passed = ok;
  c.detail = to_json(cert);
  return c;
}

ClaimResult circle_axes() {
  ClaimResult c{"circle_sq_axis", "Single-feature recourse on the squared circle is impossible", false, {}};
  nlohmann::json per = nlohmann::json::array();
  bool ok = true;
  for (double delta : {0.6, 1.0}) {
    RecourseProblem p(models::circle_sq(), UtilitySpec::flip(), 0.0, delta, ConstraintSpec::sparse(1));
    AxisRegions r = compute_axis_regions(p, RegionRep::Exact);
    AxisCertificate cert = decide_axes(r, Exec::Serial);
    bool this_ok = !cert.possible && cert.witness.has_value();
    if (this_ok) {
      const Vec& w = cert.witness->point;
      double n2 = dot(w, w);
      this_ok = std::abs(std::abs(w[0]) - std::abs(w[1])) <= 1e-12 && n2 > 1.0 && n2 < std::min(2.0, 2.0 * delta);
    }
    ok = ok && this_ok;
    per.push_back(to_json(cert, r));
  }
  c.passed = ok;
  c.detail = per;
  return c;
}

}  // namespace

BatteryReport run_counterexample_battery(Exec exec) {
  (void)exec;  // claims run serially so reports do not depend on the thread count
  BatteryReport rep;
  rep.claims.push_back(example1());
  rep.claims.push_back(example2(false));
  rep.claims.push_back(example2(true));
  rep.claims.push_back(example3());
  rep.claims.push_back(quad_overlap());
  rep.claims.push_back(thm1());
  rep.claims.push_back(circle_axes());
  return rep;
}

nlohmann::json to_json(const BatteryReport& r) {
  nlohmann::json j;
  j["all_passed"] = r.all_passed();
  nlohmann::json claims = nlohmann::json::array();
  for (const auto& c : r.claims)
    claims.push_back({{"id", c.id}, {"description", c.description}, {"passed", c.passed}, {"detail", c.detail}});
  j["claims"] = claims;
  return j;
}

std::string battery_table(const BatteryReport& r) {
  std::ostringstream os;
  char line[160];
  for (const auto& c : r.claims) {
    std::snprintf(line, sizeof line, "%-26s %-4s  %s\n", c.id.c_str(), c.passed ? "PASS" : "FAIL",
                  c.description.c_str());
    os << line;
  }
  return os.str();
}

}  // namespace recourse
