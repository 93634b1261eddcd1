#pragma once
// Pointwise recourse-sensitivity checks, continuity probes and the battery of
// named counterexample claims.

#include <string>
#include <vector>

#include <json.hpp>

#include "recourse/core.hpp"
#include "recourse/exec.hpp"

namespace recourse {

enum class VerdictStatus { Satisfied, Violated, Vacuous };
std::string status_name(VerdictStatus s);

struct Resolution {
  std::size_t geometric = 64;      // from delta * 2^-20 to delta
  std::size_t uniform = 256;       // delta/n .. delta
  std::size_t ball_samples = 4096;  // full-ball emptiness search
  std::uint64_t seed = 0x5eedULL;
};

inline constexpr double kZeroAttribution = 1e-12;

struct RecourseVerdict {
  VerdictStatus status = VerdictStatus::Vacuous;
  Vec at;
  Vec phi;
  Vec witness;        // Satisfied: y in T(x); Violated: a y in T(x) phi missed
  double step = 0.0;  // Satisfied: distance moved along phi
  std::string searched;
  std::size_t samples = 0;  // points tried by the emptiness search
};

// Step grid used along rays: geometric plus uniform, sorted, in (0, delta].
std::vector<double> ray_steps(double delta, const Resolution& res = {});

// Search A(x) for a point with utility >= tau. Exact along rays for 1D and
// axis/direction constraints; sampled for full balls.
bool find_target(const RecourseProblem& problem, Point x, const Resolution& res, Vec* witness,
                 std::size_t* samples = nullptr, std::string* searched = nullptr);

RecourseVerdict check_recourse_at(const RecourseProblem& problem, const Evaluator& phi, Point x,
                                  const Resolution& res = {});
RecourseVerdict check_recourse_phi(const RecourseProblem& problem, Point x, const Vec& phi,
                                   const Resolution& res = {});

struct ScanReport {
  std::size_t total = 0, satisfied = 0, violated = 0, vacuous = 0;
  std::vector<RecourseVerdict> flagged;  // non-Satisfied, sorted by point
};

ScanReport scan_recourse(const RecourseProblem& problem, const Evaluator& phi, const std::vector<Vec>& grid,
                         const Resolution& res = {}, Exec exec = Exec::Parallel);

struct Jump {
  Vec a, b;            // the pair at the base step
  Vec location;        // midpoint
  std::size_t axis = 0;
  double separation = 0.0;
  double magnitude = 0.0;
  double magnitude_half = 0.0;     // pair shrunk about the midpoint
  double magnitude_quarter = 0.0;
  bool discontinuity = false;      // magnitude stable within 25% under two halvings
};

struct JumpReport {
  double pair_step = 0.0;
  double threshold = 0.0;
  std::size_t pairs = 0;
  std::vector<Jump> jumps;
  std::size_t discontinuities() const;
};

// For every grid point x and axis i, compare phi(x) with phi(x + step e_i).
JumpReport continuity_probe(const Evaluator& phi, const std::vector<Vec>& grid, double pair_step,
                            double jump_threshold, Exec exec = Exec::Parallel);

nlohmann::json to_json(const RecourseVerdict& v);
nlohmann::json to_json(const ScanReport& r);
nlohmann::json to_json(const JumpReport& r);

// Grid helpers.
std::vector<Vec> grid_1d(double lo, double hi, std::size_t n);
std::vector<Vec> grid_2d(double lo0, double hi0, double lo1, double hi1, std::size_t n0, std::size_t n1);

// ---------------------------------------------------------------------------
// Counterexample battery
// ---------------------------------------------------------------------------

struct ClaimResult {
  std::string id;
  std::string description;
  bool passed = false;
  nlohmann::json detail;
};

struct BatteryReport {
  std::vector<ClaimResult> claims;
  bool all_passed() const;
};

BatteryReport run_counterexample_battery(Exec exec = Exec::Parallel);
nlohmann::json to_json(const BatteryReport& r);
std::string battery_table(const BatteryReport& r);

}  // namespace recourse
