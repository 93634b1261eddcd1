#pragma once
// One-dimensional characterization: the sets L (recourse by moving left), R
// (moving right) and O (staying put), the decomposition decision, and the
// distance-function construction of a continuous recourse-sensitive phi.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "recourse/core.hpp"
#include "recourse/exec.hpp"
#include "recourse/intervals.hpp"

namespace recourse {

enum class LroMode { Exact, Sampled };

struct SampleGrid {
  double lo = -5.0;
  double hi = 5.0;
  double step = 1e-3;
};

struct LRO {
  IntervalSet L, R, O;
  LroMode mode = LroMode::Exact;
  double grid_step = 0.0;  // Sampled only
  SampleGrid grid;         // Sampled only
};

// Exact closed forms exist for quad (diff, class), gauss (ratio_inv),
// thm1 (diff, 0 < tau <= z2 - z1) and notch (diff, admissible tau). Other
// combinations throw UnsupportedModel in Exact mode.
LRO compute_lro(const RecourseProblem& problem, LroMode mode, const SampleGrid& grid = {},
                Exec exec = Exec::Parallel);
LRO lro_from_sets(IntervalSet L, IntervalSet R, IntervalSet O = {});

// A 1D problem whose L/R/O are exactly the given sets: f(x) = x and a custom
// utility that is 1 when the move direction matches membership. Lets hand-built
// fixtures go through the generic recourse checks.
RecourseProblem indicator_problem(const LRO& lro, double delta = 1.0);

struct Decomposition {
  std::vector<Interval> L, R, O;
};
Decomposition decompose_maximal(const LRO& lro);

struct IndexSets {
  std::vector<std::size_t> I_tilde, J_tilde, K_tilde;
};
// Throws NonEmptyO when O is nonempty.
IndexSets index_sets(const std::vector<Interval>& L, const std::vector<Interval>& R,
                     const std::vector<Interval>& O = {});

struct Witness {
  Interval left;   // forced into L~
  Interval right;  // forced into R~
  double left_forced = 0.0;   // in L \ (R u O)
  double right_forced = 0.0;  // in R \ (L u O)
  double shared = 0.0;        // in cl(left) n right or left n cl(right)
};

struct Certificate {
  bool possible = false;
  IntervalSet L_tilde, R_tilde, O_tilde;
  IndexSets index;               // of the final L', R' decomposition
  std::uint64_t partition_mask = 0;  // bit k set: K~[k] goes to L~
  std::uint64_t o_mask = 0;          // bit k set: k-th coverable O part absorbed into L~/R~
  std::optional<Witness> witness;
  LRO lro;
};

inline constexpr std::size_t kMaxK = 20;

// Possible (with a decomposition satisfying all three conditions, checked
// exactly) or Impossible (with a forced-overlap witness). Throws KTooLarge and
// NeedsManualDecomposition.
Certificate decide(const LRO& lro, Exec exec = Exec::Parallel);

// Exact check of the three decomposition conditions against lro.
bool check_decomposition(const LRO& lro, const IntervalSet& Lt, const IntervalSet& Rt, const IntervalSet& Ot,
                         std::string* why = nullptr);
// Exact check of a witness: both forced points verified, intervals not separated.
bool check_witness(const LRO& lro, const Witness& w, std::string* why = nullptr);

struct ConstructedAttribution {
  IntervalSet U, V;  // open neighborhoods of L~ and R~
  IntervalSet L_tilde, R_tilde, O_tilde;

  double operator()(double x) const;
  Evaluator evaluator() const;
};

// Requires a Possible certificate.
ConstructedAttribution construct_attribution(const Certificate& cert);

std::string mode_name(LroMode m);
nlohmann::json to_json(const LRO& lro);
nlohmann::json to_json(const Certificate& cert);

}  // namespace recourse
