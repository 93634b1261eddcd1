#pragma once
// Single-feature characterization in d dimensions: per-axis sets L^i, R^i and
// O, the pairwise-separation decision, and the per-coordinate construction.

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "recourse/core.hpp"
#include "recourse/exec.hpp"

namespace recourse {

enum class RegionRep { Exact, Raster };
std::string rep_name(RegionRep r);

// Cell-centred grid over the box [lo, hi] with n[k] cells along axis k.
struct RasterSpec {
  Vec lo{-2.0, -2.0};
  Vec hi{2.0, 2.0};
  std::vector<std::size_t> n{400, 400};

  std::size_t dim() const { return n.size(); }
  std::size_t cells() const;
  double step(std::size_t axis) const { return (hi[axis] - lo[axis]) / static_cast<double>(n[axis]); }
  Vec center(std::size_t index) const;
  std::vector<std::size_t> unflatten(std::size_t index) const;
  std::size_t flatten(const std::vector<std::size_t>& idx) const;
  // Cell containing x (closed on the low side), or npos outside the box.
  std::size_t locate(Point x) const;
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

// Set index s = 2 * axis + side, side 0 = L (decrease coordinate), 1 = R.
std::string axis_set_name(std::size_t s);

using Mask = std::vector<char>;

struct AxisRegions {
  RegionRep rep = RegionRep::Raster;
  std::size_t dim = 2;
  double delta = 0.0;
  std::string model_id;
  // Raster
  RasterSpec grid;
  std::vector<Mask> sets;  // 2 * dim masks
  Mask O;
  // Exact: membership and connected-component label (-1 when not a member).
  std::function<int(std::size_t s, Point x)> component;
  std::function<bool(Point x)> in_O;

  bool member(std::size_t s, Point x) const;  // exact: component >= 0; raster: cell lookup
};

// Exact mode: circle_sq with the flip utility and tau = 0. Raster mode: any
// model, grid from `spec`. Constraint must be Sparse(1).
AxisRegions compute_axis_regions(const RecourseProblem& problem, RegionRep rep, const RasterSpec& spec = {},
                                 Exec exec = Exec::Parallel);

struct AxisWitness {
  std::size_t first = 0, second = 0;  // set indices
  Vec point;                          // in both forced sets (or adjacent cells)
  Vec first_forced, second_forced;    // exclusive points of the two forced components
};

struct AxisCertificate {
  bool possible = false;
  RegionRep rep = RegionRep::Raster;
  std::string resolution;  // raster verdicts hold at this grid resolution
  std::vector<Mask> assigned;  // raster, 2 * dim
  Mask O_tilde;
  std::optional<AxisWitness> witness;  // from the first conflicting pair
  std::vector<std::pair<std::size_t, std::size_t>> conflicts;  // every forced pair that is not separated
};

// Pairs are examined across axes first, then within an axis, each in index
// order; exact mode checks the cross-axis pairs only.
AxisCertificate decide_axes(const AxisRegions& regions, Exec exec = Exec::Parallel);

struct AxesAttribution {
  RasterSpec grid;
  std::vector<Mask> neg;  // U^i (attribution component i < 0)
  std::vector<Mask> pos;  // V^i
  std::size_t dilation = 0;
  int rings = 8;

  Vec operator()(Point x) const;
  Evaluator evaluator() const;
};

// Requires a Possible raster certificate.
AxesAttribution construct_axes_attribution(const AxisCertificate& cert, const AxisRegions& regions);

// 2D masks as binary PGM (row 0 at the top, largest coordinate first).
void write_pgm(const std::string& path, const Mask& mask, const RasterSpec& grid);

nlohmann::json to_json(const AxisCertificate& cert, const AxisRegions& regions);

}  // namespace recourse
