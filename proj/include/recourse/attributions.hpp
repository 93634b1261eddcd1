#pragma once
// Attribution methods (gradient, SmoothGrad, Integrated Gradients, LIME,
// Kernel SHAP) and counterfactual projection attributions.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "recourse/core.hpp"
#include "recourse/exec.hpp"

namespace recourse {

struct SmoothGradConfig {
  double sigma = 0.1;
  std::size_t samples = 1000;
  std::uint64_t seed = 0;
  // Closed form for models with an affine gradient: E[grad f(x + a)] = grad f(x).
  bool analytic = false;
};

struct IGConfig {
  Vec baseline;  // empty means all zeros
  std::size_t steps = 512;
  // Closed form for affine gradients: (x - x0) * grad f((x + x0) / 2).
  bool analytic = false;
};

struct LimeConfig {
  std::size_t samples = 2000;
  double kernel_width = 5.0;
  std::uint64_t seed = 0;
  double ridge = 1e-6;
  double fused_value = 0.0;
};

enum class ShapMode { Exact, KernelExhaustive, Sampled };

struct ShapConfig {
  Vec baseline;  // empty means all zeros
  ShapMode mode = ShapMode::Exact;
  std::size_t coalitions = 2048;  // Sampled only; drawn as complement pairs
  std::uint64_t seed = 0;
};

inline constexpr std::size_t kShapExactMaxFeatures = 25;

// Feature grouping: group[k] is the feature index of coordinate k. An empty
// grouping means one feature per coordinate.
using Grouping = std::vector<int>;
std::size_t group_count(const Grouping& g, std::size_t dim);

Attribution vanilla_gradient(const Model& model, Point x);
Attribution smoothgrad(const Model& model, Point x, const SmoothGradConfig& cfg, Exec exec = Exec::Parallel);
Attribution integrated_gradients(const Model& model, Point x, const IGConfig& cfg);

struct LimeResult {
  Vec segment_weights;
  double intercept = 0.0;
  Attribution pixels;  // segment weight broadcast to every coordinate
};
// segments[k] = segment id of coordinate k.
LimeResult lime(const Model& model, Point x, const std::vector<int>& segments, const LimeConfig& cfg,
                Exec exec = Exec::Parallel);

struct ShapResult {
  Vec feature_values;  // one per group
  double base_value = 0.0;  // v(empty)
  double full_value = 0.0;  // v(all)
  Attribution pixels;  // feature value spread evenly over its coordinates
};
ShapResult kernel_shap(const Model& model, Point x, const ShapConfig& cfg, const Grouping& groups = {},
                       Exec exec = Exec::Parallel);

// Shapley values of a set function given as a table over bitmasks (bit i set:
// feature i present). Used by the exact path and by tests.
Vec shapley_from_table(const std::vector<double>& v, std::size_t d);
// Kernel-weighted least squares over every coalition, efficiency enforced.
Vec shapley_kernel_exhaustive(const std::vector<double>& v, std::size_t d);
std::vector<double> coalition_table(const Model& model, Point x, const Vec& baseline, const Grouping& groups,
                                    Exec exec = Exec::Parallel);

// ---------------------------------------------------------------------------
// Projections
// ---------------------------------------------------------------------------

struct Halfspace {
  Vec beta;
  double offset = 0.0;  // { y : beta . y >= offset }
};
struct OutsideBall {
  Vec center;
  double radius = 1.0;  // { y : ||y - center|| >= radius }
};
struct Shell {
  double c = 0.0;  // { y : ||y|| >= ||x|| + c }, built per x
};
struct SuperlevelConvex {
  std::function<double(Point)> g;  // { y : g(y) >= tau }, assumed convex
  std::function<Vec(Point)> grad;
  double tau = 0.0;
  Vec anchor;  // g(anchor) >= tau
};
struct RasterRegion {
  Vec lo;        // grid origin (cell corner)
  double step = 1.0;
  std::size_t nx = 0, ny = 0;
  std::vector<char> mask;  // row-major, index = iy * nx + ix
};

using SetFamily = std::variant<Halfspace, OutsideBall, Shell, SuperlevelConvex, RasterRegion>;
std::string family_name(const SetFamily& f);

struct Projection {
  Vec point;
  bool non_unique = false;
  std::string tie_set;  // description of the tied minimizers
};

// Closest point of the family to x. Throws EmptyFamily.
Projection counterfactual_projection(const SetFamily& family, Point x);

using FamilyBuilder = std::function<SetFamily(Point)>;
// circle / circle_sq (class) -> OutsideBall, linear (class, diff) -> Halfspace,
// expnorm (ratio) -> Shell. Throws UnsupportedModel otherwise.
FamilyBuilder default_family_builder(const RecourseProblem& problem);

Attribution projection_attribution(const FamilyBuilder& builder, Point x);
Evaluator projection_evaluator(FamilyBuilder builder);

// ---------------------------------------------------------------------------
// Abstract features
// ---------------------------------------------------------------------------

// (-x1 f, -x2 f, -f, -f, 0) for f = ||x||^2 - 1 in the feature map
// g = (x1, x2, x1^2, x2^2, 1).
Vec abstract_feature_attribution(Point x);

struct ZeroProbe {
  double winding = 0.0;    // winding number of phi around the sampled circle
  double min_norm = 0.0;   // min ||phi|| over a grid of the disc
  Vec argmin;
  bool has_zero = false;   // winding != 0 or min_norm below tolerance
};
// Zero detection on the closed disc of radius r centred at 0.
ZeroProbe zero_probe(const Evaluator& phi, double radius, std::size_t boundary_samples = 2048,
                     std::size_t grid_n = 201, double tol = 1e-9);

}  // namespace recourse
