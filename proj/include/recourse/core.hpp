#pragma once
// Problem definitions shared by every other module: models, utilities,
// constraints, attainable sets A(x) and target sets T(x).

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace recourse {

using Vec = std::vector<double>;
using Point = std::span<const double>;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class RecourseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define RECOURSE_DEFINE_ERROR(Name)            \
  class Name : public RecourseError {          \
   public:                                     \
    using RecourseError::RecourseError;        \
  }

RECOURSE_DEFINE_ERROR(DomainError);
RECOURSE_DEFINE_ERROR(DivisionByZero);
RECOURSE_DEFINE_ERROR(UnsupportedModel);
RECOURSE_DEFINE_ERROR(NotSeparated);
RECOURSE_DEFINE_ERROR(NonEmptyO);
RECOURSE_DEFINE_ERROR(KTooLarge);
RECOURSE_DEFINE_ERROR(NeedsManualDecomposition);
RECOURSE_DEFINE_ERROR(DegenerateDesign);
RECOURSE_DEFINE_ERROR(EmptyFamily);
RECOURSE_DEFINE_ERROR(BadDims);
RECOURSE_DEFINE_ERROR(ConfigError);
RECOURSE_DEFINE_ERROR(IoError);

#undef RECOURSE_DEFINE_ERROR

// ---------------------------------------------------------------------------
// Domains
// ---------------------------------------------------------------------------

class Domain {
 public:
  enum class Kind { Full, Punctured, Box };

  static Domain full() { return Domain(Kind::Full, {}, {}); }
  // R^d without the origin.
  static Domain punctured() { return Domain(Kind::Punctured, {}, {}); }
  static Domain box(Vec lo, Vec hi);

  Kind kind() const { return kind_; }
  const Vec& lo() const { return lo_; }
  const Vec& hi() const { return hi_; }

  bool contains(Point x) const;
  // Nearest in-domain point; used for clamping Monte Carlo perturbations.
  Vec clamp(Point x) const;
  std::string describe() const;

 private:
  Domain(Kind k, Vec lo, Vec hi) : kind_(k), lo_(std::move(lo)), hi_(std::move(hi)) {}
  Kind kind_;
  Vec lo_, hi_;
};

// ---------------------------------------------------------------------------
// Models
// ---------------------------------------------------------------------------

using ScalarFn = std::function<double(Point)>;
using GradientFn = std::function<Vec(Point)>;
using DirectionsFn = std::function<std::vector<Vec>(Point)>;

struct Model {
  std::string id;
  std::size_t dim = 1;
  ScalarFn eval;
  GradientFn analytic_gradient;  // empty when unavailable
  Domain domain = Domain::full();
  // f(x) > 0 everywhere on the domain; required for Ratio utilities.
  bool strictly_positive = false;
  // Gradient is an affine map of x, so averaging it over a symmetric
  // perturbation or a straight path has a closed form.
  bool gradient_affine = false;
  // Extra search directions for target-set emptiness probes (optional).
  DirectionsFn probe_directions;
  // Resolved construction parameters, echoed into reports.
  std::map<std::string, double> params;
  Vec beta;

  double operator()(Point x) const;
  bool has_gradient() const { return static_cast<bool>(analytic_gradient); }
  // Analytic gradient when present, else central differences with step
  // 1e-5 * (1 + |x_i|).
  Vec gradient(Point x) const;
};

Vec finite_difference_gradient(const Model& m, Point x);

// ---------------------------------------------------------------------------
// Utilities, constraints, problems
// ---------------------------------------------------------------------------

struct UtilitySpec {
  enum class Kind { ClassScore, Difference, Ratio, Custom };

  Kind kind = Kind::ClassScore;
  // Ratio orientation: false -> f(y)/f(x), true -> f(x)/f(y).
  bool inverted = false;
  std::string name;  // custom utilities only
  std::function<double(double fx, double fy)> custom;

  static UtilitySpec class_score() { return {}; }
  static UtilitySpec difference() { return {Kind::Difference, false, {}, {}}; }
  static UtilitySpec ratio(bool inverted = false) { return {Kind::Ratio, inverted, {}, {}}; }
  static UtilitySpec make_custom(std::string name, std::function<double(double, double)> fn) {
    return {Kind::Custom, false, std::move(name), std::move(fn)};
  }
  // Crossing the decision boundary: -f(x) f(y).
  static UtilitySpec flip();

  // u~(f(x), f(y)); throws DivisionByZero for Ratio with a zero denominator.
  double apply(double fx, double fy) const;
  std::string label() const;
};

// Parse "class", "diff", "ratio", "ratio_inv", "flip".
UtilitySpec utility_from_name(const std::string& name);

struct ConstraintSpec {
  enum class Kind { Full, Sparse, Directions };

  Kind kind = Kind::Full;
  std::size_t k = 0;             // Sparse
  std::vector<Vec> directions;   // Directions, unit vectors

  static ConstraintSpec full() { return {}; }
  static ConstraintSpec sparse(std::size_t k);
  static ConstraintSpec along(std::vector<Vec> dirs);

  // y in C(x), independent of the distance budget.
  bool admits(Point x, Point y) const;
  std::string label() const;
};

inline constexpr double kDirectionAngleTol = 1e-9;
// Relative slack on the distance budget: ||x - y|| <= delta * (1 + kBudgetSlack).
inline constexpr double kBudgetSlack = 1e-12;

class RecourseProblem {
 public:
  RecourseProblem(Model model, UtilitySpec utility, double tau, double delta,
                  ConstraintSpec constraint = ConstraintSpec::full());

  const Model& model() const { return model_; }
  const UtilitySpec& utility_spec() const { return utility_; }
  double tau() const { return tau_; }
  double delta() const { return delta_; }
  const ConstraintSpec& constraint() const { return constraint_; }
  std::size_t dim() const { return model_.dim; }

  double utility(Point x, Point y) const;
  // Utility from cached model values.
  double utility_values(double fx, double fy) const { return utility_.apply(fx, fy); }
  bool in_attainable(Point x, Point y) const;
  bool in_target(Point x, Point y) const;

 private:
  void require_domain(Point x) const;

  Model model_;
  UtilitySpec utility_;
  double tau_;
  double delta_;
  ConstraintSpec constraint_;
};

struct Attribution {
  Vec at;
  Vec weights;
  bool non_unique = false;
  std::string method;
  // Method diagnostics echoed into reports (clamped samples, rank, ...).
  std::map<std::string, double> info;
};

using Evaluator = std::function<Vec(Point)>;

// Numeric helpers used across modules.
double norm2(Point x);
double dist2(Point x, Point y);
double dot(Point x, Point y);

}  // namespace recourse
