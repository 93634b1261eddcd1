#include "recourse/core.hpp"

#include <cmath>
#include <sstream>

#include <omp.h>

#include "recourse/exec.hpp"

namespace recourse {

void set_thread_count(int n) {
  if (n > 0) omp_set_num_threads(n);
}

int thread_count() { return omp_get_max_threads(); }

double norm2(Point x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

double dist2(Point x, Point y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double d = x[i] - y[i];
    s += d * d;
  }
  return std::sqrt(s);
}

double dot(Point x, Point y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

// ---------------------------------------------------------------------------

Domain Domain::box(Vec lo, Vec hi) {
  if (lo.size() != hi.size()) throw BadDims("box bounds differ in length");
  for (std::size_t i = 0; i < lo.size(); ++i)
    if (!(lo[i] <= hi[i])) throw BadDims("box has lo > hi on axis " + std::to_string(i));
  return Domain(Kind::Box, std::move(lo), std::move(hi));
}

bool Domain::contains(Point x) const {
  for (double v : x)
    if (!std::isfinite(v)) return false;
  switch (kind_) {
    case Kind::Full:
      return true;
    case Kind::Punctured:
      for (double v : x)
        if (v != 0.0) return true;
      return false;
    case Kind::Box:
      if (x.size() != lo_.size()) return false;
      for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i] < lo_[i] || x[i] > hi_[i]) return false;
      return true;
  }
  return false;
}

Vec Domain::clamp(Point x) const {
  Vec y(x.begin(), x.end());
  if (kind_ == Kind::Box) {
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = std::min(std::max(y[i], lo_[i]), hi_[i]);
  } else if (kind_ == Kind::Punctured && !contains(y) && !y.empty()) {
    y[0] = 1e-12;
  }
  return y;
}

std::string Domain::describe() const {
  switch (kind_) {
    case Kind::Full:
      return "full";
    case Kind::Punctured:
      return "punctured";
    case Kind::Box: {
      std::ostringstream os;
      os << "box";
      for (std::size_t i = 0; i < lo_.size(); ++i) os << (i ? "x" : ":") << "[" << lo_[i] << "," << hi_[i] << "]";
      return os.str();
    }
  }
  return "?";
}

// ---------------------------------------------------------------------------

double Model::operator()(Point x) const {
  if (x.size() != dim) throw BadDims(id + ": expected dim " + std::to_string(dim));
  if (!domain.contains(x)) throw DomainError(id + ": point outside domain " + domain.describe());
  return eval(x);
}

Vec finite_difference_gradient(const Model& m, Point x) {
  Vec g(m.dim);
  Vec xp(x.begin(), x.end());
  for (std::size_t i = 0; i < m.dim; ++i) {
    double h = 1e-5 * (1.0 + std::abs(x[i]));
    double xi = xp[i];
    xp[i] = xi + h;
    double fp = m.eval(xp);
    xp[i] = xi - h;
    double fm = m.eval(xp);
    xp[i] = xi;
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

Vec Model::gradient(Point x) const {
  if (x.size() != dim) throw BadDims(id + ": expected dim " + std::to_string(dim));
  if (!domain.contains(x)) throw DomainError(id + ": point outside domain " + domain.describe());
  if (analytic_gradient) return analytic_gradient(x);
  return finite_difference_gradient(*this, x);
}

// ---------------------------------------------------------------------------

UtilitySpec UtilitySpec::flip() {
  return make_custom("flip", [](double fx, double fy) { return -fx * fy; });
}

double UtilitySpec::apply(double fx, double fy) const {
  switch (kind) {
    case Kind::ClassScore:
      return fy;
    case Kind::Difference:
      return fy - fx;
    case Kind::Ratio: {
      double num = inverted ? fx : fy;
      double den = inverted ? fy : fx;
      if (den == 0.0) throw DivisionByZero("ratio utility with zero denominator");
      return num / den;
    }
    case Kind::Custom:
      return custom(fx, fy);
  }
  return 0.0;
}

std::string UtilitySpec::label() const {
  switch (kind) {
    case Kind::ClassScore:
      return "class";
    case Kind::Difference:
      return "diff";
    case Kind::Ratio:
      return inverted ? "ratio_inv" : "ratio";
    case Kind::Custom:
      return name;
  }
  return "?";
}

UtilitySpec utility_from_name(const std::string& name) {
  if (name == "class") return UtilitySpec::class_score();
  if (name == "diff") return UtilitySpec::difference();
  if (name == "ratio") return UtilitySpec::ratio(false);
  if (name == "ratio_inv") return UtilitySpec::ratio(true);
  if (name == "flip") return UtilitySpec::flip();
  throw ConfigError("unknown utility '" + name + "'");
}

// ---------------------------------------------------------------------------

ConstraintSpec ConstraintSpec::sparse(std::size_t k) {
  if (k == 0) throw ConfigError("sparse constraint needs k >= 1");
  ConstraintSpec c;
  c.kind = Kind::Sparse;
  c.k = k;
  return c;
}

ConstraintSpec ConstraintSpec::along(std::vector<Vec> dirs) {
  ConstraintSpec c;
  c.kind = Kind::Directions;
  for (auto& d : dirs) {
    double n = norm2(d);
    if (n == 0.0) throw ConfigError("zero direction in constraint");
    for (double& v : d) v /= n;
  }
  c.directions = std::move(dirs);
  return c;
}

bool ConstraintSpec::admits(Point x, Point y) const {
  switch (kind) {
    case Kind::Full:
      return true;
    case Kind::Sparse: {
      std::size_t changed = 0;
      for (std::size_t i = 0; i < x.size(); ++i)
        if (y[i] != x[i]) ++changed;
      return changed <= k;
    }
    case Kind::Directions: {
      Vec d(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) d[i] = y[i] - x[i];
      double n = norm2(d);
      if (n == 0.0) return true;
      for (const auto& z : directions) {
        if (z.size() != d.size()) continue;
        double c = dot(d, z) / n;
        if (c <= 0.0) continue;
        // angle = acos(c); compare via 1 - c to avoid acos near 1
        double s = std::sqrt(std::max(0.0, 1.0 - c * c));
        if (std::atan2(s, c) <= kDirectionAngleTol) return true;
      }
      return false;
    }
  }
  return false;
}

std::string ConstraintSpec::label() const {
  switch (kind) {
    case Kind::Full:
      return "full";
    case Kind::Sparse:
      return "sparse(" + std::to_string(k) + ")";
    case Kind::Directions:
      return "directions(" + std::to_string(directions.size()) + ")";
  }
  return "?";
}

// ---------------------------------------------------------------------------

RecourseProblem::RecourseProblem(Model model, UtilitySpec utility, double tau, double delta,
                                 ConstraintSpec constraint)
    : model_(std::move(model)),
      utility_(std::move(utility)),
      tau_(tau),
      delta_(delta),
      constraint_(std::move(constraint)) {
  if (!(delta_ > 0.0) || !std::isfinite(delta_)) throw ConfigError("delta must be a positive finite number");
  if (std::isnan(tau_)) throw ConfigError("tau is NaN");
  if (utility_.kind == UtilitySpec::Kind::Ratio && !model_.strictly_positive)
    throw UnsupportedModel("ratio utility needs a model that is nonzero on its domain: " + model_.id);
  if (utility_.kind == UtilitySpec::Kind::Custom && !utility_.custom)
    throw ConfigError("custom utility without a function");
  if (constraint_.kind == ConstraintSpec::Kind::Directions)
    for (const auto& z : constraint_.directions)
      if (z.size() != model_.dim) throw BadDims("constraint direction has wrong dimension");
}

void RecourseProblem::require_domain(Point x) const {
  if (x.size() != model_.dim) throw BadDims("point has dim " + std::to_string(x.size()));
  if (!model_.domain.contains(x)) throw DomainError("point outside domain " + model_.domain.describe());
}

double RecourseProblem::utility(Point x, Point y) const {
  require_domain(x);
  require_domain(y);
  return utility_.apply(model_.eval(x), model_.eval(y));
}

bool RecourseProblem::in_attainable(Point x, Point y) const {
  require_domain(x);
  require_domain(y);
  if (dist2(x, y) > delta_ * (1.0 + kBudgetSlack)) return false;
  return constraint_.admits(x, y);
}

bool RecourseProblem::in_target(Point x, Point y) const {
  if (!in_attainable(x, y)) return false;
  return utility(x, y) >= tau_;
}

}  // namespace recourse
