#include "recourse/models.hpp"

#include <algorithm>
#include <cmath>

namespace recourse {

double ModelParams::get(const std::string& key, double fallback) const {
  auto it = values.find(key);
  return it == values.end() ? fallback : it->second;
}

void ModelRegistry::add(const std::string& key, Factory f) { factories_[key] = std::move(f); }

Model ModelRegistry::make(const std::string& key, const ModelParams& p) const {
  auto it = factories_.find(key);
  if (it == factories_.end()) throw UnsupportedModel("unknown model '" + key + "'");
  return it->second(p);
}

std::vector<std::string> ModelRegistry::keys() const {
  std::vector<std::string> out;
  for (const auto& [k, _] : factories_) out.push_back(k);
  return out;
}

namespace models {

Model quad() {
  Model m;
  m.id = "quad";
  m.gradient_affine = true;
  m.eval = [](Point x) { return x[0] * x[0]; };
  m.analytic_gradient = [](Point x) { return Vec{2.0 * x[0]}; };
  return m;
}

Model gauss() {
  Model m;
  m.id = "gauss";
  m.eval = [](Point x) { return std::exp(-x[0] * x[0]); };
  m.analytic_gradient = [](Point x) { return Vec{-2.0 * x[0] * std::exp(-x[0] * x[0])}; };
  m.strictly_positive = true;
  return m;
}

Model thm1(double z1, double z2, double delta) {
  if (!(delta > 0.0)) throw ConfigError("thm1 needs delta > 0");
  Model m;
  m.id = "thm1";
  m.params = {{"z1", z1}, {"z2", z2}, {"delta", delta}};
  // z1 + (z2 - z1) * clamp(8|x|/delta - 6, 0, 1)
  m.eval = [=](Point x) {
    double t = std::abs(x[0]);
    if (t < 0.75 * delta) return z1;
    if (t > 0.875 * delta) return z2;
    return 8.0 * (z2 - z1) / delta * t + (7.0 * z1 - 6.0 * z2);
  };
  m.analytic_gradient = [=](Point x) {
    double t = std::abs(x[0]);
    if (t <= 0.75 * delta || t >= 0.875 * delta) return Vec{0.0};
    double s = x[0] > 0 ? 1.0 : -1.0;
    return Vec{s * 8.0 * (z2 - z1) / delta};
  };
  return m;
}

Model notch(double plateau) {
  if (!(plateau > 1.0)) throw ConfigError("notch plateau must exceed 1");
  Model m;
  m.id = "notch";
  m.params = {{"c", plateau}};
  m.eval = [=](Point x) { return std::abs(x[0]) > 1.0 ? std::abs(x[0]) : plateau; };
  m.analytic_gradient = [](Point x) {
    if (std::abs(x[0]) <= 1.0) return Vec{0.0};
    return Vec{x[0] > 0 ? 1.0 : -1.0};
  };
  return m;
}

Model circle() {
  Model m;
  m.id = "circle";
  m.dim = 2;
  m.eval = [](Point x) { return std::hypot(x[0], x[1]) - 1.0; };
  m.analytic_gradient = [](Point x) {
    double r = std::hypot(x[0], x[1]);
    if (r == 0.0) return Vec{0.0, 0.0};
    return Vec{x[0] / r, x[1] / r};
  };
  return m;
}

Model circle_sq() {
  Model m;
  m.id = "circle_sq";
  m.gradient_affine = true;
  m.dim = 2;
  m.eval = [](Point x) { return x[0] * x[0] + x[1] * x[1] - 1.0; };
  m.analytic_gradient = [](Point x) { return Vec{2.0 * x[0], 2.0 * x[1]}; };
  return m;
}

Model expnorm(double b, std::size_t dim) {
  if (!(b > 0.0)) throw ConfigError("expnorm needs b > 0");
  if (dim == 0) throw BadDims("expnorm dim must be positive");
  Model m;
  m.id = "expnorm";
  m.dim = dim;
  m.params = {{"b", b}, {"d", static_cast<double>(dim)}};
  m.domain = Domain::punctured();
  m.strictly_positive = true;
  m.eval = [=](Point x) { return std::exp(b * norm2(x)); };
  m.analytic_gradient = [=](Point x) {
    double r = norm2(x);
    double s = b * std::exp(b * r) / r;
    Vec g(x.begin(), x.end());
    for (double& v : g) v *= s;
    return g;
  };
  return m;
}

Model linear(Vec beta) {
  if (beta.empty()) throw BadDims("linear model needs a nonempty beta");
  Model m;
  m.id = "linear";
  m.gradient_affine = true;
  m.dim = beta.size();
  m.beta = beta;
  m.eval = [beta](Point x) { return dot(beta, x); };
  m.analytic_gradient = [beta](Point) { return beta; };
  return m;
}

Vec abstract_features(Point x) { return {x[0], x[1], x[0] * x[0], x[1] * x[1], 1.0}; }

Vec abstract_beta() { return {0.0, 0.0, 1.0, 1.0, -1.0}; }

Model abstract_circle() {
  Model m;
  m.id = "abstract_circle";
  m.gradient_affine = true;
  m.dim = 2;
  m.beta = abstract_beta();
  m.eval = [](Point x) { return dot(abstract_beta(), abstract_features(x)); };
  m.analytic_gradient = [](Point x) { return Vec{2.0 * x[0], 2.0 * x[1]}; };
  return m;
}

Model constant(double value, std::size_t dim) {
  Model m;
  m.id = "constant";
  m.gradient_affine = true;
  m.dim = dim;
  m.params = {{"value", value}};
  m.strictly_positive = value != 0.0;
  m.eval = [=](Point) { return value; };
  m.analytic_gradient = [=](Point) { return Vec(dim, 0.0); };
  return m;
}

}  // namespace models

ModelRegistry register_builtin_models() {
  ModelRegistry r;
  r.add("quad", [](const ModelParams&) { return models::quad(); });
  r.add("gauss", [](const ModelParams&) { return models::gauss(); });
  r.add("thm1", [](const ModelParams& p) {
    return models::thm1(p.get("z1", 0.0), p.get("z2", 1.0), p.get("delta", 1.0));
  });
  r.add("notch", [](const ModelParams& p) { return models::notch(p.get("c", 1.5)); });
  r.add("circle", [](const ModelParams&) { return models::circle(); });
  r.add("circle_sq", [](const ModelParams&) { return models::circle_sq(); });
  r.add("expnorm", [](const ModelParams& p) {
    double d = p.get("d", 2.0);
    if (d < 1.0 || d != std::floor(d)) throw ConfigError("expnorm d must be a positive integer");
    return models::expnorm(p.get("b", 1.0), static_cast<std::size_t>(d));
  });
  r.add("linear", [](const ModelParams& p) {
    Vec beta = p.beta.empty() ? Vec{1.0} : p.beta;
    return models::linear(beta);
  });
  r.add("abstract_circle", [](const ModelParams&) { return models::abstract_circle(); });
  r.add("constant", [](const ModelParams& p) {
    double d = p.get("d", 1.0);
    if (d < 1.0 || d != std::floor(d)) throw ConfigError("constant d must be a positive integer");
    return models::constant(p.get("value", 0.0), static_cast<std::size_t>(d));
  });
  return r;
}

const ModelRegistry& builtin_models() {
  static const ModelRegistry r = register_builtin_models();
  return r;
}

}  // namespace recourse
