#pragma once
// Registry of the analytic models used by the examples and counterexamples.

#include <map>
#include <string>
#include <vector>

#include "recourse/core.hpp"

namespace recourse {

struct ModelParams {
  std::map<std::string, double> values;
  Vec beta;

  double get(const std::string& key, double fallback) const;
};

class ModelRegistry {
 public:
  using Factory = std::function<Model(const ModelParams&)>;

  void add(const std::string& key, Factory f);
  bool contains(const std::string& key) const { return factories_.count(key) != 0; }
  Model make(const std::string& key, const ModelParams& p = {}) const;
  std::vector<std::string> keys() const;

 private:
  std::map<std::string, Factory> factories_;
};

// quad, gauss, thm1, notch, circle, circle_sq, expnorm, linear,
// abstract_circle, constant.
ModelRegistry register_builtin_models();
const ModelRegistry& builtin_models();

namespace models {

Model quad();
Model gauss();
// Piecewise ramp: z1 on |x| < 3d/4, z2 on |x| > 7d/8, linear in between.
Model thm1(double z1, double z2, double delta);
// |x| outside [-1, 1], constant plateau c > 1 inside.
Model notch(double plateau = 1.5);
Model circle();
Model circle_sq();
Model expnorm(double b, std::size_t dim = 2);
Model linear(Vec beta);
// beta^T g(x) with g = (x1, x2, x1^2, x2^2, 1) and beta = (0, 0, 1, 1, -1).
Model abstract_circle();
Model constant(double value, std::size_t dim = 1);

// Feature map g(x) of abstract_circle and its coefficient vector.
Vec abstract_features(Point x);
Vec abstract_beta();

}  // namespace models
}  // namespace recourse
