#include "recourse/verify.hpp"

#include <algorithm>
#include <cmath>

#include "recourse/intervals.hpp"
#include "recourse/rng.hpp"

namespace recourse {

std::string status_name(VerdictStatus s) {
  switch (s) {
    case VerdictStatus::Satisfied:
      return "satisfied";
    case VerdictStatus::Violated:
      return "violated";
    case VerdictStatus::Vacuous:
      return "vacuous";
  }
  return "?";
}

std::vector<double> ray_steps(double delta, const Resolution& res) {
  std::vector<double> t;
  const std::size_t g = res.geometric;
  for (std::size_t i = 0; i < g; ++i) {
    double e = g > 1 ? -20.0 + 20.0 * static_cast<double>(i) / static_cast<double>(g - 1) : 0.0;
    t.push_back(delta * std::exp2(e));
  }
  for (std::size_t j = 1; j <= res.uniform; ++j)
    t.push_back(delta * static_cast<double>(j) / static_cast<double>(res.uniform));
  std::sort(t.begin(), t.end());
  t.erase(std::unique(t.begin(), t.end()), t.end());
  return t;
}

namespace {

bool target_along(const RecourseProblem& p, Point x, const Vec& dir, const std::vector<double>& steps, Vec* hit,
                  double* t_hit, std::size_t* tried) {
  Vec y(x.size());
  const Domain& dom = p.model().domain;
  for (double t : steps) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = dir[i] == 0.0 ? x[i] : x[i] + t * dir[i];
    if (tried) ++*tried;
    if (!dom.contains(y)) continue;
    if (p.in_target(x, y)) {
      if (hit) *hit = y;
      if (t_hit) *t_hit = t;
      return true;
    }
  }
  return false;
}

Vec unit(Vec v) {
  double n = norm2(v);
  if (n > 0.0)
    for (double& e : v) e /= n;
  return v;
}

Vec axis(std::size_t d, std::size_t i, double s) {
  Vec e(d, 0.0);
  e[i] = s;
  return e;
}

// Admissible unit direction under the constraint (exact for Sparse).
bool direction_admissible(const ConstraintSpec& c, const Vec& dir) {
  switch (c.kind) {
    case ConstraintSpec::Kind::Full:
      return true;
    case ConstraintSpec::Kind::Sparse: {
      std::size_t nz = 0;
      for (double v : dir)
        if (v != 0.0) ++nz;
      return nz <= c.k;
    }
    case ConstraintSpec::Kind::Directions: {
      Vec zero(dir.size(), 0.0);
      return c.admits(zero, dir);
    }
  }
  return false;
}

}  // namespace

bool find_target(const RecourseProblem& p, Point x, const Resolution& res, Vec* witness, std::size_t* samples,
                 std::string* searched) {
  const std::size_t d = p.dim();
  std::size_t tried = 1;
  auto done = [&](bool found, const std::string& how) {
    if (samples) *samples = tried;
    if (searched) *searched = how;
    return found;
  };
  if (p.in_target(x, x)) {
    if (witness) *witness = Vec(x.begin(), x.end());
    return done(true, "stay");
  }
  const std::vector<double> steps = ray_steps(p.delta(), res);
  const ConstraintSpec& c = p.constraint();

  bool exact_rays = d == 1 || c.kind == ConstraintSpec::Kind::Directions ||
                    (c.kind == ConstraintSpec::Kind::Sparse && c.k == 1);
  // model-supplied directions first: in high dimension they are the cheap hits
  std::vector<Vec> dirs;
  if (!exact_rays) {
    if (p.model().probe_directions)
      for (Vec v : p.model().probe_directions(x)) {
        v = unit(v);
        if (!direction_admissible(c, v)) continue;
        Vec m = v;
        for (double& e : m) e = -e;
        dirs.push_back(v);
        dirs.push_back(m);
      }
    if (p.model().has_gradient() && c.kind == ConstraintSpec::Kind::Full) {
      Vec g = unit(p.model().gradient(x));
      if (norm2(g) > 0.0) {
        Vec m = g;
        for (double& e : m) e = -e;
        dirs.push_back(g);
        dirs.push_back(m);
      }
    }
  }
  if (c.kind == ConstraintSpec::Kind::Directions) {
    for (const Vec& v : c.directions) dirs.push_back(v);
  } else {
    for (std::size_t i = 0; i < d; ++i) {
      dirs.push_back(axis(d, i, -1.0));
      dirs.push_back(axis(d, i, 1.0));
    }
  }
  for (const Vec& dir : dirs)
    if (target_along(p, x, dir, steps, witness, nullptr, &tried))
      return done(true, exact_rays ? "rays" : "rays+probe");
  if (exact_rays) return done(false, "rays");

  // Full ball (or Sparse with k >= 2): seeded samples, radius ~ u^(1/d).
  Substream rs(res.seed, 0);
  Vec y(d);
  for (std::size_t s = 0; s < res.ball_samples; ++s) {
    Vec dir(d);
    for (double& e : dir) e = rs.normal();
    if (c.kind == ConstraintSpec::Kind::Sparse) {
      // keep the k largest coordinates
      std::vector<std::size_t> idx(d);
      for (std::size_t i = 0; i < d; ++i) idx[i] = i;
      std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return std::abs(dir[a]) > std::abs(dir[b]); });
      for (std::size_t i = c.k; i < d; ++i) dir[idx[i]] = 0.0;
    }
    dir = unit(dir);
    double r = p.delta() * std::pow(rs.uniform(), 1.0 / static_cast<double>(d));
    for (std::size_t i = 0; i < d; ++i) y[i] = dir[i] == 0.0 ? x[i] : x[i] + r * dir[i];
    ++tried;
    if (!p.model().domain.contains(y)) continue;
    if (p.in_target(x, y)) {
      if (witness) *witness = y;
      return done(true, "ball-samples");
    }
  }
  return done(false, "rays+ball-samples(" + std::to_string(res.ball_samples) + ")");
}

RecourseVerdict check_recourse_phi(const RecourseProblem& p, Point x, const Vec& phi, const Resolution& res) {
  if (x.size() != p.dim()) throw BadDims("check point has wrong dimension");
  if (!p.model().domain.contains(x)) throw DomainError("check point outside domain");
  if (phi.size() != p.dim()) throw BadDims("attribution has wrong dimension");
  RecourseVerdict v;
  v.at.assign(x.begin(), x.end());
  v.phi = phi;
  double n = norm2(phi);
  if (n <= kZeroAttribution) {
    if (p.in_target(x, x)) {
      v.status = VerdictStatus::Satisfied;
      v.witness = v.at;
      v.searched = "zero-attribution";
      return v;
    }
  } else {
    Vec dir = phi;
    for (double& e : dir) e /= n;
    if (direction_admissible(p.constraint(), dir)) {
      Vec hit;
      double t = 0.0;
      std::size_t tried = 0;
      if (target_along(p, x, dir, ray_steps(p.delta(), res), &hit, &t, &tried)) {
        v.status = VerdictStatus::Satisfied;
        v.witness = hit;
        v.step = t;
        v.searched = "ray";
        v.samples = tried;
        return v;
      }
    }
  }
  Vec other;
  bool nonempty = find_target(p, x, res, &other, &v.samples, &v.searched);
  v.status = nonempty ? VerdictStatus::Violated : VerdictStatus::Vacuous;
  if (nonempty) v.witness = other;
  return v;
}

RecourseVerdict check_recourse_at(const RecourseProblem& p, const Evaluator& phi, Point x, const Resolution& res) {
  if (!p.model().domain.contains(x)) throw DomainError("check point outside domain");
  return check_recourse_phi(p, x, phi(x), res);
}

ScanReport scan_recourse(const RecourseProblem& p, const Evaluator& phi, const std::vector<Vec>& grid,
                         const Resolution& res, Exec exec) {
  std::vector<RecourseVerdict> all(grid.size());
  const long n = static_cast<long>(grid.size());
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic, 16)
    for (long i = 0; i < n; ++i) all[i] = check_recourse_at(p, phi, grid[i], res);
  } else {
    for (long i = 0; i < n; ++i) all[i] = check_recourse_at(p, phi, grid[i], res);
  }
  ScanReport r;
  r.total = all.size();
  for (auto& v : all) {
    switch (v.status) {
      case VerdictStatus::Satisfied:
        ++r.satisfied;
        continue;
      case VerdictStatus::Violated:
        ++r.violated;
        break;
      case VerdictStatus::Vacuous:
        ++r.vacuous;
        break;
    }
    r.flagged.push_back(std::move(v));
  }
  std::stable_sort(r.flagged.begin(), r.flagged.end(),
                   [](const RecourseVerdict& a, const RecourseVerdict& b) { return a.at < b.at; });
  return r;
}

// ---------------------------------------------------------------------------

std::size_t JumpReport::discontinuities() const {
  return static_cast<std::size_t>(std::count_if(jumps.begin(), jumps.end(), [](const Jump& j) { return j.discontinuity; }));
}

JumpReport continuity_probe(const Evaluator& phi, const std::vector<Vec>& grid, double pair_step, double threshold,
                            Exec exec) {
  if (!(pair_step > 0.0)) throw ConfigError("pair_step must be positive");
  JumpReport rep;
  rep.pair_step = pair_step;
  rep.threshold = threshold;
  if (grid.empty()) return rep;
  const std::size_t d = grid[0].size();
  const long n = static_cast<long>(grid.size());
  std::vector<std::vector<Jump>> found(grid.size());
  auto probe = [&](long k) {
    const Vec& x = grid[k];
    Vec fx = phi(x);
    for (std::size_t i = 0; i < d; ++i) {
      Vec y = x;
      y[i] += pair_step;
      double m = dist2(fx, phi(y));
      if (!(m > threshold)) continue;
      Jump j;
      j.a = x;
      j.b = y;
      j.axis = i;
      j.separation = pair_step;
      j.magnitude = m;
      j.location = x;
      j.location[i] = x[i] + 0.5 * pair_step;
      double mags[2];
      for (int r = 0; r < 2; ++r) {
        double half = pair_step / (r == 0 ? 4.0 : 8.0);
        Vec a = j.location, b = j.location;
        a[i] -= half;
        b[i] += half;
        mags[r] = dist2(phi(a), phi(b));
      }
      j.magnitude_half = mags[0];
      j.magnitude_quarter = mags[1];
      auto stable = [](double base, double v) { return std::abs(v - base) < 0.25 * base; };
      j.discontinuity = stable(m, mags[0]) && stable(m, mags[1]);
      found[k].push_back(std::move(j));
    }
  };
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic, 16)
    for (long k = 0; k < n; ++k) probe(k);
  } else {
    for (long k = 0; k < n; ++k) probe(k);
  }
  rep.pairs = grid.size() * d;
  for (auto& v : found)
    for (auto& j : v) rep.jumps.push_back(std::move(j));
  return rep;
}

// ---------------------------------------------------------------------------

namespace {

nlohmann::json vec_json(const Vec& v) {
  nlohmann::json a = nlohmann::json::array();
  for (double e : v) a.push_back(e);
  return a;
}

}  // namespace

nlohmann::json to_json(const RecourseVerdict& v) {
  nlohmann::json j;
  j["status"] = status_name(v.status);
  j["at"] = vec_json(v.at);
  j["phi"] = vec_json(v.phi);
  j["witness"] = v.witness.empty() ? nlohmann::json(nullptr) : vec_json(v.witness);
  j["step"] = v.step;
  j["searched"] = v.searched;
  j["samples"] = v.samples;
  return j;
}

nlohmann::json to_json(const ScanReport& r) {
  nlohmann::json j;
  j["total"] = r.total;
  j["satisfied"] = r.satisfied;
  j["violated"] = r.violated;
  j["vacuous"] = r.vacuous;
  j["flagged"] = nlohmann::json::array();
  for (const auto& v : r.flagged) j["flagged"].push_back(to_json(v));
  return j;
}

nlohmann::json to_json(const JumpReport& r) {
  nlohmann::json j;
  j["pair_step"] = r.pair_step;
  j["threshold"] = r.threshold;
  j["pairs"] = r.pairs;
  j["discontinuity_candidates"] = r.discontinuities();
  j["jumps"] = nlohmann::json::array();
  for (const auto& x : r.jumps)
    j["jumps"].push_back({{"a", vec_json(x.a)},
                          {"b", vec_json(x.b)},
                          {"location", vec_json(x.location)},
                          {"axis", x.axis},
                          {"separation", x.separation},
                          {"magnitude", x.magnitude},
                          {"magnitude_half", x.magnitude_half},
                          {"magnitude_quarter", x.magnitude_quarter},
                          {"discontinuity_candidate", x.discontinuity}});
  return j;
}

std::vector<Vec> grid_1d(double lo, double hi, std::size_t n) {
  std::vector<Vec> g;
  for (std::size_t i = 0; i < n; ++i)
    g.push_back({n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1)});
  return g;
}

std::vector<Vec> grid_2d(double lo0, double hi0, double lo1, double hi1, std::size_t n0, std::size_t n1) {
  std::vector<Vec> g;
  for (Vec a : grid_1d(lo0, hi0, n0))
    for (Vec b : grid_1d(lo1, hi1, n1)) g.push_back({a[0], b[0]});
  return g;
}

}  // namespace recourse
