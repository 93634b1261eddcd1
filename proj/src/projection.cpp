#include <algorithm>
#include <cmath>
#include <sstream>

#include "recourse/attributions.hpp"

namespace recourse {

namespace {

Vec e1(std::size_t d) {
  Vec v(d, 0.0);
  v[0] = 1.0;
  return v;
}

std::string describe_sphere(const Vec& c, double r) {
  std::ostringstream os;
  os.precision(17);
  os << "sphere(center=[";
  for (std::size_t i = 0; i < c.size(); ++i) os << (i ? "," : "") << c[i];
  os << "], radius=" << r << ")";
  return os.str();
}

Projection project(const Halfspace& h, Point x) {
  if (h.beta.size() != x.size()) throw BadDims("halfspace dimension mismatch");
  double bb = dot(h.beta, h.beta);
  Projection p;
  p.point.assign(x.begin(), x.end());
  if (bb == 0.0) {
    if (h.offset > 0.0) throw EmptyFamily("halfspace with zero normal and positive offset is empty");
    return p;
  }
  double bx = dot(h.beta, x);
  if (bx >= h.offset) return p;
  double s = (h.offset - bx) / bb;
  for (std::size_t i = 0; i < x.size(); ++i) p.point[i] += s * h.beta[i];
  return p;
}

Projection radial(const Vec& c, double r, Point x) {
  Projection p;
  p.point.assign(x.begin(), x.end());
  if (!(r > 0.0)) return p;
  Vec diff(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) diff[i] = x[i] - c[i];
  double n = norm2(diff);
  if (n >= r) return p;
  if (n == 0.0) {
    p.non_unique = true;
    p.tie_set = describe_sphere(c, r);
    Vec e = e1(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) p.point[i] = c[i] + r * e[i];
    return p;
  }
  for (std::size_t i = 0; i < x.size(); ++i) p.point[i] = c[i] + diff[i] * (r / n);
  return p;
}

Projection project(const OutsideBall& b, Point x) {
  Vec c = b.center.empty() ? Vec(x.size(), 0.0) : b.center;
  if (c.size() != x.size()) throw BadDims("ball dimension mismatch");
  return radial(c, b.radius, x);
}

Projection project(const Shell& s, Point x) {
  Vec c(x.size(), 0.0);
  return radial(c, norm2(x) + s.c, x);
}

// Boundary point of {g >= tau} on the segment from `out` (g < tau) to `in` (g >= tau).
Vec bisect(const SuperlevelConvex& f, Vec out, Vec in) {
  for (int it = 0; it < 200; ++it) {
    Vec mid(out.size());
    double gap = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) {
      mid[i] = 0.5 * (out[i] + in[i]);
      gap = std::max(gap, std::abs(out[i] - in[i]));
    }
    if (gap < 1e-15) break;
    if (f.g(mid) >= f.tau)
      in = mid;
    else
      out = mid;
    if (mid == in && mid == out) break;
  }
  return in;
}

Projection project(const SuperlevelConvex& f, Point x) {
  if (!f.g) throw ConfigError("superlevel family without a function");
  Projection p;
  p.point.assign(x.begin(), x.end());
  if (f.g(x) >= f.tau) return p;
  if (f.anchor.size() != x.size() || !(f.g(f.anchor) >= f.tau))
    throw EmptyFamily("superlevel family needs an anchor inside the set");
  Vec xv(x.begin(), x.end());
  Vec cur = bisect(f, xv, f.anchor);
  double cur_d = dist2(xv, cur);
  const double tol = 1e-8;
  double damping = 1.0;
  for (int it = 0; it < 500; ++it) {
    Vec n = f.grad ? f.grad(cur) : Vec{};
    if (n.empty()) break;
    double nn = norm2(n);
    if (nn == 0.0) break;
    for (double& e : n) e /= nn;
    // project x onto the supporting halfspace at cur, then pull back to the boundary
    double s = 0.0;
    for (std::size_t i = 0; i < xv.size(); ++i) s += n[i] * (cur[i] - xv[i]);
    Vec q(xv.size());
    for (std::size_t i = 0; i < xv.size(); ++i) q[i] = xv[i] + std::max(0.0, s) * n[i];
    Vec cand = f.g(q) >= f.tau ? bisect(f, xv, q) : bisect(f, q, f.anchor);
    if (damping < 1.0) {
      // a convex combination of boundary points is inside; pull it back toward x
      for (std::size_t i = 0; i < cand.size(); ++i) cand[i] = cur[i] + damping * (cand[i] - cur[i]);
      if (f.g(cand) >= f.tau) cand = bisect(f, xv, cand);
    }
    double cd = dist2(xv, cand);
    double move = dist2(cand, cur);
    if (cd > cur_d) {
      damping *= 0.5;
      if (damping < 1e-6) break;
      continue;
    }
    cur = cand;
    cur_d = cd;
    if (move < tol) break;
  }
  p.point = cur;
  return p;
}

Projection project(const RasterRegion& r, Point x) {
  if (x.size() != 2 || r.lo.size() != 2) throw BadDims("raster regions are two-dimensional");
  if (r.mask.size() != r.nx * r.ny) throw BadDims("raster mask size mismatch");
  double best = INFINITY;
  std::size_t best_idx = 0, ties = 0;
  Vec best_pt;
  for (std::size_t iy = 0; iy < r.ny; ++iy)
    for (std::size_t ix = 0; ix < r.nx; ++ix) {
      std::size_t idx = iy * r.nx + ix;
      if (!r.mask[idx]) continue;
      double x0 = r.lo[0] + r.step * static_cast<double>(ix), y0 = r.lo[1] + r.step * static_cast<double>(iy);
      Vec q{std::clamp(x[0], x0, x0 + r.step), std::clamp(x[1], y0, y0 + r.step)};
      double dd = dist2(x, q);
      if (dd < best) {
        best = dd;
        best_idx = idx;
        best_pt = q;
        ties = 0;
      } else if (dd == best) {
        ++ties;
      }
    }
  if (best_pt.empty()) throw EmptyFamily("raster region has no marked cells");
  Projection p;
  p.point = best_pt;
  if (ties > 0 && best > 0.0) {
    p.non_unique = true;
    p.tie_set = "raster cells at distance " + std::to_string(best) + ", first index " + std::to_string(best_idx);
  }
  return p;
}

}  // namespace

std::string family_name(const SetFamily& f) {
  static const char* names[] = {"halfspace", "outside_ball", "shell", "superlevel_convex", "raster_region"};
  return names[f.index()];
}

Projection counterfactual_projection(const SetFamily& family, Point x) {
  return std::visit([&](const auto& f) { return project(f, x); }, family);
}

FamilyBuilder default_family_builder(const RecourseProblem& problem) {
  const Model& m = problem.model();
  const UtilitySpec& u = problem.utility_spec();
  const double tau = problem.tau();
  using K = UtilitySpec::Kind;
  if (problem.constraint().kind != ConstraintSpec::Kind::Full)
    throw UnsupportedModel("projection families are built for the unconstrained case only");
  if ((m.id == "circle") && u.kind == K::ClassScore) {
    OutsideBall b{Vec(m.dim, 0.0), 1.0 + tau};
    return [b](Point) { return SetFamily(b); };
  }
  if ((m.id == "circle_sq" || m.id == "abstract_circle") && u.kind == K::ClassScore) {
    OutsideBall b{Vec(m.dim, 0.0), 1.0 + tau > 0.0 ? std::sqrt(1.0 + tau) : 0.0};
    return [b](Point) { return SetFamily(b); };
  }
  if (m.id == "linear" && u.kind == K::ClassScore) {
    Halfspace h{m.beta, tau};
    return [h](Point) { return SetFamily(h); };
  }
  if (m.id == "linear" && u.kind == K::Difference) {
    Vec beta = m.beta;
    return [beta, tau](Point x) { return SetFamily(Halfspace{beta, dot(beta, x) + tau}); };
  }
  if (m.id == "expnorm" && u.kind == K::Ratio && !u.inverted) {
    double b = m.params.at("b");
    double c = tau > 0.0 ? std::log(tau) / b : -INFINITY;
    return [c](Point) { return SetFamily(Shell{c}); };
  }
  throw UnsupportedModel("no projection family for model '" + m.id + "' with utility " + u.label());
}

Attribution projection_attribution(const FamilyBuilder& builder, Point x) {
  Projection p = counterfactual_projection(builder(x), x);
  Attribution a;
  a.at.assign(x.begin(), x.end());
  a.method = "projection";
  a.weights.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) a.weights[i] = p.point[i] - x[i];
  a.non_unique = p.non_unique;
  return a;
}

Evaluator projection_evaluator(FamilyBuilder builder) {
  return [builder = std::move(builder)](Point x) { return projection_attribution(builder, x).weights; };
}

// ---------------------------------------------------------------------------

Vec abstract_feature_attribution(Point x) {
  double f = x[0] * x[0] + x[1] * x[1] - 1.0;
  return {-x[0] * f, -x[1] * f, -f, -f, 0.0};
}

ZeroProbe zero_probe(const Evaluator& phi, double radius, std::size_t boundary_samples, std::size_t grid_n,
                     double tol) {
  ZeroProbe z;
  double total = 0.0;
  double prev = 0.0;
  for (std::size_t k = 0; k <= boundary_samples; ++k) {
    double t = 2.0 * M_PI * static_cast<double>(k % boundary_samples) / static_cast<double>(boundary_samples);
    Vec x{radius * std::cos(t), radius * std::sin(t)};
    Vec v = phi(x);
    double a = std::atan2(v[1], v[0]);
    if (k > 0) {
      double d = a - prev;
      while (d > M_PI) d -= 2.0 * M_PI;
      while (d < -M_PI) d += 2.0 * M_PI;
      total += d;
    }
    prev = a;
  }
  z.winding = total / (2.0 * M_PI);
  z.min_norm = INFINITY;
  for (std::size_t i = 0; i < grid_n; ++i)
    for (std::size_t j = 0; j < grid_n; ++j) {
      double u = -radius + 2.0 * radius * static_cast<double>(i) / static_cast<double>(grid_n - 1);
      double w = -radius + 2.0 * radius * static_cast<double>(j) / static_cast<double>(grid_n - 1);
      if (u * u + w * w > radius * radius) continue;
      Vec x{u, w};
      double n = norm2(phi(x));
      if (n < z.min_norm) {
        z.min_norm = n;
        z.argmin = x;
      }
    }
  z.has_zero = std::abs(z.winding) >= 0.5 || z.min_norm <= tol;
  return z;
}

}  // namespace recourse
