#include "recourse/multidim.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <limits>

namespace recourse {

std::string rep_name(RegionRep r) { return r == RegionRep::Exact ? "exact" : "raster"; }

std::string axis_set_name(std::size_t s) {
  return std::string(s % 2 == 0 ? "L" : "R") + std::to_string(s / 2 + 1);
}

std::size_t RasterSpec::cells() const {
  std::size_t c = 1;
  for (std::size_t k : n) c *= k;
  return c;
}

std::vector<std::size_t> RasterSpec::unflatten(std::size_t index) const {
  std::vector<std::size_t> idx(n.size());
  for (std::size_t k = 0; k < n.size(); ++k) {
    idx[k] = index % n[k];
    index /= n[k];
  }
  return idx;
}

std::size_t RasterSpec::flatten(const std::vector<std::size_t>& idx) const {
  std::size_t index = 0;
  for (std::size_t k = n.size(); k-- > 0;) index = index * n[k] + idx[k];
  return index;
}

Vec RasterSpec::center(std::size_t index) const {
  auto idx = unflatten(index);
  Vec c(n.size());
  for (std::size_t k = 0; k < n.size(); ++k) c[k] = lo[k] + (static_cast<double>(idx[k]) + 0.5) * step(k);
  return c;
}

std::size_t RasterSpec::locate(Point x) const {
  if (x.size() != n.size()) return npos;
  std::vector<std::size_t> idx(n.size());
  for (std::size_t k = 0; k < n.size(); ++k) {
    if (!(x[k] >= lo[k] && x[k] <= hi[k])) return npos;
    auto i = static_cast<std::size_t>(std::floor((x[k] - lo[k]) / step(k)));
    idx[k] = std::min(i, n[k] - 1);
  }
  return flatten(idx);
}

bool AxisRegions::member(std::size_t s, Point x) const {
  if (rep == RegionRep::Exact) return component(s, x) >= 0;
  std::size_t c = grid.locate(x);
  return c != RasterSpec::npos && sets[s][c];
}

namespace {

void check_spec(const RasterSpec& g) {
  if (g.lo.size() != g.n.size() || g.hi.size() != g.n.size() || g.n.empty())
    throw BadDims("raster spec dimensions disagree");
  for (std::size_t k = 0; k < g.n.size(); ++k)
    if (g.n[k] == 0 || !(g.hi[k] > g.lo[k])) throw ConfigError("bad raster spec");
}

// circle_sq, u = -f(x) f(y), tau = 0. a = moving coordinate, b = the other.
// Component labels: 0 outside the circle, 1 inside, 2 on it.
int circle_flip_component(std::size_t s, Point x, double delta) {
  std::size_t axis = s / 2;
  bool left = s % 2 == 0;
  double a = x[axis], b = x[1 - axis];
  double f = a * a + b * b - 1.0;
  if (f == 0.0) return 2;
  if (!left) a = -a;  // R mirrors to L
  if (f > 0.0) {
    if (std::abs(b) > 1.0) return -1;
    double sr = std::sqrt(1.0 - b * b);
    return (a > -sr && a - delta <= sr) ? 0 : -1;
  }
  double sr = std::sqrt(1.0 - b * b);
  return (a - delta <= -sr || a > sr) ? 1 : -1;
}

AxisRegions exact_regions(const RecourseProblem& p) {
  const Model& m = p.model();
  const UtilitySpec& u = p.utility_spec();
  bool flip = u.kind == UtilitySpec::Kind::Custom && u.name == UtilitySpec::flip().name;
  if (m.id != "circle_sq" || m.dim != 2 || !flip || p.tau() != 0.0)
    throw UnsupportedModel("exact axis regions cover circle_sq with the flip utility at tau = 0 only");
  AxisRegions r;
  r.rep = RegionRep::Exact;
  r.dim = 2;
  r.delta = p.delta();
  r.model_id = m.id;
  double delta = p.delta();
  r.component = [delta](std::size_t s, Point x) { return circle_flip_component(s, x, delta); };
  r.in_O = [](Point x) { return x[0] * x[0] + x[1] * x[1] == 1.0; };
  return r;
}

AxisRegions raster_regions(const RecourseProblem& p, const RasterSpec& g, Exec exec) {
  check_spec(g);
  const Model& m = p.model();
  if (m.dim != g.dim()) throw BadDims("raster dimension differs from the model");
  AxisRegions r;
  r.rep = RegionRep::Raster;
  r.dim = m.dim;
  r.delta = p.delta();
  r.model_id = m.id;
  r.grid = g;
  const std::size_t d = m.dim, nc = g.cells();
  r.sets.assign(2 * d, Mask(nc, 0));
  r.O.assign(nc, 0);
  const double delta = p.delta(), tau = p.tau();
  const std::size_t ncorner = std::size_t{1} << d;
  // O is often a level set that no cell centre hits; a cell counts as O when
  // some value in the range of f over its corners and centre stays put.
  auto touches_O = [&](const Vec& x, double fx) {
    double lo = fx, hi = fx;
    Vec y(d);
    for (std::size_t k = 0; k < ncorner; ++k) {
      for (std::size_t a = 0; a < d; ++a) y[a] = x[a] + ((k >> a) & 1U ? 0.5 : -0.5) * g.step(a);
      if (!m.domain.contains(y)) continue;
      double v = m.eval(y);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    auto stays = [&](double v) { return p.utility_values(v, v) >= tau; };
    if (lo <= 0.0 && 0.0 <= hi && stays(0.0)) return true;
    for (int k = 0; k <= 32; ++k)
      if (stays(lo + (hi - lo) * k / 32.0)) return true;
    return false;
  };
  auto cell = [&](std::size_t c) {
    Vec x = g.center(c);
    if (!m.domain.contains(x)) return;
    double fx = m.eval(x);
    r.O[c] = touches_O(x, fx);
    Vec y = x;
    for (std::size_t axis = 0; axis < d; ++axis) {
      const double hf = g.step(axis) / 4.0;
      const long M = static_cast<long>(std::floor(delta / hf));
      for (int side = 0; side < 2; ++side) {
        double sgn = side == 0 ? -1.0 : 1.0;
        auto hit = [&](double yk) {
          y[axis] = yk;
          return m.domain.contains(y) && p.utility_values(fx, m.eval(y)) >= tau;
        };
        bool found = hit(x[axis] + sgn * delta);
        for (long j = M; j >= 1 && !found; --j) found = hit(x[axis] + sgn * static_cast<double>(j) * hf);
        y[axis] = x[axis];
        r.sets[2 * axis + side][c] = found;
      }
    }
  };
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic, 256)
    for (long c = 0; c < static_cast<long>(nc); ++c) cell(static_cast<std::size_t>(c));
  } else {
    for (std::size_t c = 0; c < nc; ++c) cell(c);
  }
  return r;
}

// Offsets of the (3^d - 1)-neighbourhood, as per-axis deltas.
std::vector<std::vector<int>> neighbour_offsets(std::size_t d) {
  std::vector<std::vector<int>> out;
  std::vector<int> o(d, -1);
  while (true) {
    if (std::any_of(o.begin(), o.end(), [](int v) { return v != 0; })) out.push_back(o);
    std::size_t k = 0;
    while (k < d && o[k] == 1) o[k++] = -1;
    if (k == d) break;
    ++o[k];
  }
  return out;
}

template <class F>
void for_neighbours(const RasterSpec& g, const std::vector<std::vector<int>>& offs, std::size_t c, F&& f) {
  auto idx = g.unflatten(c);
  std::vector<std::size_t> j(idx.size());
  for (const auto& o : offs) {
    bool inside = true;
    for (std::size_t k = 0; k < idx.size() && inside; ++k) {
      long v = static_cast<long>(idx[k]) + o[k];
      if (v < 0 || v >= static_cast<long>(g.n[k])) inside = false;
      j[k] = static_cast<std::size_t>(v);
    }
    if (inside) f(g.flatten(j));
  }
}

// Chebyshev distance (in cells) to the nearest marked cell; max() if none.
std::vector<std::size_t> cell_distance(const RasterSpec& g, const Mask& m) {
  const auto inf = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> dist(m.size(), inf);
  std::deque<std::size_t> q;
  for (std::size_t c = 0; c < m.size(); ++c)
    if (m[c]) {
      dist[c] = 0;
      q.push_back(c);
    }
  auto offs = neighbour_offsets(g.dim());
  while (!q.empty()) {
    std::size_t c = q.front();
    q.pop_front();
    for_neighbours(g, offs, c, [&](std::size_t n) {
      if (dist[n] == inf) {
        dist[n] = dist[c] + 1;
        q.push_back(n);
      }
    });
  }
  return dist;
}

Mask dilate(const RasterSpec& g, const Mask& m, std::size_t k) {
  if (k == 0) return m;
  auto dist = cell_distance(g, m);
  Mask out(m.size());
  for (std::size_t c = 0; c < m.size(); ++c) out[c] = dist[c] <= k;
  return out;
}

struct Components {
  std::vector<int> label;  // -1 outside
  std::vector<std::vector<std::size_t>> cells;
};

Components components(const RasterSpec& g, const Mask& m) {
  Components out;
  out.label.assign(m.size(), -1);
  auto offs = neighbour_offsets(g.dim());
  for (std::size_t c = 0; c < m.size(); ++c) {
    if (!m[c] || out.label[c] >= 0) continue;
    int id = static_cast<int>(out.cells.size());
    out.cells.emplace_back();
    std::deque<std::size_t> q{c};
    out.label[c] = id;
    while (!q.empty()) {
      std::size_t u = q.front();
      q.pop_front();
      out.cells[id].push_back(u);
      for_neighbours(g, offs, u, [&](std::size_t n) {
        if (m[n] && out.label[n] < 0) {
          out.label[n] = id;
          q.push_back(n);
        }
      });
    }
  }
  return out;
}

std::string resolution_of(const RasterSpec& g) {
  std::string s;
  for (std::size_t k = 0; k < g.dim(); ++k) s += (k ? "x" : "") + std::to_string(g.n[k]);
  s += " cells on [";
  for (std::size_t k = 0; k < g.dim(); ++k)
    s += (k ? ", " : "") + std::to_string(g.lo[k]) + "," + std::to_string(g.hi[k]);
  return s + "]";
}

// Pairs on different axes first, then pairs on the same axis, each in index order.
std::vector<std::pair<std::size_t, std::size_t>> pair_order(std::size_t nsets) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (int same = 0; same < 2; ++same)
    for (std::size_t s = 0; s < nsets; ++s)
      for (std::size_t t = s + 1; t < nsets; ++t)
        if ((s / 2 == t / 2) == (same == 1)) out.emplace_back(s, t);
  return out;
}

// ---------------------------------------------------------------------------

AxisCertificate decide_exact(const AxisRegions& r) {
  AxisCertificate cert;
  cert.rep = RegionRep::Exact;
  cert.resolution = "exact";
  const double delta = r.delta;
  // Exclusive point of the outside component of each set, on its own axis.
  std::vector<Vec> forced(4);
  std::vector<char> is_forced(4, 0);
  for (std::size_t s = 0; s < 4; ++s) {
    Vec x(2, 0.0);
    x[s / 2] = (s % 2 == 0 ? 1.0 : -1.0) * (1.0 + delta / 2.0);
    bool only = r.component(s, x) == 0 && !r.in_O(x);
    for (std::size_t t = 0; t < 4 && only; ++t)
      if (t != s && r.component(t, x) >= 0) only = false;
    if (only) {
      forced[s] = x;
      is_forced[s] = 1;
    }
  }
  for (auto [s, t] : pair_order(4)) {
    if (!is_forced[s] || !is_forced[t] || s / 2 == t / 2) continue;
    // The outside components of sets on different axes meet along the
    // diagonal through their quadrant.
    double u0 = s / 2 == 0 ? (s % 2 == 0 ? 1.0 : -1.0) : (t % 2 == 0 ? 1.0 : -1.0);
    double u1 = s / 2 == 1 ? (s % 2 == 0 ? 1.0 : -1.0) : (t % 2 == 0 ? 1.0 : -1.0);
    auto at = [&](double r2) {
      double rad = std::sqrt(r2 / 2.0);
      return Vec{u0 * rad, u1 * rad};
    };
    double hi = 0.0;
    const int n = 4096;
    for (int k = 1; k <= n; ++k) {
      double r2 = 1.0 + static_cast<double>(k) / n;
      Vec x = at(r2);
      if (r.component(s, x) == 0 && r.component(t, x) == 0) hi = r2;
    }
    if (hi <= 1.0) continue;
    Vec w = at(1.0 + 0.1 * (hi - 1.0));
    if (r.component(s, w) != 0 || r.component(t, w) != 0 || r.in_O(w)) continue;
    cert.conflicts.emplace_back(s, t);
    if (!cert.witness) cert.witness = AxisWitness{s, t, w, forced[s], forced[t]};
  }
  if (cert.witness) return cert;
  throw NeedsManualDecomposition("no exact witness among the forced outside components");
}

AxisCertificate decide_raster(const AxisRegions& r, Exec exec) {
  const RasterSpec& g = r.grid;
  const std::size_t nsets = r.sets.size(), nc = g.cells();
  AxisCertificate cert;
  cert.rep = RegionRep::Raster;
  cert.resolution = resolution_of(g);
  cert.assigned.assign(nsets, Mask(nc, 0));

  std::vector<int> count(nc, 0);
  for (std::size_t s = 0; s < nsets; ++s)
    for (std::size_t c = 0; c < nc; ++c) count[c] += r.sets[s][c];

  std::vector<Components> comps(nsets);
  std::vector<std::vector<char>> forced(nsets);
  auto build = [&](std::size_t s) {
    Mask m(nc);
    for (std::size_t c = 0; c < nc; ++c) m[c] = r.sets[s][c] && !r.O[c];
    comps[s] = components(g, m);
    forced[s].assign(comps[s].cells.size(), 0);
    for (std::size_t k = 0; k < comps[s].cells.size(); ++k)
      for (std::size_t c : comps[s].cells[k])
        if (count[c] == 1) {
          forced[s][k] = 1;
          break;
        }
  };
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (long s = 0; s < static_cast<long>(nsets); ++s) build(static_cast<std::size_t>(s));
  } else {
    for (std::size_t s = 0; s < nsets; ++s) build(s);
  }
  for (std::size_t s = 0; s < nsets; ++s)
    for (std::size_t k = 0; k < comps[s].cells.size(); ++k)
      if (forced[s][k])
        for (std::size_t c : comps[s].cells[k]) cert.assigned[s][c] = 1;

  auto exclusive_in = [&](std::size_t s, std::size_t c) {
    int comp = comps[s].label[c];
    for (std::size_t e : comps[s].cells[comp])
      if (count[e] == 1) return g.center(e);
    return g.center(c);
  };

  std::vector<Mask> near(nsets);
  for (std::size_t s = 0; s < nsets; ++s) near[s] = dilate(g, cert.assigned[s], 1);
  for (auto [s, t] : pair_order(nsets)) {
    std::vector<std::size_t> overlap, touch;
    for (std::size_t c = 0; c < nc; ++c) {
      if (!cert.assigned[s][c]) continue;
      if (cert.assigned[t][c]) overlap.push_back(c);
      else if (near[t][c]) touch.push_back(c);
    }
    const auto& pick = overlap.empty() ? touch : overlap;
    if (pick.empty()) continue;
    Vec mean(g.dim(), 0.0);
    for (std::size_t c : pick) {
      Vec x = g.center(c);
      for (std::size_t k = 0; k < x.size(); ++k) mean[k] += x[k];
    }
    for (double& v : mean) v /= static_cast<double>(pick.size());
    std::size_t best = pick.front();
    double bd = INFINITY;
    for (std::size_t c : pick) {
      double dd = dist2(g.center(c), mean);
      if (dd < bd) {
        bd = dd;
        best = c;
      }
    }
    Vec w = g.center(best);
    // the witness cell sits in s; the matching forced point of t is taken
    // from the t-component touching it
    std::size_t tc = best;
    if (!cert.assigned[t][best]) {
      auto offs = neighbour_offsets(g.dim());
      for_neighbours(g, offs, best, [&](std::size_t n) {
        if (tc == best && cert.assigned[t][n]) tc = n;
      });
    }
    cert.conflicts.emplace_back(s, t);
    if (!cert.witness) cert.witness = AxisWitness{s, t, w, exclusive_in(s, best), exclusive_in(t, tc)};
  }
  if (cert.witness) return cert;

  // Non-forced components go wherever they stay separated from the other sets.
  for (std::size_t s = 0; s < nsets; ++s)
    for (std::size_t k = 0; k < comps[s].cells.size(); ++k) {
      if (forced[s][k]) continue;
      bool clash = false;
      for (std::size_t t = 0; t < nsets && !clash; ++t) {
        if (t == s) continue;
        for (std::size_t c : comps[s].cells[k])
          if (near[t][c]) {
            clash = true;
            break;
          }
      }
      if (clash) continue;
      for (std::size_t c : comps[s].cells[k]) cert.assigned[s][c] = 1;
      near[s] = dilate(g, cert.assigned[s], 1);
    }
  for (std::size_t c = 0; c < nc; ++c) {
    if (r.O[c] || count[c] == 0) continue;
    bool covered = false;
    for (std::size_t s = 0; s < nsets && !covered; ++s) covered = cert.assigned[s][c];
    if (!covered)
      throw NeedsManualDecomposition("raster cell " + std::to_string(c) +
                                     " lies in components that clash with every other set");
  }
  cert.O_tilde.assign(nc, 0);
  for (std::size_t c = 0; c < nc; ++c) {
    if (!r.O[c]) continue;
    bool used = false;
    for (std::size_t s = 0; s < nsets && !used; ++s) used = cert.assigned[s][c];
    cert.O_tilde[c] = !used;
  }
  cert.possible = true;
  return cert;
}

double squash(double v) { return v / (1.0 + v); }

// Distance from x to the complement of the union of marked cell boxes, capped.
double inner_depth(const RasterSpec& g, const Mask& m, Point x, int rings) {
  std::size_t c = g.locate(x);
  if (c == RasterSpec::npos || !m[c]) return 0.0;
  const std::size_t d = g.dim();
  double hmin = INFINITY;
  for (std::size_t k = 0; k < d; ++k) hmin = std::min(hmin, g.step(k));
  double cap = static_cast<double>(rings - 1) * hmin;
  double best = cap;
  for (std::size_t k = 0; k < d; ++k) best = std::min({best, x[k] - g.lo[k], g.hi[k] - x[k]});
  auto idx = g.unflatten(c);
  std::vector<int> o(d, -rings);
  std::vector<std::size_t> j(d);
  while (true) {
    bool inside = true;
    double dd = 0.0;
    for (std::size_t k = 0; k < d && inside; ++k) {
      long v = static_cast<long>(idx[k]) + o[k];
      if (v < 0 || v >= static_cast<long>(g.n[k])) {
        inside = false;
        break;
      }
      j[k] = static_cast<std::size_t>(v);
      double lo = g.lo[k] + static_cast<double>(v) * g.step(k), hi = lo + g.step(k);
      double gap = x[k] < lo ? lo - x[k] : (x[k] > hi ? x[k] - hi : 0.0);
      dd += gap * gap;
    }
    if (inside && !m[g.flatten(j)]) best = std::min(best, std::sqrt(dd));
    std::size_t k = 0;
    while (k < d && o[k] == rings) o[k++] = -rings;
    if (k == d) break;
    ++o[k];
  }
  return best;
}

}  // namespace

AxisRegions compute_axis_regions(const RecourseProblem& problem, RegionRep rep, const RasterSpec& spec,
                                 Exec exec) {
  const ConstraintSpec& con = problem.constraint();
  if (con.kind != ConstraintSpec::Kind::Sparse || con.k != 1)
    throw ConfigError("axis regions need the single-feature constraint");
  return rep == RegionRep::Exact ? exact_regions(problem) : raster_regions(problem, spec, exec);
}

AxisCertificate decide_axes(const AxisRegions& regions, Exec exec) {
  return regions.rep == RegionRep::Exact ? decide_exact(regions) : decide_raster(regions, exec);
}

AxesAttribution construct_axes_attribution(const AxisCertificate& cert, const AxisRegions& regions) {
  if (!cert.possible || cert.rep != RegionRep::Raster || regions.rep != RegionRep::Raster)
    throw ConfigError("construction needs a Possible raster certificate");
  const RasterSpec& g = regions.grid;
  std::vector<const Mask*> all;
  for (const Mask& m : cert.assigned) all.push_back(&m);
  all.push_back(&cert.O_tilde);
  // smallest count of empty cells between two different sets
  std::size_t gap = std::numeric_limits<std::size_t>::max();
  for (std::size_t s = 0; s < all.size(); ++s) {
    auto dist = cell_distance(g, *all[s]);
    for (std::size_t t = 0; t < all.size(); ++t) {
      if (t == s) continue;
      for (std::size_t c = 0; c < dist.size(); ++c)
        if ((*all[t])[c] && dist[c] != std::numeric_limits<std::size_t>::max())
          gap = std::min(gap, dist[c] == 0 ? 0 : dist[c] - 1);
    }
  }
  AxesAttribution a;
  a.grid = g;
  a.dilation = gap == std::numeric_limits<std::size_t>::max() ? static_cast<std::size_t>(a.rings) : gap / 3;
  for (std::size_t i = 0; i < regions.dim; ++i) {
    a.neg.push_back(dilate(g, cert.assigned[2 * i], a.dilation));
    a.pos.push_back(dilate(g, cert.assigned[2 * i + 1], a.dilation));
  }
  return a;
}

Vec AxesAttribution::operator()(Point x) const {
  Vec phi(neg.size());
  for (std::size_t i = 0; i < neg.size(); ++i)
    phi[i] = squash(inner_depth(grid, pos[i], x, rings)) - squash(inner_depth(grid, neg[i], x, rings));
  return phi;
}

Evaluator AxesAttribution::evaluator() const {
  return [self = *this](Point x) { return self(x); };
}

void write_pgm(const std::string& path, const Mask& mask, const RasterSpec& grid) {
  if (grid.dim() != 2 || mask.size() != grid.cells()) throw BadDims("PGM export needs a 2D mask");
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot write " + path);
  const std::size_t nx = grid.n[0], ny = grid.n[1];
  os << "P5\n" << nx << " " << ny << "\n255\n";
  for (std::size_t row = 0; row < ny; ++row) {
    std::size_t iy = ny - 1 - row;
    for (std::size_t ix = 0; ix < nx; ++ix) os.put(mask[iy * nx + ix] ? static_cast<char>(255) : 0);
  }
  if (!os) throw IoError("short write to " + path);
}

nlohmann::json to_json(const AxisCertificate& cert, const AxisRegions& regions) {
  nlohmann::json j;
  j["verdict"] = cert.possible ? "possible" : "impossible";
  j["representation"] = rep_name(cert.rep);
  j["resolution"] = cert.resolution;
  j["model"] = regions.model_id;
  j["delta"] = regions.delta;
  j["dim"] = regions.dim;
  if (cert.witness) {
    const AxisWitness& w = *cert.witness;
    j["witness"] = {{"first", axis_set_name(w.first)},
                    {"second", axis_set_name(w.second)},
                    {"axis", {w.first / 2 + 1, w.second / 2 + 1}},
                    {"point", w.point},
                    {"norm_sq", dot(w.point, w.point)},
                    {"first_forced", w.first_forced},
                    {"second_forced", w.second_forced}};
  } else {
    j["witness"] = nullptr;
  }
  nlohmann::json conf = nlohmann::json::array();
  for (auto [s, t] : cert.conflicts) conf.push_back({axis_set_name(s), axis_set_name(t)});
  j["conflicts"] = conf;
  if (cert.rep == RegionRep::Raster && cert.possible) {
    nlohmann::json cells;
    for (std::size_t s = 0; s < cert.assigned.size(); ++s)
      cells[axis_set_name(s)] = std::count(cert.assigned[s].begin(), cert.assigned[s].end(), 1);
    cells["O"] = std::count(cert.O_tilde.begin(), cert.O_tilde.end(), 1);
    j["assigned_cells"] = cells;
  }
  return j;
}

}  // namespace recourse
