#include "recourse/onedim.hpp"

#include <algorithm>
#include <cmath>

#include "recourse/models.hpp"

namespace recourse {

namespace {

IntervalSet single(const Interval& iv) { return IntervalSet(std::vector<Interval>{iv}); }

bool subset(const IntervalSet& a, const IntervalSet& b) { return difference(a, b).empty(); }

// A deterministic interior point of a nonempty set.
double pick_point(const IntervalSet& s) {
  const Interval& iv = s[0];
  if (iv.lo == iv.hi) return iv.lo;
  if (std::isinf(iv.lo) && std::isinf(iv.hi)) return 0.0;
  if (std::isinf(iv.lo)) return iv.hi - 1.0;
  if (std::isinf(iv.hi)) return iv.lo + 1.0;
  return iv.lo + 0.5 * (iv.hi - iv.lo);
}

bool exact_constraint(const RecourseProblem& p) {
  // In one dimension Sparse(k >= 1) admits every move.
  return p.constraint().kind != ConstraintSpec::Kind::Directions;
}

// quad with Difference utility and threshold t.
LRO quad_difference(double t, double delta) {
  LRO out;
  if (t < 0.0) {
    out.L = out.R = out.O = IntervalSet::line();
    return out;
  }
  double c = (delta * delta - t) / (2.0 * delta);
  out.L = single({-kInf, c, false, true});
  out.R = single({-c, kInf, true, false});
  if (t == 0.0) out.O = IntervalSet::line();
  return out;
}

LRO exact_lro(const RecourseProblem& p) {
  const Model& m = p.model();
  const UtilitySpec& u = p.utility_spec();
  const double tau = p.tau(), delta = p.delta();
  using K = UtilitySpec::Kind;
  auto unsupported = [&]() -> UnsupportedModel {
    return UnsupportedModel("no closed form for model '" + m.id + "' with utility " + u.label() + ", constraint " +
                            p.constraint().label());
  };
  if (m.dim != 1 || !exact_constraint(p)) throw unsupported();

  if (m.id == "quad" && u.kind == K::Difference) return quad_difference(tau, delta);

  if (m.id == "quad" && u.kind == K::ClassScore) {
    LRO out;
    if (tau <= 0.0) {
      out.L = out.R = out.O = IntervalSet::line();
      return out;
    }
    double s = std::sqrt(tau);
    out.L = IntervalSet{{-kInf, delta - s, false, true}, Interval::open(s, kInf)};
    out.R = IntervalSet{Interval::open(-kInf, -s), {s - delta, kInf, true, false}};
    out.O = IntervalSet{{-kInf, -s, false, true}, {s, kInf, true, false}};
    return out;
  }

  if (m.id == "gauss" && u.kind == K::Ratio && u.inverted) {
    // f(x)/f(y) = exp(y^2 - x^2) >= tau  <=>  y^2 - x^2 >= ln tau
    if (tau <= 0.0) {
      LRO out;
      out.L = out.R = out.O = IntervalSet::line();
      return out;
    }
    return quad_difference(std::log(tau), delta);
  }

  if (m.id == "thm1" && u.kind == K::Difference) {
    double z1 = m.params.at("z1"), z2 = m.params.at("z2"), md = m.params.at("delta");
    double D = z2 - z1;
    if (md != delta || !(D > 0.0) || !(tau > 0.0) || tau > D) throw unsupported();
    double q = tau / D;
    LRO out;
    out.L = single(Interval::closed(-(7.0 - q) * delta / 8.0, (2.0 - q) * delta / 8.0));
    out.R = single(Interval::closed(-(2.0 - q) * delta / 8.0, (7.0 - q) * delta / 8.0));
    return out;
  }

  if (m.id == "notch" && u.kind == K::Difference) {
    double c = m.params.at("c");
    bool ok = tau > 0.0 && tau <= delta && tau > 1.0 + delta - c && tau > c - 1.0 && tau > delta - 2.0;
    if (!ok) throw unsupported();
    LRO out;
    out.L = single(Interval::open(-kInf, -1.0));
    out.R = single(Interval::open(1.0, kInf));
    return out;
  }

  throw unsupported();
}

LRO sampled_lro(const RecourseProblem& p, const SampleGrid& g, Exec exec) {
  if (p.dim() != 1) throw BadDims("compute_lro needs a one-dimensional model");
  if (!(g.step > 0.0) || !(g.hi > g.lo)) throw ConfigError("bad sample grid");
  const double h = g.step, hf = g.step / 4.0, delta = p.delta(), tau = p.tau();
  const long nx = static_cast<long>(std::floor((g.hi - g.lo) / h + 1e-9)) + 1;
  const long M = static_cast<long>(std::floor(delta / hf));
  // fine lattice y_m = lo + m * hf for m in [-M, 4(nx-1) + M]
  const long nf = 4 * (nx - 1) + 2 * M + 1;
  const Model& model = p.model();
  std::vector<double> fv(nf);
  std::vector<char> ok(nf);
  auto lattice = [&](long m) { return g.lo + static_cast<double>(m) * hf; };
  auto fill = [&](long i) {
    double y = lattice(i - M);
    ok[i] = model.domain.contains(Point(&y, 1));
    fv[i] = ok[i] ? model.eval(Point(&y, 1)) : 0.0;
  };
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
    for (long i = 0; i < nf; ++i) fill(i);
  } else {
    for (long i = 0; i < nf; ++i) fill(i);
  }

  std::vector<char> inL(nx), inR(nx), inO(nx);
  const ConstraintSpec& con = p.constraint();
  auto scan = [&](long k) {
    long cx = 4 * k + M;
    if (!ok[cx]) return;
    double x = lattice(4 * k);
    double fx = fv[cx];
    Point px(&x, 1);
    auto hit = [&](double y, double fy) {
      Point py(&y, 1);
      return con.admits(px, py) && p.utility_values(fx, fy) >= tau;
    };
    inO[k] = p.utility_values(fx, fx) >= tau;
    for (int side = 0; side < 2; ++side) {
      double s = side == 0 ? -1.0 : 1.0;
      double ye = x + s * delta;
      bool found = false;
      if (model.domain.contains(Point(&ye, 1))) found = hit(ye, model.eval(Point(&ye, 1)));
      for (long j = M; j >= 1 && !found; --j) {
        long idx = cx + (side == 0 ? -j : j);
        if (ok[idx]) found = hit(lattice(idx - M), fv[idx]);
      }
      (side == 0 ? inL : inR)[k] = found;
    }
  };
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic, 64)
    for (long k = 0; k < nx; ++k) scan(k);
  } else {
    for (long k = 0; k < nx; ++k) scan(k);
  }

  auto runs = [&](const std::vector<char>& mark) {
    std::vector<Interval> parts;
    long k = 0;
    while (k < nx) {
      if (!mark[k]) {
        ++k;
        continue;
      }
      long e = k;
      while (e + 1 < nx && mark[e + 1]) ++e;
      parts.push_back(Interval::closed(lattice(4 * k), lattice(4 * e)));
      k = e + 1;
    }
    return IntervalSet(std::move(parts));
  };
  LRO out;
  out.L = runs(inL);
  out.R = runs(inR);
  out.O = runs(inO);
  out.mode = LroMode::Sampled;
  out.grid_step = h;
  out.grid = g;
  return out;
}

IntervalSet union_of(const std::vector<Interval>& parts, const std::vector<std::size_t>& idx) {
  std::vector<Interval> v;
  for (std::size_t i : idx) v.push_back(parts[i]);
  return IntervalSet(std::move(v));
}

}  // namespace

std::string mode_name(LroMode m) { return m == LroMode::Exact ? "exact" : "sampled"; }

LRO compute_lro(const RecourseProblem& problem, LroMode mode, const SampleGrid& grid, Exec exec) {
  if (problem.dim() != 1) throw BadDims("compute_lro needs a one-dimensional model");
  if (mode == LroMode::Exact) return exact_lro(problem);
  return sampled_lro(problem, grid, exec);
}

LRO lro_from_sets(IntervalSet L, IntervalSet R, IntervalSet O) {
  LRO out;
  out.L = std::move(L);
  out.R = std::move(R);
  out.O = std::move(O);
  return out;
}

RecourseProblem indicator_problem(const LRO& lro, double delta) {
  Model m = models::linear({1.0});
  m.id = "identity";
  IntervalSet L = lro.L, R = lro.R, O = lro.O;
  auto u = UtilitySpec::make_custom("indicator", [L, R, O](double a, double b) {
    if (b < a) return L.contains(a) ? 1.0 : 0.0;
    if (b > a) return R.contains(a) ? 1.0 : 0.0;
    return O.contains(a) ? 1.0 : 0.0;
  });
  return RecourseProblem(std::move(m), std::move(u), 1.0, delta);
}

Decomposition decompose_maximal(const LRO& lro) { return {lro.L.parts(), lro.R.parts(), lro.O.parts()}; }

IndexSets index_sets(const std::vector<Interval>& L, const std::vector<Interval>& R, const std::vector<Interval>& O) {
  if (!IntervalSet(O).empty()) throw NonEmptyO("index sets need O to be empty");
  IndexSets out;
  for (std::size_t i = 0; i < L.size(); ++i) {
    bool inside = false, equal = false;
    for (const Interval& r : R) {
      if (subset(single(L[i]), single(r))) inside = true;
      if (L[i] == r) equal = true;
    }
    if (!inside) out.I_tilde.push_back(i);
    if (equal) out.K_tilde.push_back(i);
  }
  for (std::size_t j = 0; j < R.size(); ++j) {
    bool inside = false;
    for (const Interval& l : L)
      if (subset(single(R[j]), single(l))) inside = true;
    if (!inside) out.J_tilde.push_back(j);
  }
  return out;
}

bool check_decomposition(const LRO& lro, const IntervalSet& Lt, const IntervalSet& Rt, const IntervalSet& Ot,
                         std::string* why) {
  auto fail = [&](const char* msg) {
    if (why) *why = msg;
    return false;
  };
  if (!subset(Lt, lro.L)) return fail("L~ not contained in L");
  if (!subset(Rt, lro.R)) return fail("R~ not contained in R");
  if (!subset(Ot, lro.O)) return fail("O~ not contained in O");
  if (!(set_union(set_union(Lt, Rt), Ot) == set_union(set_union(lro.L, lro.R), lro.O)))
    return fail("decomposition does not cover L u R u O");
  if (!is_separated(Lt, Rt)) return fail("L~ and R~ are not separated");
  IntervalSet cO = closure(Ot);
  if (intersects(cO, Lt) || intersects(cO, Rt)) return fail("closure of O~ meets L~ or R~");
  return true;
}

bool check_witness(const LRO& lro, const Witness& w, std::string* why) {
  auto fail = [&](const char* msg) {
    if (why) *why = msg;
    return false;
  };
  IntervalSet left = single(w.left), right = single(w.right);
  IntervalSet LmO = difference(lro.L, lro.O), RmO = difference(lro.R, lro.O);
  if (!subset(left, LmO)) return fail("left witness interval not inside L \\ O");
  if (!subset(right, RmO)) return fail("right witness interval not inside R \\ O");
  auto forced = [](double x, const IntervalSet& in, const IntervalSet& a, const IntervalSet& b) {
    return in.contains(x) && !a.contains(x) && !b.contains(x);
  };
  if (!w.left.contains(w.left_forced) || !forced(w.left_forced, lro.L, lro.R, lro.O))
    return fail("left forced point invalid");
  if (!w.right.contains(w.right_forced) || !forced(w.right_forced, lro.R, lro.L, lro.O))
    return fail("right forced point invalid");
  if (is_separated(left, right)) return fail("witness intervals are separated");
  bool shared = (closure(left).contains(w.shared) && right.contains(w.shared)) ||
                (left.contains(w.shared) && closure(right).contains(w.shared));
  if (!shared) return fail("shared point not in the overlap");
  return true;
}

Certificate decide(const LRO& lro, Exec exec) {
  const IntervalSet LR = set_union(lro.L, lro.R);
  const IntervalSet clLR = closure(LR);

  // O parts: 0 = always in O~, 1 = coverable by L u R (searched)
  std::vector<std::size_t> coverable;
  for (std::size_t k = 0; k < lro.O.size(); ++k) {
    IntervalSet part = single(lro.O[k]);
    if (intersects(part, clLR) && subset(part, LR)) coverable.push_back(k);
  }
  if (coverable.size() > kMaxK) throw KTooLarge("too many O components to search: " + std::to_string(coverable.size()));

  const std::uint64_t n_o = std::uint64_t{1} << coverable.size();
  for (std::uint64_t om = 0; om < n_o; ++om) {
    std::vector<Interval> ot;
    for (std::size_t k = 0, c = 0; k < lro.O.size(); ++k) {
      bool absorbed = c < coverable.size() && coverable[c] == k && ((om >> c) & 1U);
      if (c < coverable.size() && coverable[c] == k) ++c;
      if (!absorbed) ot.push_back(lro.O[k]);
    }
    IntervalSet Ot(ot);
    IntervalSet Lp = difference(lro.L, Ot), Rp = difference(lro.R, Ot);
    IndexSets idx = index_sets(Lp.parts(), Rp.parts());
    if (idx.K_tilde.size() > kMaxK) throw KTooLarge("|K~| = " + std::to_string(idx.K_tilde.size()) + " exceeds 20");

    IntervalSet baseL = union_of(Lp.parts(), idx.I_tilde), baseR = union_of(Rp.parts(), idx.J_tilde);
    auto build = [&](std::uint64_t mask, IntervalSet& Lt, IntervalSet& Rt) {
      std::vector<Interval> l = baseL.parts(), r = baseR.parts();
      for (std::size_t b = 0; b < idx.K_tilde.size(); ++b) ((mask >> b) & 1U ? l : r).push_back(Lp[idx.K_tilde[b]]);
      Lt = IntervalSet(std::move(l));
      Rt = IntervalSet(std::move(r));
    };
    const std::uint64_t n_k = std::uint64_t{1} << idx.K_tilde.size();
    const std::uint64_t none = n_k;
    std::uint64_t best = none;
    auto test = [&](std::uint64_t mask) {
      IntervalSet Lt, Rt;
      build(mask, Lt, Rt);
      return check_decomposition(lro, Lt, Rt, Ot);
    };
    if (exec == Exec::Parallel) {
      const long long n = static_cast<long long>(n_k);
#pragma omp parallel for reduction(min : best) schedule(dynamic, 1)
      for (long long m = 0; m < n; ++m) {
        if (static_cast<std::uint64_t>(m) < best && test(static_cast<std::uint64_t>(m)))
          best = static_cast<std::uint64_t>(m);
      }
    } else {
      for (std::uint64_t m = 0; m < n_k; ++m)
        if (test(m)) {
          best = m;
          break;
        }
    }
    if (best != none) {
      Certificate cert;
      cert.possible = true;
      build(best, cert.L_tilde, cert.R_tilde);
      cert.O_tilde = Ot;
      cert.index = idx;
      cert.partition_mask = best;
      cert.o_mask = om;
      cert.lro = lro;
      return cert;
    }
  }

  // Forced components: pieces of L \ O holding a point outside R u O must lie in L~.
  IntervalSet exclL = difference(lro.L, set_union(lro.R, lro.O));
  IntervalSet exclR = difference(lro.R, set_union(lro.L, lro.O));
  std::vector<Interval> forcedL, forcedR;
  const IntervalSet LmO = difference(lro.L, lro.O), RmO = difference(lro.R, lro.O);
  for (const Interval& c : LmO.parts())
    if (intersects(single(c), exclL)) forcedL.push_back(c);
  for (const Interval& c : RmO.parts())
    if (intersects(single(c), exclR)) forcedR.push_back(c);
  for (const Interval& c : forcedL)
    for (const Interval& d : forcedR) {
      IntervalSet C = single(c), D = single(d);
      if (is_separated(C, D)) continue;
      IntervalSet overlap = intersection(closure(C), D);
      if (overlap.empty()) overlap = intersection(C, closure(D));
      Witness w{c, d, pick_point(intersection(C, exclL)), pick_point(intersection(D, exclR)), pick_point(overlap)};
      Certificate cert;
      cert.possible = false;
      cert.witness = w;
      cert.lro = lro;
      if (lro.O.empty()) cert.index = index_sets(lro.L.parts(), lro.R.parts());
      return cert;
    }
  throw NeedsManualDecomposition("no valid decomposition found and no forced overlap: L=" + to_string(lro.L) +
                                 " R=" + to_string(lro.R) + " O=" + to_string(lro.O));
}

// ---------------------------------------------------------------------------

namespace {

// Grow each part of `own` outward by min(gap/3, 1) at finite endpoints, where
// gap is the distance to the nearest part of `others` on that side.
IntervalSet expand(const IntervalSet& own, const IntervalSet& others) {
  std::vector<Interval> out;
  for (const Interval& p : own.parts()) {
    Interval q = p;
    if (std::isfinite(p.hi)) {
      double gap = kInf;
      for (const Interval& o : others.parts())
        if (o.lo >= p.hi) gap = std::min(gap, o.lo - p.hi);
      double e = std::min(gap / 3.0, 1.0);
      if (e > 0.0) {
        q.hi = p.hi + e;
        q.hi_closed = false;
      }
    }
    if (std::isfinite(p.lo)) {
      double gap = kInf;
      for (const Interval& o : others.parts())
        if (o.hi <= p.lo) gap = std::min(gap, p.lo - o.hi);
      double e = std::min(gap / 3.0, 1.0);
      if (e > 0.0) {
        q.lo = p.lo - e;
        q.lo_closed = false;
      }
    }
    out.push_back(q);
  }
  return IntervalSet(std::move(out));
}

double squash(double d) { return d / (1.0 + d); }

}  // namespace

ConstructedAttribution construct_attribution(const Certificate& cert) {
  if (!cert.possible) throw RecourseError("construct_attribution needs a Possible certificate");
  ConstructedAttribution a;
  a.L_tilde = cert.L_tilde;
  a.R_tilde = cert.R_tilde;
  a.O_tilde = cert.O_tilde;
  a.U = expand(cert.L_tilde, set_union(cert.R_tilde, cert.O_tilde));
  a.V = expand(cert.R_tilde, set_union(cert.L_tilde, cert.O_tilde));
  return a;
}

double ConstructedAttribution::operator()(double x) const {
  // d(x, R \ U) is zero outside U; inside, it is the distance to the nearest endpoint.
  auto depth = [x](const IntervalSet& s) {
    int k = s.part_of(x);
    if (k < 0) return 0.0;
    const Interval& iv = s[static_cast<std::size_t>(k)];
    return std::min(x - iv.lo, iv.hi - x);
  };
  return squash(depth(V)) - squash(depth(U));
}

Evaluator ConstructedAttribution::evaluator() const {
  ConstructedAttribution self = *this;
  return [self](Point x) { return Vec{self(x[0])}; };
}

// ---------------------------------------------------------------------------

nlohmann::json to_json(const LRO& lro) {
  nlohmann::json j;
  j["L"] = to_string(lro.L);
  j["R"] = to_string(lro.R);
  j["O"] = to_string(lro.O);
  j["mode"] = mode_name(lro.mode);
  j["grid_step"] = lro.mode == LroMode::Sampled ? nlohmann::json(lro.grid_step) : nlohmann::json(nullptr);
  if (lro.mode == LroMode::Sampled) j["grid_range"] = {lro.grid.lo, lro.grid.hi};
  return j;
}

nlohmann::json to_json(const Certificate& cert) {
  nlohmann::json j;
  j["verdict"] = cert.possible ? "possible" : "impossible";
  j["mode"] = mode_name(cert.lro.mode);
  j["grid_step"] = cert.lro.mode == LroMode::Sampled ? nlohmann::json(cert.lro.grid_step) : nlohmann::json(nullptr);
  j["lro"] = to_json(cert.lro);
  if (cert.possible) {
    j["sets"] = {{"L_tilde", to_string(cert.L_tilde)},
                 {"R_tilde", to_string(cert.R_tilde)},
                 {"O_tilde", to_string(cert.O_tilde)}};
    j["partition_bitmask"] = cert.partition_mask;
    j["o_bitmask"] = cert.o_mask;
    j["witness"] = nullptr;
  } else {
    j["sets"] = nullptr;
    j["partition_bitmask"] = nullptr;
    const Witness& w = *cert.witness;
    j["witness"] = {{"left", to_string(w.left)},
                    {"right", to_string(w.right)},
                    {"left_endpoints", {w.left.lo, w.left.hi}},
                    {"right_endpoints", {w.right.lo, w.right.hi}},
                    {"left_forced_point", w.left_forced},
                    {"right_forced_point", w.right_forced},
                    {"shared_point", w.shared}};
  }
  j["index_sets"] = {{"I_tilde", cert.index.I_tilde}, {"J_tilde", cert.index.J_tilde}, {"K_tilde", cert.index.K_tilde}};
  return j;
}

}  // namespace recourse
