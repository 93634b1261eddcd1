#include "recourse/attributions.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "recourse/rng.hpp"

namespace recourse {

namespace {

constexpr std::size_t kChunk = 256;

void require_point(const Model& m, Point x) {
  if (x.size() != m.dim) throw BadDims(m.id + ": expected dim " + std::to_string(m.dim));
  if (!m.domain.contains(x)) throw DomainError(m.id + ": point outside domain");
}

Vec baseline_or_zero(const Vec& b, std::size_t d) {
  if (b.empty()) return Vec(d, 0.0);
  if (b.size() != d) throw BadDims("baseline has wrong dimension");
  return b;
}

}  // namespace

std::size_t group_count(const Grouping& g, std::size_t dim) {
  if (g.empty()) return dim;
  if (g.size() != dim) throw BadDims("grouping has wrong length");
  int mx = -1;
  for (int v : g) {
    if (v < 0) throw ConfigError("negative feature group id");
    mx = std::max(mx, v);
  }
  std::vector<char> seen(static_cast<std::size_t>(mx) + 1, 0);
  for (int v : g) seen[static_cast<std::size_t>(v)] = 1;
  if (std::find(seen.begin(), seen.end(), 0) != seen.end()) throw ConfigError("feature group ids are not contiguous");
  return static_cast<std::size_t>(mx) + 1;
}

Attribution vanilla_gradient(const Model& model, Point x) {
  require_point(model, x);
  Attribution a;
  a.at.assign(x.begin(), x.end());
  a.weights = model.gradient(x);
  a.method = "vg";
  a.info["analytic"] = model.has_gradient() ? 1.0 : 0.0;
  return a;
}

Attribution smoothgrad(const Model& model, Point x, const SmoothGradConfig& cfg, Exec exec) {
  require_point(model, x);
  if (!(cfg.sigma > 0.0)) throw ConfigError("smoothgrad sigma must be positive");
  Attribution a;
  a.at.assign(x.begin(), x.end());
  a.method = "sg";
  if (cfg.analytic) {
    if (!model.gradient_affine) throw UnsupportedModel("no closed-form smoothgrad for model '" + model.id + "'");
    a.weights = model.gradient(x);
    a.info["analytic"] = 1.0;
    return a;
  }
  if (cfg.samples == 0) throw ConfigError("smoothgrad needs at least one sample");
  const std::size_t d = model.dim;
  const std::size_t nchunks = (cfg.samples + kChunk - 1) / kChunk;
  std::vector<Vec> sums(nchunks, Vec(d, 0.0));
  std::vector<std::size_t> clamped(nchunks, 0);
  auto run = [&](std::size_t c) {
    Substream rs(cfg.seed, c);
    std::size_t begin = c * kChunk, end = std::min(cfg.samples, begin + kChunk);
    Vec y(d);
    for (std::size_t s = begin; s < end; ++s) {
      for (std::size_t i = 0; i < d; ++i) y[i] = x[i] + cfg.sigma * rs.normal();
      Vec yc = y;
      if (!model.domain.contains(yc)) {
        yc = model.domain.clamp(yc);
        ++clamped[c];
      }
      Vec g = model.gradient(yc);
      for (std::size_t i = 0; i < d; ++i) sums[c][i] += g[i];
    }
  };
  const long n = static_cast<long>(nchunks);
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
    for (long c = 0; c < n; ++c) run(static_cast<std::size_t>(c));
  } else {
    for (long c = 0; c < n; ++c) run(static_cast<std::size_t>(c));
  }
  a.weights.assign(d, 0.0);
  std::size_t total_clamped = 0;
  for (std::size_t c = 0; c < nchunks; ++c) {
    for (std::size_t i = 0; i < d; ++i) a.weights[i] += sums[c][i];
    total_clamped += clamped[c];
  }
  for (double& w : a.weights) w /= static_cast<double>(cfg.samples);
  a.info["analytic"] = 0.0;
  a.info["samples"] = static_cast<double>(cfg.samples);
  a.info["clamped"] = static_cast<double>(total_clamped);
  a.info["sigma"] = cfg.sigma;
  return a;
}

Attribution integrated_gradients(const Model& model, Point x, const IGConfig& cfg) {
  require_point(model, x);
  const std::size_t d = model.dim;
  Vec x0 = baseline_or_zero(cfg.baseline, d);
  Attribution a;
  a.at.assign(x.begin(), x.end());
  a.method = "ig";
  if (cfg.analytic) {
    if (!model.gradient_affine) throw UnsupportedModel("no closed-form integrated gradients for model '" + model.id + "'");
    Vec mid(d);
    for (std::size_t i = 0; i < d; ++i) mid[i] = 0.5 * (x[i] + x0[i]);
    Vec g = model.gradient(mid);
    a.weights.resize(d);
    for (std::size_t i = 0; i < d; ++i) a.weights[i] = (x[i] - x0[i]) * g[i];
    a.info["analytic"] = 1.0;
    return a;
  }
  if (cfg.steps < 2) throw ConfigError("integrated gradients needs steps >= 2");
  const std::size_t n = cfg.steps;
  Vec acc(d, 0.0), p(d);
  for (std::size_t k = 0; k < n; ++k) {
    double alpha = static_cast<double>(k) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < d; ++i) p[i] = x0[i] + alpha * (x[i] - x0[i]);
    if (!model.domain.contains(p)) throw DomainError("integration path leaves the domain of '" + model.id + "'");
    Vec g = model.gradient(p);
    double w = (k == 0 || k == n - 1) ? 0.5 : 1.0;
    for (std::size_t i = 0; i < d; ++i) acc[i] += w * g[i];
  }
  a.weights.resize(d);
  for (std::size_t i = 0; i < d; ++i) a.weights[i] = (x[i] - x0[i]) * acc[i] / static_cast<double>(n - 1);
  a.info["analytic"] = 0.0;
  a.info["steps"] = static_cast<double>(n);
  return a;
}

// ---------------------------------------------------------------------------
// LIME
// ---------------------------------------------------------------------------

LimeResult lime(const Model& model, Point x, const std::vector<int>& segments, const LimeConfig& cfg, Exec exec) {
  require_point(model, x);
  if (!(cfg.kernel_width > 0.0)) throw ConfigError("lime kernel_width must be positive");
  if (cfg.ridge < 0.0) throw ConfigError("lime ridge must be nonnegative");
  if (segments.size() != model.dim) throw BadDims("segmentation does not cover every coordinate exactly once");
  const std::size_t nseg = group_count(segments, model.dim);
  const std::size_t npairs = std::max<std::size_t>(1, cfg.samples / 2);
  const std::size_t rows = 1 + 2 * npairs;

  std::vector<std::vector<char>> Z(rows, std::vector<char>(nseg, 1));
  for (std::size_t p = 0; p < npairs; ++p) {
    Substream rs(cfg.seed, p);
    auto& z = Z[1 + 2 * p];
    auto& zc = Z[2 + 2 * p];
    for (std::size_t s = 0; s < nseg; ++s) {
      z[s] = static_cast<char>(rs.bits() >> 63);
      zc[s] = static_cast<char>(1 - z[s]);
    }
  }
  std::vector<double> yv(rows);
  auto eval_row = [&](std::size_t r) {
    Vec xp(x.begin(), x.end());
    for (std::size_t k = 0; k < xp.size(); ++k)
      if (!Z[r][static_cast<std::size_t>(segments[k])]) xp[k] = cfg.fused_value;
    yv[r] = model(xp);
  };
  const long nr = static_cast<long>(rows);
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
    for (long r = 0; r < nr; ++r) eval_row(static_cast<std::size_t>(r));
  } else {
    for (long r = 0; r < nr; ++r) eval_row(static_cast<std::size_t>(r));
  }

  const std::size_t p = nseg + 1;
  Eigen::MatrixXd A(rows + nseg, p);
  Eigen::VectorXd b(rows + nseg);
  A.setZero();
  b.setZero();
  for (std::size_t r = 0; r < rows; ++r) {
    std::size_t off = 0;
    for (char c : Z[r]) off += c ? 0 : 1;
    double D = static_cast<double>(off) / static_cast<double>(nseg);
    double sw = std::sqrt(std::exp(-D * D / (cfg.kernel_width * cfg.kernel_width)));
    A(static_cast<long>(r), 0) = sw;
    for (std::size_t s = 0; s < nseg; ++s) A(static_cast<long>(r), static_cast<long>(s + 1)) = sw * Z[r][s];
    b(static_cast<long>(r)) = sw * yv[r];
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> design(A.topRows(static_cast<long>(rows)));
  if (design.rank() < static_cast<long>(p))
    throw DegenerateDesign("lime design has rank " + std::to_string(design.rank()) + " < " + std::to_string(p) +
                           " (segments: " + std::to_string(nseg) + ")");
  double sr = std::sqrt(cfg.ridge);
  for (std::size_t s = 0; s < nseg; ++s) A(static_cast<long>(rows + s), static_cast<long>(s + 1)) = sr;
  Eigen::VectorXd theta = A.colPivHouseholderQr().solve(b);

  LimeResult out;
  out.intercept = theta(0);
  out.segment_weights.resize(nseg);
  for (std::size_t s = 0; s < nseg; ++s) out.segment_weights[s] = theta(static_cast<long>(s + 1));
  out.pixels.at.assign(x.begin(), x.end());
  out.pixels.method = "lime";
  out.pixels.weights.resize(model.dim);
  for (std::size_t k = 0; k < model.dim; ++k)
    out.pixels.weights[k] = out.segment_weights[static_cast<std::size_t>(segments[k])];
  out.pixels.info["segments"] = static_cast<double>(nseg);
  out.pixels.info["samples"] = static_cast<double>(rows);
  out.pixels.info["kernel_width"] = cfg.kernel_width;
  out.pixels.info["ridge"] = cfg.ridge;
  return out;
}

// ---------------------------------------------------------------------------
// SHAP
// ---------------------------------------------------------------------------

namespace {

using LMatrix = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
using LVector = Eigen::Matrix<long double, Eigen::Dynamic, 1>;

long double binom(std::size_t n, std::size_t k) {
  long double r = 1.0L;
  for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<long double>(n - k + i) / static_cast<long double>(i);
  return r;
}

Vec composite(Point x, const Vec& base, const Grouping& g, std::uint64_t mask) {
  Vec y(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    std::size_t f = g.empty() ? k : static_cast<std::size_t>(g[k]);
    y[k] = (mask >> f) & 1U ? x[k] : base[k];
  }
  return y;
}

// Solve the efficiency-constrained least squares: rows are coalition masks
// with weights; the last feature is eliminated.
Vec constrained_wls(const std::vector<std::uint64_t>& masks, const std::vector<long double>& w,
                    const std::vector<double>& v, double v0, double vN, std::size_t d) {
  const long double delta = static_cast<long double>(vN) - v0;
  if (d == 1) return {static_cast<double>(delta)};
  const std::size_t m = masks.size();
  LMatrix X(static_cast<long>(m), static_cast<long>(d - 1));
  LVector y(static_cast<long>(m));
  for (std::size_t r = 0; r < m; ++r) {
    long double sw = std::sqrt(w[r]);
    long double zl = (masks[r] >> (d - 1)) & 1U ? 1.0L : 0.0L;
    for (std::size_t i = 0; i + 1 < d; ++i) {
      long double zi = (masks[r] >> i) & 1U ? 1.0L : 0.0L;
      X(static_cast<long>(r), static_cast<long>(i)) = sw * (zi - zl);
    }
    y(static_cast<long>(r)) = sw * (static_cast<long double>(v[r]) - v0 - zl * delta);
  }
  Eigen::ColPivHouseholderQR<LMatrix> qr(X);
  if (qr.rank() < static_cast<long>(d - 1))
    throw DegenerateDesign("shap design has rank " + std::to_string(qr.rank()) + " < " + std::to_string(d - 1));
  LVector phi = qr.solve(y);
  Vec out(d);
  long double rest = delta;
  for (std::size_t i = 0; i + 1 < d; ++i) {
    out[i] = static_cast<double>(phi(static_cast<long>(i)));
    rest -= phi(static_cast<long>(i));
  }
  out[d - 1] = static_cast<double>(rest);
  return out;
}

}  // namespace

std::vector<double> coalition_table(const Model& model, Point x, const Vec& baseline, const Grouping& groups,
                                    Exec exec) {
  const std::size_t d = group_count(groups, model.dim);
  if (d > kShapExactMaxFeatures) throw ConfigError("coalition table needs at most 25 features");
  Vec base = baseline_or_zero(baseline, model.dim);
  const long n = 1L << d;
  std::vector<double> v(static_cast<std::size_t>(n));
  auto fill = [&](long m) { v[static_cast<std::size_t>(m)] = model(composite(x, base, groups, static_cast<std::uint64_t>(m))); };
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
    for (long m = 0; m < n; ++m) fill(m);
  } else {
    for (long m = 0; m < n; ++m) fill(m);
  }
  return v;
}

Vec shapley_from_table(const std::vector<double>& v, std::size_t d) {
  if (v.size() != (std::size_t{1} << d)) throw BadDims("coalition table size mismatch");
  std::vector<long double> w(d);
  for (std::size_t s = 0; s < d; ++s) w[s] = 1.0L / (static_cast<long double>(d) * binom(d - 1, s));
  Vec phi(d);
  const std::uint64_t n = std::uint64_t{1} << d;
  for (std::size_t i = 0; i < d; ++i) {
    long double acc = 0.0L;
    const std::uint64_t bit = std::uint64_t{1} << i;
    for (std::uint64_t m = 0; m < n; ++m) {
      if (m & bit) continue;
      std::size_t s = static_cast<std::size_t>(__builtin_popcountll(m));
      acc += w[s] * (static_cast<long double>(v[m | bit]) - v[m]);
    }
    phi[i] = static_cast<double>(acc);
  }
  return phi;
}

Vec shapley_kernel_exhaustive(const std::vector<double>& v, std::size_t d) {
  if (v.size() != (std::size_t{1} << d)) throw BadDims("coalition table size mismatch");
  const std::uint64_t n = std::uint64_t{1} << d;
  std::vector<std::uint64_t> masks;
  std::vector<long double> w;
  std::vector<double> vals;
  for (std::uint64_t m = 1; m + 1 < n; ++m) {
    std::size_t s = static_cast<std::size_t>(__builtin_popcountll(m));
    masks.push_back(m);
    w.push_back(static_cast<long double>(d - 1) / (binom(d, s) * static_cast<long double>(s * (d - s))));
    vals.push_back(v[m]);
  }
  return constrained_wls(masks, w, vals, v[0], v[n - 1], d);
}

ShapResult kernel_shap(const Model& model, Point x, const ShapConfig& cfg, const Grouping& groups, Exec exec) {
  require_point(model, x);
  const std::size_t d = group_count(groups, model.dim);
  Vec base = baseline_or_zero(cfg.baseline, model.dim);
  ShapResult out;
  if (cfg.mode == ShapMode::Exact || cfg.mode == ShapMode::KernelExhaustive) {
    if (d > kShapExactMaxFeatures) throw ConfigError("exact shap supports at most 25 features; use sampled mode");
    std::vector<double> v = coalition_table(model, x, base, groups, exec);
    out.feature_values = cfg.mode == ShapMode::Exact ? shapley_from_table(v, d) : shapley_kernel_exhaustive(v, d);
    out.base_value = v.front();
    out.full_value = v.back();
  } else {
    if (d > 64) throw ConfigError("sampled shap supports at most 64 features");
    if (d < 2) throw ConfigError("sampled shap needs at least 2 features");
    const std::size_t npairs = std::max<std::size_t>(1, cfg.coalitions / 2);
    // size distribution proportional to (d-1) / (s (d-s))
    std::vector<double> cdf(d - 1);
    double tot = 0.0;
    for (std::size_t s = 1; s < d; ++s) {
      tot += 1.0 / static_cast<double>(s * (d - s));
      cdf[s - 1] = tot;
    }
    std::vector<std::uint64_t> masks(2 * npairs);
    const std::uint64_t full = d == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << d) - 1;
    for (std::size_t p = 0; p < npairs; ++p) {
      Substream rs(cfg.seed, p);
      double u = rs.uniform() * tot;
      std::size_t s = static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin()) + 1;
      s = std::min(s, d - 1);
      std::vector<std::size_t> idx(d);
      for (std::size_t i = 0; i < d; ++i) idx[i] = i;
      std::uint64_t m = 0;
      for (std::size_t i = 0; i < s; ++i) {
        std::size_t j = i + static_cast<std::size_t>(rs.below(d - i));
        std::swap(idx[i], idx[j]);
        m |= std::uint64_t{1} << idx[i];
      }
      masks[2 * p] = m;
      masks[2 * p + 1] = full & ~m;
    }
    std::vector<double> v(masks.size());
    const long nm = static_cast<long>(masks.size());
    auto fill = [&](long r) { v[static_cast<std::size_t>(r)] = model(composite(x, base, groups, masks[static_cast<std::size_t>(r)])); };
    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
      for (long r = 0; r < nm; ++r) fill(r);
    } else {
      for (long r = 0; r < nm; ++r) fill(r);
    }
    out.base_value = model(base);
    out.full_value = model(x);
    std::vector<long double> w(masks.size(), 1.0L);
    out.feature_values = constrained_wls(masks, w, v, out.base_value, out.full_value, d);
  }
  std::vector<std::size_t> sizes(d, 0);
  for (std::size_t k = 0; k < model.dim; ++k) ++sizes[groups.empty() ? k : static_cast<std::size_t>(groups[k])];
  out.pixels.at.assign(x.begin(), x.end());
  out.pixels.method = "shap";
  out.pixels.weights.resize(model.dim);
  for (std::size_t k = 0; k < model.dim; ++k) {
    std::size_t f = groups.empty() ? k : static_cast<std::size_t>(groups[k]);
    out.pixels.weights[k] = out.feature_values[f] / static_cast<double>(sizes[f]);
  }
  out.pixels.info["features"] = static_cast<double>(d);
  out.pixels.info["mode"] = static_cast<double>(static_cast<int>(cfg.mode));
  return out;
}

}  // namespace recourse
