#include "recourse/profpic.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

#include "recourse/rng.hpp"

namespace recourse {

std::string label_name(Label l) { return l == Label::Accepted ? "accepted" : "rejected"; }

namespace {

bool in_ellipse(double x, double y, double cx, double cy, double rx, double ry) {
  double u = (x - cx) / rx, v = (y - cy) / ry;
  return u * u + v * v <= 1.0;
}

}  // namespace

std::vector<ProfileImage> generate_dataset(const DatasetConfig& cfg) {
  if (cfg.n < 4) throw BadDims("dataset needs at least four images");
  if (cfg.width < 8 || cfg.height < 8) throw BadDims("images must be at least 8x8");
  if (cfg.contrast_levels.empty() || cfg.contrast_levels.front() != 0.0)
    throw ConfigError("the first contrast level must be 0");
  std::vector<ProfileImage> out;
  const double W = static_cast<double>(cfg.width), H = static_cast<double>(cfg.height);
  for (std::size_t i = 0; i < cfg.n; ++i) {
    Substream rs(cfg.seed, i);
    ProfileImage img;
    img.id = static_cast<int>(i);
    img.width = cfg.width;
    img.height = cfg.height;
    double b = 64.0 + static_cast<double>(rs.below(129));
    double c = cfg.contrast_levels[i % cfg.contrast_levels.size()];
    double s = rs.below(2) ? 1.0 : -1.0;
    if (b + s * c > 255.0 || b + s * c < 0.0) s = -s;
    img.background = b;
    img.person_value = b + s * c;
    img.contrast = c;
    img.label = c > cfg.cutoff ? Label::Accepted : Label::Rejected;
    double jx = static_cast<double>(rs.below(5)) - 2.0, jy = static_cast<double>(rs.below(3)) - 1.0;
    img.pixels.assign(cfg.width * cfg.height, b);
    img.person.assign(cfg.width * cfg.height, 0);
    for (std::size_t r = 0; r < cfg.height; ++r)
      for (std::size_t q = 0; q < cfg.width; ++q) {
        double x = static_cast<double>(q) + 0.5, y = static_cast<double>(r) + 0.5;
        bool head = in_ellipse(x, y, W / 2 + jx, 0.33 * H + jy, 0.16 * W, 0.19 * H);
        bool body = y > 0.58 * H && in_ellipse(x, y, W / 2, 1.02 * H, 0.40 * W, 0.38 * H);
        if (head || body) {
          img.person[r * cfg.width + q] = 1;
          img.pixels[r * cfg.width + q] = img.person_value;
        }
      }
    out.push_back(std::move(img));
  }
  return out;
}

double contrast_value(const std::vector<char>& person, Point x) {
  double si = 0.0, sj = 0.0;
  std::size_t ni = 0, nj = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (person[k]) {
      si += x[k];
      ++ni;
    } else {
      sj += x[k];
      ++nj;
    }
  }
  if (ni == 0 || nj == 0) throw BadDims("person mask must be nonempty on both sides");
  double d = si / static_cast<double>(ni) - sj / static_cast<double>(nj);
  return d * d;
}

Model contrast_model(const ProfileImage& img) {
  auto mask = std::make_shared<const std::vector<char>>(img.person);
  std::size_t ni = static_cast<std::size_t>(std::count(mask->begin(), mask->end(), 1));
  std::size_t nj = mask->size() - ni;
  if (ni == 0 || nj == 0) throw BadDims("person mask must be nonempty on both sides");
  Model m;
  m.id = "contrast";
  m.dim = mask->size();
  m.gradient_affine = true;
  m.eval = [mask](Point x) { return contrast_value(*mask, x); };
  const double wi = 1.0 / static_cast<double>(ni), wj = 1.0 / static_cast<double>(nj);
  m.analytic_gradient = [mask, wi, wj](Point x) {
    double si = 0.0, sj = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) ((*mask)[k] ? si : sj) += x[k];
    double d = si * wi - sj * wj;
    Vec g(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) g[k] = (*mask)[k] ? 2.0 * wi * d : -2.0 * wj * d;
    return g;
  };
  m.probe_directions = [mask, wi, wj](Point) {
    Vec g(mask->size());
    for (std::size_t k = 0; k < g.size(); ++k) g[k] = (*mask)[k] ? wi : -wj;
    return std::vector<Vec>{g};
  };
  m.params = {{"person_pixels", static_cast<double>(ni)}, {"background_pixels", static_cast<double>(nj)}};
  return m;
}

Threshold threshold_sweep(const std::vector<ProfileImage>& data) {
  if (data.empty()) throw ConfigError("empty dataset");
  std::vector<double> f;
  for (const auto& img : data) f.push_back(contrast_value(img.person, img.pixels));
  std::vector<double> v = f;
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  std::vector<double> cand{v.front() - 1.0};
  for (std::size_t i = 0; i + 1 < v.size(); ++i) cand.push_back(0.5 * (v[i] + v[i + 1]));
  cand.push_back(v.back() + 1.0);
  Threshold best{cand.front(), -1.0};
  for (double lam : cand) {
    std::size_t ok = 0;
    for (std::size_t i = 0; i < data.size(); ++i)
      ok += (f[i] >= lam) == (data[i].label == Label::Accepted);
    double acc = static_cast<double>(ok) / static_cast<double>(data.size());
    if (acc > best.accuracy) best = {lam, acc};
  }
  return best;
}

std::vector<int> block_segments(std::size_t height, std::size_t width, std::size_t block) {
  if (block == 0) throw ConfigError("block size must be positive");
  std::size_t bw = (width + block - 1) / block;
  std::vector<int> seg(height * width);
  for (std::size_t r = 0; r < height; ++r)
    for (std::size_t q = 0; q < width; ++q) seg[r * width + q] = static_cast<int>((r / block) * bw + q / block);
  return seg;
}

std::vector<int> manual_segments(const ProfileImage& img) {
  std::vector<int> seg(img.person.size());
  for (std::size_t k = 0; k < seg.size(); ++k) seg[k] = img.person[k] ? 0 : 1;
  return seg;
}

std::vector<std::string> experiment_methods() {
  return {"vanilla_gradient", "smoothgrad", "integrated_gradients", "lime_manual", "lime_auto", "shap"};
}

ExperimentReport run_experiment(const std::vector<ProfileImage>& data, const ExperimentConfig& cfg, Exec exec) {
  ExperimentReport rep;
  rep.threshold = threshold_sweep(data);
  for (const auto& img : data) {
    Model m = contrast_model(img);
    const double N = static_cast<double>(m.dim);
    rep.delta = cfg.delta > 0.0 ? cfg.delta : 128.0 * std::sqrt(N);
    RecourseProblem p(m, UtilitySpec::class_score(), rep.threshold.lambda, rep.delta);
    const Vec& x = img.pixels;
    ImageOutcome io;
    io.id = img.id;
    io.label = img.label;
    io.score = m(x);

    Attribution vg = vanilla_gradient(m, x);
    SmoothGradConfig sg_cfg;
    sg_cfg.analytic = true;
    Attribution sg = smoothgrad(m, x, sg_cfg, exec);
    IGConfig ig_cfg;
    ig_cfg.analytic = true;
    Attribution ig = integrated_gradients(m, x, ig_cfg);
    io.sg_equals_vg = sg.weights == vg.weights;
    Vec half(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) half[k] = 0.5 * x[k];
    Vec vg_half = m.gradient(half);
    for (std::size_t k = 0; k < x.size(); ++k)
      io.ig_identity_error = std::max(io.ig_identity_error, std::abs(ig.weights[k] - x[k] * vg_half[k]));

    LimeConfig lc = cfg.lime;
    lc.seed = cfg.seed + static_cast<std::uint64_t>(img.id);
    LimeResult lm = lime(m, x, manual_segments(img), lc, exec);
    LimeResult la = lime(m, x, block_segments(img.height, img.width, cfg.block), lc, exec);
    ShapConfig sc = cfg.shap;
    sc.seed = cfg.seed + static_cast<std::uint64_t>(img.id);
    ShapResult sh = kernel_shap(m, x, sc, block_segments(img.height, img.width, cfg.block), exec);

    std::vector<std::pair<std::string, Vec>> all{{"vanilla_gradient", vg.weights},
                                                 {"smoothgrad", sg.weights},
                                                 {"integrated_gradients", ig.weights},
                                                 {"lime_manual", lm.pixels.weights},
                                                 {"lime_auto", la.pixels.weights},
                                                 {"shap", sh.pixels.weights}};
    for (auto& [name, w] : all) {
      MethodOutcome mo;
      mo.method = name;
      for (double e : w) mo.max_abs = std::max(mo.max_abs, std::abs(e));
      mo.flat = mo.max_abs <= kFlatMap;
      mo.verdict = check_recourse_phi(p, x, w, cfg.resolution);
      mo.weights = std::move(w);
      io.methods.push_back(std::move(mo));
    }
    rep.images.push_back(std::move(io));
  }
  return rep;
}

RgbImage saliency_image(const Vec& weights, std::size_t width, std::size_t height) {
  if (weights.size() != width * height) throw BadDims("saliency size does not match the image");
  double mx = 0.0;
  for (double w : weights) mx = std::max(mx, std::abs(w));
  RgbImage img;
  img.width = width;
  img.height = height;
  img.rgb.resize(3 * weights.size());
  const double mid[3] = {128, 128, 128}, pos[3] = {215, 48, 39}, neg[3] = {49, 54, 149};
  for (std::size_t k = 0; k < weights.size(); ++k) {
    double v = mx > 0.0 ? weights[k] / mx : 0.0;
    const double* end = v >= 0.0 ? pos : neg;
    double a = std::abs(v);
    for (int c = 0; c < 3; ++c)
      img.rgb[3 * k + c] = static_cast<std::uint8_t>(std::lround(mid[c] + a * (end[c] - mid[c])));
  }
  return img;
}

void render_saliency(const Vec& weights, std::size_t width, std::size_t height, const std::string& stem) {
  RgbImage img = saliency_image(weights, width, height);
  write_png(stem + ".png", img);
  write_ppm(stem + ".ppm", img);
}

GrayImage gray_image(const ProfileImage& img) {
  GrayImage g;
  g.width = img.width;
  g.height = img.height;
  g.data.resize(img.pixels.size());
  for (std::size_t k = 0; k < g.data.size(); ++k)
    g.data[k] = static_cast<std::uint8_t>(std::clamp(std::lround(img.pixels[k]), 0L, 255L));
  return g;
}

nlohmann::json manifest(const std::vector<ProfileImage>& data, const DatasetConfig& cfg) {
  nlohmann::json j;
  j["n"] = cfg.n;
  j["width"] = cfg.width;
  j["height"] = cfg.height;
  j["contrast_levels"] = cfg.contrast_levels;
  j["cutoff"] = cfg.cutoff;
  j["seed"] = cfg.seed;
  nlohmann::json imgs = nlohmann::json::array();
  for (const auto& img : data)
    imgs.push_back({{"id", img.id},
                    {"label", label_name(img.label)},
                    {"background", img.background},
                    {"person", img.person_value},
                    {"contrast", img.contrast},
                    {"person_pixels", std::count(img.person.begin(), img.person.end(), 1)},
                    {"score", contrast_value(img.person, img.pixels)}});
  j["images"] = imgs;
  return j;
}

nlohmann::json to_json(const ExperimentReport& r, bool include_weights) {
  nlohmann::json j;
  j["lambda"] = r.threshold.lambda;
  j["accuracy"] = r.threshold.accuracy;
  j["delta"] = r.delta;
  nlohmann::json imgs = nlohmann::json::array();
  for (const auto& io : r.images) {
    nlohmann::json ij{{"id", io.id},
                      {"label", label_name(io.label)},
                      {"score", io.score},
                      {"sg_equals_vg", io.sg_equals_vg},
                      {"ig_identity_error", io.ig_identity_error}};
    nlohmann::json ms;
    for (const auto& mo : io.methods) {
      nlohmann::json mj{{"max_abs", mo.max_abs},
                        {"flat", mo.flat},
                        {"verdict", status_name(mo.verdict.status)},
                        {"searched", mo.verdict.searched},
                        {"step", mo.verdict.step}};
      if (include_weights) mj["weights"] = mo.weights;
      ms[mo.method] = mj;
    }
    ij["methods"] = ms;
    imgs.push_back(ij);
  }
  j["images"] = imgs;
  return j;
}

std::string markdown_table(const ExperimentReport& r) {
  std::ostringstream os;
  os << "lambda = " << r.threshold.lambda << ", accuracy = " << r.threshold.accuracy << ", delta = " << r.delta
     << "\n\n| image | label | f(x) |";
  for (const auto& m : experiment_methods()) os << " " << m << " |";
  os << "\n|---|---|---|";
  for (std::size_t i = 0; i < experiment_methods().size(); ++i) os << "---|";
  os << "\n";
  for (const auto& io : r.images) {
    os << "| " << io.id << " | " << label_name(io.label) << " | " << io.score << " |";
    for (const auto& mo : io.methods) os << " " << status_name(mo.verdict.status) << (mo.flat ? " (flat)" : "") << " |";
    os << "\n";
  }
  return os.str();
}

}  // namespace recourse
