// Acceptance run: one PASS/FAIL line per criterion; exits 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fixtures.hpp"
#include "recourse/attributions.hpp"
#include "recourse/models.hpp"
#include "recourse/multidim.hpp"
#include "recourse/onedim.hpp"
#include "recourse/profpic.hpp"
#include "recourse/rng.hpp"
#include "recourse/verify.hpp"

using namespace recourse;
namespace fs = std::filesystem;

#ifndef RECOURSE_CLI
#error "RECOURSE_CLI must name the command-line binary"
#endif

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream note;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      if (!pass) note << "; ";
      note << what;
      pass = false;
    }
  }
};

int run_cli(const std::string& args, const fs::path& log) {
  std::string cmd = std::string(RECOURSE_CLI) + " " + args + " > " + log.string() + " 2>&1";
  int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

const fs::path kWork = "acceptance_runs";

// ---------------------------------------------------------------------------

void c1_quad_overlap(Outcome& o) {
  const double step = 1e-3;
  for (auto [tau, delta] : {std::pair{1.0, 2.0}, {0.5, 1.5}, {2.0, 3.0}}) {
    RecourseProblem p(models::quad(), UtilitySpec::difference(), tau, delta);
    const double e = (delta * delta - tau) / (2.0 * delta);
    LRO exact = compute_lro(p, LroMode::Exact);
    LRO sampled = compute_lro(p, LroMode::Sampled, SampleGrid{-5.0, 5.0, step});
    IntervalSet xe = intersection(exact.L, exact.R), xs = intersection(sampled.L, sampled.R);
    std::string tag = "(" + format_real(tau) + "," + format_real(delta) + ")";
    o.require(xe.size() == 1 && std::abs(xe[0].lo + e) <= 1e-9 && std::abs(xe[0].hi - e) <= 1e-9,
              "exact overlap " + to_string(xe) + " at " + tag);
    o.require(xs.size() == 1 && std::abs(xs[0].lo + e) <= 2 * step && std::abs(xs[0].hi - e) <= 2 * step,
              "sampled overlap " + to_string(xs) + " at " + tag);
  }
  if (o.pass) o.note << "L n R = [-(d^2-t)/2d, (d^2-t)/2d] in both modes for 3 (tau, delta)";
}

void c2_thm1(Outcome& o) {
  fs::path dir = kWork / "thm1";
  int rc = run_cli("scan1d --model thm1 --param z1=0 --param z2=1 --param delta=1 --utility diff --tau 0.5 --delta 1 "
                   "--out " + dir.string(),
                   kWork / "thm1.log");
  o.require(rc == 0, "scan1d exit " + std::to_string(rc));
  if (rc != 0) return;
  auto j = nlohmann::json::parse(slurp(dir / "certificate.json"));
  o.require(j["verdict"] == "impossible", "verdict " + j["verdict"].dump());
  if (!o.pass) return;
  double s = j["witness"]["shared_point"];
  o.require(std::abs(s) <= 0.125, "shared point " + format_real(s));

  // Same run through the library, with the witness checked exactly.
  RecourseProblem p(models::thm1(0, 1, 1), UtilitySpec::difference(), 0.5, 1.0);
  LRO lro = compute_lro(p, LroMode::Exact);
  Certificate cert = decide(lro);
  std::string why;
  o.require(!cert.possible && cert.witness && check_witness(lro, *cert.witness, &why), "library witness: " + why);
  if (o.pass) o.note << "impossible, shared point " << format_real(s);
}

void c3_example1(Outcome& o) {
  Model m = models::quad();
  SmoothGradConfig cfg;
  cfg.analytic = true;
  Evaluator phi = [&](Point x) { return smoothgrad(m, x, cfg).weights; };
  int exact = 0;
  for (int k = 0; k < 100; ++k) {
    double x = -5.0 + 0.1 * k + 0.0137;
    exact += phi(Point(&x, 1))[0] == 2.0 * x;
  }
  o.require(exact == 100, std::to_string(exact) + "/100 points equal 2x");
  std::size_t checked = 0;
  for (auto [tau, delta] : {std::pair{1.0, 2.0}, {1.0, 1.0}, {0.5, 1.5}, {2.0, 3.0}}) {
    RecourseProblem p(m, UtilitySpec::difference(), tau, delta);
    double z = 0.0;
    o.require(check_recourse_at(p, phi, Point(&z, 1)).status == VerdictStatus::Violated,
              "not Violated at 0 for delta " + format_real(delta));
    for (int k = 0; k <= 40; ++k)
      for (double sgn : {-1.0, 1.0}) {
        double x = sgn * (0.05 * delta + k * 0.075);
        ++checked;
        o.require(check_recourse_at(p, phi, Point(&x, 1)).status == VerdictStatus::Satisfied,
                  "not Satisfied at " + format_real(x));
      }
  }
  if (o.pass) o.note << "SG = 2x at 100 points; Violated at 0; " << checked << " points with |x| >= 0.05 delta Satisfied";
}

void c4_example2(Outcome& o) {
  RecourseProblem p(models::gauss(), UtilitySpec::ratio(true), 2.0, std::sqrt(std::log(2.0)) + 0.2);
  IGConfig cfg;
  cfg.steps = 2000;
  Evaluator phi = [&](Point x) { return integrated_gradients(p.model(), x, cfg).weights; };
  double worst = 0.0;
  for (int k = 0; k <= 600; ++k) {
    double x = -3.0 + 0.01 * k;
    worst = std::max(worst, std::abs(phi(Point(&x, 1))[0] - (std::exp(-x * x) - 1.0)));
  }
  o.require(worst <= 1e-6, "max IG error " + format_real(worst));
  for (double x : {0.0, p.delta() + 0.1})
    o.require(check_recourse_at(p, phi, Point(&x, 1)).status == VerdictStatus::Violated,
              "not Violated at " + format_real(x));
  if (o.pass) o.note << "max |IG - (f(x) - 1)| = " << worst << " on 601 points; Violated at 0 and delta + 0.1";
}

void c5_example3(Outcome& o) {
  RecourseProblem p(models::circle(), UtilitySpec::class_score(), 0.0, 1.0);
  Evaluator phi = projection_evaluator(default_family_builder(p));
  JumpReport base = continuity_probe(phi, {Vec{-1e-3, 0.0}}, 2e-3, 1.0);
  JumpReport half = continuity_probe(phi, {Vec{-5e-4, 0.0}}, 1e-3, 1.0);
  double m0 = base.jumps.empty() ? 0.0 : base.jumps[0].magnitude;
  double m1 = half.jumps.empty() ? 0.0 : half.jumps[0].magnitude;
  o.require(m0 >= 1.9 && base.jumps[0].discontinuity, "jump " + format_real(m0));
  o.require(m1 >= 1.9, "halved-step jump " + format_real(m1));
  std::vector<Vec> pts;
  for (int i = 0; i < 20; ++i)
    for (int k = 0; k < 20; ++k) {
      double r = 0.05 + 0.045 * i, a = 2.0 * M_PI * k / 20.0;
      pts.push_back({r * std::cos(a), r * std::sin(a)});
    }
  ScanReport s = scan_recourse(p, phi, pts);
  o.require(s.violated == 0 && s.satisfied == 400, std::to_string(s.violated) + " Violated in the disc");
  if (o.pass) o.note << "jump " << m0 << " (halved " << m1 << "); 400 in-disc points Satisfied";
}

void c6_halfspace(Outcome& o) {
  const Vec beta{1.0, 2.0};
  const double tau = 0.5, delta = 1.0, bb = dot(beta, beta);
  RecourseProblem p(models::linear(beta), UtilitySpec::class_score(), tau, delta);
  Evaluator phi = projection_evaluator(default_family_builder(p));
  auto oracle = [&](Point x) {
    double t = std::max(0.0, tau - dot(beta, x)) / bb;
    return Vec{t * beta[0], t * beta[1]};
  };
  Substream rng(11, 0);
  std::size_t lip_fail = 0;
  double oracle_err = 0.0;
  for (int k = 0; k < 10000; ++k) {
    Vec x{rng.uniform() * 8 - 4, rng.uniform() * 8 - 4}, y{rng.uniform() * 8 - 4, rng.uniform() * 8 - 4};
    Vec fx = phi(x), fy = phi(y);
    if (dist2(fx, fy) > dist2(x, y) + 1e-9) ++lip_fail;
    oracle_err = std::max(oracle_err, dist2(fx, oracle(x)));
  }
  o.require(lip_fail == 0, std::to_string(lip_fail) + " Lipschitz failures");
  o.require(oracle_err <= 1e-12, "projection differs from closed form by " + format_real(oracle_err));
  std::vector<Vec> near;
  while (near.size() < 1000) {
    Vec x{rng.uniform() * 8 - 4, rng.uniform() * 8 - 4};
    if (std::abs(dot(beta, x) - tau) / std::sqrt(bb) <= delta) near.push_back(x);
  }
  ScanReport s = scan_recourse(p, phi, near);
  o.require(s.violated == 0, std::to_string(s.violated) + " Violated near the boundary");
  if (o.pass) o.note << "10000 pairs 1-Lipschitz; 1000 points within delta of the boundary, 0 Violated";
}

void c7_shell(Outcome& o) {
  Substream rng(7, 0);
  for (double b : {0.5, 1.0, 2.0}) {
    RecourseProblem p(models::expnorm(b), UtilitySpec::ratio(), 2.0, 1.0);
    Evaluator phi = projection_evaluator(default_family_builder(p));
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
      double r = 0.1 + 2.9 * rng.uniform(), a = 2.0 * M_PI * rng.uniform();
      Vec x{r * std::cos(a), r * std::sin(a)};
      Vec w = phi(x);
      double c = std::log(2.0) / b;
      worst = std::max({worst, std::abs(w[0] - c * x[0] / r), std::abs(w[1] - c * x[1] / r)});
    }
    o.require(worst <= 1e-9, "b = " + format_real(b) + ": error " + format_real(worst));
    std::vector<Vec> annulus;
    for (const Vec& x : grid_2d(-3, 3, -3, 3, 61, 61))
      if (norm2(x) >= 0.1 && norm2(x) <= 3.0) annulus.push_back(x);
    JumpReport jr = continuity_probe(phi, annulus, 1e-3, 0.05);
    o.require(jr.jumps.empty(), "b = " + format_real(b) + ": " + std::to_string(jr.jumps.size()) + " jumps");
  }
  if (o.pass) o.note << "shell attribution = (ln2/b) x/|x| at 3 x 1000 points; probe clean on the annulus";
}

void c8_fixtures(Outcome& o) {
  const std::vector<Vec> grid = grid_1d(-10.0, 10.0, 10000);
  std::size_t possible = 0, impossible = 0;
  for (const auto& f : fixtures::lro_fixtures()) {
    LRO lro = lro_from_sets(f.L, f.R, f.O);
    Certificate cert = decide(lro);
    if (cert.possible != f.possible) {
      o.require(false, f.name + ": verdict");
      continue;
    }
    if (cert.possible) {
      ++possible;
      if (f.k_tilde >= 0)
        o.require(cert.index.K_tilde.size() == static_cast<std::size_t>(f.k_tilde), f.name + ": |K~|");
      o.require(check_decomposition(lro, cert.L_tilde, cert.R_tilde, cert.O_tilde), f.name + ": decomposition");
      ConstructedAttribution a = construct_attribution(cert);
      RecourseProblem p = indicator_problem(lro);
      ScanReport s = scan_recourse(p, a.evaluator(), grid);
      o.require(s.violated == 0, f.name + ": " + std::to_string(s.violated) + " Violated");
      JumpReport jr = continuity_probe(a.evaluator(), grid, 1e-4, 1e-2);
      o.require(jr.jumps.empty(), f.name + ": " + std::to_string(jr.jumps.size()) + " jumps");
    } else {
      ++impossible;
      if (!cert.witness) {
        o.require(false, f.name + ": no witness");
        continue;
      }
      const Witness& w = *cert.witness;
      IntervalSet left{w.left}, right{w.right};
      o.require(!is_separated(left, right), f.name + ": witness intervals separated");
      auto forced = [&](double x, const IntervalSet& own, const IntervalSet& other, const Interval& part) {
        return part.contains(x) && own.contains(x) && !other.contains(x) && !lro.O.contains(x);
      };
      o.require(forced(w.left_forced, lro.L, lro.R, w.left), f.name + ": left forced point");
      o.require(forced(w.right_forced, lro.R, lro.L, w.right), f.name + ": right forced point");
      bool shared = (closure(left).contains(w.shared) && right.contains(w.shared)) ||
                    (left.contains(w.shared) && closure(right).contains(w.shared));
      o.require(shared, f.name + ": shared point");
      // The forced points admit recourse in one direction only.
      RecourseProblem p = indicator_problem(lro);
      auto target = [&](double x, double y) { return p.in_target(Point(&x, 1), Point(&y, 1)); };
      o.require(target(w.left_forced, w.left_forced - 0.5) && !target(w.left_forced, w.left_forced + 0.5),
                f.name + ": left forced point not one-sided");
      o.require(target(w.right_forced, w.right_forced + 0.5) && !target(w.right_forced, w.right_forced - 0.5),
                f.name + ": right forced point not one-sided");
    }
  }
  if (o.pass) o.note << possible << " possible (phi scanned and probed on 10000 points), " << impossible
                     << " impossible with checked witnesses";
}


void c9_axes(Outcome& o) {
  for (double delta : {0.6, 1.0}) {
    RecourseProblem p(models::circle_sq(), UtilitySpec::flip(), 0.0, delta, ConstraintSpec::sparse(1));
    char tag_buf[32];
    std::snprintf(tag_buf, sizeof tag_buf, "delta %g: ", delta);
    const std::string tag = tag_buf;
    AxisRegions exact = compute_axis_regions(p, RegionRep::Exact);
    AxisRegions raster = compute_axis_regions(p, RegionRep::Raster);
    AxisCertificate ce = decide_axes(exact), cr = decide_axes(raster);
    o.require(!ce.possible && ce.witness.has_value(), tag + "exact verdict");
    o.require(!cr.possible && cr.witness.has_value(), tag + "raster verdict");
    if (!o.pass) return;
    const AxisWitness &we = *ce.witness, &wr = *cr.witness;
    const double r2 = we.point[0] * we.point[0] + we.point[1] * we.point[1];
    o.require(we.point[0] == we.point[1], tag + "exact witness off the diagonal");
    o.require(r2 > 1.0 && r2 < std::min(2.0, 2.0 * delta), tag + "|w|^2 = " + format_real(r2));
    o.require(we.first == wr.first && we.second == wr.second, tag + "raster pair " + axis_set_name(wr.first) + "/" +
                                                                 axis_set_name(wr.second));
    std::size_t cell = raster.grid.locate(we.point);
    o.require(cell != RasterSpec::npos && raster.sets[we.first][cell] && raster.sets[we.second][cell],
              tag + "exact witness not in a raster overlap cell");
    o.require(exact.member(wr.first, wr.point) && exact.member(wr.second, wr.point),
              tag + "raster witness not in both exact sets");
    if (o.pass)
      o.note << tag << axis_set_name(we.first) << "/" << axis_set_name(we.second) << " at (" << we.point[0] << ", "
             << we.point[1] << "), |w|^2 = " << r2 << "; ";
  }
  if (o.pass) o.note << "raster 400x400 agrees";
}

void c10_profpic(Outcome& o) {
  auto data = generate_dataset(DatasetConfig{});
  ExperimentReport rep = run_experiment(data, ExperimentConfig{});
  o.require(rep.threshold.accuracy == 1.0, "accuracy " + format_real(rep.threshold.accuracy));
  double ig_worst = 0.0, ig_oracle_worst = 0.0;
  std::size_t sg_diff = 0, zero_images = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const ProfileImage& img = data[i];
    const ImageOutcome& io = rep.images[i];
    Model m = contrast_model(img);
    const Vec& x = img.pixels;
    // Identities recomputed outside the experiment: SG against VG, and the
    // straight-line quadrature of IG against x_k VG(x/2)_k.
    SmoothGradConfig sg;
    sg.analytic = true;
    Vec vg = vanilla_gradient(m, x).weights;
    if (smoothgrad(m, x, sg).weights != vg) ++sg_diff;
    Vec half(x);
    for (double& v : half) v *= 0.5;
    Vec vh = vanilla_gradient(m, half).weights;
    IGConfig ig;
    ig.steps = 16;
    Vec w = integrated_gradients(m, x, ig).weights;
    for (std::size_t k = 0; k < x.size(); ++k) ig_oracle_worst = std::max(ig_oracle_worst, std::abs(w[k] - x[k] * vh[k]));
    ig_worst = std::max(ig_worst, io.ig_identity_error);
    o.require(io.sg_equals_vg, "image " + std::to_string(io.id) + ": SG != VG in the report");

    if (img.contrast != 0.0) continue;
    ++zero_images;
    o.require(io.label == Label::Rejected, "zero-contrast image " + std::to_string(io.id) + " accepted");
    for (const MethodOutcome& mo : io.methods) {
      bool gradient = mo.method == "vanilla_gradient" || mo.method == "smoothgrad" || mo.method == "integrated_gradients";
      if (gradient) o.require(mo.max_abs == 0.0, "image " + std::to_string(io.id) + ": " + mo.method + " not flat");
      o.require(mo.verdict.status != VerdictStatus::Satisfied,
                "image " + std::to_string(io.id) + ": " + mo.method + " Satisfied");
    }
  }
  o.require(sg_diff == 0, std::to_string(sg_diff) + " images with SG != VG");
  o.require(ig_worst <= 1e-10 && ig_oracle_worst <= 1e-10,
            "IG identity error " + format_real(ig_worst) + " / " + format_real(ig_oracle_worst));
  o.require(zero_images > 0, "no zero-contrast image");
  if (o.pass)
    o.note << data.size() << " images, lambda " << rep.threshold.lambda << ", accuracy 1; IG identity error "
           << std::max(ig_worst, ig_oracle_worst) << "; " << zero_images
           << " zero-contrast images flat and not Satisfied for every method";
}

struct ShapCheck {
  double route = 0.0, efficiency = 0.0;
};

ShapCheck shap_routes(const Model& m, const Vec& x, const Vec& baseline) {
  ShapConfig exact{baseline, ShapMode::Exact, 0, 0}, kernel{baseline, ShapMode::KernelExhaustive, 0, 0};
  Vec a = kernel_shap(m, x, exact).feature_values, b = kernel_shap(m, x, kernel).feature_values;
  ShapCheck c;
  double sum = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    c.route = std::max(c.route, std::abs(a[k] - b[k]));
    sum += a[k];
  }
  c.efficiency = std::abs(sum - (m(x) - m(baseline)));
  return c;
}

void c11_shap(Outcome& o) {
  Substream rng(21, 0);
  double route = 0.0, eff = 0.0, linear_oracle = 0.0;
  for (int t = 0; t < 3; ++t) {
    ProfileImage img;
    img.width = img.height = 4;
    img.person.assign(16, 0);
    for (std::size_t k : {5u, 6u, 9u, 10u, 13u, 14u}) img.person[k] = 1;
    for (std::size_t k = 0; k < 16; ++k) img.pixels.push_back(std::floor(256.0 * rng.uniform()));
    ShapCheck c = shap_routes(contrast_model(img), img.pixels, Vec(16, 0.0));
    route = std::max(route, c.route);
    eff = std::max(eff, c.efficiency);
  }
  for (std::size_t d : {1u, 3u, 7u, 10u}) {
    Vec beta, x, b;
    for (std::size_t k = 0; k < d; ++k) {
      beta.push_back(4 * rng.uniform() - 2);
      x.push_back(4 * rng.uniform() - 2);
      b.push_back(rng.uniform() - 0.5);
    }
    Model m = models::linear(beta);
    ShapCheck c = shap_routes(m, x, b);
    route = std::max(route, c.route);
    eff = std::max(eff, c.efficiency);
    Vec phi = kernel_shap(m, x, ShapConfig{b, ShapMode::Exact, 0, 0}).feature_values;
    for (std::size_t k = 0; k < d; ++k) linear_oracle = std::max(linear_oracle, std::abs(phi[k] - beta[k] * (x[k] - b[k])));
  }
  o.require(route <= 1e-8, "exact vs kernel " + format_real(route));
  o.require(eff <= 1e-10, "efficiency " + format_real(eff));
  o.require(linear_oracle <= 1e-12, "linear closed form " + format_real(linear_oracle));
  if (o.pass)
    o.note << "exact vs kernel " << route << ", efficiency " << eff << " (4x4 images, linear d <= 10)";
}

void c12_determinism(Outcome& o) {
  const fs::path cfg = kWork / "profpic.toml";
  std::ofstream(cfg) << "seed = 3\n\n[profpic]\nrender = false\n";
  const std::vector<std::pair<std::string, std::string>> runs = {
      {"scan1d", "scan1d --model notch --utility diff --tau 0.6 --delta 1 --mode sampled"},
      {"lime", "attribute --model linear --param beta=1,2,3 --method lime --x 1,-1,2 --seed 5"},
      {"smoothgrad", "verify --model quad --method sg --report-only --seed 9"},
      {"probe", "probe --model circle --utility class --tau 0 --delta 1 --method projection"},
      {"battery", "battery"},
      {"axes", "axes --model circle_sq --utility flip --tau 0 --delta 1 --constraint sparse:1"},
      {"profpic", "profpic run --config " + cfg.string()},
  };
  std::size_t compared = 0;
  for (const auto& [name, args] : runs) {
    fs::path a = kWork / "repeat" / (name + "_a"), b = kWork / "repeat" / (name + "_b");
    int ra = run_cli(args + " --out " + a.string(), kWork / (name + "_a.log"));
    int rb = run_cli(args + " --out " + b.string(), kWork / (name + "_b.log"));
    o.require(ra == 0 && rb == 0, name + ": exit " + std::to_string(ra) + "/" + std::to_string(rb));
    if (ra != 0 || rb != 0) continue;
    std::size_t files = 0;
    for (const auto& e : fs::recursive_directory_iterator(a)) {
      std::string ext = e.path().extension().string();
      if (ext != ".json" && ext != ".csv") continue;
      ++files;
      fs::path other = b / fs::relative(e.path(), a);
      o.require(fs::exists(other) && slurp(e.path()) == slurp(other), name + ": " + e.path().filename().string() + " differs");
    }
    o.require(files > 0, name + ": no artifacts");
    compared += files;
  }
  if (o.pass) o.note << compared << " JSON/CSV artifacts byte-identical across " << runs.size() << " repeated runs";
}

}  // namespace

int main() {
  fs::remove_all(kWork);
  fs::create_directories(kWork);
  const std::vector<std::pair<int, std::function<void(Outcome&)>>> criteria = {
      {1, c1_quad_overlap}, {2, c2_thm1},     {3, c3_example1}, {4, c4_example2},   {5, c5_example3},
      {6, c6_halfspace},    {7, c7_shell},    {8, c8_fixtures}, {9, c9_axes},       {10, c10_profpic},
      {11, c11_shap},       {12, c12_determinism},
  };
  int failed = 0;
  for (const auto& [id, fn] : criteria) {
    Outcome o;
    auto t0 = std::chrono::steady_clock::now();
    try {
      fn(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %2d: %s  (%.1fs)  %s\n", id, o.pass ? "PASS" : "FAIL", secs, o.note.str().c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
