// recourse: command-line front end.
//
//   recourse scan1d    1D L/R/O sets, decision certificate, constructed phi
//   recourse attribute one attribution at a point
//   recourse verify    recourse-sensitivity verdicts over a grid
//   recourse probe     continuity probe over a grid
//   recourse battery   named counterexample claims
//   recourse axes      single-feature decision in d dimensions
//   recourse profpic   generate | run | report
//
// Exit codes: 0 ok, 1 usage, 2 claim failure, 3 numeric error.

#include <CLI11.hpp>
#include <json.hpp>
#include <toml.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "recourse/attributions.hpp"
#include "recourse/image_io.hpp"
#include "recourse/intervals.hpp"
#include "recourse/models.hpp"
#include "recourse/multidim.hpp"
#include "recourse/onedim.hpp"
#include "recourse/profpic.hpp"
#include "recourse/verify.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace recourse;

namespace {

constexpr int kExitOk = 0, kExitUsage = 1, kExitClaim = 2, kExitNumeric = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::uint64_t fnv1a(const std::string& s, std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

// ---------------------------------------------------------------------------
// Run configuration: defaults, then the TOML file, then flags.
// ---------------------------------------------------------------------------

json default_config() {
  return json::parse(R"({
    "problem": {"model": "quad", "params": {}, "beta": [], "utility": "diff", "tau": 1.0, "delta": 2.0,
                "constraint": "full"},
    "method": {"name": "vg", "x": [], "baseline": [], "sigma": 0.1, "samples": 1000, "steps": 512,
               "analytic": false, "kernel_width": 5.0, "lime_samples": 2000, "shap_mode": "exact",
               "coalitions": 2048},
    "grid": {"lo": -5.0, "hi": 5.0, "step": 0.001, "n": 101, "pair_step": 0.001, "threshold": 0.5},
    "onedim": {"mode": "exact"},
    "raster": {"lo": -2.0, "hi": 2.0, "n": 400, "representation": "raster"},
    "profpic": {"n": 53, "width": 64, "height": 64, "cutoff": 60.0, "block": 8, "delta": 0.0,
                "levels": [0, 24, 32, 40, 48, 56, 72, 80, 88, 96, 112, 128], "render": true},
    "seed": 0,
    "threads": 0
  })");
}

json toml_to_json(const toml::node& n, const std::string& where) {
  if (auto t = n.as_table()) {
    json j = json::object();
    for (auto&& [k, v] : *t) j[std::string(k.str())] = toml_to_json(v, where + "." + std::string(k.str()));
    return j;
  }
  if (auto a = n.as_array()) {
    json j = json::array();
    for (auto&& v : *a) j.push_back(toml_to_json(v, where));
    return j;
  }
  if (auto v = n.as_string()) return v->get();
  if (auto v = n.as_integer()) return v->get();
  if (auto v = n.as_floating_point()) return v->get();
  if (auto v = n.as_boolean()) return v->get();
  throw UsageError("unsupported TOML value at " + where);
}

// Overlay `over` onto `base`, rejecting unknown keys and type changes.
void overlay(json& base, const json& over, const std::string& where) {
  for (auto it = over.begin(); it != over.end(); ++it) {
    std::string path = where.empty() ? it.key() : where + "." + it.key();
    if (!base.contains(it.key())) throw UsageError("unknown config field '" + path + "'");
    json& b = base[it.key()];
    if (b.is_object() && it->is_object() && path != "problem.params") {
      overlay(b, *it, path);
      continue;
    }
    bool num_ok = b.is_number() && it->is_number();
    if (!num_ok && b.type() != it->type() && !b.is_null())
      throw UsageError("config field '" + path + "' has the wrong type");
    b = *it;
  }
}

json load_config(const std::string& path) {
  json cfg = default_config();
  if (path.empty()) return cfg;
  toml::table tbl;
  try {
    tbl = toml::parse_file(path);
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << path << ":" << e.source().begin.line << ":" << e.source().begin.column << ": " << e.description();
    throw UsageError(os.str());
  }
  overlay(cfg, toml_to_json(tbl, ""), "");
  return cfg;
}

Vec parse_vec(const std::string& s) {
  Vec v;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    try {
      std::size_t used = 0;
      v.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw UsageError("not a number: '" + tok + "'");
    }
  }
  return v;
}

Vec json_vec(const json& j) {
  Vec v;
  for (const auto& e : j) v.push_back(e.get<double>());
  return v;
}

ConstraintSpec parse_constraint(const std::string& s) {
  if (s == "full") return ConstraintSpec::full();
  if (s.rfind("sparse:", 0) == 0) return ConstraintSpec::sparse(static_cast<std::size_t>(std::stoul(s.substr(7))));
  throw UsageError("constraint must be 'full' or 'sparse:K', got '" + s + "'");
}

Model make_model(const json& cfg) {
  const json& p = cfg["problem"];
  ModelParams mp;
  for (auto it = p["params"].begin(); it != p["params"].end(); ++it) {
    if (!it->is_number()) throw UsageError("problem.params." + it.key() + " must be a number");
    mp.values[it.key()] = it->get<double>();
  }
  mp.beta = json_vec(p["beta"]);
  std::string key = p["model"];
  if (!builtin_models().contains(key)) throw UsageError("unknown model '" + key + "'");
  return builtin_models().make(key, mp);
}

RecourseProblem make_problem(const json& cfg) {
  const json& p = cfg["problem"];
  UtilitySpec u;
  try {
    u = utility_from_name(p["utility"]);
  } catch (const ConfigError& e) {
    throw UsageError(e.what());
  }
  return RecourseProblem(make_model(cfg), u, p["tau"].get<double>(), p["delta"].get<double>(),
                         parse_constraint(p["constraint"]));
}

Vec point_or_zero(const json& j, std::size_t d) {
  Vec v = json_vec(j);
  if (v.empty()) v.assign(d, 0.0);
  if (v.size() != d) throw UsageError("point has " + std::to_string(v.size()) + " coordinates, model needs " +
                                      std::to_string(d));
  return v;
}

ShapMode shap_mode(const std::string& s) {
  if (s == "exact") return ShapMode::Exact;
  if (s == "kernel") return ShapMode::KernelExhaustive;
  if (s == "sampled") return ShapMode::Sampled;
  throw UsageError("shap mode must be exact, kernel or sampled");
}

// Attribution evaluator for a method name.
Evaluator make_evaluator(const std::string& name, const json& cfg, const RecourseProblem& problem, Exec exec) {
  const Model& m = problem.model();
  const json& mc = cfg["method"];
  const std::uint64_t seed = cfg["seed"].get<std::uint64_t>();
  if (name == "vg") return [m](Point x) { return vanilla_gradient(m, x).weights; };
  if (name == "sg") {
    SmoothGradConfig c;
    c.sigma = mc["sigma"];
    c.samples = mc["samples"];
    c.analytic = mc["analytic"];
    c.seed = seed;
    return [m, c, exec](Point x) { return smoothgrad(m, x, c, exec).weights; };
  }
  if (name == "ig") {
    IGConfig c;
    c.baseline = json_vec(mc["baseline"]);
    c.steps = mc["steps"];
    c.analytic = mc["analytic"];
    return [m, c](Point x) { return integrated_gradients(m, x, c).weights; };
  }
  if (name == "lime") {
    LimeConfig c;
    c.samples = mc["lime_samples"];
    c.kernel_width = mc["kernel_width"];
    c.seed = seed;
    std::vector<int> seg(m.dim);
    for (std::size_t k = 0; k < m.dim; ++k) seg[k] = static_cast<int>(k);
    return [m, c, seg, exec](Point x) { return lime(m, x, seg, c, exec).pixels.weights; };
  }
  if (name == "shap") {
    ShapConfig c;
    c.baseline = json_vec(mc["baseline"]);
    c.mode = shap_mode(mc["shap_mode"]);
    c.coalitions = mc["coalitions"];
    c.seed = seed;
    return [m, c, exec](Point x) { return kernel_shap(m, x, c, {}, exec).pixels.weights; };
  }
  if (name == "projection") return projection_evaluator(default_family_builder(problem));
  if (name == "zero") return [d = m.dim](Point) { return Vec(d, 0.0); };
  if (name == "constructed") {
    if (m.dim != 1) throw UsageError("the constructed attribution is one-dimensional");
    Certificate cert = decide(compute_lro(problem, LroMode::Exact), exec);
    if (!cert.possible) throw UsageError("no continuous recourse-sensitive attribution exists for this problem");
    return construct_attribution(cert).evaluator();
  }
  throw UsageError("unknown method '" + name + "' (vg, sg, ig, lime, shap, projection, zero, constructed)");
}

// Piecewise-linear phi from a two-column CSV (x, phi), clamped at the ends.
Evaluator csv_evaluator(const std::string& path, std::string* content) {
  std::ifstream is(path);
  if (!is) throw UsageError("cannot read " + path);
  std::vector<std::pair<double, double>> pts;
  std::string line;
  std::size_t lineno = 0;
  std::ostringstream all;
  while (std::getline(is, line)) {
    ++lineno;
    all << line << "\n";
    if (line.empty() || line[0] == '#' || line.rfind("x,", 0) == 0) continue;
    Vec v = parse_vec(line);
    if (v.size() != 2) throw UsageError(path + ":" + std::to_string(lineno) + ": expected two columns");
    pts.emplace_back(v[0], v[1]);
  }
  if (pts.size() < 2) throw UsageError(path + ": need at least two samples");
  std::sort(pts.begin(), pts.end());
  *content = all.str();
  return [pts](Point x) {
    double t = x[0];
    if (t <= pts.front().first) return Vec{pts.front().second};
    if (t >= pts.back().first) return Vec{pts.back().second};
    auto it = std::lower_bound(pts.begin(), pts.end(), std::make_pair(t, -kInf));
    auto a = *(it - 1), b = *it;
    double w = (t - a.first) / (b.first - a.first);
    return Vec{a.second + w * (b.second - a.second)};
  };
}

std::vector<Vec> make_grid(const json& cfg, std::size_t d) {
  const json& g = cfg["grid"];
  double lo = g["lo"], hi = g["hi"];
  std::size_t n = g["n"];
  if (n < 2 || !(hi > lo)) throw UsageError("grid needs n >= 2 and hi > lo");
  if (d == 1) return grid_1d(lo, hi, n);
  if (d == 2) return grid_2d(lo, hi, lo, hi, n, n);
  throw UsageError("grids are built for one or two dimensions");
}

// ---------------------------------------------------------------------------
// Output
// ---------------------------------------------------------------------------

struct Output {
  fs::path dir;
  json config;
  std::string hash;

  void json_file(const std::string& name, json body) const {
    body["config"] = config;
    body["input_hash"] = hash;
    write(name, body.dump(2) + "\n");
  }
  void csv_file(const std::string& name, const std::string& header, const std::vector<Vec>& rows) const {
    std::ostringstream os;
    os << "# config " << config.dump() << "\n# input_hash " << hash << "\n" << header << "\n";
    os << std::setprecision(17);
    for (const auto& r : rows) {
      for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
      os << "\n";
    }
    write(name, os.str());
  }
  void write(const std::string& name, const std::string& body) const {
    fs::create_directories(dir);
    std::ofstream os(dir / name, std::ios::binary);
    if (!os) throw IoError("cannot write " + (dir / name).string());
    os << body;
  }
};

Output make_output(const std::string& dir, const json& cfg, const std::string& extra = {}) {
  return Output{dir, cfg, hex64(fnv1a(extra, fnv1a(cfg.dump())))};
}

Exec exec_of(const json& cfg) { return cfg["threads"].get<int>() == 1 ? Exec::Serial : Exec::Parallel; }

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

int cmd_scan1d(const json& cfg, const std::string& out, bool expect_possible) {
  RecourseProblem p = make_problem(cfg);
  if (p.dim() != 1) throw UsageError("scan1d needs a one-dimensional model");
  LroMode mode = cfg["onedim"]["mode"] == "sampled" ? LroMode::Sampled : LroMode::Exact;
  if (cfg["onedim"]["mode"] != "sampled" && cfg["onedim"]["mode"] != "exact")
    throw UsageError("onedim.mode must be exact or sampled");
  SampleGrid sg{cfg["grid"]["lo"], cfg["grid"]["hi"], cfg["grid"]["step"]};
  Exec exec = exec_of(cfg);
  LRO lro = compute_lro(p, mode, sg, exec);
  Output o = make_output(out, cfg);
  o.json_file("lro.json", to_json(lro));
  Certificate cert = decide(lro, exec);
  o.json_file("certificate.json", to_json(cert));
  std::cout << "verdict: " << (cert.possible ? "possible" : "impossible") << "\n";
  if (cert.possible) {
    ConstructedAttribution phi = construct_attribution(cert);
    std::vector<Vec> rows;
    for (const Vec& x : grid_1d(sg.lo, sg.hi, static_cast<std::size_t>(cfg["grid"]["n"]))) rows.push_back({x[0], phi(x[0])});
    o.csv_file("phi.csv", "x,phi", rows);
  } else if (cert.witness) {
    std::cout << "witness: " << to_string(cert.witness->left) << " and " << to_string(cert.witness->right)
              << " share " << format_real(cert.witness->shared) << "\n";
  }
  return (expect_possible && !cert.possible) ? kExitClaim : kExitOk;
}

int cmd_attribute(const json& cfg, const std::string& out) {
  RecourseProblem p = make_problem(cfg);
  Vec x = point_or_zero(cfg["method"]["x"], p.dim());
  std::string name = cfg["method"]["name"];
  Vec w = make_evaluator(name, cfg, p, exec_of(cfg))(x);
  std::vector<Vec> rows;
  for (std::size_t k = 0; k < w.size(); ++k) rows.push_back({static_cast<double>(k), x[k], w[k]});
  make_output(out, cfg).csv_file("attribution.csv", "feature,x,weight", rows);
  std::cout << std::setprecision(12);
  for (double v : w) std::cout << v << "\n";
  return kExitOk;
}

int cmd_verify(const json& cfg, const std::string& out, const std::string& phi_csv, bool report_only) {
  RecourseProblem p = make_problem(cfg);
  std::string content;
  Evaluator phi = phi_csv.empty() ? make_evaluator(cfg["method"]["name"], cfg, p, exec_of(cfg))
                                  : csv_evaluator(phi_csv, &content);
  if (!phi_csv.empty() && p.dim() != 1) throw UsageError("--phi takes one-dimensional samples");
  std::vector<Vec> grid = make_grid(cfg, p.dim());
  ScanReport r = scan_recourse(p, phi, grid, {}, exec_of(cfg));
  make_output(out, cfg, content).json_file("verdicts.json", to_json(r));
  std::cout << "satisfied " << r.satisfied << ", violated " << r.violated << ", vacuous " << r.vacuous << " of "
            << r.total << "\n";
  return (r.violated > 0 && !report_only) ? kExitClaim : kExitOk;
}

int cmd_probe(const json& cfg, const std::string& out) {
  RecourseProblem p = make_problem(cfg);
  Evaluator phi = make_evaluator(cfg["method"]["name"], cfg, p, exec_of(cfg));
  JumpReport r = continuity_probe(phi, make_grid(cfg, p.dim()), cfg["grid"]["pair_step"],
                                  cfg["grid"]["threshold"], exec_of(cfg));
  make_output(out, cfg).json_file("jumps.json", to_json(r));
  std::cout << r.jumps.size() << " jumps, " << r.discontinuities() << " discontinuity candidates over " << r.pairs
            << " pairs\n";
  return kExitOk;
}

int cmd_battery(const json& cfg, const std::string& out) {
  BatteryReport r = run_counterexample_battery(exec_of(cfg));
  Output o = make_output(out, cfg);
  o.json_file("battery.json", to_json(r));
  o.write("battery.txt", battery_table(r));
  std::cout << battery_table(r);
  return r.all_passed() ? kExitOk : kExitClaim;
}

int cmd_axes(const json& cfg, const std::string& out) {
  RecourseProblem p = make_problem(cfg);
  const json& rc = cfg["raster"];
  std::string rep_s = rc["representation"];
  if (rep_s != "exact" && rep_s != "raster") throw UsageError("raster.representation must be exact or raster");
  RegionRep rep = rep_s == "exact" ? RegionRep::Exact : RegionRep::Raster;
  RasterSpec spec;
  const std::size_t d = p.dim();
  spec.lo.assign(d, rc["lo"].get<double>());
  spec.hi.assign(d, rc["hi"].get<double>());
  spec.n.assign(d, rc["n"].get<std::size_t>());
  AxisRegions regions = compute_axis_regions(p, rep, spec, exec_of(cfg));
  AxisCertificate cert = decide_axes(regions, exec_of(cfg));
  Output o = make_output(out, cfg);
  o.json_file("axes.json", to_json(cert, regions));
  std::cout << "verdict: " << (cert.possible ? "possible" : "impossible") << "\n";
  if (cert.witness)
    std::cout << "witness: " << axis_set_name(cert.witness->first) << " / " << axis_set_name(cert.witness->second)
              << " at (" << cert.witness->point[0] << ", " << cert.witness->point[1] << ")\n";
  if (rep == RegionRep::Raster && d == 2) {
    fs::create_directories(o.dir);
    for (std::size_t s = 0; s < regions.sets.size(); ++s)
      write_pgm((o.dir / (axis_set_name(s) + ".pgm")).string(), regions.sets[s], regions.grid);
    write_pgm((o.dir / "O.pgm").string(), regions.O, regions.grid);
    if (cert.possible) {
      AxesAttribution a = construct_axes_attribution(cert, regions);
      for (std::size_t s = 0; s < cert.assigned.size(); ++s)
        write_pgm((o.dir / (axis_set_name(s) + "_tilde.pgm")).string(), cert.assigned[s], regions.grid);
      std::vector<Vec> rows;
      for (const Vec& x : make_grid(cfg, 2)) {
        Vec w = a(x);
        rows.push_back({x[0], x[1], w[0], w[1]});
      }
      o.csv_file("phi.csv", "x1,x2,phi1,phi2", rows);
    }
  }
  return kExitOk;
}

DatasetConfig dataset_config(const json& cfg) {
  const json& pc = cfg["profpic"];
  DatasetConfig dc;
  dc.n = pc["n"];
  dc.width = pc["width"];
  dc.height = pc["height"];
  dc.cutoff = pc["cutoff"];
  dc.contrast_levels = json_vec(pc["levels"]);
  dc.seed = cfg["seed"];
  return dc;
}

int cmd_profpic(const std::string& sub, const json& cfg, const std::string& out) {
  DatasetConfig dc = dataset_config(cfg);
  Output o = make_output(out, cfg);
  auto data = generate_dataset(dc);
  if (sub == "generate") {
    o.json_file("manifest.json", manifest(data, dc));
    fs::create_directories(o.dir / "images");
    for (const auto& img : data)
      write_png((o.dir / "images" / ("image_" + std::to_string(img.id) + ".png")).string(), gray_image(img));
    std::cout << data.size() << " images written\n";
    return kExitOk;
  }
  ExperimentConfig ec;
  ec.delta = cfg["profpic"]["delta"];
  ec.block = cfg["profpic"]["block"];
  ec.seed = cfg["seed"];
  ec.lime.samples = cfg["method"]["lime_samples"];
  ec.lime.kernel_width = cfg["method"]["kernel_width"];
  ec.shap.coalitions = cfg["method"]["coalitions"];
  ExperimentReport rep = run_experiment(data, ec, exec_of(cfg));
  if (sub == "run") {
    o.json_file("report.json", to_json(rep));
    o.write("report.md", markdown_table(rep));
    if (cfg["profpic"]["render"].get<bool>()) {
      fs::create_directories(o.dir / "saliency");
      for (const auto& io : rep.images)
        for (const auto& mo : io.methods)
          render_saliency(mo.weights, dc.width, dc.height,
                          (o.dir / "saliency" / ("image_" + std::to_string(io.id) + "_" + mo.method)).string());
    }
    std::cout << "lambda " << rep.threshold.lambda << ", accuracy " << rep.threshold.accuracy << "\n";
    return kExitOk;
  }
  if (sub == "report") {
    std::cout << markdown_table(rep);
    return kExitOk;
  }
  throw UsageError("profpic subcommand must be generate, run or report");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Recourse-sensitivity analysis of feature attributions"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path, out_dir = "out";
  int threads = -1;
  long long seed = -1;
  app.add_option("--config", config_path, "TOML run configuration")->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--threads", threads, "Worker threads (1 selects the serial kernels)");
  app.add_option("--seed", seed, "Seed for every sampled method");

  // Problem overrides shared by the analysis commands.
  std::string model, utility, constraint, method, x, baseline, phi_csv, mode, rep;
  double tau = NAN, delta = NAN;
  bool report_only = false, expect_possible = false;
  std::vector<std::string> params;
  auto problem_flags = [&](CLI::App* c) {
    c->add_option("--model", model, "Model registry key");
    c->add_option("--param", params, "Model parameter key=value (repeatable)");
    c->add_option("--utility", utility, "class | diff | ratio | ratio_inv | flip");
    c->add_option("--tau", tau, "Utility threshold");
    c->add_option("--delta", delta, "Distance budget");
    c->add_option("--constraint", constraint, "full | sparse:K");
  };
  auto method_flags = [&](CLI::App* c) {
    c->add_option("--method", method, "vg | sg | ig | lime | shap | projection | zero | constructed");
    c->add_option("--x", x, "Point, comma separated");
    c->add_option("--baseline", baseline, "Baseline, comma separated");
  };
  auto* scan1d = app.add_subcommand("scan1d", "L/R/O sets, certificate and constructed phi in 1D");
  problem_flags(scan1d);
  scan1d->add_option("--mode", mode, "exact | sampled");
  scan1d->add_flag("--expect-possible", expect_possible, "Exit 2 when the verdict is Impossible");
  auto* attribute = app.add_subcommand("attribute", "One attribution at a point");
  problem_flags(attribute);
  method_flags(attribute);
  auto* verify = app.add_subcommand("verify", "Recourse-sensitivity verdicts over a grid");
  problem_flags(verify);
  method_flags(verify);
  verify->add_option("--phi", phi_csv, "Attribution samples (x,phi CSV) instead of a method");
  verify->add_flag("--report-only", report_only, "Exit 0 even when verdicts are Violated");
  auto* probe = app.add_subcommand("probe", "Continuity probe over a grid");
  problem_flags(probe);
  method_flags(probe);
  auto* battery = app.add_subcommand("battery", "Named counterexample claims");
  auto* axes = app.add_subcommand("axes", "Single-feature decision in d dimensions");
  problem_flags(axes);
  axes->add_option("--representation", rep, "exact | raster");
  auto* profpic = app.add_subcommand("profpic", "Synthetic profile-picture experiment");
  std::string profpic_sub;
  profpic->add_option("stage", profpic_sub, "generate | run | report")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    json cfg = load_config(config_path);
    json& pr = cfg["problem"];
    if (!model.empty()) pr["model"] = model;
    if (!utility.empty()) pr["utility"] = utility;
    if (!constraint.empty()) pr["constraint"] = constraint;
    if (!std::isnan(tau)) pr["tau"] = tau;
    if (!std::isnan(delta)) pr["delta"] = delta;
    for (const auto& kv : params) {
      auto eq = kv.find('=');
      if (eq == std::string::npos) throw UsageError("--param expects key=value, got '" + kv + "'");
      std::string key = kv.substr(0, eq);
      Vec v = parse_vec(kv.substr(eq + 1));
      if (key == "beta") {
        pr["beta"] = v;
      } else {
        if (v.size() != 1) throw UsageError("--param " + key + " takes one number");
        pr["params"][key] = v[0];
      }
    }
    if (!method.empty()) cfg["method"]["name"] = method;
    if (!x.empty()) cfg["method"]["x"] = parse_vec(x);
    if (!baseline.empty()) cfg["method"]["baseline"] = parse_vec(baseline);
    if (!mode.empty()) cfg["onedim"]["mode"] = mode;
    if (!rep.empty()) cfg["raster"]["representation"] = rep;
    if (threads >= 0) cfg["threads"] = threads;
    if (seed >= 0) cfg["seed"] = seed;
    set_thread_count(cfg["threads"].get<int>());

    if (*scan1d) return cmd_scan1d(cfg, out_dir, expect_possible);
    if (*attribute) return cmd_attribute(cfg, out_dir);
    if (*verify) return cmd_verify(cfg, out_dir, phi_csv, report_only);
    if (*probe) return cmd_probe(cfg, out_dir);
    if (*battery) return cmd_battery(cfg, out_dir);
    if (*axes) return cmd_axes(cfg, out_dir);
    if (*profpic) return cmd_profpic(profpic_sub, cfg, out_dir);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const RecourseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
  return kExitUsage;
}
